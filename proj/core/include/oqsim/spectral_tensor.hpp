#pragma once

// Bath spectral data: for each transition frequency omega a channel-space
// decay-rate matrix gamma(omega) and a frequency-shift matrix S(omega),
// together with the inverse bath temperature (beta = +infinity encodes the
// zero-temperature restriction gamma(omega < 0) = 0).

#include <limits>
#include <utility>
#include <vector>

#include "oqsim/operator_algebra.hpp"

namespace oqsim {

struct SpectralEntry {
  double omega = 0.0;
  Matrix gamma;  // Hermitian, PSD for physical baths
  Matrix lamb;   // S(omega), Hermitian; generates the Lamb-type shift
};

struct SpectralTensor {
  // Ascending in omega; frequencies are pairwise distinct.
  std::vector<SpectralEntry> entries;
  double beta = std::numeric_limits<double>::infinity();

  bool zero_temperature() const { return std::isinf(beta) && beta > 0.0; }
  int channel_count() const {
    return entries.empty() ? 0 : int(entries.front().gamma.rows());
  }
  // Entry whose omega is nearest to omega within tol, else nullptr.
  const SpectralEntry* find(double omega, double tol) const;
};

// Sorts entries, fills missing gamma/lamb blocks with zeros, and checks that
// all blocks are square with one common channel count and that frequencies
// are distinct beyond tol.
SpectralTensor make_spectral_tensor(std::vector<SpectralEntry> entries,
                                    double beta = std::numeric_limits<double>::infinity(),
                                    double tol = 1e-12);

// Builds the tensor from one-sided reservoir transforms: for each (omega, G)
//   gamma(omega) = G + G^dagger,   S(omega) = (G - G^dagger) / (2i).
// Rejects gamma blocks with an eigenvalue below -1e-10 as unphysical.
SpectralTensor gamma_from_halfline(const std::vector<std::pair<double, Matrix>>& halfline,
                                   double beta = std::numeric_limits<double>::infinity());

// Removes every dissipative block at omega < 0 and marks beta infinite.
// Shift blocks S(omega) are kept at all frequencies. Idempotent.
SpectralTensor restrict_zero_temperature(SpectralTensor t);

// Max violation over channels and omega > 0 of the thermal relation
//   gamma(omega) = e^{beta omega} gamma(-omega),
// measured as max |gamma(omega) - e^{beta omega} gamma(-omega)|; missing
// partners count as zero. Returns 0 for zero-temperature tensors by
// convention (their balance statement is gamma(omega<0) = 0, enforced
// elsewhere).
double check_detailed_balance(const SpectralTensor& t, double beta, double tol = 1e-9);

struct TensorHealth {
  double gamma_hermiticity = 0.0;   // worst ||gamma - gamma^dagger||_max
  double lamb_hermiticity = 0.0;    // worst ||S - S^dagger||_max
  double min_gamma_eigenvalue = 0.0;
  // Largest |gamma| entry sitting at omega < 0 (must vanish at T=0).
  double negative_frequency_gamma = 0.0;
  // Largest |gamma| entry at omega = 0 (harmless for the oracle, rejected by
  // the sector solver and the jump unraveling).
  double zero_frequency_gamma = 0.0;
};

TensorHealth check_spectral_tensor(const SpectralTensor& t);

// Throws std::invalid_argument when blocks are malformed: non-Hermitian
// gamma/S beyond 1e-10, gamma eigenvalue below -1e-10, or (for
// zero-temperature tensors) any dissipative weight at omega < 0.
void require_valid_tensor(const SpectralTensor& t, int expected_channels = -1);

}  // namespace oqsim
