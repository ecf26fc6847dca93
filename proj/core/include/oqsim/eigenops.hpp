#pragma once

// Frequency-resolved decomposition of coupling operators with respect to a
// Hermitian system Hamiltonian. For each distinct eigenvalue gap omega =
// energy(col) - energy(row) the piece
//
//     A_c(omega) = sum over sector pairs  P_row A_c P_col
//
// satisfies (relative to the clustered spectrum):
//   [H, A_c(omega)] = -omega A_c(omega)
//   A_c(omega)^dagger = A_c(-omega)
//   sum over omega of A_c(omega) = A_c
//
// Positive omega therefore lowers the system energy by omega.

#include <utility>
#include <vector>

#include "oqsim/operator_algebra.hpp"

namespace oqsim {

struct BohrFrequencyGroup {
  double omega = 0.0;
  // (row_sector, col_sector) index pairs into Spectrum: the piece at this
  // frequency is P_row A P_col with energies[col] - energies[row] = omega.
  std::vector<std::pair<int, int>> sector_pairs;
};

struct BohrDecomposition {
  Spectrum spectrum;
  std::vector<Matrix> couplings;
  double freq_tol = 0.0;

  // Ascending, symmetric under negation, always contains omega = 0.
  std::vector<BohrFrequencyGroup> frequencies;

  // ops[c][f]: eigenoperator of channel c at frequencies[f].omega. Pieces
  // with max-norm below 1e-13 are stored as empty matrices; the frequency
  // list itself stays complete.
  std::vector<std::vector<Matrix>> ops;

  int channel_count() const { return int(couplings.size()); }
  int frequency_count() const { return int(frequencies.size()); }
  bool has_op(int channel, int f) const { return ops[size_t(channel)][size_t(f)].size() != 0; }
  const Matrix& op(int channel, int f) const { return ops[size_t(channel)][size_t(f)]; }

  // Index of the frequency matching omega within tol (the decomposition's
  // freq_tol when tol < 0); -1 when absent.
  int index_of(double omega, double tol = -1.0) const;
  // Index of -omega; exact by construction.
  int adjoint_index(int f) const { return frequency_count() - 1 - f; }
};

// Decomposes each coupling operator into eigenoperators of h_sys. Gaps closer
// than freq_tol merge into one frequency (default 1e-8 * max(spectral range,
// 1)). Couplings must be Hermitian: the weak-coupling derivation assumes the
// system side of each reservoir interaction is self-adjoint, and the adjoint
// pairing A(omega)^dag = A(-omega) relies on it.
BohrDecomposition decompose(const Matrix& h_sys, const std::vector<Matrix>& couplings,
                            double freq_tol = -1.0);
BohrDecomposition decompose(const Spectrum& spectrum, const std::vector<Matrix>& couplings,
                            double freq_tol = -1.0);

struct AlgebraReport {
  double construction = 0.0;   // piece vs projector sandwich recomputation
  double commutator = 0.0;     // ||[H, A(omega)] + omega A(omega)||_max
  double adjoint = 0.0;        // ||A(omega)^dagger - A(-omega)||_max
  double completeness = 0.0;   // ||sum_omega A(omega) - A||_max

  double worst() const;
};

// Re-derives all four defining identities from scratch; every bound is taken
// against the clustered Hamiltonian sum_k energy_k P_k.
AlgebraReport verify_algebra(const BohrDecomposition& d);

}  // namespace oqsim
