#pragma once

// Sector-cascade solver. At zero bath temperature the generator is block
// lower-triangular over energy-sector pairs: the block rho^(m,n) = P_m rho P_n
// obeys
//
//   d rho^(m,n) / dt = -i ( B rho^(m,n) - rho^(m,n) B^dagger )
//       + sum_{omega>0,a,b} gamma_ab(omega) A_b(omega) rho^(m',n') A_a(omega)^dagger
//
// with B = H_0 - (i/2) H', H' = sum_{omega>0,a,b} gamma_ab(omega)
// A_a(omega)^dagger A_b(omega), and (m',n') the pair lying exactly omega above
// (m,n). Solving top-down turns the master equation into a finite cascade of
// linear blocks; diagonal-block traces are the jump-count weights of the
// associated piecewise deterministic process.
//
// Blocks are stored in compact sector coordinates: X_mn = V_m^dagger rho V_n
// with V_m the eigenbasis of sector m, so degenerate levels keep interior
// coherence while the stacked state stays as small as possible.

#include <utility>
#include <vector>

#include "oqsim/eigenops.hpp"
#include "oqsim/spectral_tensor.hpp"

namespace oqsim {

struct SectorBlocks {
  Spectrum spectrum;
  // Pairs (m, n) of sector indices carrying weight, descending in
  // energy(m) + energy(n); compact[p] = V_m^dagger rho V_n.
  std::vector<std::pair<int, int>> pairs;
  std::vector<Matrix> compact;
  // Sector index when the state is confined to a single diagonal pair
  // (the jump-count reference point), else -1.
  int initial_sector = -1;

  Matrix reassemble() const;
};

// Splits rho0 into sector-pair blocks; blocks with max-norm below 1e-13 are
// dropped. Reassembly of the kept blocks reproduces rho0 up to the dropped
// weight.
SectorBlocks sector_split(const Matrix& rho0, const Spectrum& s);

struct EffectiveGenerator {
  Matrix h0;       // Hermitian part of the drift (system + shift by choice)
  Matrix h_prime;  // total decay operator, Hermitian PSD
  Matrix b;        // h0 - (i/2) h_prime
};

// Builds B = H0 - (i/2) H'. Requires a zero-temperature tensor whose
// dissipative weight sits strictly at omega > 0, and an H0 that preserves the
// energy sectors.
EffectiveGenerator effective_generator(const Matrix& h0, const SpectralTensor& t,
                                       const BohrDecomposition& d);

struct SectorSolution {
  Spectrum spectrum;
  std::vector<double> times;
  // Active pairs in cascade order (descending energy sum, feeders first).
  std::vector<std::pair<int, int>> pairs;
  // compact[time][pair]; same coordinates as SectorBlocks.
  std::vector<std::vector<Matrix>> compact;
  int initial_sector = -1;
  // weights[time][k] = trace of the diagonal block k sectors below the
  // initial one; empty when initial_sector < 0.
  std::vector<std::vector<double>> weights;

  int pair_index(int m, int n) const;
  // Distinct sector energies appearing among the active pairs, descending.
  std::vector<double> sector_energies() const;
  // Block embedded back into the full space: V_m X V_n^dagger.
  Matrix block(size_t t_index, int p) const;
  Matrix reassemble(size_t t_index) const;
};

// Integrates the cascade over the requested times (non-negative ascending;
// blocks referenced to t = 0) as one stacked linear ODE system, reusing the
// adaptive integrator. The feeding topology is derived exactly from the
// decomposition's sector pairs; a feed that fails to lower the energy sum
// signals a selection-rule bug and aborts.
SectorSolution cascade_solve(const SectorBlocks& init, const EffectiveGenerator& gen,
                             const SpectralTensor& t, const BohrDecomposition& d,
                             const std::vector<double>& times, double rtol = 1e-11,
                             double atol = 1e-13);

// Nested-integral cross-check of the cascade: evaluates the block j sectors
// below the initial diagonal sector at the given time by iterated
// Gauss-Legendre quadrature over 0 <= s_j <= ... <= s_1 <= time of the
// substituted form rho_i(t) = U(t) f_i(t) U(t)^dagger, U = exp(-iBt).
// Cost grows as quad_order^j; j <= 3.
Matrix closed_form_block(const SectorBlocks& init, const EffectiveGenerator& gen,
                         const SpectralTensor& t, const BohrDecomposition& d, int j,
                         double time, int quad_order);

// weights[t][k] from a solution with a diagonal initial sector; k counts
// sectors descended, which equals the emitted-quantum count for ladder-spaced
// models. Rejects mixed-sector initial conditions (split rho0 by linearity
// and solve each piece instead).
std::vector<std::vector<double>> jump_count_distribution(const SectorSolution& s);

}  // namespace oqsim
