#pragma once

// Monte Carlo quantum-jump unraveling: pure states drift under the
// norm-decaying propagator exp(-iBt) and jump through channels obtained by
// diagonalizing gamma(omega) per frequency; ensemble averages reproduce the
// master equation.

#include <cstdint>
#include <string>
#include <vector>

#include "oqsim/cascade.hpp"

namespace oqsim {

struct JumpChannel {
  double omega = 0.0;
  double rate = 0.0;  // >= 0 (tiny negative eigenvalues clipped to zero)
  Matrix op;          // L_k(omega) = sum_b conj(U_bk) A_b(omega)
};

struct JumpChannelSet {
  int dim = 0;
  std::vector<JumpChannel> channels;
};

// Unitary diagonalization gamma(omega) = U diag(r) U^dagger per positive
// frequency; channel k gets rate r_k and operator sum_b conj(U_bk) A_b(omega).
// Deterministic ordering: ascending omega, descending rate, then lexicographic
// eigenvector components under a canonical phase. Rates in [-1e-12, 0) clip
// to zero; anything lower is rejected as unphysical. Channels whose operator
// vanishes are dropped; zero-rate channels are kept (they never fire but
// document dark directions).
JumpChannelSet diagonalize_channels(const SpectralTensor& t, const BohrDecomposition& d);

struct JumpEvent {
  double time = 0.0;
  double omega = 0.0;
  int channel = -1;  // index into JumpChannelSet::channels
};

struct TrajectoryRecord {
  std::uint64_t master_seed = 0;
  std::uint64_t index = 0;
  std::vector<JumpEvent> events;  // strictly increasing times in [0, t_max]
  std::vector<double> times;
  std::vector<Vector> states;  // normalized pure states at the output times
  std::vector<std::string> notes;
};

// Evaluates exp(-iBt) for arbitrary t: by eigendecomposition when B
// diagonalizes well, otherwise by cached exponentials. Deterministic.
class DriftPropagator {
 public:
  explicit DriftPropagator(const Matrix& b);
  Vector apply(double t, const Vector& v) const;

 private:
  Matrix b_;
  bool eigen_mode_ = false;
  Matrix p_, p_inv_;
  Vector eigs_;
};

// Waiting-time construction: drift until the squared norm crosses a uniform
// draw, locate the jump time by bisection (tolerance 1e-10 * t_max with
// t_max = times.back()), pick a channel with probability proportional to
// r_k ||L_k psi||^2, renormalize, repeat. Bit-identical results for identical
// (master_seed, index). A state whose remaining jump weight vanishes ends as
// a jump-free tail (noted, not an error).
TrajectoryRecord run_trajectory(const Vector& psi0, const EffectiveGenerator& gen,
                                const JumpChannelSet& ch, const std::vector<double>& times,
                                std::uint64_t master_seed, std::uint64_t index,
                                const DriftPropagator* shared_drift = nullptr);

// Sequential convenience driver: trajectories 0..count-1 with a shared drift
// propagator. Aggregation downstream is ordered by trajectory index, so the
// result is independent of any future parallel scheduling.
std::vector<TrajectoryRecord> run_ensemble(const Vector& psi0, const EffectiveGenerator& gen,
                                           const JumpChannelSet& ch,
                                           const std::vector<double>& times,
                                           std::uint64_t master_seed, std::uint64_t count);

struct EnsembleEstimate {
  std::vector<double> times;
  std::vector<Matrix> mean;           // rho_hat(t)
  std::vector<RealMatrix> std_error;  // per-entry standard error of the mean
  std::size_t count = 0;
};

// Mean projector and per-entry standard errors over >= 2 records sharing the
// requested grid exactly.
EnsembleEstimate ensemble_average(const std::vector<TrajectoryRecord>& records,
                                  const std::vector<double>& times);

// fraction[t][k] of trajectories with exactly k jumps up to times[t],
// k = 0..k_max.
std::vector<std::vector<double>> empirical_jump_counts(
    const std::vector<TrajectoryRecord>& records, const std::vector<double>& times,
    int k_max);

}  // namespace oqsim
