#include "oqsim/trajectories.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>

namespace oqsim {

namespace {

// Uniform double in (0, 1] from the top 53 bits — fully specified, portable
// across standard libraries.
class UniformStream {
 public:
  UniformStream(std::uint64_t master_seed, std::uint64_t index) {
    std::seed_seq seq{std::uint32_t(master_seed >> 32), std::uint32_t(master_seed),
                      std::uint32_t(index >> 32), std::uint32_t(index)};
    rng_.seed(seq);
  }
  double next() {
    return (double(rng_() >> 11) + 1.0) * 0x1.0p-53;
  }

 private:
  std::mt19937_64 rng_;
};

constexpr int kMaxJumpsPerTrajectory = 1000000;

}  // namespace

JumpChannelSet diagonalize_channels(const SpectralTensor& t, const BohrDecomposition& d) {
  if (!t.zero_temperature())
    throw std::invalid_argument(
        "diagonalize_channels: tensor is not zero-temperature-restricted");
  TensorHealth health = check_spectral_tensor(t);
  if (health.zero_frequency_gamma > 0.0)
    throw std::invalid_argument(
        "diagonalize_channels: dissipative weight at omega=0 cannot be "
        "unraveled into lowering jumps");

  JumpChannelSet set;
  set.dim = d.spectrum.dim();
  const int nc = d.channel_count();

  for (const auto& e : t.entries) {  // ascending omega
    if (max_abs(e.gamma) == 0.0) continue;
    int f = d.index_of(e.omega);
    if (f < 0 || d.frequencies[size_t(f)].omega <= 0.0) continue;

    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (e.gamma + e.gamma.adjoint()));
    struct Candidate {
      double rate;
      Vector vec;
    };
    std::vector<Candidate> cands;
    for (int k = 0; k < nc; ++k) {
      double r = es.eigenvalues()(k);
      if (r < 0.0) {
        if (r < -1e-12)
          throw std::invalid_argument(
              "diagonalize_channels: rate " + std::to_string(r) + " at omega=" +
              std::to_string(e.omega) + "; rate matrix is not positive semidefinite");
        r = 0.0;
      }
      Vector v = es.eigenvectors().col(k);
      // canonical phase: largest-magnitude component real positive
      Eigen::Index imax = 0;
      v.cwiseAbs().maxCoeff(&imax);
      if (std::abs(v(imax)) > 0.0) v *= std::conj(v(imax)) / std::abs(v(imax));
      cands.push_back({r, std::move(v)});
    }
    std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
      if (a.rate != b.rate) return a.rate > b.rate;
      for (Eigen::Index i = 0; i < a.vec.size(); ++i) {
        if (a.vec(i).real() != b.vec(i).real()) return a.vec(i).real() < b.vec(i).real();
        if (a.vec(i).imag() != b.vec(i).imag()) return a.vec(i).imag() < b.vec(i).imag();
      }
      return false;
    });

    for (const auto& c : cands) {
      Matrix op = Matrix::Zero(set.dim, set.dim);
      for (int b = 0; b < nc; ++b)
        if (d.has_op(b, f)) op += std::conj(c.vec(b)) * d.op(b, f);
      if (max_abs(op) < 1e-13) continue;
      JumpChannel jc;
      jc.omega = e.omega;
      jc.rate = c.rate;
      jc.op = std::move(op);
      set.channels.push_back(std::move(jc));
    }
  }
  return set;
}

DriftPropagator::DriftPropagator(const Matrix& b) : b_(b) {
  Eigen::ComplexEigenSolver<Matrix> es(b);
  if (es.info() == Eigen::Success) {
    Matrix p = es.eigenvectors();
    Eigen::FullPivLU<Matrix> lu(p);
    if (lu.isInvertible()) {
      Matrix p_inv = lu.inverse();
      double err = max_abs(p * es.eigenvalues().asDiagonal() * p_inv - b);
      if (err <= 1e-12 * std::max(1.0, max_abs(b))) {
        eigen_mode_ = true;
        p_ = std::move(p);
        p_inv_ = std::move(p_inv);
        eigs_ = es.eigenvalues();
      }
    }
  }
}

Vector DriftPropagator::apply(double t, const Vector& v) const {
  if (t == 0.0) return v;
  if (eigen_mode_) {
    Vector w = p_inv_ * v;
    for (Eigen::Index i = 0; i < w.size(); ++i)
      w(i) *= std::exp(-I * eigs_(i) * t);
    return p_ * w;
  }
  return matrix_exponential(-I * b_, t) * v;
}

TrajectoryRecord run_trajectory(const Vector& psi0, const EffectiveGenerator& gen,
                                const JumpChannelSet& ch, const std::vector<double>& times,
                                std::uint64_t master_seed, std::uint64_t index,
                                const DriftPropagator* shared_drift) {
  if (times.empty()) throw std::invalid_argument("run_trajectory: empty time grid");
  for (size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] >= 0.0))
      throw std::invalid_argument("run_trajectory: times must be non-negative");
    if (i > 0 && !(times[i] >= times[i - 1]))
      throw std::invalid_argument("run_trajectory: times must be non-decreasing");
  }
  if (psi0.size() != gen.b.rows())
    throw std::invalid_argument("run_trajectory: state dimension mismatch");
  if (std::abs(psi0.norm() - 1.0) > 1e-10)
    throw std::invalid_argument("run_trajectory: initial state is not normalized");

  const double t_max = times.back();
  const double time_tol = 1e-10 * std::max(t_max, 1e-300);

  std::optional<DriftPropagator> local_drift;
  if (!shared_drift) local_drift.emplace(gen.b);
  const DriftPropagator& drift = shared_drift ? *shared_drift : *local_drift;

  UniformStream rng(master_seed, index);

  TrajectoryRecord rec;
  rec.master_seed = master_seed;
  rec.index = index;
  rec.times = times;

  double t_cur = 0.0;
  Vector psi = psi0;
  double survival_target = rng.next();
  bool dark = false;

  auto norm2_at = [&](double dt) {
    Vector w = drift.apply(dt, psi);
    return w.squaredNorm();
  };

  for (double t_out : times) {
    while (!dark) {
      double span = t_out - t_cur;
      if (span <= 0.0) break;
      double s_end = norm2_at(span);
      if (s_end >= survival_target) {
        // no jump in this segment; renormalize bookkeeping and move on
        psi = drift.apply(span, psi);
        double n = psi.norm();
        psi /= n;
        survival_target /= n * n;
        t_cur = t_out;
        break;
      }
      // bisect the crossing of ||psi(dt)||^2 = survival_target
      double lo = 0.0, hi = span;
      while (hi - lo > time_tol) {
        double mid = 0.5 * (lo + hi);
        (norm2_at(mid) >= survival_target ? lo : hi) = mid;
      }
      double dt_jump = 0.5 * (lo + hi);
      Vector phi = drift.apply(dt_jump, psi);

      // channel selection with probability proportional to r_k ||L_k phi||^2
      std::vector<double> weights(ch.channels.size(), 0.0);
      double total = 0.0;
      for (size_t k = 0; k < ch.channels.size(); ++k) {
        if (ch.channels[k].rate <= 0.0) continue;
        weights[k] = ch.channels[k].rate * (ch.channels[k].op * phi).squaredNorm();
        total += weights[k];
      }
      if (total <= 1e-280) {
        rec.notes.push_back("jump weight vanished at t=" + std::to_string(t_cur + dt_jump) +
                            "; continuing as a jump-free tail");
        dark = true;
        break;
      }
      double pick = rng.next() * total;
      size_t chosen = 0;
      double acc = 0.0;
      for (size_t k = 0; k < ch.channels.size(); ++k) {
        acc += weights[k];
        if (pick <= acc) {
          chosen = k;
          break;
        }
      }

      t_cur += dt_jump;
      JumpEvent ev;
      ev.time = t_cur;
      ev.omega = ch.channels[chosen].omega;
      ev.channel = int(chosen);
      rec.events.push_back(ev);
      if (int(rec.events.size()) > kMaxJumpsPerTrajectory)
        throw std::runtime_error("run_trajectory: jump count exceeded the safety bound");

      psi = ch.channels[chosen].op * phi;
      psi /= psi.norm();
      survival_target = rng.next();
    }
    if (dark && t_out > t_cur) {
      psi = drift.apply(t_out - t_cur, psi);
      psi /= psi.norm();
      t_cur = t_out;
    }
    rec.states.push_back(psi);
  }
  return rec;
}

std::vector<TrajectoryRecord> run_ensemble(const Vector& psi0, const EffectiveGenerator& gen,
                                           const JumpChannelSet& ch,
                                           const std::vector<double>& times,
                                           std::uint64_t master_seed, std::uint64_t count) {
  DriftPropagator drift(gen.b);
  std::vector<TrajectoryRecord> out;
  out.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i)
    out.push_back(run_trajectory(psi0, gen, ch, times, master_seed, i, &drift));
  return out;
}

EnsembleEstimate ensemble_average(const std::vector<TrajectoryRecord>& records,
                                  const std::vector<double>& times) {
  if (records.size() < 2)
    throw std::invalid_argument("ensemble_average: need at least two records");
  for (const auto& r : records)
    if (r.times != times)
      throw std::invalid_argument("ensemble_average: records use mismatched time grids");

  const Eigen::Index d = records.front().states.front().size();
  const double m = double(records.size());

  EnsembleEstimate est;
  est.times = times;
  est.count = records.size();
  for (size_t ti = 0; ti < times.size(); ++ti) {
    Matrix mean = Matrix::Zero(d, d);
    for (const auto& r : records)
      mean += r.states[ti] * r.states[ti].adjoint();
    mean /= m;
    RealMatrix var = RealMatrix::Zero(d, d);
    for (const auto& r : records) {
      Matrix dev = r.states[ti] * r.states[ti].adjoint() - mean;
      var += dev.cwiseAbs2();
    }
    est.mean.push_back(std::move(mean));
    est.std_error.push_back((var / (m * (m - 1.0))).cwiseSqrt());
  }
  return est;
}

std::vector<std::vector<double>> empirical_jump_counts(
    const std::vector<TrajectoryRecord>& records, const std::vector<double>& times,
    int k_max) {
  if (records.empty())
    throw std::invalid_argument("empirical_jump_counts: no records");
  std::vector<std::vector<double>> out(times.size(), std::vector<double>(size_t(k_max) + 1, 0.0));
  for (const auto& r : records) {
    for (size_t ti = 0; ti < times.size(); ++ti) {
      int k = 0;
      for (const auto& ev : r.events)
        if (ev.time <= times[ti]) ++k;
      if (k <= k_max) out[ti][size_t(k)] += 1.0;
    }
  }
  for (auto& row : out)
    for (double& v : row) v /= double(records.size());
  return out;
}

}  // namespace oqsim
