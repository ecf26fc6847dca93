#include "oqsim/propagate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace oqsim {

namespace {

void check_inputs(const TaggedLiouvillian& l, const Matrix& rho0,
                  const std::vector<double>& times) {
  if (rho0.rows() != l.dim || rho0.cols() != l.dim)
    throw std::invalid_argument("propagate: state dimension mismatch");
  DensityReport r = check_density(rho0);
  if (r.trace_deviation > 1e-8 || r.hermiticity > 1e-9 || r.min_eigenvalue < -1e-10)
    throw std::invalid_argument("propagate: initial state is not a density matrix "
                                "(trace deviation " + std::to_string(r.trace_deviation) +
                                ", hermiticity " + std::to_string(r.hermiticity) +
                                ", min eigenvalue " + std::to_string(r.min_eigenvalue) + ")");
  for (size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] >= 0.0))
      throw std::invalid_argument("propagate: times must be non-negative");
    if (i > 0 && !(times[i] >= times[i - 1]))
      throw std::invalid_argument("propagate: times must be non-decreasing");
  }
}

void finalize(EvolutionResult& r) {
  r.diagnostics.reserve(r.states.size());
  for (const Matrix& s : r.states) r.diagnostics.push_back(check_density(s));
}

}  // namespace

double EvolutionResult::worst_trace_deviation() const {
  double w = 0.0;
  for (const auto& d : diagnostics) w = std::max(w, d.trace_deviation);
  return w;
}

double EvolutionResult::worst_hermiticity() const {
  double w = 0.0;
  for (const auto& d : diagnostics) w = std::max(w, d.hermiticity);
  return w;
}

double EvolutionResult::worst_min_eigenvalue() const {
  double w = 0.0;
  for (const auto& d : diagnostics) w = std::min(w, d.min_eigenvalue);
  return w;
}

EvolutionResult propagate_expm(const TaggedLiouvillian& l, const Matrix& rho0,
                               const std::vector<double>& times) {
  check_inputs(l, rho0, times);
  EvolutionResult r;
  r.times = times;
  const Vector v0 = vec(rho0);
  for (double t : times) {
    Matrix e = matrix_exponential(l.total, t);
    if (!e.allFinite()) {
      // Halve the argument until the exponential is tame, then square back up.
      int k = 1;
      for (; k <= 60; ++k) {
        e = matrix_exponential(l.total, t / std::pow(2.0, k));
        if (e.allFinite()) break;
      }
      if (!e.allFinite())
        throw std::runtime_error("propagate_expm: exponential not representable at t=" +
                                 std::to_string(t));
      for (int i = 0; i < k; ++i) e = e * e;
      std::ostringstream os;
      os << "expm at t=" << t << " fell back to squaring from t/2^" << k;
      r.notes.push_back(os.str());
      if (!e.allFinite())
        throw std::runtime_error("propagate_expm: squaring fallback overflowed at t=" +
                                 std::to_string(t));
    }
    r.states.push_back(unvec(Vector(e * v0), l.dim));
  }
  finalize(r);
  return r;
}

EvolutionResult propagate_adaptive(const TaggedLiouvillian& l, const Matrix& rho0,
                                   const std::vector<double>& times, double rtol,
                                   double atol) {
  check_inputs(l, rho0, times);

  // The integrator starts at times.front(); prepend t=0 when absent since
  // rho0 is referenced to zero.
  std::vector<double> grid = times;
  bool prepended = false;
  if (grid.empty() || grid.front() > 0.0) {
    grid.insert(grid.begin(), 0.0);
    prepended = true;
  }

  OdeOptions opt;
  opt.rtol = rtol;
  opt.atol = atol;
  auto rhs = [&l](double, const Vector& y) { return Vector(l.total * y); };
  std::vector<Vector> ys = integrate_adaptive(rhs, vec(rho0), grid, opt);

  EvolutionResult r;
  r.times = times;
  for (size_t i = prepended ? 1 : 0; i < ys.size(); ++i)
    r.states.push_back(unvec(ys[i], l.dim));
  finalize(r);
  return r;
}

void require_healthy(const EvolutionResult& r, const std::string& label) {
  double td = r.worst_trace_deviation();
  double hd = r.worst_hermiticity();
  double me = r.worst_min_eigenvalue();
  if (td > 1e-8)
    throw std::runtime_error(label + ": trace deviation " + std::to_string(td));
  if (hd > 1e-9)
    throw std::runtime_error(label + ": hermiticity deviation " + std::to_string(hd));
  if (me < -1e-8)
    throw std::runtime_error(label + ": eigenvalue " + std::to_string(me) + " below zero");
}

}  // namespace oqsim
