#pragma once

// Ground-truth propagation of the full master equation: superoperator
// exponentiation and adaptive integration, with per-state health diagnostics.

#include <string>
#include <vector>

#include "oqsim/liouvillian.hpp"
#include "oqsim/ode.hpp"

namespace oqsim {

struct EvolutionResult {
  std::vector<double> times;
  std::vector<Matrix> states;
  std::vector<DensityReport> diagnostics;
  std::vector<std::string> notes;

  double worst_trace_deviation() const;
  double worst_hermiticity() const;
  double worst_min_eigenvalue() const;  // most negative across times
};

// rho(t) = unvec(exp(L t) vec(rho0)). times: non-negative, non-decreasing;
// rho0 is referenced to t = 0. A non-finite direct exponential triggers a
// scaling-and-squaring retry from a halved argument, reported in notes.
EvolutionResult propagate_expm(const TaggedLiouvillian& l, const Matrix& rho0,
                               const std::vector<double>& times);

// Same trajectory via adaptive integration of vec(rho)' = L vec(rho).
// Step-size underflow rethrows StepUnderflow carrying the last good time.
EvolutionResult propagate_adaptive(const TaggedLiouvillian& l, const Matrix& rho0,
                                   const std::vector<double>& times, double rtol = 1e-10,
                                   double atol = 1e-12);

// Throws when any diagnostic exceeds the standard health bounds
// (|tr-1| <= 1e-8, hermiticity <= 1e-9, min eigenvalue >= -1e-8).
void require_healthy(const EvolutionResult& r, const std::string& label);

}  // namespace oqsim
