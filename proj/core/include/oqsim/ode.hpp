#pragma once

// Adaptive Dormand-Prince 5(4) integrator over complex state vectors.

#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "oqsim/operator_algebra.hpp"

namespace oqsim {

struct OdeOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  double max_step = std::numeric_limits<double>::infinity();
};

struct StepUnderflow : std::runtime_error {
  double last_good_time;
  explicit StepUnderflow(double t)
      : std::runtime_error("adaptive step size underflow at t=" + std::to_string(t)),
        last_good_time(t) {}
};

struct OdeStats {
  long accepted = 0;
  long rejected = 0;
};

// Integrates y' = f(t, y) with y(times.front()) = y0 and returns the solution
// at every requested time. times must be finite and non-decreasing.
std::vector<Vector> integrate_adaptive(const std::function<Vector(double, const Vector&)>& f,
                                       const Vector& y0, const std::vector<double>& times,
                                       const OdeOptions& opt = {}, OdeStats* stats = nullptr);

}  // namespace oqsim
