#include "oqsim/ode.hpp"

#include <algorithm>
#include <cmath>

namespace oqsim {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// b (5th order) minus the embedded 4th-order weights.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

double error_norm(const Vector& err, const Vector& y0, const Vector& y1, double rtol,
                  double atol) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < err.size(); ++i) {
    double scale = atol + rtol * std::max(std::abs(y0(i)), std::abs(y1(i)));
    double q = std::abs(err(i)) / scale;
    acc += q * q;
  }
  return std::sqrt(acc / double(std::max<Eigen::Index>(err.size(), 1)));
}

}  // namespace

std::vector<Vector> integrate_adaptive(const std::function<Vector(double, const Vector&)>& f,
                                       const Vector& y0, const std::vector<double>& times,
                                       const OdeOptions& opt, OdeStats* stats) {
  if (times.empty()) return {};
  for (size_t i = 0; i + 1 < times.size(); ++i)
    if (!(times[i + 1] >= times[i]))
      throw std::invalid_argument("integrate_adaptive: times must be non-decreasing");
  if (!(opt.rtol > 0.0) || !(opt.atol > 0.0))
    throw std::invalid_argument("integrate_adaptive: tolerances must be positive");

  std::vector<Vector> out;
  out.reserve(times.size());
  out.push_back(y0);

  double t = times.front();
  Vector y = y0;
  Vector k1 = f(t, y);

  // First-step heuristic: balance the state and derivative scales, then
  // refine with one Euler probe.
  double h;
  {
    double d0 = error_norm(y, y, y, opt.rtol, opt.atol);
    double d1 = error_norm(k1, y, y, opt.rtol, opt.atol);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    double span = times.back() - times.front();
    if (span > 0.0) h0 = std::min(h0, span);
    if (h0 <= 0.0) h0 = 1e-6;
    Vector probe = f(t + h0, y + h0 * k1);
    double d2 = error_norm(probe - k1, y, y, opt.rtol, opt.atol) / h0;
    double h1 = (std::max(d1, d2) <= 1e-15)
                    ? std::max(1e-6, h0 * 1e-3)
                    : std::pow(0.01 / std::max(d1, d2), 0.2);
    h = std::min({100.0 * h0, h1, opt.max_step});
  }

  size_t next = 1;
  while (next < times.size() && times[next] <= t) {
    out.push_back(y);
    ++next;
  }

  while (next < times.size()) {
    const double t_target = times[next];
    const double floor_step =
        16.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(t), 1.0);
    if (t_target - t <= floor_step) {  // grid point within roundoff of t
      out.push_back(y);
      ++next;
      continue;
    }
    bool hit_target = false;
    double h_step = std::min(h, opt.max_step);
    if (t + h_step >= t_target) {
      h_step = t_target - t;
      hit_target = true;
    }
    if (h_step < floor_step) throw StepUnderflow(t);

    Vector k2 = f(t + c2 * h_step, y + h_step * (a21 * k1));
    Vector k3 = f(t + c3 * h_step, y + h_step * (a31 * k1 + a32 * k2));
    Vector k4 = f(t + c4 * h_step, y + h_step * (a41 * k1 + a42 * k2 + a43 * k3));
    Vector k5 = f(t + c5 * h_step, y + h_step * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    Vector k6 = f(t + h_step,
                  y + h_step * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    Vector y_new = y + h_step * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    Vector k7 = f(t + h_step, y_new);
    Vector err =
        h_step * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    double en = error_norm(err, y, y_new, opt.rtol, opt.atol);
    if (en <= 1.0) {
      t = hit_target ? t_target : t + h_step;
      y = std::move(y_new);
      k1 = std::move(k7);  // first-same-as-last
      if (stats) ++stats->accepted;
      if (hit_target) {
        out.push_back(y);
        ++next;
        while (next < times.size() && times[next] <= t) {
          out.push_back(y);
          ++next;
        }
      }
      double factor = (en == 0.0) ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
      h = std::min(h_step * factor, opt.max_step);
    } else {
      if (stats) ++stats->rejected;
      h = h_step * std::clamp(0.9 * std::pow(en, -0.2), 0.1, 0.9);
    }
  }
  return out;
}

}  // namespace oqsim
