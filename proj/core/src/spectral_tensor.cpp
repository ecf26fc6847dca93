#include "oqsim/spectral_tensor.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace oqsim {

const SpectralEntry* SpectralTensor::find(double omega, double tol) const {
  const SpectralEntry* best = nullptr;
  double best_gap = tol;
  for (const auto& e : entries) {
    double gap = std::abs(e.omega - omega);
    if (gap <= best_gap) {
      best_gap = gap;
      best = &e;
    }
  }
  return best;
}

SpectralTensor make_spectral_tensor(std::vector<SpectralEntry> entries, double beta,
                                    double tol) {
  std::sort(entries.begin(), entries.end(),
            [](const SpectralEntry& a, const SpectralEntry& b) { return a.omega < b.omega; });

  int channels = -1;
  for (auto& e : entries) {
    int rows = int(std::max(e.gamma.rows(), e.lamb.rows()));
    if (e.gamma.size() == 0) e.gamma = Matrix::Zero(rows, rows);
    if (e.lamb.size() == 0) e.lamb = Matrix::Zero(rows, rows);
    if (e.gamma.rows() != e.gamma.cols() || e.lamb.rows() != e.lamb.cols() ||
        e.gamma.rows() != e.lamb.rows())
      throw std::invalid_argument("spectral tensor: blocks at omega=" +
                                  std::to_string(e.omega) + " are not square and matching");
    if (channels < 0) channels = int(e.gamma.rows());
    if (int(e.gamma.rows()) != channels)
      throw std::invalid_argument("spectral tensor: inconsistent channel count at omega=" +
                                  std::to_string(e.omega));
  }
  for (size_t i = 1; i < entries.size(); ++i)
    if (entries[i].omega - entries[i - 1].omega <= tol)
      throw std::invalid_argument("spectral tensor: duplicate frequency omega=" +
                                  std::to_string(entries[i].omega));

  SpectralTensor t;
  t.entries = std::move(entries);
  t.beta = beta;
  return t;
}

SpectralTensor gamma_from_halfline(const std::vector<std::pair<double, Matrix>>& halfline,
                                   double beta) {
  std::vector<SpectralEntry> entries;
  entries.reserve(halfline.size());
  for (const auto& [omega, g] : halfline) {
    if (!g.allFinite())
      throw std::invalid_argument("gamma_from_halfline: non-finite transform at omega=" +
                                  std::to_string(omega));
    SpectralEntry e;
    e.omega = omega;
    e.gamma = g + g.adjoint();
    e.lamb = (g - g.adjoint()) / (2.0 * I);
    double lo = min_hermitian_eigenvalue(e.gamma);
    if (lo < -1e-10)
      throw std::invalid_argument(
          "gamma_from_halfline: rate matrix at omega=" + std::to_string(omega) +
          " has eigenvalue " + std::to_string(lo) + "; unphysical input");
    entries.push_back(std::move(e));
  }
  return make_spectral_tensor(std::move(entries), beta);
}

SpectralTensor restrict_zero_temperature(SpectralTensor t) {
  std::vector<SpectralEntry> kept;
  for (auto& e : t.entries) {
    if (e.omega < 0.0) {
      if (max_abs(e.lamb) == 0.0) continue;  // nothing left to keep
      e.gamma = Matrix::Zero(e.gamma.rows(), e.gamma.cols());
    }
    kept.push_back(std::move(e));
  }
  t.entries = std::move(kept);
  t.beta = std::numeric_limits<double>::infinity();
  return t;
}

double check_detailed_balance(const SpectralTensor& t, double beta, double tol) {
  if (t.zero_temperature()) return 0.0;

  // Evaluate every +/- pair from its positive side: for each |omega| present
  // anywhere in the tensor compare gamma(+|omega|) against
  // e^{beta |omega|} gamma(-|omega|), treating missing partners as zero.
  std::vector<double> magnitudes;
  for (const auto& e : t.entries)
    if (std::abs(e.omega) > tol) magnitudes.push_back(std::abs(e.omega));
  std::sort(magnitudes.begin(), magnitudes.end());
  magnitudes.erase(std::unique(magnitudes.begin(), magnitudes.end(),
                               [tol](double a, double b) { return b - a <= tol; }),
                   magnitudes.end());

  const int nc = t.channel_count();
  double worst = 0.0;
  for (double w : magnitudes) {
    const SpectralEntry* up = t.find(w, tol);
    const SpectralEntry* down = t.find(-w, tol);
    Matrix upper = up ? up->gamma : Matrix(Matrix::Zero(nc, nc));
    Matrix lower = down ? down->gamma : Matrix(Matrix::Zero(nc, nc));
    // Keep the product finite when the lower block vanishes even if the
    // Boltzmann factor overflows.
    Matrix scaled = (max_abs(lower) == 0.0) ? Matrix(Matrix::Zero(nc, nc))
                                            : Matrix(std::exp(beta * w) * lower);
    worst = std::max(worst, max_abs(upper - scaled));
  }
  return worst;
}

TensorHealth check_spectral_tensor(const SpectralTensor& t) {
  TensorHealth h;
  h.min_gamma_eigenvalue = t.entries.empty() ? 0.0 : std::numeric_limits<double>::infinity();
  for (const auto& e : t.entries) {
    h.gamma_hermiticity = std::max(h.gamma_hermiticity, hermiticity_defect(e.gamma));
    h.lamb_hermiticity = std::max(h.lamb_hermiticity, hermiticity_defect(e.lamb));
    h.min_gamma_eigenvalue = std::min(h.min_gamma_eigenvalue, min_hermitian_eigenvalue(e.gamma));
    if (e.omega < 0.0)
      h.negative_frequency_gamma = std::max(h.negative_frequency_gamma, max_abs(e.gamma));
    if (e.omega == 0.0)
      h.zero_frequency_gamma = std::max(h.zero_frequency_gamma, max_abs(e.gamma));
  }
  if (t.entries.empty()) h.min_gamma_eigenvalue = 0.0;
  return h;
}

void require_valid_tensor(const SpectralTensor& t, int expected_channels) {
  if (expected_channels >= 0 && !t.entries.empty() && t.channel_count() != expected_channels)
    throw std::invalid_argument("spectral tensor: channel count " +
                                std::to_string(t.channel_count()) + " does not match " +
                                std::to_string(expected_channels) + " coupling operators");
  TensorHealth h = check_spectral_tensor(t);
  if (h.gamma_hermiticity > 1e-10)
    throw std::invalid_argument("spectral tensor: gamma block not Hermitian (defect " +
                                std::to_string(h.gamma_hermiticity) + ")");
  if (h.lamb_hermiticity > 1e-10)
    throw std::invalid_argument("spectral tensor: S block not Hermitian (defect " +
                                std::to_string(h.lamb_hermiticity) + ")");
  if (h.min_gamma_eigenvalue < -1e-10)
    throw std::invalid_argument("spectral tensor: gamma eigenvalue " +
                                std::to_string(h.min_gamma_eigenvalue) + " below zero");
  if (t.zero_temperature() && h.negative_frequency_gamma > 0.0)
    throw std::invalid_argument(
        "spectral tensor: zero-temperature tensor carries dissipative weight at "
        "negative frequency (largest entry " +
        std::to_string(h.negative_frequency_gamma) +
        "); rates at omega < 0 must vanish when the bath is at zero temperature");
}

}  // namespace oqsim
