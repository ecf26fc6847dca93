#include "oqsim/observables.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <array>
#include <cmath>
#include <functional>

#include "oqsim/liouvillian.hpp"

namespace oqsim {

double concurrence(const Matrix& rho) {
  if (rho.rows() != 4 || rho.cols() != 4)
    throw std::invalid_argument("concurrence: expected a 4x4 (two-qubit) matrix");
  require_density(rho, "concurrence input");

  Matrix sy(2, 2);
  sy << 0.0, Complex(0.0, -1.0), Complex(0.0, 1.0), 0.0;
  Matrix flip = kron(sy, sy);
  Matrix spun = rho * flip * rho.conjugate() * flip;

  Eigen::ComplexEigenSolver<Matrix> es(spun, /*computeEigenvectors=*/false);
  std::array<double, 4> lam{};
  for (int i = 0; i < 4; ++i)
    lam[size_t(i)] = std::sqrt(std::max(0.0, es.eigenvalues()(i).real()));
  std::sort(lam.begin(), lam.end(), std::greater<>());
  double c = lam[0] - lam[1] - lam[2] - lam[3];
  return std::clamp(c, 0.0, 1.0);
}

std::vector<double> populations(const Matrix& rho) {
  std::vector<double> p(size_t(rho.rows()));
  for (int i = 0; i < rho.rows(); ++i) p[size_t(i)] = rho(i, i).real();
  return p;
}

std::vector<Vector> dfs_basis(const BohrDecomposition& d, const SpectralTensor& t,
                              const Matrix& h_eff, double tol) {
  if (!t.zero_temperature())
    throw std::invalid_argument("dfs_basis: requires a zero-temperature tensor");
  const int dim = d.spectrum.dim();
  if (h_eff.rows() != dim || h_eff.cols() != dim)
    throw std::invalid_argument("dfs_basis: h_eff dimension mismatch");

  // A state never decays iff it is annihilated by the rate operator
  // K = sum_{omega>0} gamma_ab A_a^dagger A_b: psi^dagger K psi is the total
  // emission rate, so ker K is the joint kernel of all decay channels.
  Matrix k = build_rate_operator(t, d, /*positive_only=*/true);
  Eigen::SelfAdjointEigenSolver<Matrix> es(k);
  const double k_scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  int null_dim = 0;
  while (null_dim < dim && es.eigenvalues()(null_dim) <= tol * k_scale) ++null_dim;
  if (null_dim == 0) return {};
  Matrix v = es.eigenvectors().leftCols(null_dim);

  // Shrink to the largest h_eff-invariant subspace: drop the directions that
  // h_eff maps outside span(v), re-orthonormalize, repeat to convergence.
  const double h_scale = std::max(1.0, max_abs(h_eff));
  for (int pass = 0; pass <= dim && v.cols() > 0; ++pass) {
    Matrix leak = h_eff * v - v * (v.adjoint() * h_eff * v);
    if (max_abs(leak) <= tol * h_scale) break;
    Eigen::JacobiSVD<Matrix> svd(leak, Eigen::ComputeFullV);
    int keep = 0;
    for (int i = int(svd.singularValues().size()) - 1; i >= 0; --i)
      if (svd.singularValues()(i) <= tol * h_scale) ++keep;
    if (keep == 0) return {};
    v = v * svd.matrixV().rightCols(keep);
    Eigen::HouseholderQR<Matrix> qr(v);
    v = Matrix(qr.householderQ()).leftCols(keep);
  }
  if (v.cols() == 0) return {};

  // Diagonalize h_eff inside the subspace so each returned state is
  // stationary up to phase.
  Eigen::SelfAdjointEigenSolver<Matrix> inner(Matrix(v.adjoint() * h_eff * v));
  Matrix states = v * inner.eigenvectors();
  std::vector<Vector> out;
  out.reserve(size_t(states.cols()));
  for (int i = 0; i < states.cols(); ++i) out.push_back(states.col(i));
  return out;
}

}  // namespace oqsim
