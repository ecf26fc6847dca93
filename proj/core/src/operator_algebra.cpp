#include "oqsim/operator_algebra.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

namespace oqsim {

Matrix identity(int dim) { return Matrix::Identity(dim, dim); }

Matrix ketbra(int dim, int i, int j) {
  if (i < 0 || j < 0 || i >= dim || j >= dim)
    throw std::invalid_argument("ketbra: index out of range");
  Matrix m = Matrix::Zero(dim, dim);
  m(i, j) = 1.0;
  return m;
}

Matrix annihilation(int dim) {
  Matrix a = Matrix::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(double(n));
  return a;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

double max_abs(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().maxCoeff();
}

double hermiticity_defect(const Matrix& m) {
  return max_abs(m - m.adjoint());
}

double min_hermitian_eigenvalue(const Matrix& m) {
  if (m.rows() == 0) return 0.0;
  Matrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

DensityReport check_density(const Matrix& rho) {
  DensityReport r;
  r.trace_deviation = std::abs(rho.trace() - Complex(1.0));
  r.hermiticity = hermiticity_defect(rho);
  r.min_eigenvalue = min_hermitian_eigenvalue(rho);
  return r;
}

void require_density(const Matrix& rho, const std::string& label) {
  if (rho.rows() != rho.cols())
    throw std::invalid_argument(label + ": not square");
  DensityReport r = check_density(rho);
  if (r.trace_deviation > 1e-8)
    throw std::invalid_argument(label + ": trace deviates from 1 by " +
                                std::to_string(r.trace_deviation));
  if (r.hermiticity > 1e-9)
    throw std::invalid_argument(label + ": not Hermitian (defect " +
                                std::to_string(r.hermiticity) + ")");
  if (r.min_eigenvalue < -1e-8)
    throw std::invalid_argument(label + ": negative eigenvalue " +
                                std::to_string(r.min_eigenvalue));
}

double default_cluster_tol(double spectral_range) {
  return 1e-9 * std::max(spectral_range, 1.0);
}

Spectrum hermitian_eigensystem(const Matrix& h, double cluster_tol) {
  if (h.rows() != h.cols())
    throw std::invalid_argument("hermitian_eigensystem: not square");
  if (hermiticity_defect(h) > 1e-9 * std::max(max_abs(h), 1.0))
    throw std::invalid_argument("hermitian_eigensystem: input is not Hermitian");

  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (h + h.adjoint()));
  if (es.info() != Eigen::Success)
    throw std::runtime_error("hermitian_eigensystem: eigensolver failed");
  const RealVector& vals = es.eigenvalues();  // ascending
  const Matrix& vecs = es.eigenvectors();

  const int d = int(h.rows());
  if (cluster_tol <= 0.0)
    cluster_tol = default_cluster_tol(d == 0 ? 0.0 : vals(d - 1) - vals(0));

  Spectrum s;
  int start = 0;
  while (start < d) {
    // Chain clustering: extend while consecutive eigenvalues stay within tol.
    int end = start + 1;
    while (end < d && vals(end) - vals(end - 1) <= cluster_tol) ++end;

    const int mult = end - start;
    Matrix basis = vecs.middleCols(start, mult);
    double mean = vals.segment(start, mult).mean();
    s.energies.push_back(mean);
    s.projectors.push_back(basis * basis.adjoint());
    s.bases.push_back(std::move(basis));
    s.multiplicities.push_back(mult);
    start = end;
  }
  return s;
}

Matrix matrix_exponential(const Matrix& m, double t) {
  if (m.rows() != m.cols())
    throw std::invalid_argument("matrix_exponential: not square");
  Matrix scaled = m * t;
  if (!scaled.allFinite())
    throw std::invalid_argument("matrix_exponential: non-finite input");
  return scaled.exp();
}

Vector vec(const Matrix& m) {
  return Eigen::Map<const Vector>(m.data(), m.size());
}

Matrix unvec(const Vector& v, int rows, int cols) {
  if (v.size() != Eigen::Index(rows) * cols)
    throw std::invalid_argument("unvec: size mismatch");
  return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

Matrix unvec(const Vector& v, int dim) { return unvec(v, dim, dim); }

Matrix left_mult_superop(const Matrix& a) {
  return kron(identity(int(a.cols())), a);
}

Matrix right_mult_superop(const Matrix& b) {
  return kron(b.transpose(), identity(int(b.rows())));
}

Matrix sandwich_superop(const Matrix& a, const Matrix& b) {
  return kron(b.transpose(), a);
}

Matrix partial_trace(const Matrix& rho, const std::vector<int>& dims, int keep) {
  if (keep < 0 || keep >= int(dims.size()))
    throw std::invalid_argument("partial_trace: keep index out of range");
  Eigen::Index total = 1;
  for (int d : dims) {
    if (d <= 0) throw std::invalid_argument("partial_trace: nonpositive dim");
    total *= d;
  }
  if (rho.rows() != total || rho.cols() != total)
    throw std::invalid_argument("partial_trace: dims do not factor the matrix");

  // Split the index as (left, kept, right) with the first factor most
  // significant: index = (left * dk + k) * dr + r.
  Eigen::Index dl = 1, dr = 1;
  for (int i = 0; i < keep; ++i) dl *= dims[size_t(i)];
  for (size_t i = size_t(keep) + 1; i < dims.size(); ++i) dr *= dims[i];
  const Eigen::Index dk = dims[size_t(keep)];

  Matrix out = Matrix::Zero(dk, dk);
  for (Eigen::Index l = 0; l < dl; ++l)
    for (Eigen::Index r = 0; r < dr; ++r)
      for (Eigen::Index i = 0; i < dk; ++i)
        for (Eigen::Index j = 0; j < dk; ++j)
          out(i, j) += rho((l * dk + i) * dr + r, (l * dk + j) * dr + r);
  return out;
}

}  // namespace oqsim
