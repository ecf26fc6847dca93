#pragma once

// Dense complex linear algebra helpers shared by every other module: spectral
// decompositions with degeneracy clustering, matrix exponentials, Kronecker /
// vectorization utilities, and density-matrix health checks.

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace oqsim {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline constexpr Complex I{0.0, 1.0};

// ---------------------------------------------------------------------------
// Elementary constructions

Matrix identity(int dim);

// |i><j| in a dim-dimensional space.
Matrix ketbra(int dim, int i, int j);

// Truncated bosonic annihilation operator on span{|0>,...,|dim-1>}:
// a|n> = sqrt(n)|n-1>.
Matrix annihilation(int dim);

Matrix kron(const Matrix& a, const Matrix& b);

// ---------------------------------------------------------------------------
// Norms and structural checks

// max_ij |m_ij|; zero for empty matrices.
double max_abs(const Matrix& m);

// ||m - m^dagger||_max
double hermiticity_defect(const Matrix& m);

// Smallest eigenvalue of the Hermitian part (m + m^dagger)/2.
double min_hermitian_eigenvalue(const Matrix& m);

struct DensityReport {
  double trace_deviation = 0.0;   // |tr(rho) - 1|
  double hermiticity = 0.0;       // ||rho - rho^dagger||_max
  double min_eigenvalue = 0.0;    // of the Hermitian part
};

DensityReport check_density(const Matrix& rho);

// Throws std::invalid_argument when rho fails the standard health bounds
// (|tr-1| <= 1e-8, hermiticity <= 1e-9, min eigenvalue >= -1e-8).
void require_density(const Matrix& rho, const std::string& label);

// ---------------------------------------------------------------------------
// Hermitian eigensystem with degeneracy clustering

struct Spectrum {
  // Distinct eigenvalues in ascending order.
  std::vector<double> energies;
  // bases[k]: dim x multiplicities[k] orthonormal basis of the eigenspace of
  // energies[k]; projectors[k] = bases[k] bases[k]^dagger. Projectors resolve
  // the identity.
  std::vector<Matrix> bases;
  std::vector<Matrix> projectors;
  std::vector<int> multiplicities;

  int dim() const { return projectors.empty() ? 0 : int(projectors.front().rows()); }
  int sector_count() const { return int(energies.size()); }
  // Spread between extreme eigenvalues (0 for a single level).
  double range() const { return energies.empty() ? 0.0 : energies.back() - energies.front(); }
};

// Diagonalizes a Hermitian h and merges eigenvalues closer than cluster_tol
// into a single degenerate sector via chain clustering (neighbours within
// tolerance join the same cluster). cluster_tol <= 0 selects the default
// 1e-9 * max(range, 1).
Spectrum hermitian_eigensystem(const Matrix& h, double cluster_tol = -1.0);

double default_cluster_tol(double spectral_range);

// ---------------------------------------------------------------------------
// Exponentials

// exp(m * t). Padé scaling-and-squaring; accurate to ~1e-10 relative for
// well-conditioned inputs.
Matrix matrix_exponential(const Matrix& m, double t = 1.0);

// ---------------------------------------------------------------------------
// Vectorization (column-major, matching Eigen storage):
//   vec(A X B) = (B^T (x) A) vec(X)

Vector vec(const Matrix& m);
Matrix unvec(const Vector& v, int rows, int cols);
Matrix unvec(const Vector& v, int dim);

// Superoperator for rho -> A rho.
Matrix left_mult_superop(const Matrix& a);
// Superoperator for rho -> rho B.
Matrix right_mult_superop(const Matrix& b);
// Superoperator for rho -> A rho B.
Matrix sandwich_superop(const Matrix& a, const Matrix& b);

// ---------------------------------------------------------------------------
// Composite systems

// Partial trace over all subsystems except dims[keep]; dims are the local
// dimensions ordered so that the FIRST factor is the most significant index
// (kron(first, second, ...)).
Matrix partial_trace(const Matrix& rho, const std::vector<int>& dims, int keep);

}  // namespace oqsim
