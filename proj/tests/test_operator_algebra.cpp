#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <complex>
#include <random>

#include "oqsim/operator_algebra.hpp"
#include "support/random_models.hpp"

using namespace oqsim;
using testsupport::Rng;

namespace {
const std::complex<double> I1(0.0, 1.0);

Matrix pauli_x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

Matrix pauli_z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}
}  // namespace

TEST_CASE("eigensystem of a diagonal qubit") {
  Matrix h = Matrix::Zero(2, 2);
  h(1, 1) = 1.0;
  Spectrum s = hermitian_eigensystem(h);
  REQUIRE(s.sector_count() == 2);
  CHECK(s.energies[0] == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(s.energies[1] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(max_abs(s.projectors[0] - ketbra(2, 0, 0)) < 1e-13);
  CHECK(max_abs(s.projectors[1] - ketbra(2, 1, 1)) < 1e-13);
  CHECK(s.multiplicities[0] == 1);
  CHECK(s.multiplicities[1] == 1);
}

TEST_CASE("eigensystem of sigma_x") {
  Spectrum s = hermitian_eigensystem(pauli_x());
  REQUIRE(s.sector_count() == 2);
  CHECK(s.energies[0] == doctest::Approx(-1.0).epsilon(1e-13));
  CHECK(s.energies[1] == doctest::Approx(1.0).epsilon(1e-13));
  // Eigenprojectors are (I -+ sigma_x)/2.
  CHECK(max_abs(s.projectors[0] - 0.5 * (identity(2) - pauli_x())) < 1e-12);
  CHECK(max_abs(s.projectors[1] - 0.5 * (identity(2) + pauli_x())) < 1e-12);
}

TEST_CASE("degenerate two-qubit sum splits into three sectors") {
  Matrix h = 0.5 * (kron(pauli_z(), identity(2)) + kron(identity(2), pauli_z()));
  Spectrum s = hermitian_eigensystem(h);
  REQUIRE(s.sector_count() == 3);
  CHECK(s.energies[0] == doctest::Approx(-1.0).epsilon(1e-13));
  CHECK(s.energies[1] == doctest::Approx(0.0).epsilon(1e-13));
  CHECK(s.energies[2] == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(s.multiplicities[0] == 1);
  CHECK(s.multiplicities[1] == 2);
  CHECK(s.multiplicities[2] == 1);
  // Middle projector covers the {01, 10} plane.
  Matrix mid = ketbra(4, 1, 1) + ketbra(4, 2, 2);
  CHECK(max_abs(s.projectors[1] - mid) < 1e-12);
}

TEST_CASE("eigensystem rejects non-Hermitian input") {
  Matrix m(2, 2);
  m << 0, 1, 0, 0;
  CHECK_THROWS_AS((void)hermitian_eigensystem(m), std::invalid_argument);
}

TEST_CASE("spectral reconstruction and projector orthogonality hold on random draws") {
  Rng rng(901);
  for (int trial = 0; trial < 20; ++trial) {
    std::uniform_int_distribution<int> dp(2, 10);
    const int d = dp(rng);
    Matrix h = testsupport::random_hermitian(rng, d, 2.0);
    Spectrum s = hermitian_eigensystem(h);

    Matrix rebuilt = Matrix::Zero(d, d);
    Matrix resolved = Matrix::Zero(d, d);
    for (int k = 0; k < s.sector_count(); ++k) {
      rebuilt += s.energies[size_t(k)] * s.projectors[size_t(k)];
      resolved += s.projectors[size_t(k)];
      for (int l = 0; l < s.sector_count(); ++l) {
        Matrix prod = s.projectors[size_t(k)] * s.projectors[size_t(l)];
        Matrix want = (k == l) ? s.projectors[size_t(k)] : Matrix(Matrix::Zero(d, d));
        CHECK(max_abs(prod - want) < 1e-12);
      }
    }
    CHECK(max_abs(rebuilt - h) < 1e-10);
    CHECK(max_abs(resolved - identity(d)) < 1e-12);
  }
}

TEST_CASE("exponential of the zero matrix is the identity") {
  CHECK(max_abs(matrix_exponential(Matrix::Zero(3, 3)) - identity(3)) < 1e-15);
}

TEST_CASE("exp(-i sigma_z pi) flips the global sign") {
  Matrix m = -I1 * pauli_z();
  Matrix u = matrix_exponential(m, M_PI);
  CHECK(max_abs(u + identity(2)) < 1e-12);
}

TEST_CASE("exponential of a decay generator reproduces two-level relaxation") {
  // rho' = kappa (s- rho s+ - 1/2 {s+ s-, rho}) as a dim-4 superoperator.
  const double kappa = 1.0;
  Matrix sm = ketbra(2, 0, 1);
  Matrix sp = sm.adjoint();
  Matrix num = sp * sm;
  Matrix l = kappa * (sandwich_superop(sm, sp) -
                      0.5 * left_mult_superop(num) - 0.5 * right_mult_superop(num));

  Matrix prop = matrix_exponential(l, 1.0 / kappa);
  Vector v = prop * vec(Matrix(ketbra(2, 1, 1)));
  Matrix rho = unvec(v, 2);
  CHECK(std::abs(rho(1, 1).real() - std::exp(-1.0)) < 1e-10);
  CHECK(std::abs(rho(0, 0).real() - (1.0 - std::exp(-1.0))) < 1e-10);
  CHECK(std::abs(rho.trace() - 1.0) < 1e-12);

  // Cross-check: the same column action via a Runge-Kutta reference.
  // Hand-stepped RK4 with a tiny fixed step, no library involvement.
  Vector y = vec(Matrix(ketbra(2, 1, 1)));
  const int steps = 20000;
  const double hstep = (1.0 / kappa) / steps;
  for (int i = 0; i < steps; ++i) {
    Vector k1 = l * y;
    Vector k2 = l * (y + 0.5 * hstep * k1);
    Vector k3 = l * (y + 0.5 * hstep * k2);
    Vector k4 = l * (y + hstep * k3);
    y += (hstep / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  CHECK((v - y).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("exponential satisfies the semigroup law on bounded random matrices") {
  Rng rng(902);
  std::uniform_real_distribution<double> tp(0.1, 1.5);
  for (int trial = 0; trial < 10; ++trial) {
    std::uniform_int_distribution<int> dp(2, 6);
    const int d = dp(rng);
    Matrix m = testsupport::random_matrix(rng, d);
    double norm = m.norm();
    if (norm > 5.0) m *= 5.0 / norm;
    const double t1 = tp(rng), t2 = tp(rng);
    Matrix direct = matrix_exponential(m, t1 + t2);
    Matrix split = matrix_exponential(m, t1) * matrix_exponential(m, t2);
    CHECK(max_abs(direct - split) < 1e-9);
  }
}

TEST_CASE("exponential rejects non-finite input") {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS((void)matrix_exponential(m), std::invalid_argument);
}

TEST_CASE("vectorization round-trips and matches the kron convention") {
  Rng rng(903);
  Matrix a = testsupport::random_matrix(rng, 3);
  Matrix b = testsupport::random_matrix(rng, 3);
  Matrix x = testsupport::random_matrix(rng, 3);

  CHECK(max_abs(unvec(vec(x), 3) - x) == 0.0);
  CHECK(max_abs(unvec(Vector(sandwich_superop(a, b) * vec(x)), 3) - a * x * b) < 1e-13);
  CHECK(max_abs(unvec(Vector(left_mult_superop(a) * vec(x)), 3) - a * x) < 1e-13);
  CHECK(max_abs(unvec(Vector(right_mult_superop(b) * vec(x)), 3) - x * b) < 1e-13);
}

TEST_CASE("partial trace drops an uncorrelated factor") {
  Rng rng(904);
  Matrix a = testsupport::random_density(rng, 2);
  Matrix b = testsupport::random_density(rng, 3);
  Matrix joint = kron(a, b);
  CHECK(max_abs(partial_trace(joint, {2, 3}, 0) - a) < 1e-13);
  CHECK(max_abs(partial_trace(joint, {2, 3}, 1) - b) < 1e-13);
}

TEST_CASE("partial trace of a Bell pair is maximally mixed") {
  Vector bell(4);
  bell << 1, 0, 0, 1;
  bell /= std::sqrt(2.0);
  Matrix rho = bell * bell.adjoint();
  CHECK(max_abs(partial_trace(rho, {2, 2}, 0) - 0.5 * identity(2)) < 1e-14);
  CHECK(max_abs(partial_trace(rho, {2, 2}, 1) - 0.5 * identity(2)) < 1e-14);
}

TEST_CASE("partial trace agrees with the index-sum definition on a random 2x3 system") {
  Rng rng(905);
  Matrix rho = testsupport::random_density(rng, 6);
  // Reference: direct double loop over the traced index. First factor is the
  // most significant index, so row = i*3 + j for subsystem states (i, j).
  Matrix keep_first = Matrix::Zero(2, 2);
  for (int i = 0; i < 2; ++i)
    for (int ip = 0; ip < 2; ++ip)
      for (int j = 0; j < 3; ++j) keep_first(i, ip) += rho(i * 3 + j, ip * 3 + j);
  Matrix keep_second = Matrix::Zero(3, 3);
  for (int j = 0; j < 3; ++j)
    for (int jp = 0; jp < 3; ++jp)
      for (int i = 0; i < 2; ++i) keep_second(j, jp) += rho(i * 3 + j, i * 3 + jp);

  CHECK(max_abs(partial_trace(rho, {2, 3}, 0) - keep_first) < 1e-13);
  CHECK(max_abs(partial_trace(rho, {2, 3}, 1) - keep_second) < 1e-13);
}

TEST_CASE("partial trace is linear and trace preserving") {
  Rng rng(906);
  std::uniform_real_distribution<double> cp(-2.0, 2.0);
  for (int trial = 0; trial < 5; ++trial) {
    Matrix x = testsupport::random_matrix(rng, 6);
    Matrix y = testsupport::random_matrix(rng, 6);
    const std::complex<double> alpha(cp(rng), cp(rng));
    Matrix lhs = partial_trace(alpha * x + y, {2, 3}, 1);
    Matrix rhs = alpha * partial_trace(x, {2, 3}, 1) + partial_trace(y, {2, 3}, 1);
    CHECK(max_abs(lhs - rhs) < 1e-12);
    CHECK(std::abs(partial_trace(x, {2, 3}, 0).trace() - x.trace()) < 1e-12);
  }
}

TEST_CASE("partial trace rejects inconsistent factorizations") {
  Matrix rho = identity(6) / 6.0;
  CHECK_THROWS_AS((void)partial_trace(rho, {2, 2}, 0), std::invalid_argument);
  CHECK_THROWS_AS((void)partial_trace(rho, {2, 3}, 2), std::invalid_argument);
}

TEST_CASE("density checks flag the standard defects") {
  Matrix good = 0.5 * identity(2);
  DensityReport r = check_density(good);
  CHECK(r.trace_deviation < 1e-14);
  CHECK(r.hermiticity < 1e-14);
  CHECK(r.min_eigenvalue > 0.4);
  CHECK_NOTHROW(require_density(good, "good"));

  Matrix traceless = identity(2);
  CHECK_THROWS_AS(require_density(traceless, "double"), std::invalid_argument);

  Matrix neg(2, 2);
  neg << 1.5, 0, 0, -0.5;
  CHECK_THROWS_AS(require_density(neg, "neg"), std::invalid_argument);
}
