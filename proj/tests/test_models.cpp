#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>

#include "oqsim/models.hpp"
#include "oqsim/propagate.hpp"
#include "support/random_models.hpp"

using namespace oqsim;

namespace {
const std::complex<double> I1(0.0, 1.0);

std::vector<double> grid(double t_max, int points) {
  std::vector<double> t(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) t[size_t(i)] = t_max * double(i) / (points - 1);
  return t;
}

Matrix pauli_x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}
}  // namespace

TEST_CASE("cavity model wiring: spectrum, channel, tensor, initial state") {
  const double omega_c = 1.3, kappa = 0.4;
  ModelSpec spec = model_damped_cavity(3, omega_c, kappa);
  CHECK(spec.dim() == 4);
  Matrix a = annihilation(4);
  CHECK(max_abs(spec.h_sys - omega_c * a.adjoint() * a) < 1e-13);
  REQUIRE(spec.couplings.size() == 1);
  CHECK(max_abs(spec.couplings[0].second - (a + a.adjoint())) < 1e-14);
  REQUIRE(spec.tensor.entries.size() == 1);
  CHECK(spec.tensor.entries[0].omega == doctest::Approx(omega_c).epsilon(1e-14));
  CHECK(std::abs(spec.tensor.entries[0].gamma(0, 0) - kappa) < 1e-15);
  CHECK(spec.tensor.zero_temperature());
  // Default initial state is the top rung.
  CHECK(max_abs(spec.initial_state - ketbra(4, 3, 3)) < 1e-15);

  CompiledModel m = compile_model(spec);
  const int f = m.decomp.index_of(omega_c);
  REQUIRE(f >= 0);
  CHECK(max_abs(m.decomp.op(0, f) - a) < 1e-12);
}

TEST_CASE("cavity population decays exponentially from the one-photon state") {
  const double kappa = 0.7;
  CompiledModel m = compile_model(model_damped_cavity(2, 1.0, kappa, 1));
  std::vector<double> t = grid(4.0, 9);
  EvolutionResult r = propagate_expm(m.liouvillian, m.spec.initial_state, t);
  for (size_t i = 0; i < t.size(); ++i)
    CHECK(std::abs(r.states[i](1, 1).real() - std::exp(-kappa * t[i])) < 1e-10);
}

TEST_CASE("cavity model rejects bad shapes") {
  CHECK_THROWS_AS((void)model_damped_cavity(0, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS((void)model_damped_cavity(3, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS((void)model_damped_cavity(3, 1.0, -0.5), std::invalid_argument);
  CHECK_THROWS_AS((void)model_damped_cavity(3, 1.0, 1.0, 7), std::invalid_argument);
}

TEST_CASE("two-atom model wiring: Hamiltonian, channels, collective tensor") {
  const double omega0 = 1.0, gamma = 0.8, gamma12 = 0.3, s12 = 0.1;
  ModelSpec spec = model_two_atoms(omega0, gamma, gamma12, s12);
  CHECK(spec.dim() == 4);
  // Basis (gg, ge, eg, ee): energies -omega0, 0, 0, +omega0.
  Matrix want_h = Matrix::Zero(4, 4);
  want_h(0, 0) = -omega0;
  want_h(3, 3) = omega0;
  CHECK(max_abs(spec.h_sys - want_h) < 1e-14);

  REQUIRE(spec.couplings.size() == 2);
  CHECK(max_abs(spec.couplings[0].second - kron(pauli_x(), identity(2))) < 1e-14);
  CHECK(max_abs(spec.couplings[1].second - kron(identity(2), pauli_x())) < 1e-14);

  REQUIRE(spec.tensor.entries.size() == 1);
  const SpectralEntry& e = spec.tensor.entries[0];
  CHECK(e.omega == doctest::Approx(omega0).epsilon(1e-14));
  CHECK(std::abs(e.gamma(0, 0) - gamma) < 1e-15);
  CHECK(std::abs(e.gamma(0, 1) - gamma12) < 1e-15);
  CHECK(std::abs(e.lamb(0, 1) - s12) < 1e-15);
  CHECK(std::abs(e.lamb(0, 0)) < 1e-15);
}

TEST_CASE("named initial states of the two-atom model") {
  Vector singlet = Vector::Zero(4);
  singlet(1) = -1.0 / std::sqrt(2.0);
  singlet(2) = 1.0 / std::sqrt(2.0);
  Matrix want = singlet * singlet.adjoint();
  CHECK(max_abs(model_two_atoms(1, 1, 0, 0, "singlet").initial_state - want) < 1e-14);

  Vector triplet = Vector::Zero(4);
  triplet(1) = 1.0 / std::sqrt(2.0);
  triplet(2) = 1.0 / std::sqrt(2.0);
  want = triplet * triplet.adjoint();
  CHECK(max_abs(model_two_atoms(1, 1, 0, 0, "triplet").initial_state - want) < 1e-14);

  CHECK(max_abs(model_two_atoms(1, 1, 0, 0, "eg").initial_state - ketbra(4, 2, 2)) <
        1e-14);
  CHECK(max_abs(model_two_atoms(1, 1, 0, 0).initial_state - ketbra(4, 3, 3)) < 1e-14);
  CHECK_THROWS_AS((void)model_two_atoms(1, 1, 0, 0, "bogus"), std::invalid_argument);
}

TEST_CASE("independent atoms evolve as a product of lossy qubits") {
  const double omega0 = 1.0, gamma = 0.6;
  CompiledModel m = compile_model(model_two_atoms(omega0, gamma, 0.0, 0.0, "ee"));
  std::vector<double> t = grid(3.0, 7);
  EvolutionResult r = propagate_expm(m.liouvillian, m.spec.initial_state, t);

  // Single-atom reference: excited lossy qubit in the (g, e) basis.
  for (size_t i = 0; i < t.size(); ++i) {
    const double pe = std::exp(-gamma * t[i]);
    Matrix one(2, 2);
    one << 1.0 - pe, 0, 0, pe;
    Matrix product = kron(one, one);
    CHECK(max_abs(r.states[i] - product) < 1e-10);
  }
}

TEST_CASE("collective rate matrices beyond the PSD boundary are rejected") {
  CHECK_THROWS_AS((void)model_two_atoms(1.0, 0.5, 0.6, 0.0), std::invalid_argument);
  CHECK_NOTHROW((void)model_two_atoms(1.0, 0.5, 0.5, 0.0));
}

TEST_CASE("single atom in a cavity reproduces the resonant exchange Hamiltonian") {
  const double g = 0.25, omega = 1.0;
  ModelSpec spec = model_n_atoms_cavity(1, {g}, omega, 0.3, 0.0, 2);
  CHECK(spec.dim() == 6);  // qubit x three photon levels

  // Hand-built reference on (atom) x (photons), atom most significant.
  Matrix a = annihilation(3);
  Matrix sm(2, 2);
  sm << 0, 1, 0, 0;
  Matrix sz(2, 2);
  sz << -1, 0, 0, 1;
  Matrix h = omega * kron(identity(2), a.adjoint() * a) + 0.5 * omega * kron(sz, identity(3));
  h += g * (kron(sm.adjoint(), a) + kron(sm, Matrix(a.adjoint())));
  CHECK(max_abs(spec.h_sys - h) < 1e-12);

  // Initial: excited atom, vacuum field.
  Vector psi = Vector::Zero(6);
  psi(3) = 1.0;  // |e> x |0>
  CHECK(max_abs(spec.initial_state - psi * psi.adjoint()) < 1e-14);
}

TEST_CASE("two equally coupled atoms leave the antisymmetric excitation dark") {
  const double g = 0.2;
  CompiledModel m =
      compile_model(model_n_atoms_cavity(2, {g, g}, 1.0, 0.5, 0.0, 1));
  // |psi> = (|eg> - |ge>)/sqrt(2) x |0>: decoupled from the cavity when the
  // couplings coincide, hence stationary under the full generator.
  const int dim = m.spec.dim();
  REQUIRE(dim == 8);  // 2 x 2 x 2 photons
  Vector psi = Vector::Zero(dim);
  // Ordering (atom1, atom2, photon), first factor most significant:
  // |e g 0> = index (1,0,0) -> 4, |g e 0> = index (0,1,0) -> 2.
  psi(4) = 1.0 / std::sqrt(2.0);
  psi(2) = -1.0 / std::sqrt(2.0);
  Matrix rho = psi * psi.adjoint();
  CHECK(max_abs(m.liouvillian.apply(rho)) < 1e-10);
}

TEST_CASE("unequal cavity couplings brighten the antisymmetric state") {
  CompiledModel m =
      compile_model(model_n_atoms_cavity(2, {0.2, 0.35}, 1.0, 0.5, 0.0, 1));
  Vector psi = Vector::Zero(8);
  psi(4) = 1.0 / std::sqrt(2.0);
  psi(2) = -1.0 / std::sqrt(2.0);
  Matrix rho = psi * psi.adjoint();
  CHECK(max_abs(m.liouvillian.apply(rho)) > 1e-3);
}

TEST_CASE("atom-cavity model validates its inputs") {
  CHECK_THROWS_AS((void)model_n_atoms_cavity(0, {}, 1.0, 1.0, 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)model_n_atoms_cavity(2, {0.1}, 1.0, 1.0, 0.0),
                  std::invalid_argument);
  // 11 atoms x 2 photon levels: 2^11 * 3 = 6144 > 4096.
  CHECK_THROWS_AS((void)model_n_atoms_cavity(11, std::vector<double>(11, 0.1), 1.0,
                                             1.0, 0.0, 2),
                  std::invalid_argument);
}

TEST_CASE("compilation populates spectrum, shift, and generator coherently") {
  const double omega0 = 1.0, gamma = 0.5, gamma12 = 0.2, s12 = 0.15;
  CompiledModel m = compile_model(model_two_atoms(omega0, gamma, gamma12, s12));
  CHECK(m.spectrum.sector_count() == 3);
  CHECK(hermiticity_defect(m.h_ls) < 1e-12);
  CHECK(max_abs(m.h_eff - (m.spec.h_sys + m.h_ls)) < 1e-14);
  CHECK(max_abs(m.liouvillian.total -
                (m.liouvillian.hamiltonian + m.liouvillian.lamb_shift +
                 m.liouvillian.jump + m.liouvillian.drift)) < 1e-12);
  CHECK_FALSE(m.lamb_shift_dropped);
  CHECK(max_abs(m.sector_h0() - m.h_eff) < 1e-14);
}

TEST_CASE("dropping the shift changes only the sector drift") {
  CompiledModel with = compile_model(model_two_atoms(1.0, 0.5, 0.2, 0.3));
  CompiledModel without = compile_model(model_two_atoms(1.0, 0.5, 0.2, 0.3), true);
  CHECK(without.lamb_shift_dropped);
  CHECK(max_abs(without.sector_h0() - without.spec.h_sys) < 1e-14);
  CHECK(max_abs(with.sector_h0() - without.sector_h0()) > 1e-3);
  // The oracle generator itself keeps the shift either way.
  CHECK(max_abs(with.liouvillian.total - without.liouvillian.total) < 1e-13);
}

TEST_CASE("compilation caps the dense superoperator dimension") {
  ModelSpec spec = model_damped_cavity(39, 1.0, 1.0, 0);  // dim 40
  CHECK_THROWS_AS((void)compile_model(spec), std::invalid_argument);
}

TEST_CASE("all builtin generators respect trace preservation and the selection rule") {
  std::vector<ModelSpec> specs;
  specs.push_back(model_damped_cavity(3, 1.0, 0.5));
  specs.push_back(model_two_atoms(1.0, 0.8, 0.5, 0.2));
  specs.push_back(model_n_atoms_cavity(2, {0.2, 0.3}, 1.0, 0.4, 0.1, 1));
  for (const ModelSpec& spec : specs) {
    CompiledModel m = compile_model(spec);
    const int dim = m.spec.dim();
    Vector tr_row = m.liouvillian.total.adjoint() * vec(Matrix(identity(dim)));
    CHECK(tr_row.cwiseAbs().maxCoeff() < 1e-10 * std::max(1.0, max_abs(m.liouvillian.total)));
    CHECK(max_forbidden_block_magnitude(m.liouvillian, m.decomp) < 1e-13);
    CHECK_NOTHROW(require_valid_tensor(m.spec.tensor));
  }
}
