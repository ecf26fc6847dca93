#include "oqsim/models.hpp"

#include <cmath>

namespace oqsim {

namespace {

Matrix pure_state(const Vector& psi) { return psi * psi.adjoint(); }

Matrix sigma_x() {
  Matrix s(2, 2);
  s << 0, 1, 1, 0;
  return s;
}

// |e><e| - |g><g| in the (g, e) index order used throughout the builders.
Matrix sigma_z() {
  Matrix s(2, 2);
  s << -1, 0, 0, 1;
  return s;
}

Matrix embed(const Matrix& op, int slot, const std::vector<int>& dims) {
  Matrix out = Matrix::Identity(1, 1);
  for (int i = 0; i < int(dims.size()); ++i)
    out = kron(out, i == slot ? op : Matrix(identity(dims[size_t(i)])));
  return out;
}

}  // namespace

std::vector<Matrix> ModelSpec::coupling_ops() const {
  std::vector<Matrix> ops;
  ops.reserve(couplings.size());
  for (const auto& [label, op] : couplings) ops.push_back(op);
  return ops;
}

ModelSpec model_damped_cavity(int n_max, double omega_c, double kappa, int initial_fock) {
  if (n_max < 1) throw std::invalid_argument("damped_cavity: n_max must be >= 1");
  if (!(kappa > 0.0)) throw std::invalid_argument("damped_cavity: kappa must be positive");
  if (initial_fock < 0) initial_fock = n_max;
  if (initial_fock > n_max)
    throw std::invalid_argument("damped_cavity: initial Fock index exceeds n_max");

  const int d = n_max + 1;
  Matrix a = annihilation(d);

  ModelSpec m;
  m.name = "damped_cavity";
  m.dims = {d};
  m.h_sys = omega_c * (a.adjoint() * a);
  m.couplings.emplace_back("cavity_x", a + a.adjoint());
  SpectralEntry e;
  e.omega = omega_c;
  e.gamma = kappa * Matrix::Identity(1, 1);
  e.lamb = Matrix::Zero(1, 1);
  m.tensor = make_spectral_tensor({e});
  m.initial_state = ketbra(d, initial_fock, initial_fock);
  m.params = {{"n_max", double(n_max)},
              {"omega_c", omega_c},
              {"kappa", kappa},
              {"initial_fock", double(initial_fock)}};
  return m;
}

ModelSpec model_two_atoms(double omega0, double gamma, double gamma12, double s12,
                          const std::string& initial) {
  if (!(gamma >= 0.0)) throw std::invalid_argument("two_atoms: gamma must be >= 0");
  if (std::abs(gamma12) > gamma)
    throw std::invalid_argument(
        "two_atoms: |gamma12| must not exceed gamma (collective rate matrix "
        "would not be positive semidefinite)");

  const std::vector<int> dims = {2, 2};
  ModelSpec m;
  m.name = "two_atoms";
  m.dims = dims;
  m.h_sys = 0.5 * omega0 * (embed(sigma_z(), 0, dims) + embed(sigma_z(), 1, dims));
  m.couplings.emplace_back("sigma_x_1", embed(sigma_x(), 0, dims));
  m.couplings.emplace_back("sigma_x_2", embed(sigma_x(), 1, dims));

  SpectralEntry e;
  e.omega = omega0;
  e.gamma = Matrix(2, 2);
  e.gamma << gamma, gamma12, gamma12, gamma;
  e.lamb = Matrix(2, 2);
  e.lamb << 0, s12, s12, 0;
  m.tensor = make_spectral_tensor({e});

  // basis order (gg, ge, eg, ee); atom 1 is the most significant factor
  Vector psi = Vector::Zero(4);
  if (initial == "gg") psi(0) = 1.0;
  else if (initial == "ge") psi(1) = 1.0;
  else if (initial == "eg") psi(2) = 1.0;
  else if (initial == "ee") psi(3) = 1.0;
  else if (initial == "singlet") { psi(2) = 1.0 / std::sqrt(2.0); psi(1) = -1.0 / std::sqrt(2.0); }
  else if (initial == "triplet") { psi(2) = 1.0 / std::sqrt(2.0); psi(1) = 1.0 / std::sqrt(2.0); }
  else
    throw std::invalid_argument("two_atoms: unknown initial state '" + initial +
                                "' (expected gg, ge, eg, ee, singlet, or triplet)");
  m.initial_state = pure_state(psi);
  m.params = {{"omega0", omega0}, {"gamma", gamma}, {"gamma12", gamma12}, {"s12", s12}};
  m.labels["initial"] = initial;
  return m;
}

ModelSpec model_n_atoms_cavity(int n_atoms, const std::vector<double>& g, double omega,
                               double kappa, double gamma_atom, int n_photon,
                               int excited_atom) {
  if (n_atoms < 1) throw std::invalid_argument("n_atoms_cavity: need at least one atom");
  if (int(g.size()) != n_atoms)
    throw std::invalid_argument("n_atoms_cavity: need one coupling g per atom");
  if (n_photon < 1)
    throw std::invalid_argument("n_atoms_cavity: photon truncation must be >= 1");
  if (excited_atom < 0 || excited_atom >= n_atoms)
    throw std::invalid_argument("n_atoms_cavity: excited_atom out of range");

  std::vector<int> dims(size_t(n_atoms), 2);
  dims.push_back(n_photon + 1);
  long total = 1;
  for (int d : dims) {
    total *= d;
    if (total > 4096)
      throw std::invalid_argument(
          "n_atoms_cavity: total dimension exceeds 4096; reduce atoms or photon "
          "truncation");
  }
  const int d = int(total);
  const int cavity_slot = n_atoms;

  Matrix a_cav = embed(annihilation(n_photon + 1), cavity_slot, dims);
  Matrix h = omega * (a_cav.adjoint() * a_cav);
  for (int i = 0; i < n_atoms; ++i) {
    Matrix sp = embed(ketbra(2, 1, 0), i, dims);  // |e><g| on atom i
    h += 0.5 * omega * embed(sigma_z(), i, dims);
    h += g[size_t(i)] * (sp * a_cav + a_cav.adjoint() * sp.adjoint());
  }

  ModelSpec m;
  m.name = "n_atoms_cavity";
  m.dims = dims;
  m.h_sys = h;
  m.couplings.emplace_back("cavity_x", a_cav + a_cav.adjoint());
  for (int i = 0; i < n_atoms; ++i)
    m.couplings.emplace_back("sigma_x_" + std::to_string(i + 1),
                             embed(sigma_x(), i, dims));

  // Flat reservoir response: the same channel rate matrix at every positive
  // transition frequency of the dressed spectrum.
  Matrix rates = Matrix::Zero(n_atoms + 1, n_atoms + 1);
  rates(0, 0) = kappa;
  for (int i = 1; i <= n_atoms; ++i) rates(i, i) = gamma_atom;
  BohrDecomposition dec = decompose(m.h_sys, m.coupling_ops());
  std::vector<SpectralEntry> entries;
  for (int f = 0; f < dec.frequency_count(); ++f) {
    if (dec.frequencies[size_t(f)].omega <= 0.0) continue;
    bool any = false;
    for (int c = 0; c <= n_atoms && !any; ++c) any = dec.has_op(c, f);
    if (!any) continue;
    SpectralEntry e;
    e.omega = dec.frequencies[size_t(f)].omega;
    e.gamma = rates;
    e.lamb = Matrix::Zero(n_atoms + 1, n_atoms + 1);
    entries.push_back(std::move(e));
  }
  m.tensor = make_spectral_tensor(std::move(entries));

  Vector psi = Vector::Zero(d);
  // index of |g...e...g, 0>: atom slots most significant, cavity least
  long idx = 0;
  for (int i = 0; i < n_atoms; ++i) idx = idx * 2 + (i == excited_atom ? 1 : 0);
  idx = idx * (n_photon + 1);
  psi(idx) = 1.0;
  m.initial_state = pure_state(psi);

  m.params = {{"n_atoms", double(n_atoms)}, {"omega", omega},      {"kappa", kappa},
              {"gamma_atom", gamma_atom},   {"n_photon", double(n_photon)},
              {"excited_atom", double(excited_atom)}};
  for (int i = 0; i < n_atoms; ++i)
    m.params["g_" + std::to_string(i + 1)] = g[size_t(i)];
  return m;
}

CompiledModel compile_model(const ModelSpec& spec, bool drop_lamb_shift) {
  if (spec.h_sys.rows() != spec.h_sys.cols())
    throw std::invalid_argument("compile_model: Hamiltonian not square");
  long prod = 1;
  for (int d : spec.dims) prod *= d;
  if (!spec.dims.empty() && prod != spec.h_sys.rows())
    throw std::invalid_argument("compile_model: dims do not factor the Hamiltonian");
  if (spec.h_sys.rows() > 32)
    throw std::invalid_argument(
        "compile_model: dimension " + std::to_string(spec.h_sys.rows()) +
        " exceeds 32; the compiled pipeline assembles dense d^2 x d^2 "
        "superoperators, so larger systems should drive the sector solver or "
        "trajectory unraveling directly");
  require_density(spec.initial_state, "initial state");
  require_valid_tensor(spec.tensor, int(spec.couplings.size()));

  CompiledModel c;
  c.spec = spec;
  c.lamb_shift_dropped = drop_lamb_shift;
  c.spectrum = hermitian_eigensystem(spec.h_sys);
  c.decomp = decompose(c.spectrum, spec.coupling_ops());
  c.h_ls = build_lamb_shift(spec.tensor, c.decomp);
  c.h_eff = spec.h_sys + c.h_ls;
  c.liouvillian = build_liouvillian(spec.h_sys, spec.tensor, c.decomp);
  return c;
}

}  // namespace oqsim
