#pragma once

// Prebuilt model constructors and the compile pipeline that turns a model
// specification into spectrum, eigenoperator decomposition, shift operator,
// and full generator.

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "oqsim/cascade.hpp"
#include "oqsim/liouvillian.hpp"

namespace oqsim {

struct ModelSpec {
  std::string name;
  std::vector<int> dims;  // subsystem dimensions, first factor most significant
  Matrix h_sys;
  std::vector<std::pair<std::string, Matrix>> couplings;
  SpectralTensor tensor;
  Matrix initial_state;  // density matrix
  std::map<std::string, double> params;
  std::map<std::string, std::string> labels;

  int dim() const { return int(h_sys.rows()); }
  std::vector<Matrix> coupling_ops() const;
};

// Cavity mode truncated at n_max, H = omega_c a^dagger a, transverse channel
// a + a^dagger with rate kappa at +omega_c (already zero-temperature
// restricted). Initial state |initial_fock> (default n_max).
ModelSpec model_damped_cavity(int n_max, double omega_c, double kappa,
                              int initial_fock = -1);

// Two two-level atoms, H = (omega0/2)(sigma_z^1 + sigma_z^2), channels
// sigma_x per atom, collective rate matrix [[gamma, gamma12],[gamma12,
// gamma]] and exchange shift [[0, s12],[s12, 0]] at +omega0. Basis order
// (gg, ge, eg, ee) with atom 1 the most significant factor. |gamma12| <=
// gamma keeps the rate matrix PSD. initial: one of gg, ge, eg, ee, singlet,
// triplet (default ee).
ModelSpec model_two_atoms(double omega0, double gamma, double gamma12, double s12,
                          const std::string& initial = "ee");

// n_atoms two-level atoms exchanging excitation with one cavity mode
// (Tavis-Cummings at resonance omega, per-atom couplings g), photon space
// truncated at n_photon. Channels: cavity a + a^dagger with rate kappa and
// one sigma_x per atom with rate gamma_atom, assigned flatly across every
// positive transition frequency of the dressed spectrum (flat reservoir
// response). Initial state: atom `excited_atom` excited, vacuum elsewhere.
// Total dimension capped at 4096.
ModelSpec model_n_atoms_cavity(int n_atoms, const std::vector<double>& g, double omega,
                               double kappa, double gamma_atom, int n_photon = 1,
                               int excited_atom = 0);

struct CompiledModel {
  ModelSpec spec;
  Spectrum spectrum;
  BohrDecomposition decomp;
  Matrix h_ls;
  Matrix h_eff;  // h_sys + h_ls
  TaggedLiouvillian liouvillian;
  bool lamb_shift_dropped = false;

  // Hermitian part of the sector solver's drift: h_eff, or bare h_sys when
  // the shift is dropped for sensitivity checks. The full-generator oracle is
  // unaffected by the switch.
  const Matrix& sector_h0() const { return lamb_shift_dropped ? spec.h_sys : h_eff; }
};

CompiledModel compile_model(const ModelSpec& spec, bool drop_lamb_shift = false);

}  // namespace oqsim
