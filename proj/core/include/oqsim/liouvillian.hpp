#pragma once

// Assembly of the full master-equation generator in superoperator form,
//
//   L(rho) = -i[H_S + H_LS, rho]
//          + sum_{omega,a,b} gamma_ab(omega) ( A_b(omega) rho A_a(omega)^dagger
//              - 1/2 { A_a(omega)^dagger A_b(omega), rho } ),
//
// split into tagged parts (bare Hamiltonian, Lamb-type shift, jump,
// anticommutator drift) that sum to the total.

#include <string>
#include <vector>

#include "oqsim/eigenops.hpp"
#include "oqsim/spectral_tensor.hpp"

namespace oqsim {

struct TaggedLiouvillian {
  int dim = 0;  // Hilbert-space dimension; superoperators are dim^2 x dim^2
  Matrix total;
  Matrix hamiltonian;  // -i[H_S, .]
  Matrix lamb_shift;   // -i[H_LS, .]
  Matrix jump;         // sum gamma_ab A_b . A_a^dagger
  Matrix drift;        // -1/2 sum gamma_ab {A_a^dagger A_b, .}
  // Frequencies present in the tensor but matching no transition of the
  // decomposition (they contribute nothing and usually indicate a typo).
  std::vector<std::string> notes;

  Matrix apply(const Matrix& rho) const { return unvec(total * vec(rho), dim); }
};

// H_LS = sum_{omega,a,b} S_ab(omega) A_a(omega)^dagger A_b(omega).
// Hermitian, commutes with the clustered H_S sector by sector.
Matrix build_lamb_shift(const SpectralTensor& t, const BohrDecomposition& d);

// K = sum_{omega,a,b} gamma_ab(omega) A_a(omega)^dagger A_b(omega); the
// anticommutator drift equals -1/2 {K, rho}. positive_only restricts the sum
// to omega > 0 (the zero-temperature decay operator feeding the sector
// solver).
Matrix build_rate_operator(const SpectralTensor& t, const BohrDecomposition& d,
                           bool positive_only = false);

TaggedLiouvillian build_liouvillian(const Matrix& h_sys, const SpectralTensor& t,
                                    const BohrDecomposition& d);

// Largest generator entry that connects sector pairs forbidden by the
// zero-temperature selection rule: in the matrix-unit basis |e_m><e_n| the
// jump part may move weight only to pairs reached by lowering BOTH indices
// through one common positive frequency, and the remaining parts act within
// each pair. Small return values certify block lower-triangularity of L in
// the energy-pair ordering.
double max_forbidden_block_magnitude(const TaggedLiouvillian& l, const BohrDecomposition& d);

}  // namespace oqsim
