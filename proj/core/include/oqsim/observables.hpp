#pragma once

// Physical observables: two-qubit entanglement, decoherence-free subspaces,
// populations.

#include <vector>

#include "oqsim/eigenops.hpp"
#include "oqsim/spectral_tensor.hpp"

namespace oqsim {

// Wootters concurrence of a two-qubit density matrix, clipped to [0, 1].
// Throws std::invalid_argument unless rho is a 4x4 density matrix.
double concurrence(const Matrix& rho);

// Real diagonal of a density matrix.
std::vector<double> populations(const Matrix& rho);

// Orthonormal basis of the decoherence-free subspace: the joint kernel of
// every positive-frequency decay channel, restricted to its largest subspace
// invariant under h_eff. Returned states are eigenvectors of h_eff within the
// subspace, ordered by ascending energy, so each is stationary up to phase
// under the full generator. Always contains the ground sector. Requires a
// zero-temperature tensor.
std::vector<Vector> dfs_basis(const BohrDecomposition& d, const SpectralTensor& t,
                              const Matrix& h_eff, double tol = 1e-10);

}  // namespace oqsim
