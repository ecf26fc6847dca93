#include "oqsim/liouvillian.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace oqsim {

namespace {

// Tensor entries matched to decomposition frequency indices; unmatched
// entries are reported through *notes when given.
std::vector<std::pair<const SpectralEntry*, int>> match_entries(
    const SpectralTensor& t, const BohrDecomposition& d, std::vector<std::string>* notes) {
  std::vector<std::pair<const SpectralEntry*, int>> matched;
  for (const auto& e : t.entries) {
    int f = d.index_of(e.omega);
    if (f < 0) {
      if (notes) {
        std::ostringstream os;
        os << "spectral entry at omega=" << e.omega
           << " matches no transition frequency; it contributes nothing";
        notes->push_back(os.str());
      }
      continue;
    }
    matched.emplace_back(&e, f);
  }
  return matched;
}

void require_channel_match(const SpectralTensor& t, const BohrDecomposition& d) {
  if (!t.entries.empty() && t.channel_count() != d.channel_count())
    throw std::invalid_argument("spectral tensor has " + std::to_string(t.channel_count()) +
                                " channels but the decomposition has " +
                                std::to_string(d.channel_count()));
}

}  // namespace

Matrix build_lamb_shift(const SpectralTensor& t, const BohrDecomposition& d) {
  require_channel_match(t, d);
  const int dim = d.spectrum.dim();
  Matrix h = Matrix::Zero(dim, dim);
  for (auto [entry, f] : match_entries(t, d, nullptr)) {
    if (max_abs(entry->lamb) == 0.0) continue;
    for (int a = 0; a < d.channel_count(); ++a) {
      if (!d.has_op(a, f)) continue;
      for (int b = 0; b < d.channel_count(); ++b) {
        if (!d.has_op(b, f)) continue;
        Complex s = entry->lamb(a, b);
        if (s == 0.0) continue;
        h += s * (d.op(a, f).adjoint() * d.op(b, f));
      }
    }
  }
  return h;
}

Matrix build_rate_operator(const SpectralTensor& t, const BohrDecomposition& d,
                           bool positive_only) {
  require_channel_match(t, d);
  const int dim = d.spectrum.dim();
  Matrix k = Matrix::Zero(dim, dim);
  for (auto [entry, f] : match_entries(t, d, nullptr)) {
    if (positive_only && d.frequencies[size_t(f)].omega <= 0.0) continue;
    if (max_abs(entry->gamma) == 0.0) continue;
    for (int a = 0; a < d.channel_count(); ++a) {
      if (!d.has_op(a, f)) continue;
      for (int b = 0; b < d.channel_count(); ++b) {
        if (!d.has_op(b, f)) continue;
        Complex g = entry->gamma(a, b);
        if (g == 0.0) continue;
        k += g * (d.op(a, f).adjoint() * d.op(b, f));
      }
    }
  }
  return k;
}

TaggedLiouvillian build_liouvillian(const Matrix& h_sys, const SpectralTensor& t,
                                    const BohrDecomposition& d) {
  require_channel_match(t, d);
  const int dim = d.spectrum.dim();
  if (h_sys.rows() != dim || h_sys.cols() != dim)
    throw std::invalid_argument("build_liouvillian: Hamiltonian dimension mismatch");

  TaggedLiouvillian l;
  l.dim = dim;

  auto commutator_superop = [dim](const Matrix& h) {
    return Matrix(-I * (left_mult_superop(h) - right_mult_superop(h)));
  };
  l.hamiltonian = commutator_superop(h_sys);
  l.lamb_shift = commutator_superop(build_lamb_shift(t, d));

  const Eigen::Index n2 = Eigen::Index(dim) * dim;
  l.jump = Matrix::Zero(n2, n2);
  for (auto [entry, f] : match_entries(t, d, &l.notes)) {
    if (max_abs(entry->gamma) == 0.0) continue;
    for (int a = 0; a < d.channel_count(); ++a) {
      if (!d.has_op(a, f)) continue;
      for (int b = 0; b < d.channel_count(); ++b) {
        if (!d.has_op(b, f)) continue;
        Complex g = entry->gamma(a, b);
        if (g == 0.0) continue;
        // rho -> A_b rho A_a^dagger
        l.jump += g * sandwich_superop(d.op(b, f), d.op(a, f).adjoint());
      }
    }
  }

  Matrix k = build_rate_operator(t, d, false);
  l.drift = -0.5 * (left_mult_superop(k) + right_mult_superop(k));

  l.total = l.hamiltonian + l.lamb_shift + l.jump + l.drift;
  return l;
}

double max_forbidden_block_magnitude(const TaggedLiouvillian& l, const BohrDecomposition& d) {
  const Spectrum& s = d.spectrum;
  const int ns = s.sector_count();
  const int dim = s.dim();
  if (l.dim != dim)
    throw std::invalid_argument("max_forbidden_block_magnitude: dimension mismatch");

  // allowed_drop[m][n][mp][np]: may weight move from pair (mp, np) to (m, n)?
  // Yes when identical, or when some positive frequency lowers mp -> m and
  // np -> n simultaneously.
  auto lowers = [&](int to, int from, const BohrFrequencyGroup& g) {
    return std::any_of(g.sector_pairs.begin(), g.sector_pairs.end(),
                       [&](const std::pair<int, int>& p) {
                         return p.first == to && p.second == from;
                       });
  };

  // Superprojector onto the (m, n) pair block of vec(rho):
  // rho -> P_m rho P_n, i.e. kron(P_n^T, P_m).
  std::vector<Matrix> pair_proj;
  pair_proj.reserve(size_t(ns) * size_t(ns));
  for (int n = 0; n < ns; ++n)
    for (int m = 0; m < ns; ++m)
      pair_proj.push_back(sandwich_superop(s.projectors[size_t(m)], s.projectors[size_t(n)]));
  auto proj = [&](int m, int n) -> const Matrix& {
    return pair_proj[size_t(n) * size_t(ns) + size_t(m)];
  };

  double worst = 0.0;
  for (int mp = 0; mp < ns; ++mp) {
    for (int np = 0; np < ns; ++np) {
      Matrix column = l.total * proj(mp, np);
      for (int m = 0; m < ns; ++m) {
        for (int n = 0; n < ns; ++n) {
          bool allowed = (m == mp && n == np);
          if (!allowed) {
            for (const auto& g : d.frequencies) {
              if (g.omega <= 0.0) continue;
              if (lowers(m, mp, g) && lowers(n, np, g)) {
                allowed = true;
                break;
              }
            }
          }
          if (allowed) continue;
          worst = std::max(worst, max_abs(proj(m, n) * column));
        }
      }
    }
  }
  return worst;
}

}  // namespace oqsim
