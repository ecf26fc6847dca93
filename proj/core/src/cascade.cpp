#include "oqsim/cascade.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "oqsim/liouvillian.hpp"
#include "oqsim/ode.hpp"

namespace oqsim {

namespace {

constexpr double kDropNorm = 1e-13;

bool pair_order(const Spectrum& s, const std::pair<int, int>& a,
                const std::pair<int, int>& b) {
  double ea = s.energies[size_t(a.first)] + s.energies[size_t(a.second)];
  double eb = s.energies[size_t(b.first)] + s.energies[size_t(b.second)];
  if (ea != eb) return ea > eb;
  return a > b;
}

void require_same_clustering(const Spectrum& a, const Spectrum& b) {
  bool same = a.sector_count() == b.sector_count() && a.dim() == b.dim();
  if (same) {
    double tol = 1e-12 * std::max(1.0, std::max(a.range(), b.range()));
    for (int k = 0; same && k < a.sector_count(); ++k)
      same = std::abs(a.energies[size_t(k)] - b.energies[size_t(k)]) <= tol &&
             a.multiplicities[size_t(k)] == b.multiplicities[size_t(k)];
  }
  if (!same)
    throw std::invalid_argument(
        "cascade: sector blocks and decomposition use different spectra; "
        "derive both from one hermitian_eigensystem call");
}

void require_cascade_tensor(const SpectralTensor& t) {
  if (!t.zero_temperature())
    throw std::invalid_argument(
        "cascade: tensor is not zero-temperature-restricted; apply "
        "restrict_zero_temperature or use the oracle integrator");
  TensorHealth h = check_spectral_tensor(t);
  if (h.negative_frequency_gamma > 0.0)
    throw std::invalid_argument(
        "cascade: dissipative weight at negative frequency is incompatible "
        "with the zero-temperature restriction");
  if (h.zero_frequency_gamma > 0.0)
    throw std::invalid_argument(
        "cascade: dissipative weight at omega=0 is not a strictly-lowering "
        "jump; the sector solver requires omega>0 (the oracle integrator "
        "accepts such tensors)");
}

// Feeding topology and stacked compact coordinates shared by cascade_solve
// and closed_form_block. All sector bases come from the Spectrum passed in;
// the decomposition contributes only the frequency/pair structure.
struct CascadeSystem {
  const Spectrum* spectrum = nullptr;
  std::vector<std::pair<int, int>> pairs;  // cascade order
  std::map<std::pair<int, int>, int> index;
  std::vector<int> rows, cols, offset;
  int total = 0;
  std::vector<Matrix> b_sector;  // compact B per sector

  struct FeedTerm {
    int src;
    Matrix left, right;  // contribution: left * X_src * right
  };
  std::vector<std::vector<FeedTerm>> feeds;

  int index_of(int m, int n) const {
    auto it = index.find({m, n});
    return it == index.end() ? -1 : it->second;
  }
};

CascadeSystem build_system(const SectorBlocks& init, const EffectiveGenerator& gen,
                           const SpectralTensor& t, const BohrDecomposition& d) {
  require_same_clustering(init.spectrum, d.spectrum);
  require_cascade_tensor(t);
  const Spectrum& s = init.spectrum;
  if (gen.b.rows() != s.dim())
    throw std::invalid_argument("cascade: generator dimension mismatch");

  // Positive frequencies with dissipative weight, with lowering adjacency
  // down[upper] -> {lower} (usually a single entry; near-degenerate merges
  // can produce more).
  struct ActiveFrequency {
    const SpectralEntry* entry;
    int f;
    std::map<int, std::vector<int>> down;
    std::set<std::pair<int, int>> pair_set;
  };
  std::vector<ActiveFrequency> active_freqs;
  for (const auto& e : t.entries) {
    if (max_abs(e.gamma) == 0.0) continue;
    int f = d.index_of(e.omega);
    if (f < 0) continue;  // reported by the Liouvillian builder's notes
    if (d.frequencies[size_t(f)].omega <= 0.0) continue;
    ActiveFrequency af;
    af.entry = &e;
    af.f = f;
    for (auto [row, col] : d.frequencies[size_t(f)].sector_pairs) {
      af.down[col].push_back(row);
      af.pair_set.insert({row, col});
    }
    active_freqs.push_back(std::move(af));
  }

  // Downward closure of the initial pairs.
  std::set<std::pair<int, int>> active(init.pairs.begin(), init.pairs.end());
  std::vector<std::pair<int, int>> queue(active.begin(), active.end());
  while (!queue.empty()) {
    auto [m_up, n_up] = queue.back();
    queue.pop_back();
    for (const auto& af : active_freqs) {
      auto dm = af.down.find(m_up);
      auto dn = af.down.find(n_up);
      if (dm == af.down.end() || dn == af.down.end()) continue;
      for (int m : dm->second)
        for (int n : dn->second)
          if (active.insert({m, n}).second) queue.push_back({m, n});
    }
  }

  CascadeSystem sys;
  sys.spectrum = &s;
  sys.pairs.assign(active.begin(), active.end());
  std::sort(sys.pairs.begin(), sys.pairs.end(),
            [&s](const auto& a, const auto& b) { return pair_order(s, a, b); });
  for (size_t p = 0; p < sys.pairs.size(); ++p) {
    sys.index[sys.pairs[p]] = int(p);
    sys.rows.push_back(s.multiplicities[size_t(sys.pairs[p].first)]);
    sys.cols.push_back(s.multiplicities[size_t(sys.pairs[p].second)]);
    sys.offset.push_back(sys.total);
    sys.total += sys.rows.back() * sys.cols.back();
  }

  for (int k = 0; k < s.sector_count(); ++k)
    sys.b_sector.push_back(s.bases[size_t(k)].adjoint() * gen.b * s.bases[size_t(k)]);

  // Feeding terms: target (m,n) receives gamma_ab(omega) A_b rho A_a^dagger
  // from (m',n') one omega above. In compact coordinates the sandwich factor
  // reduces to V_m^dagger A V_m' because the eigenoperator piece P_m A P_m'
  // exists exactly when (m,m') is a sector pair of that frequency.
  sys.feeds.resize(sys.pairs.size());
  const int nc = d.channel_count();
  for (size_t p = 0; p < sys.pairs.size(); ++p) {
    auto [m, n] = sys.pairs[p];
    double e_target = s.energies[size_t(m)] + s.energies[size_t(n)];
    for (const auto& af : active_freqs) {
      for (const auto& [src_pair, src_idx] : sys.index) {
        // candidates one frequency above on both indices
        if (!af.pair_set.count({m, src_pair.first}) ||
            !af.pair_set.count({n, src_pair.second}))
          continue;
        double e_src =
            s.energies[size_t(src_pair.first)] + s.energies[size_t(src_pair.second)];
        if (!(e_src > e_target))
          throw std::logic_error(
              "cascade: feeding term fails to lower the energy sum; "
              "selection-rule bug");
        for (int a = 0; a < nc; ++a) {
          if (!d.has_op(a, af.f)) continue;
          for (int b = 0; b < nc; ++b) {
            if (!d.has_op(b, af.f)) continue;
            Complex g = af.entry->gamma(a, b);
            if (g == 0.0) continue;
            CascadeSystem::FeedTerm term;
            term.src = src_idx;
            term.left = g * (s.bases[size_t(m)].adjoint() * d.couplings[size_t(b)] *
                             s.bases[size_t(src_pair.first)]);
            term.right = (s.bases[size_t(n)].adjoint() * d.couplings[size_t(a)] *
                          s.bases[size_t(src_pair.second)])
                             .adjoint();
            sys.feeds[p].push_back(std::move(term));
          }
        }
      }
    }
  }
  return sys;
}

// Stacked generator matrix: block lower-triangular in cascade order.
Matrix stacked_generator(const CascadeSystem& sys) {
  Matrix g = Matrix::Zero(sys.total, sys.total);
  for (size_t p = 0; p < sys.pairs.size(); ++p) {
    auto [m, n] = sys.pairs[p];
    const Matrix& bm = sys.b_sector[size_t(m)];
    const Matrix& bn = sys.b_sector[size_t(n)];
    Matrix drift = -I * (sandwich_superop(bm, identity(sys.cols[p])) -
                         sandwich_superop(identity(sys.rows[p]), bn.adjoint()));
    g.block(sys.offset[p], sys.offset[p], drift.rows(), drift.cols()) += drift;
    for (const auto& term : sys.feeds[p]) {
      Matrix feed = sandwich_superop(term.left, term.right);
      g.block(sys.offset[p], sys.offset[size_t(term.src)], feed.rows(), feed.cols()) +=
          feed;
    }
  }
  return g;
}

std::vector<std::vector<double>> compute_weights(const SectorSolution& s) {
  std::vector<std::vector<double>> w;
  if (s.initial_sector < 0) return w;
  w.reserve(s.times.size());
  for (size_t ti = 0; ti < s.times.size(); ++ti) {
    std::vector<double> row;
    for (int k = 0; k <= s.initial_sector; ++k) {
      int p = s.pair_index(s.initial_sector - k, s.initial_sector - k);
      row.push_back(p < 0 ? 0.0 : s.compact[ti][size_t(p)].trace().real());
    }
    w.push_back(std::move(row));
  }
  return w;
}

struct GaussLegendre {
  std::vector<double> nodes;    // on (-1, 1)
  std::vector<double> weights;  // sum to 2
};

GaussLegendre gauss_legendre(int order) {
  if (order < 1) throw std::invalid_argument("quad_order must be >= 1");
  // Golub-Welsch: nodes are eigenvalues of the Jacobi matrix, weights come
  // from the first components of its eigenvectors.
  RealMatrix j = RealMatrix::Zero(order, order);
  for (int k = 1; k < order; ++k) {
    double b = k / std::sqrt(4.0 * k * k - 1.0);
    j(k - 1, k) = b;
    j(k, k - 1) = b;
  }
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(j);
  GaussLegendre g;
  for (int k = 0; k < order; ++k) {
    g.nodes.push_back(es.eigenvalues()(k));
    double v = es.eigenvectors()(0, k);
    g.weights.push_back(2.0 * v * v);
  }
  return g;
}

}  // namespace

Matrix SectorBlocks::reassemble() const {
  Matrix out = Matrix::Zero(spectrum.dim(), spectrum.dim());
  for (size_t p = 0; p < pairs.size(); ++p)
    out += spectrum.bases[size_t(pairs[p].first)] * compact[p] *
           spectrum.bases[size_t(pairs[p].second)].adjoint();
  return out;
}

SectorBlocks sector_split(const Matrix& rho0, const Spectrum& s) {
  if (rho0.rows() != s.dim() || rho0.cols() != s.dim())
    throw std::invalid_argument("sector_split: dimension mismatch");
  SectorBlocks out;
  out.spectrum = s;
  for (int m = 0; m < s.sector_count(); ++m) {
    for (int n = 0; n < s.sector_count(); ++n) {
      Matrix x = s.bases[size_t(m)].adjoint() * rho0 * s.bases[size_t(n)];
      if (max_abs(x) < kDropNorm) continue;
      out.pairs.emplace_back(m, n);
      out.compact.push_back(std::move(x));
    }
  }
  // descending energy-sum order
  std::vector<size_t> perm(out.pairs.size());
  for (size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  std::sort(perm.begin(), perm.end(), [&](size_t a, size_t b) {
    return pair_order(s, out.pairs[a], out.pairs[b]);
  });
  SectorBlocks sorted;
  sorted.spectrum = s;
  for (size_t i : perm) {
    sorted.pairs.push_back(out.pairs[i]);
    sorted.compact.push_back(std::move(out.compact[i]));
  }
  if (sorted.pairs.size() == 1 && sorted.pairs[0].first == sorted.pairs[0].second)
    sorted.initial_sector = sorted.pairs[0].first;
  return sorted;
}

EffectiveGenerator effective_generator(const Matrix& h0, const SpectralTensor& t,
                                       const BohrDecomposition& d) {
  require_cascade_tensor(t);
  const Spectrum& s = d.spectrum;
  if (h0.rows() != s.dim() || h0.cols() != s.dim())
    throw std::invalid_argument("effective_generator: dimension mismatch");

  double scale = std::max(1.0, max_abs(h0));
  for (int m = 0; m < s.sector_count(); ++m)
    for (int n = 0; n < s.sector_count(); ++n)
      if (m != n && max_abs(s.projectors[size_t(m)] * h0 * s.projectors[size_t(n)]) >
                        1e-10 * scale)
        throw std::invalid_argument(
            "effective_generator: h0 does not preserve the energy sectors");

  EffectiveGenerator gen;
  gen.h0 = h0;
  Matrix hp = build_rate_operator(t, d, /*positive_only=*/true);
  if (hermiticity_defect(hp) > 1e-12 * std::max(1.0, max_abs(hp)))
    throw std::logic_error("effective_generator: decay operator not Hermitian");
  gen.h_prime = 0.5 * (hp + hp.adjoint());
  double lo = min_hermitian_eigenvalue(gen.h_prime);
  if (lo < -1e-10)
    throw std::invalid_argument(
        "effective_generator: decay operator has eigenvalue " + std::to_string(lo) +
        "; the rate matrices are not positive semidefinite");
  gen.b = gen.h0 - 0.5 * I * gen.h_prime;
  return gen;
}

int SectorSolution::pair_index(int m, int n) const {
  for (size_t p = 0; p < pairs.size(); ++p)
    if (pairs[p].first == m && pairs[p].second == n) return int(p);
  return -1;
}

std::vector<double> SectorSolution::sector_energies() const {
  std::set<double> seen;
  for (auto [m, n] : pairs) {
    seen.insert(spectrum.energies[size_t(m)]);
    seen.insert(spectrum.energies[size_t(n)]);
  }
  return {seen.rbegin(), seen.rend()};
}

Matrix SectorSolution::block(size_t t_index, int p) const {
  auto [m, n] = pairs[size_t(p)];
  return spectrum.bases[size_t(m)] * compact[t_index][size_t(p)] *
         spectrum.bases[size_t(n)].adjoint();
}

Matrix SectorSolution::reassemble(size_t t_index) const {
  Matrix out = Matrix::Zero(spectrum.dim(), spectrum.dim());
  for (size_t p = 0; p < pairs.size(); ++p) out += block(t_index, int(p));
  return out;
}

SectorSolution cascade_solve(const SectorBlocks& init, const EffectiveGenerator& gen,
                             const SpectralTensor& t, const BohrDecomposition& d,
                             const std::vector<double>& times, double rtol, double atol) {
  if (times.empty()) throw std::invalid_argument("cascade_solve: empty time grid");
  for (size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] >= 0.0))
      throw std::invalid_argument("cascade_solve: times must be non-negative");
    if (i > 0 && !(times[i] >= times[i - 1]))
      throw std::invalid_argument("cascade_solve: times must be non-decreasing");
  }

  CascadeSystem sys = build_system(init, gen, t, d);
  Matrix g = stacked_generator(sys);

  Vector x0 = Vector::Zero(sys.total);
  for (size_t p = 0; p < init.pairs.size(); ++p) {
    int idx = sys.index_of(init.pairs[p].first, init.pairs[p].second);
    x0.segment(sys.offset[size_t(idx)], init.compact[p].size()) = vec(init.compact[p]);
  }

  std::vector<double> grid = times;
  bool prepended = false;
  if (grid.front() > 0.0) {
    grid.insert(grid.begin(), 0.0);
    prepended = true;
  }
  OdeOptions opt;
  opt.rtol = rtol;
  opt.atol = atol;
  auto rhs = [&g](double, const Vector& y) { return Vector(g * y); };
  std::vector<Vector> xs = integrate_adaptive(rhs, x0, grid, opt);

  SectorSolution sol;
  sol.spectrum = init.spectrum;
  sol.times = times;
  sol.pairs = sys.pairs;
  sol.initial_sector = init.initial_sector;
  for (size_t i = prepended ? 1 : 0; i < xs.size(); ++i) {
    std::vector<Matrix> row;
    row.reserve(sys.pairs.size());
    for (size_t p = 0; p < sys.pairs.size(); ++p)
      row.push_back(unvec(Vector(xs[i].segment(sys.offset[p],
                                               Eigen::Index(sys.rows[p]) * sys.cols[p])),
                          sys.rows[p], sys.cols[p]));
    sol.compact.push_back(std::move(row));
  }
  sol.weights = compute_weights(sol);
  return sol;
}

std::vector<std::vector<double>> jump_count_distribution(const SectorSolution& s) {
  if (s.initial_sector < 0)
    throw std::invalid_argument(
        "jump_count_distribution: initial state was not confined to one "
        "diagonal sector; split it into sector components by linearity and "
        "solve each separately");
  return compute_weights(s);
}

Matrix closed_form_block(const SectorBlocks& init, const EffectiveGenerator& gen,
                         const SpectralTensor& t, const BohrDecomposition& d, int j,
                         double time, int quad_order) {
  if (init.initial_sector < 0)
    throw std::invalid_argument(
        "closed_form_block: requires an initial state confined to one "
        "diagonal sector");
  if (j < 0 || init.initial_sector - j < 0)
    throw std::invalid_argument("closed_form_block: no sector " + std::to_string(j) +
                                " steps below the initial one");
  if (j > 3) {
    std::ostringstream os;
    os << "closed_form_block: descent " << j << " would cost ~" << quad_order << "^" << j
       << " feeder evaluations; only j <= 3 is supported (use cascade_solve)";
    throw std::invalid_argument(os.str());
  }
  if (!(time >= 0.0)) throw std::invalid_argument("closed_form_block: negative time");

  CascadeSystem sys = build_system(init, gen, t, d);
  GaussLegendre gl = gauss_legendre(quad_order);
  const Spectrum& s = init.spectrum;

  const int top = sys.index_of(init.initial_sector, init.initial_sector);
  const Matrix x_top0 = init.compact.front();

  // U_m(tau) = exp(-i B_m tau) per sector, and its inverse exp(+i B_m tau);
  // B is not Hermitian, so the inverse is not the adjoint.
  auto u_of = [&](int sector, double tau) {
    return matrix_exponential(-I * sys.b_sector[size_t(sector)], tau);
  };
  auto u_inv_of = [&](int sector, double tau) {
    return matrix_exponential(I * sys.b_sector[size_t(sector)], tau);
  };

  // f_p(tau) of the substituted form: rho_p(tau) = U f_p(tau) U^dagger.
  std::function<Matrix(int, double)> f_of = [&](int p, double tau) -> Matrix {
    auto [m, n] = sys.pairs[size_t(p)];
    Matrix acc = (p == top) ? x_top0
                            : Matrix(Matrix::Zero(s.multiplicities[size_t(m)],
                                                  s.multiplicities[size_t(n)]));
    if (p == top || sys.feeds[size_t(p)].empty()) return acc;
    for (int q = 0; q < quad_order; ++q) {
      double sq = 0.5 * tau * (gl.nodes[size_t(q)] + 1.0);
      double wq = 0.5 * tau * gl.weights[size_t(q)];
      Matrix fed = Matrix::Zero(acc.rows(), acc.cols());
      for (const auto& term : sys.feeds[size_t(p)]) {
        auto [ms, ns] = sys.pairs[size_t(term.src)];
        Matrix src = u_of(ms, sq) * f_of(term.src, sq) * u_of(ns, sq).adjoint();
        fed += term.left * src * term.right;
      }
      acc += wq * (u_inv_of(m, sq) * fed * u_inv_of(n, sq).adjoint());
    }
    return acc;
  };

  const int target_sector = init.initial_sector - j;
  int p = sys.index_of(target_sector, target_sector);
  if (p < 0)  // unreachable by the feeding topology: the block stays zero
    return Matrix::Zero(s.dim(), s.dim());
  auto [m, n] = sys.pairs[size_t(p)];
  Matrix x = u_of(m, time) * f_of(p, time) * u_of(n, time).adjoint();
  return s.bases[size_t(m)] * x * s.bases[size_t(n)].adjoint();
}

}  // namespace oqsim
