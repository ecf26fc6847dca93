#include "oqsim/eigenops.hpp"

#include <algorithm>
#include <cmath>

namespace oqsim {

namespace {

constexpr double kDropNorm = 1e-13;

Matrix clustered_hamiltonian(const Spectrum& s) {
  Matrix h = Matrix::Zero(s.dim(), s.dim());
  for (int k = 0; k < s.sector_count(); ++k)
    h += s.energies[size_t(k)] * s.projectors[size_t(k)];
  return h;
}

}  // namespace

int BohrDecomposition::index_of(double omega, double tol) const {
  if (tol < 0.0) tol = freq_tol;
  int best = -1;
  double best_gap = tol;
  for (int f = 0; f < frequency_count(); ++f) {
    double gap = std::abs(frequencies[size_t(f)].omega - omega);
    if (gap <= best_gap) {
      best_gap = gap;
      best = f;
    }
  }
  return best;
}

BohrDecomposition decompose(const Matrix& h_sys, const std::vector<Matrix>& couplings,
                            double freq_tol) {
  return decompose(hermitian_eigensystem(h_sys), couplings, freq_tol);
}

BohrDecomposition decompose(const Spectrum& spectrum, const std::vector<Matrix>& couplings,
                            double freq_tol) {
  const int d = spectrum.dim();
  if (d == 0) throw std::invalid_argument("decompose: empty spectrum");
  for (const Matrix& a : couplings) {
    if (a.rows() != d || a.cols() != d)
      throw std::invalid_argument("decompose: coupling dimension mismatch");
    if (hermiticity_defect(a) > 1e-10 * std::max(1.0, max_abs(a)))
      throw std::invalid_argument(
          "decompose: coupling operators must be Hermitian; split a general "
          "operator into Hermitian components before decomposing");
  }
  if (freq_tol <= 0.0) freq_tol = 1e-8 * std::max(spectrum.range(), 1.0);

  BohrDecomposition out;
  out.spectrum = spectrum;
  out.couplings = couplings;
  out.freq_tol = freq_tol;

  // Collect strictly positive gaps (sector energies are distinct by
  // construction), cluster them, then mirror to negative frequencies so the
  // list is exactly symmetric and adjoint lookups are index arithmetic.
  const int ns = spectrum.sector_count();
  struct Gap {
    double omega;
    int row, col;  // energies[col] - energies[row] = omega > 0
  };
  std::vector<Gap> gaps;
  for (int m = 0; m < ns; ++m)
    for (int n = m + 1; n < ns; ++n)
      gaps.push_back({spectrum.energies[size_t(n)] - spectrum.energies[size_t(m)], m, n});
  std::sort(gaps.begin(), gaps.end(),
            [](const Gap& a, const Gap& b) { return a.omega < b.omega; });

  std::vector<BohrFrequencyGroup> positive;
  size_t start = 0;
  while (start < gaps.size()) {
    size_t end = start + 1;
    while (end < gaps.size() && gaps[end].omega - gaps[end - 1].omega <= freq_tol) ++end;
    BohrFrequencyGroup g;
    double sum = 0.0;
    for (size_t i = start; i < end; ++i) {
      sum += gaps[i].omega;
      g.sector_pairs.emplace_back(gaps[i].row, gaps[i].col);
    }
    g.omega = sum / double(end - start);
    positive.push_back(std::move(g));
    start = end;
  }

  // Negative mirror, zero, positive.
  for (auto it = positive.rbegin(); it != positive.rend(); ++it) {
    BohrFrequencyGroup g;
    g.omega = -it->omega;
    for (auto [row, col] : it->sector_pairs) g.sector_pairs.emplace_back(col, row);
    out.frequencies.push_back(std::move(g));
  }
  {
    BohrFrequencyGroup zero;
    zero.omega = 0.0;
    for (int k = 0; k < ns; ++k) zero.sector_pairs.emplace_back(k, k);
    out.frequencies.push_back(std::move(zero));
  }
  for (const auto& g : positive) out.frequencies.push_back(g);

  out.ops.resize(couplings.size());
  for (size_t c = 0; c < couplings.size(); ++c) {
    out.ops[c].resize(out.frequencies.size());
    for (size_t f = 0; f < out.frequencies.size(); ++f) {
      Matrix piece = Matrix::Zero(d, d);
      for (auto [row, col] : out.frequencies[f].sector_pairs)
        piece += spectrum.projectors[size_t(row)] * couplings[c] *
                 spectrum.projectors[size_t(col)];
      if (max_abs(piece) >= kDropNorm) out.ops[c][f] = std::move(piece);
    }
  }
  return out;
}

double AlgebraReport::worst() const {
  return std::max(std::max(construction, commutator), std::max(adjoint, completeness));
}

AlgebraReport verify_algebra(const BohrDecomposition& d) {
  AlgebraReport r;
  const int dim = d.spectrum.dim();
  const Matrix h = clustered_hamiltonian(d.spectrum);

  for (int c = 0; c < d.channel_count(); ++c) {
    Matrix sum = Matrix::Zero(dim, dim);
    for (int f = 0; f < d.frequency_count(); ++f) {
      const auto& group = d.frequencies[size_t(f)];
      Matrix piece = Matrix::Zero(dim, dim);
      for (auto [row, col] : group.sector_pairs)
        piece += d.spectrum.projectors[size_t(row)] * d.couplings[size_t(c)] *
                 d.spectrum.projectors[size_t(col)];

      const Matrix stored =
          d.has_op(c, f) ? d.op(c, f) : Matrix(Matrix::Zero(dim, dim));
      r.construction = std::max(r.construction, max_abs(stored - piece));
      r.commutator = std::max(
          r.commutator, max_abs(h * stored - stored * h + group.omega * stored));

      const int fa = d.adjoint_index(f);
      const Matrix partner =
          d.has_op(c, fa) ? d.op(c, fa) : Matrix(Matrix::Zero(dim, dim));
      r.adjoint = std::max(r.adjoint, max_abs(stored.adjoint() - partner));

      sum += stored;
    }
    r.completeness = std::max(r.completeness, max_abs(sum - d.couplings[size_t(c)]));
  }
  return r;
}

}  // namespace oqsim
