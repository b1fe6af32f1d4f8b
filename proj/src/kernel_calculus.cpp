#include "wnlab/kernel_calculus.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace wnlab {

namespace {

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  return factorial(n) / (factorial(k) * factorial(n - k));
}

std::vector<std::vector<int>> all_permutations(int n) {
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  std::vector<std::vector<int>> out;
  do out.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  return out;
}

LabelTuple conj_tuple(const LabelSpace& ls, LabelTuple t) {
  for (int& a : t) a = ls.conj[a];
  return t;
}

}  // namespace

LabelSpace LabelSpace::from_model(const OneParticleModel& m) {
  LabelSpace ls;
  ls.dim = m.dim();
  for (int a = 0; a < m.dim(); ++a) {
    ls.conj.push_back(m.conj_label(a));
    ls.eigenvalues.push_back(m.eigenvalue(a));
  }
  return ls;
}

LabelSpace LabelSpace::generic(int dim, std::vector<int> conj, std::vector<double> eig) {
  LabelSpace ls;
  ls.dim = dim;
  ls.conj = std::move(conj);
  ls.eigenvalues = std::move(eig);
  if (ls.conj.empty()) {
    ls.conj.resize(dim);
    std::iota(ls.conj.begin(), ls.conj.end(), 0);
  }
  if (ls.eigenvalues.empty()) ls.eigenvalues.assign(dim, 2.0);
  if (static_cast<int>(ls.conj.size()) != dim || static_cast<int>(ls.eigenvalues.size()) != dim)
    throw std::invalid_argument("LabelSpace: table size mismatch");
  return ls;
}

KernelDistribution KernelDistribution::scalar(cplx c) {
  KernelDistribution k(0, 0);
  if (c != cplx(0)) k.coeffs[{}] = c;
  k.sym_flag = true;
  return k;
}

KernelDistribution KernelDistribution::product(int l, int m, const std::vector<CVec>& factors) {
  if (static_cast<int>(factors.size()) != l + m)
    throw std::invalid_argument("KernelDistribution::product: factor count != l + m");
  return from_dense(l, m, DenseTensor::outer(factors));
}

KernelDistribution KernelDistribution::from_dense(int l, int m, const DenseTensor& t) {
  if (t.rank != l + m) throw std::invalid_argument("KernelDistribution::from_dense: rank mismatch");
  KernelDistribution k(l, m);
  for (std::size_t p = 0; p < t.data.size(); ++p)
    if (t.data[p] != cplx(0)) k.coeffs[t.unflat(p)] = t.data[p];
  return k;
}

KernelDistribution KernelDistribution::basis_element(int l, int m, const LabelTuple& labels) {
  if (static_cast<int>(labels.size()) != l + m)
    throw std::invalid_argument("KernelDistribution::basis_element: rank mismatch");
  KernelDistribution k(l, m);
  k.coeffs[labels] = 1.0;
  return k;
}

cplx KernelDistribution::at(const LabelTuple& t) const {
  auto it = coeffs.find(t);
  return it == coeffs.end() ? cplx(0) : it->second;
}

void KernelDistribution::add(const LabelTuple& t, cplx v) {
  if (static_cast<int>(t.size()) != rank())
    throw std::invalid_argument("KernelDistribution::add: rank mismatch");
  coeffs[t] += v;
}

DenseTensor KernelDistribution::to_dense(int dim) const {
  DenseTensor t(dim, rank());
  for (const auto& [idx, v] : coeffs) t.at(idx) = v;
  return t;
}

double KernelDistribution::max_abs() const {
  double mx = 0;
  for (const auto& [idx, v] : coeffs) mx = std::max(mx, std::abs(v));
  return mx;
}

void KernelDistribution::prune(double tol) {
  for (auto it = coeffs.begin(); it != coeffs.end();) {
    if (std::abs(it->second) <= tol)
      it = coeffs.erase(it);
    else
      ++it;
  }
}

KernelDistribution KernelDistribution::operator+(const KernelDistribution& o) const {
  if (o.l != l || o.m != m) throw std::invalid_argument("KernelDistribution: shape mismatch");
  KernelDistribution r = *this;
  for (const auto& [idx, v] : o.coeffs) r.coeffs[idx] += v;
  r.sym_flag = sym_flag && o.sym_flag;
  return r;
}

KernelDistribution KernelDistribution::operator-(const KernelDistribution& o) const {
  return *this + o * cplx(-1.0);
}

KernelDistribution KernelDistribution::operator*(cplx s) const {
  KernelDistribution r = *this;
  for (auto& [idx, v] : r.coeffs) v *= s;
  return r;
}

KernelDistribution contract(const LabelSpace& ls, const KernelDistribution& f,
                            const KernelDistribution& g, int l) {
  if (l < 0 || l > f.rank() || l > g.rank())
    throw std::invalid_argument("contract: contraction length exceeds a rank");
  const int rf = f.rank() - l, rg = g.rank() - l;
  // Group g by its contracted tail, keyed by the conjugate labels it pairs with.
  std::map<LabelTuple, std::vector<std::pair<LabelTuple, cplx>>> by_tail;
  for (const auto& [idx, v] : g.coeffs) {
    LabelTuple tail = conj_tuple(ls, LabelTuple(idx.begin() + rg, idx.end()));
    by_tail[tail].emplace_back(LabelTuple(idx.begin(), idx.begin() + rg), v);
  }
  KernelDistribution out(rf, rg);
  for (const auto& [idx, v] : f.coeffs) {
    auto it = by_tail.find(LabelTuple(idx.begin() + rf, idx.end()));
    if (it == by_tail.end()) continue;
    for (const auto& [head, w] : it->second) {
      LabelTuple t(idx.begin(), idx.begin() + rf);
      t.insert(t.end(), head.begin(), head.end());
      out.coeffs[t] += v * w;
    }
  }
  return out;
}

double weighted_norm(const LabelSpace& ls, const KernelDistribution& f, int l, int m, double p,
                     double q) {
  if (l + m != f.rank()) throw std::invalid_argument("weighted_norm: rank mismatch");
  double s = 0;
  for (const auto& [idx, v] : f.coeffs) {
    double w = 1.0;
    for (int r = 0; r < l; ++r) w *= std::pow(ls.eigenvalues[idx[r]], 2 * p);
    for (int r = l; r < l + m; ++r) w *= std::pow(ls.eigenvalues[idx[r]], 2 * q);
    s += std::norm(v) * w;
  }
  return std::sqrt(s);
}

KernelDistribution s_lm(const KernelDistribution& k) {
  const auto pl = all_permutations(k.l), pm = all_permutations(k.m);
  const double inv = 1.0 / (static_cast<double>(pl.size()) * static_cast<double>(pm.size()));
  KernelDistribution out(k.l, k.m);
  LabelTuple t(k.rank());
  for (const auto& [idx, v] : k.coeffs)
    for (const auto& a : pl)
      for (const auto& b : pm) {
        for (int r = 0; r < k.l; ++r) t[r] = idx[a[r]];
        for (int r = 0; r < k.m; ++r) t[k.l + r] = idx[k.l + b[r]];
        out.coeffs[t] += v * inv;
      }
  out.sym_flag = true;
  return out;
}

double symmetry_defect(const KernelDistribution& k) { return (s_lm(k) - k).max_abs(); }

KernelDistribution transpose_ml(const KernelDistribution& k) {
  KernelDistribution out(k.m, k.l);
  for (const auto& [idx, v] : k.coeffs) {
    LabelTuple t(idx.begin() + k.l, idx.end());
    t.insert(t.end(), idx.begin(), idx.begin() + k.l);
    out.coeffs[t] = v;
  }
  out.sym_flag = k.sym_flag;
  return out;
}

KernelDistribution conj_kernel(const LabelSpace& ls, const KernelDistribution& k) {
  KernelDistribution out(k.l, k.m);
  for (const auto& [idx, v] : k.coeffs) out.coeffs[conj_tuple(ls, idx)] = std::conj(v);
  out.sym_flag = k.sym_flag;
  return out;
}

KernelDistribution hilbert_adjoint_kernel(const LabelSpace& ls, const KernelDistribution& k) {
  return conj_kernel(ls, transpose_ml(k));
}

KernelDistribution s_composition(const LabelSpace& ls, const KernelDistribution& kappa,
                                 const KernelDistribution& lambda, int k) {
  if (k < 0 || k > std::min(kappa.m, lambda.l))
    throw std::invalid_argument("s_composition: k out of range");
  const int l = kappa.l, mk = kappa.m - k, lk = lambda.l - k, mp = lambda.m;
  std::map<LabelTuple, std::vector<std::pair<LabelTuple, cplx>>> by_head;
  for (const auto& [idx, v] : lambda.coeffs) {
    LabelTuple head = conj_tuple(ls, LabelTuple(idx.begin(), idx.begin() + k));
    by_head[head].emplace_back(LabelTuple(idx.begin() + k, idx.end()), v);
  }
  KernelDistribution out(l + lk, mk + mp);
  for (const auto& [idx, v] : kappa.coeffs) {
    auto it = by_head.find(LabelTuple(idx.begin() + l + mk, idx.end()));
    if (it == by_head.end()) continue;
    for (const auto& [rest, w] : it->second) {
      LabelTuple t(idx.begin(), idx.begin() + l);
      t.insert(t.end(), rest.begin(), rest.begin() + lk);
      t.insert(t.end(), idx.begin() + l, idx.begin() + l + mk);
      t.insert(t.end(), rest.begin() + lk, rest.end());
      out.coeffs[t] += v * w;
    }
  }
  return out;
}

std::vector<ProductTerm> product_expansion(const LabelSpace& ls, const KernelDistribution& kappa,
                                           const KernelDistribution& lambda) {
  const KernelDistribution a = s_lm(kappa), b = s_lm(lambda);
  std::vector<ProductTerm> terms;
  for (int k = 0; k <= std::min(a.m, b.l); ++k) {
    ProductTerm t;
    t.k = k;
    t.weight = factorial(k) * binomial(a.m, k) * binomial(b.l, k);
    t.kernel = s_composition(ls, a, b, k);
    terms.push_back(std::move(t));
  }
  return terms;
}

FockVector xi_apply(const FockBasis& b, const KernelDistribution& kappa, const FockVector& phi,
                    double* leakage) {
  if (static_cast<int>(phi.sectors.size()) != b.n_max() + 1)
    throw std::invalid_argument("xi_apply: truncation mismatch");
  const LabelSpace ls = [&] {
    std::vector<int> conj(b.one_dim());
    for (int a = 0; a < b.one_dim(); ++a) conj[a] = b.conj_label(a);
    return LabelSpace::generic(b.one_dim(), conj);
  }();
  FockVector out = FockVector::zero(b);
  for (int n = 0; n + kappa.m <= b.n_max(); ++n) {
    const int n_in = n + kappa.m, n_out = n + kappa.l;
    if (phi.sectors[n_in].norm() == 0.0) continue;
    const KernelDistribution f = KernelDistribution::from_dense(
        n, kappa.m, sector_to_tensor(b, n_in, phi.sectors[n_in]));
    const KernelDistribution c = contract(ls, kappa, f, kappa.m);
    const double scale = factorial(n_in) / factorial(n);
    if (n_out > b.n_max()) {
      if (leakage) {
        const DenseTensor sym = symmetrize(c.to_dense(b.one_dim()));
        double norm2 = 0;
        for (const auto& x : sym.data) norm2 += std::norm(x);
        *leakage += factorial(n_out) * scale * scale * norm2;
      }
      continue;
    }
    out.sectors[n_out] += scale * tensor_to_sector(b, c.to_dense(b.one_dim()));
  }
  return out;
}

SectorOperator xi_matrix(const FockBasis& b, const KernelDistribution& kappa) {
  SectorOperator op;
  op.n_max = b.n_max();
  std::vector<int> creators(kappa.l), annihilators(kappa.m);
  for (int n_in = kappa.m; n_in <= b.n_max(); ++n_in) {
    const int n_out = n_in + kappa.l - kappa.m;
    if (n_out > b.n_max()) break;
    const auto& sec = b.sector(n_in);
    std::vector<Triplet> trip;
    SymIndex out;
    double factor = 0;
    for (const auto& [idx, v] : kappa.coeffs) {
      for (int r = 0; r < kappa.l; ++r) creators[r] = idx[r];
      for (int r = 0; r < kappa.m; ++r) annihilators[r] = b.conj_label(idx[kappa.l + r]);
      for (std::size_t c = 0; c < sec.size(); ++c)
        if (apply_monomial(sec[c], creators, annihilators, out, factor))
          trip.emplace_back(b.index_of(out), static_cast<int>(c), v * factor);
    }
    SpMat m(b.sector_dim(n_out), b.sector_dim(n_in));
    m.setFromTriplets(trip.begin(), trip.end());
    op.blocks[{n_out, n_in}] = m;
  }
  return op;
}

}  // namespace wnlab
