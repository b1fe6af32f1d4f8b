#include "wnlab/fock_space.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace wnlab {

namespace {

void enumerate_rec(int dim, int n, int start, SymIndex& cur, std::vector<SymIndex>& out) {
  if (static_cast<int>(cur.size()) == n) {
    out.push_back(cur);
    return;
  }
  for (int a = start; a < dim; ++a) {
    cur.push_back(a);
    enumerate_rec(dim, n, a, cur, out);
    cur.pop_back();
  }
}

int count_of(const SymIndex& s, int label) {
  auto range = std::equal_range(s.begin(), s.end(), label);
  return static_cast<int>(range.second - range.first);
}

// Removes one copy of label; returns its multiplicity before removal.
int remove_one(SymIndex& s, int label) {
  auto range = std::equal_range(s.begin(), s.end(), label);
  const int mu = static_cast<int>(range.second - range.first);
  if (mu > 0) s.erase(range.first);
  return mu;
}

// Inserts one copy of label; returns its multiplicity after insertion.
int insert_one(SymIndex& s, int label) {
  auto it = std::upper_bound(s.begin(), s.end(), label);
  s.insert(it, label);
  return count_of(s, label);
}

SpMat from_triplets(int rows, int cols, const std::vector<Triplet>& t) {
  SpMat m(rows, cols);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

}  // namespace

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

std::vector<std::pair<int, int>> multiplicities(const SymIndex& s) {
  std::vector<std::pair<int, int>> out;
  for (std::size_t i = 0; i < s.size();) {
    std::size_t j = i;
    while (j < s.size() && s[j] == s[i]) ++j;
    out.emplace_back(s[i], static_cast<int>(j - i));
    i = j;
  }
  return out;
}

double multiplicity_factorial(const SymIndex& s) {
  double f = 1.0;
  for (const auto& [label, mu] : multiplicities(s)) f *= factorial(mu);
  return f;
}

std::vector<SymIndex> enumerate_sym_basis(int one_particle_dim, int n) {
  std::vector<SymIndex> out;
  SymIndex cur;
  enumerate_rec(one_particle_dim, n, 0, cur, out);
  return out;
}

FockBasis::FockBasis(int one_particle_dim, int n_max, std::vector<int> conj_labels)
    : one_dim_(one_particle_dim), n_max_(n_max), conj_(std::move(conj_labels)) {
  if (one_particle_dim < 1) throw std::invalid_argument("FockBasis: empty one-particle space");
  if (n_max < 0) throw std::invalid_argument("FockBasis: negative n_max");
  if (conj_.empty()) {
    conj_.resize(one_dim_);
    std::iota(conj_.begin(), conj_.end(), 0);
  }
  if (static_cast<int>(conj_.size()) != one_dim_)
    throw std::invalid_argument("FockBasis: conjugation map has wrong size");
  for (int n = 0; n <= n_max_; ++n) sectors_.push_back(enumerate_sym_basis(one_dim_, n));
}

FockBasis FockBasis::for_model(const OneParticleModel& m, int n_max) {
  std::vector<int> conj(m.dim());
  for (int a = 0; a < m.dim(); ++a) conj[a] = m.conj_label(a);
  return FockBasis(m.dim(), n_max, conj);
}

int FockBasis::total_dim() const {
  int t = 0;
  for (int n = 0; n <= n_max_; ++n) t += sector_dim(n);
  return t;
}

int FockBasis::index_of(const SymIndex& s) const {
  const int n = static_cast<int>(s.size());
  if (n > n_max_) return -1;
  const auto& sec = sectors_[n];
  auto it = std::lower_bound(sec.begin(), sec.end(), s);
  if (it == sec.end() || *it != s) return -1;
  return static_cast<int>(it - sec.begin());
}

FockVector FockVector::zero(const FockBasis& b) {
  FockVector v;
  for (int n = 0; n <= b.n_max(); ++n) v.sectors.push_back(CVec::Zero(b.sector_dim(n)));
  return v;
}

FockVector FockVector::vacuum(const FockBasis& b) {
  FockVector v = zero(b);
  v.sectors[0](0) = 1.0;
  return v;
}

FockVector& FockVector::operator+=(const FockVector& o) {
  if (o.sectors.size() != sectors.size()) throw std::invalid_argument("FockVector: size mismatch");
  for (std::size_t n = 0; n < sectors.size(); ++n) sectors[n] += o.sectors[n];
  return *this;
}

FockVector& FockVector::operator-=(const FockVector& o) {
  if (o.sectors.size() != sectors.size()) throw std::invalid_argument("FockVector: size mismatch");
  for (std::size_t n = 0; n < sectors.size(); ++n) sectors[n] -= o.sectors[n];
  return *this;
}

FockVector FockVector::operator+(const FockVector& o) const {
  FockVector r = *this;
  r += o;
  return r;
}

FockVector FockVector::operator-(const FockVector& o) const {
  FockVector r = *this;
  r -= o;
  return r;
}

FockVector FockVector::operator*(cplx s) const {
  FockVector r = *this;
  for (auto& c : r.sectors) c *= s;
  return r;
}

cplx fock_inner(const FockVector& phi, const FockVector& chi) {
  if (phi.sectors.size() != chi.sectors.size())
    throw std::invalid_argument("fock_inner: size mismatch");
  cplx s = 0;
  for (std::size_t n = 0; n < phi.sectors.size(); ++n)
    s += factorial(static_cast<int>(n)) * phi.sectors[n].dot(chi.sectors[n]);
  return s;
}

double fock_norm(const FockVector& phi) { return std::sqrt(std::abs(fock_inner(phi, phi))); }

double exp_vector_tail(double norm_f, int n_max) {
  const double x = norm_f * norm_f;
  return std::pow(x, n_max + 1) / factorial(n_max + 1) * std::exp(x);
}

FockVector exp_vector(const FockBasis& b, const OneParticleVector& f, double tail_budget) {
  if (f.size() != b.one_dim()) throw std::invalid_argument("exp_vector: dimension mismatch");
  if (exp_vector_tail(f.norm(), b.n_max()) > tail_budget)
    throw std::domain_error("exp_vector: truncation tail exceeds budget; raise n_max");
  FockVector v = FockVector::zero(b);
  for (int n = 0; n <= b.n_max(); ++n) {
    const auto& sec = b.sector(n);
    const double nf = factorial(n);
    for (std::size_t k = 0; k < sec.size(); ++k) {
      cplx prod = 1.0;
      for (int a : sec[k]) prod *= f(a);
      v.sectors[n](k) = std::sqrt(nf / multiplicity_factorial(sec[k])) * prod / nf;
    }
  }
  return v;
}

DenseTensor::DenseTensor(int dim_, int rank_) : dim(dim_), rank(rank_) {
  std::size_t size = 1;
  for (int k = 0; k < rank; ++k) size *= static_cast<std::size_t>(dim);
  data.assign(size, cplx(0));
}

std::size_t DenseTensor::flat(const std::vector<int>& idx) const {
  std::size_t p = 0;
  for (int k = 0; k < rank; ++k) p = p * dim + idx[k];
  return p;
}

std::vector<int> DenseTensor::unflat(std::size_t pos) const {
  std::vector<int> idx(rank);
  for (int k = rank - 1; k >= 0; --k) {
    idx[k] = static_cast<int>(pos % dim);
    pos /= dim;
  }
  return idx;
}

DenseTensor DenseTensor::outer(const std::vector<CVec>& factors) {
  if (factors.empty()) {
    DenseTensor t(1, 0);
    t.data[0] = 1.0;
    return t;
  }
  const int dim = static_cast<int>(factors[0].size());
  DenseTensor t(dim, static_cast<int>(factors.size()));
  for (std::size_t p = 0; p < t.data.size(); ++p) {
    auto idx = t.unflat(p);
    cplx v = 1.0;
    for (int k = 0; k < t.rank; ++k) v *= factors[k](idx[k]);
    t.data[p] = v;
  }
  return t;
}

DenseTensor symmetrize(const DenseTensor& t) {
  if (t.rank > 6) throw std::invalid_argument("symmetrize: rank above 6");
  DenseTensor out(t.dim, t.rank);
  std::vector<int> perm(t.rank);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::vector<int>> perms;
  do perms.push_back(perm);
  while (std::next_permutation(perm.begin(), perm.end()));
  const double inv = 1.0 / static_cast<double>(perms.size());
  std::vector<int> moved(t.rank);
  for (std::size_t p = 0; p < t.data.size(); ++p) {
    auto idx = t.unflat(p);
    cplx s = 0;
    for (const auto& sg : perms) {
      for (int k = 0; k < t.rank; ++k) moved[k] = idx[sg[k]];
      s += t.at(moved);
    }
    out.data[p] = s * inv;
  }
  return out;
}

DenseTensor sector_to_tensor(const FockBasis& b, int n, const CVec& c) {
  DenseTensor t(b.one_dim(), n);
  const double nf = factorial(n);
  for (std::size_t p = 0; p < t.data.size(); ++p) {
    SymIndex s = t.unflat(p);
    std::sort(s.begin(), s.end());
    t.data[p] = c(b.index_of(s)) * std::sqrt(multiplicity_factorial(s) / nf);
  }
  return t;
}

CVec tensor_to_sector(const FockBasis& b, const DenseTensor& t) {
  if (t.dim != b.one_dim() || t.rank > b.n_max())
    throw std::invalid_argument("tensor_to_sector: shape mismatch");
  const int n = t.rank;
  const double nf = factorial(n);
  CVec c = CVec::Zero(b.sector_dim(n));
  for (std::size_t p = 0; p < t.data.size(); ++p) {
    SymIndex s = t.unflat(p);
    std::sort(s.begin(), s.end());
    c(b.index_of(s)) += t.data[p] * std::sqrt(multiplicity_factorial(s) / nf);
  }
  return c;
}

SectorOperator SectorOperator::identity(const FockBasis& b) {
  SectorOperator op;
  op.n_max = b.n_max();
  for (int n = 0; n <= b.n_max(); ++n) {
    SpMat id(b.sector_dim(n), b.sector_dim(n));
    id.setIdentity();
    op.blocks[{n, n}] = id;
  }
  return op;
}

FockVector SectorOperator::apply(const FockVector& phi) const {
  if (static_cast<int>(phi.sectors.size()) != n_max + 1)
    throw std::invalid_argument("SectorOperator::apply: truncation mismatch");
  FockVector out;
  for (const auto& c : phi.sectors) out.sectors.push_back(CVec::Zero(c.size()));
  for (const auto& [key, m] : blocks) out.sectors[key.first] += m * phi.sectors[key.second];
  return out;
}

SpMat SectorOperator::block(const FockBasis& b, int n_out, int n_in) const {
  auto it = blocks.find({n_out, n_in});
  if (it != blocks.end()) return it->second;
  return SpMat(b.sector_dim(n_out), b.sector_dim(n_in));
}

void SectorOperator::add_block(int n_out, int n_in, const SpMat& m) {
  auto it = blocks.find({n_out, n_in});
  if (it == blocks.end())
    blocks[{n_out, n_in}] = m;
  else
    it->second += m;
}

SectorOperator SectorOperator::operator+(const SectorOperator& o) const {
  SectorOperator r = *this;
  r.n_max = std::max(n_max, o.n_max);
  for (const auto& [key, m] : o.blocks) r.add_block(key.first, key.second, m);
  return r;
}

SectorOperator SectorOperator::operator-(const SectorOperator& o) const {
  return *this + o * cplx(-1.0);
}

SectorOperator SectorOperator::operator*(const SectorOperator& o) const {
  SectorOperator r;
  r.n_max = std::max(n_max, o.n_max);
  for (const auto& [k1, a] : blocks)
    for (const auto& [k2, c] : o.blocks)
      if (k1.second == k2.first) r.add_block(k1.first, k2.second, SpMat(a * c));
  return r;
}

SectorOperator SectorOperator::operator*(cplx s) const {
  SectorOperator r = *this;
  for (auto& [key, m] : r.blocks) m *= s;
  return r;
}

SectorOperator SectorOperator::adjoint() const {
  SectorOperator r;
  r.n_max = n_max;
  for (const auto& [key, m] : blocks) {
    const double w = factorial(key.first) / factorial(key.second);
    SpMat adj = SpMat(m.adjoint()) * cplx(w);
    r.add_block(key.second, key.first, adj);
  }
  return r;
}

SectorOperator SectorOperator::restricted(int limit) const {
  SectorOperator r;
  r.n_max = n_max;
  for (const auto& [key, m] : blocks)
    if (key.first <= limit && key.second <= limit) r.blocks[key] = m;
  return r;
}

double SectorOperator::max_abs() const {
  double mx = 0;
  for (const auto& [key, m] : blocks)
    for (int k = 0; k < m.outerSize(); ++k)
      for (SpMat::InnerIterator it(m, k); it; ++it) mx = std::max(mx, std::abs(it.value()));
  return mx;
}

cplx permanent(const CMat& a) {
  const int n = static_cast<int>(a.rows());
  if (a.cols() != n) throw std::invalid_argument("permanent: matrix not square");
  if (n == 0) return 1.0;
  if (n > 20) throw std::invalid_argument("permanent: size above 20");
  // Ryser's formula with Gray-code subset order: one column update per step.
  std::vector<cplx> row(n, cplx(0));
  cplx total = 0;
  unsigned long gray = 0;
  const unsigned long subsets = 1ul << n;
  for (unsigned long k = 1; k < subsets; ++k) {
    const unsigned long next = k ^ (k >> 1);
    const int j = __builtin_ctzl(next ^ gray);
    const double sign = (next & (1ul << j)) ? 1.0 : -1.0;
    for (int i = 0; i < n; ++i) row[i] += sign * a(i, j);
    gray = next;
    cplx prod = 1.0;
    for (int i = 0; i < n; ++i) prod *= row[i];
    const int bits = __builtin_popcountl(gray);
    total += ((n - bits) % 2 == 0) ? prod : -prod;
  }
  return total;
}

SectorOperator gamma_b(const FockBasis& b, const CMat& one_particle) {
  if (one_particle.rows() != b.one_dim() || one_particle.cols() != b.one_dim())
    throw std::invalid_argument("gamma_b: dimension mismatch");
  SectorOperator op;
  op.n_max = b.n_max();
  for (int n = 0; n <= b.n_max(); ++n) {
    const auto& sec = b.sector(n);
    const int d = static_cast<int>(sec.size());
    std::vector<Triplet> trip;
    std::vector<double> mf(d);
    for (int k = 0; k < d; ++k) mf[k] = multiplicity_factorial(sec[k]);
    CMat sub(n, n);
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c) {
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) sub(i, j) = one_particle(sec[r][i], sec[c][j]);
        const cplx v = permanent(sub) / std::sqrt(mf[r] * mf[c]);
        if (v != cplx(0)) trip.emplace_back(r, c, v);
      }
    op.blocks[{n, n}] = from_triplets(d, d, trip);
  }
  return op;
}

SectorOperator d_gamma_b(const FockBasis& b, const CMat& one_particle) {
  if (one_particle.rows() != b.one_dim() || one_particle.cols() != b.one_dim())
    throw std::invalid_argument("d_gamma_b: dimension mismatch");
  SectorOperator op;
  op.n_max = b.n_max();
  for (int n = 0; n <= b.n_max(); ++n) {
    const auto& sec = b.sector(n);
    const int d = static_cast<int>(sec.size());
    std::vector<Triplet> trip;
    for (int c = 0; c < d; ++c) {
      for (const auto& [lb, mu] : multiplicities(sec[c])) {
        SymIndex removed = sec[c];
        remove_one(removed, lb);
        for (int la = 0; la < b.one_dim(); ++la) {
          const cplx v = one_particle(la, lb);
          if (v == cplx(0)) continue;
          SymIndex out = removed;
          const int mu_a = insert_one(out, la);
          trip.emplace_back(b.index_of(out), c, v * std::sqrt(static_cast<double>(mu * mu_a)));
        }
      }
    }
    op.blocks[{n, n}] = from_triplets(d, d, trip);
  }
  return op;
}

SectorOperator creation(const FockBasis& b, const OneParticleVector& g) {
  if (g.size() != b.one_dim()) throw std::invalid_argument("creation: dimension mismatch");
  SectorOperator op;
  op.n_max = b.n_max();
  for (int n = 0; n < b.n_max(); ++n) {
    const auto& sec = b.sector(n);
    std::vector<Triplet> trip;
    for (std::size_t c = 0; c < sec.size(); ++c)
      for (int a = 0; a < b.one_dim(); ++a) {
        if (g(a) == cplx(0)) continue;
        SymIndex out = sec[c];
        const int mu = insert_one(out, a);
        trip.emplace_back(b.index_of(out), static_cast<int>(c),
                          g(a) * std::sqrt(static_cast<double>(mu) / (n + 1)));
      }
    op.blocks[{n + 1, n}] = from_triplets(b.sector_dim(n + 1), b.sector_dim(n), trip);
  }
  return op;
}

SectorOperator annihilation(const FockBasis& b, const OneParticleVector& g) {
  if (g.size() != b.one_dim()) throw std::invalid_argument("annihilation: dimension mismatch");
  SectorOperator op;
  op.n_max = b.n_max();
  for (int n = 0; n < b.n_max(); ++n) {
    const auto& sec = b.sector(n + 1);
    std::vector<Triplet> trip;
    for (std::size_t c = 0; c < sec.size(); ++c)
      for (const auto& [x, mu] : multiplicities(sec[c])) {
        const cplx gx = g(b.conj_label(x));
        if (gx == cplx(0)) continue;
        SymIndex out = sec[c];
        remove_one(out, x);
        trip.emplace_back(b.index_of(out), static_cast<int>(c),
                          gx * std::sqrt(static_cast<double>(mu) * (n + 1)));
      }
    op.blocks[{n, n + 1}] = from_triplets(b.sector_dim(n), b.sector_dim(n + 1), trip);
  }
  return op;
}

cplx grading_eigenvalue(const OneParticleModel& m, const CVec& h, const SymIndex& idx) {
  const auto& g = m.alg;
  if (h.size() != g.dim_g) throw std::invalid_argument("grading_eigenvalue: dimension mismatch");
  if (h.tail(g.dim_g - g.cartan_dim).norm() > 1e-12)
    throw std::invalid_argument("grading_eigenvalue: direction is not in the Cartan subalgebra");
  const int n1 = g.cartan_dim, n2 = g.num_pos_roots;
  cplx total = 0;
  for (int label : idx) {
    const int j = m.g_index_of(label);
    if (j < n1) continue;
    const int p = (j < n1 + n2) ? j - n1 : j - n1 - n2;
    cplx alpha = 0;
    for (int q = 0; q < n1; ++q) alpha += g.roots(p, q) * h(q);
    total += (j < n1 + n2) ? alpha : -alpha;
  }
  return total;
}

bool apply_monomial(const SymIndex& s, const std::vector<int>& creators,
                    const std::vector<int>& annihilators, SymIndex& out, double& factor) {
  out = s;
  double f = 1.0;
  for (int d : annihilators) {
    const int mu = remove_one(out, d);
    if (mu == 0) return false;
    f *= std::sqrt(static_cast<double>(mu));
  }
  for (int c : creators) f *= std::sqrt(static_cast<double>(insert_one(out, c)));
  // orthonormal-occupation factor -> unit-tensor coefficients
  f *= std::sqrt(factorial(static_cast<int>(s.size())) / factorial(static_cast<int>(out.size())));
  factor = f;
  return true;
}

}  // namespace wnlab
