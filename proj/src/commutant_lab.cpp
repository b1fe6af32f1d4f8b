#include "wnlab/commutant_lab.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace wnlab {

std::vector<Shape> shapes_upto(int l_max) {
  if (l_max < 0) throw std::invalid_argument("shapes_upto: negative order");
  std::vector<Shape> out;
  for (int r = 0; r <= l_max; ++r)
    for (int l = r; l >= 0; --l) out.push_back({l, r - l});
  return out;
}

KernelStackBasis::KernelStackBasis(std::vector<Shape> shapes, int one_dim)
    : shapes_(std::move(shapes)), one_dim_(one_dim) {
  if (shapes_.empty()) throw std::invalid_argument("KernelStackBasis: no shapes");
  for (int s = 0; s < static_cast<int>(shapes_.size()); ++s) {
    const int first = size();
    const auto cre = enumerate_sym_basis(one_dim_, shapes_[s].l);
    const auto ann = enumerate_sym_basis(one_dim_, shapes_[s].m);
    for (const auto& c : cre)
      for (const auto& a : ann) elements_.push_back({s, c, a});
    ranges_.emplace_back(first, size());
  }
}

int KernelStackBasis::shape_index(Shape sh) const {
  for (int s = 0; s < static_cast<int>(shapes_.size()); ++s)
    if (shapes_[s] == sh) return s;
  return -1;
}

KernelDistribution KernelStackBasis::kernel(int k) const {
  const Element& e = elements_.at(k);
  const Shape sh = shapes_[e.shape];
  LabelTuple t = e.creators;
  t.insert(t.end(), e.annihilators.begin(), e.annihilators.end());
  KernelDistribution out = s_lm(KernelDistribution::basis_element(sh.l, sh.m, t));
  double n2 = 0;
  for (const auto& [idx, v] : out.coeffs) n2 += std::norm(v);
  return out * cplx(1.0 / std::sqrt(n2));
}

KernelStack KernelStack::from_coords(const KernelStackBasis& basis, const CVec& coords) {
  if (coords.size() != basis.size()) throw std::invalid_argument("from_coords: size mismatch");
  KernelStack st;
  st.shapes = basis.shapes();
  for (int s = 0; s < static_cast<int>(st.shapes.size()); ++s) {
    KernelDistribution k(st.shapes[s].l, st.shapes[s].m);
    const auto [first, last] = basis.shape_range(s);
    for (int j = first; j < last; ++j)
      if (coords[j] != cplx(0)) k = k + basis.kernel(j) * coords[j];
    k.sym_flag = true;
    st.kernels.push_back(std::move(k));
  }
  return st;
}

KernelStack KernelStack::scalar(const std::vector<Shape>& shapes, cplx c) {
  KernelStack st;
  st.shapes = shapes;
  for (const auto& sh : shapes)
    st.kernels.push_back(sh.l + sh.m == 0 ? KernelDistribution::scalar(c)
                                          : KernelDistribution(sh.l, sh.m));
  return st;
}

KernelDistribution KernelStack::get(Shape sh) const {
  for (std::size_t s = 0; s < shapes.size(); ++s)
    if (shapes[s] == sh) return kernels[s];
  return KernelDistribution(sh.l, sh.m);
}

std::vector<double> KernelStack::shape_norms() const {
  std::vector<double> out;
  for (const auto& k : kernels) {
    double n2 = 0;
    for (const auto& [idx, v] : k.coeffs) n2 += std::norm(v);
    out.push_back(std::sqrt(n2));
  }
  return out;
}

CVec to_coords(const KernelStackBasis& basis, const KernelStack& st) {
  CVec out = CVec::Zero(basis.size());
  for (int s = 0; s < static_cast<int>(basis.shapes().size()); ++s) {
    const KernelDistribution k = s_lm(st.get(basis.shapes()[s]));
    if (k.coeffs.empty()) continue;
    const auto [first, last] = basis.shape_range(s);
    for (int j = first; j < last; ++j) {
      cplx c = 0;
      for (const auto& [idx, v] : basis.kernel(j).coeffs) c += std::conj(v) * k.at(idx);
      out[j] = c;
    }
  }
  return out;
}

KernelStack translation_casimir(const OneParticleModel& m) {
  const KernelDistribution tau = tau_kernel(m);
  KernelDistribution t20(2, 0), t02(0, 2);
  t20.coeffs = tau.coeffs;
  t02.coeffs = tau.coeffs;
  KernelStack st;
  st.shapes = {{0, 0}, {2, 0}, {1, 1}, {0, 2}};
  st.kernels = {KernelDistribution::scalar(-static_cast<double>(m.dim())), t20, tau * cplx(-2.0), t02};
  return st;
}

std::vector<GaugeAlgebraElement> constant_directions(const LieAlgebraData& g) {
  std::vector<GaugeAlgebraElement> out;
  for (int a = 0; a < g.dim_g; ++a) out.push_back(GaugeAlgebraElement::constant(g.dim_g, a));
  return out;
}

std::vector<GaugeAlgebraElement> default_directions(const LieAlgebraData& g, int max_k) {
  auto out = constant_directions(g);
  for (int a = 0; a < g.dim_g; ++a)
    for (int k = 1; k <= max_k; ++k) {
      out.push_back(GaugeAlgebraElement::cos_mode(g.dim_g, k, a));
      out.push_back(GaugeAlgebraElement::sin_mode(g.dim_g, k, a));
    }
  return out;
}

namespace {

SectorOperator stack_operator(const FockBasis& b, const KernelStack& st) {
  SectorOperator x;
  x.n_max = b.n_max();
  for (const auto& k : st.kernels)
    if (!k.coeffs.empty()) x = x + xi_matrix(b, k);
  return x;
}

// Interior block layout of the flattened residual.
struct InteriorLayout {
  std::vector<std::vector<long long>> offset;  // [n_out][n_in]
  long long total = 0;
  int top = 0;

  explicit InteriorLayout(const FockBasis& b) : top(b.n_max() - 1) {
    offset.assign(top + 1, std::vector<long long>(top + 1, 0));
    for (int no = 0; no <= top; ++no)
      for (int ni = 0; ni <= top; ++ni) {
        offset[no][ni] = total;
        total += static_cast<long long>(b.sector_dim(no)) * b.sector_dim(ni);
      }
  }
};

double occupation_scale(int n_out, int n_in) {
  return std::sqrt(factorial(n_out) / factorial(n_in));
}

// Column of the constraint matrix for one direction, as (row, value) pairs.
void flatten_residual(const FockBasis& b, const InteriorLayout& lay, const SectorOperator& r,
                      int col, std::vector<Eigen::Triplet<cplx, long long>>& out) {
  for (const auto& [key, blk] : r.blocks) {
    const auto [no, ni] = key;
    if (no > lay.top || ni > lay.top) continue;
    const double s = occupation_scale(no, ni);
    const long long base = lay.offset[no][ni];
    const long long cols = b.sector_dim(ni);
    for (int c = 0; c < blk.outerSize(); ++c)
      for (SpMat::InnerIterator it(blk, c); it; ++it)
        if (it.value() != cplx(0))
          out.emplace_back(base + it.row() * cols + it.col(), col, s * it.value());
  }
}

double interior_norm2(const InteriorLayout& lay, const SectorOperator& r) {
  double s2 = 0;
  for (const auto& [key, blk] : r.blocks) {
    const auto [no, ni] = key;
    if (no > lay.top || ni > lay.top) continue;
    const double s = occupation_scale(no, ni);
    s2 += s * s * blk.squaredNorm();
  }
  return s2;
}

}  // namespace

double commutator_residual(const OneParticleModel& m, const FockBasis& b,
                           const GaugeAlgebraElement& psi, const KernelStack& stack) {
  const SectorOperator p = pi_direct(m, b, psi);
  const SectorOperator x = stack_operator(b, stack);
  return std::sqrt(interior_norm2(InteriorLayout(b), p * x - x * p));
}

double constraint_residual(const OneParticleModel& m, const ConstraintSystem& sys,
                           const KernelStack& stack) {
  const FockBasis b = FockBasis::for_model(m, sys.n_max);
  const InteriorLayout lay(b);
  const SectorOperator x = stack_operator(b, stack);
  double s2 = 0;
  for (const auto& psi : sys.directions) {
    const SectorOperator p = pi_direct(m, b, psi);
    s2 += interior_norm2(lay, p * x - x * p);
  }
  return std::sqrt(s2);
}

ConstraintSystem assemble_constraints(const OneParticleModel& m, const std::vector<Shape>& shapes,
                                      const std::vector<GaugeAlgebraElement>& directions,
                                      int n_max, const ConstraintOptions& opt) {
  if (directions.empty()) throw std::invalid_argument("assemble_constraints: no directions");
  if (std::find(shapes.begin(), shapes.end(), Shape{0, 0}) == shapes.end())
    throw std::invalid_argument("assemble_constraints: shapes must include (0,0)");
  if (n_max < 2) throw std::invalid_argument("assemble_constraints: n_max < 2");
  ConstraintSystem sys{KernelStackBasis(shapes, m.dim()), directions, n_max, {}};
  const FockBasis b = FockBasis::for_model(m, n_max);
  const InteriorLayout lay(b);
  const int ncols = sys.basis.size();

  std::vector<SectorOperator> xs(ncols);
  for (int j = 0; j < ncols; ++j) xs[j] = xi_matrix(b, sys.basis.kernel(j));

  const int nd = static_cast<int>(directions.size());
  std::vector<CMat> grams(nd);
  auto work = [&](int d) {
    const SectorOperator p = pi_direct(m, b, directions[d]);
    std::vector<Eigen::Triplet<cplx, long long>> trip;
    for (int j = 0; j < ncols; ++j) flatten_residual(b, lay, p * xs[j] - xs[j] * p, j, trip);
    Eigen::SparseMatrix<cplx, Eigen::ColMajor, long long> a(lay.total, ncols);
    a.setFromTriplets(trip.begin(), trip.end());
    grams[d] = CMat(a.adjoint() * a);
  };
  if (opt.parallel) {
    const int nt = std::max(1u, std::thread::hardware_concurrency());
    std::vector<std::thread> pool;
    for (int t = 0; t < nt; ++t)
      pool.emplace_back([&, t] {
        for (int d = t; d < nd; d += nt) work(d);
      });
    for (auto& th : pool) th.join();
  } else {
    for (int d = 0; d < nd; ++d) work(d);
  }
  sys.gram = CMat::Zero(ncols, ncols);
  for (const auto& g : grams) sys.gram += g;
  return sys;
}

NullSpaceResult null_space(const OneParticleModel& m, const ConstraintSystem& sys,
                           double threshold) {
  NullSpaceResult res;
  res.threshold = threshold;
  const int n = static_cast<int>(sys.gram.rows());
  if (n == 0) return res;
  const CMat g = 0.5 * (sys.gram + CMat(sys.gram.adjoint()));
  Eigen::SelfAdjointEigenSolver<CMat> es(g);
  const RVec lam = es.eigenvalues();
  std::vector<double> sigma(n);
  for (int i = 0; i < n; ++i) sigma[i] = std::sqrt(std::max(lam[i], 0.0));
  const double smax = sigma.back();

  if (smax == 0.0) {
    res.singular_values = sigma;
    res.null_dim = n;
    for (int i = 0; i < n; ++i) res.basis.push_back(es.eigenvectors().col(i));
    for (double t : {1e-6, 1e-7, 1e-8, 1e-9, 1e-10}) res.sweep.emplace_back(t, n);
    return res;
  }

  // Eigenvalues of the Gram matrix lose half the digits; recompute the small
  // ones as exact residuals of their eigenvectors.
  for (int i = 0; i < n && sigma[i] <= 1e-4 * smax; ++i)
    sigma[i] = constraint_residual(m, sys, KernelStack::from_coords(sys.basis, es.eigenvectors().col(i)));
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return sigma[a] < sigma[b]; });

  for (int i : order) res.singular_values.push_back(sigma[i]);
  const auto dim_at = [&](double t) {
    int k = 0;
    while (k < n && res.singular_values[k] <= t * smax) ++k;
    return k;
  };
  res.null_dim = dim_at(threshold);
  for (double t : {1e-6, 1e-7, 1e-8, 1e-9, 1e-10}) res.sweep.emplace_back(t, dim_at(t));
  for (int k = 0; k < res.null_dim; ++k) res.basis.push_back(es.eigenvectors().col(order[k]));

  const double floor = std::numeric_limits<double>::epsilon() * smax;
  const double below = res.null_dim > 0 ? std::max(res.singular_values[res.null_dim - 1], floor) : floor;
  const double above = res.null_dim < n ? res.singular_values[res.null_dim] : smax;
  res.gap = above / below;
  res.ambiguous = res.null_dim < n && above < 10.0 * threshold * smax;
  return res;
}

double span_defect(const NullSpaceResult& ns, const CVec& v) {
  CVec r = v;
  for (const auto& b : ns.basis) r -= b * b.dot(v);
  return r.norm() / v.norm();
}

double IdentityReport::max_residual() const {
  double mx = 0;
  for (const auto& r : rows) mx = std::max(mx, r.residual);
  return mx;
}

KernelDistribution relation_residual(const LabelSpace& ls, const KernelStack& stack,
                                     const GeneratorTriple& lam, Shape sh) {
  const int l = sh.l, m = sh.m;
  const KernelDistribution l10 = KernelDistribution::product(1, 0, {lam.lambda_10});
  const KernelDistribution l01 = KernelDistribution::product(0, 1, {lam.lambda_01});
  const KernelDistribution k = s_lm(stack.get(sh));
  const KernelDistribution k_up_m = s_lm(stack.get({l, m + 1}));
  const KernelDistribution k_up_l = s_lm(stack.get({l + 1, m}));
  KernelDistribution out(l, m);
  if (m >= 1) out = out + s_composition(ls, k, lam.lambda_11, 1) * cplx(m);
  out = out + s_composition(ls, k_up_m, l10, 1) * cplx(m + 1);
  if (l >= 1) out = out - s_composition(ls, lam.lambda_11, k, 1) * cplx(l);
  out = out + s_composition(ls, l01, k_up_l, 1) * cplx(l + 1);
  return s_lm(out);
}

CMat bilinear_dual(const OneParticleModel& m, const CMat& v) {
  const int d = m.dim();
  CMat out(d, d);
  for (int j = 0; j < d; ++j)
    for (int h = 0; h < d; ++h) out(j, h) = v(m.conj_label(h), m.conj_label(j));
  return out;
}

KernelDistribution dgamma_on_kernel(const KernelDistribution& k, const CMat& a) {
  KernelDistribution out(k.l, k.m);
  for (const auto& [idx, v] : k.coeffs)
    for (int s = 0; s < k.rank(); ++s) {
      LabelTuple t = idx;
      for (int x = 0; x < a.rows(); ++x) {
        const cplx w = a(x, idx[s]);
        if (w == cplx(0)) continue;
        t[s] = x;
        out.coeffs[t] += w * v;
      }
    }
  return out;
}

IdentityReport check_identity_suite(const OneParticleModel& m, const KernelStack& stack,
                                    const GaugeAlgebraElement& psi) {
  const LabelSpace ls = LabelSpace::from_model(m);
  const GeneratorTriple lam = generator_triple(m, psi);
  const CMat vd = bilinear_dual(m, V_alg(m, psi));
  const KernelDistribution l10 = KernelDistribution::product(1, 0, {lam.lambda_10});
  const KernelDistribution l01 = KernelDistribution::product(0, 1, {lam.lambda_01});
  IdentityReport rep;
  for (const Shape sh : stack.shapes) {
    const std::string tag = "[" + std::to_string(sh.l) + "," + std::to_string(sh.m) + "]";
    rep.rows.push_back({"relation" + tag, sh, relation_residual(ls, stack, lam, sh).max_abs()});
    if (sh.l + sh.m == 0) continue;
    const KernelDistribution lhs = dgamma_on_kernel(s_lm(stack.get(sh)), vd);
    const KernelDistribution inhom = s_lm(
        s_composition(ls, l01, s_lm(stack.get({sh.l + 1, sh.m})), 1) * cplx(sh.l + 1) +
        s_composition(ls, s_lm(stack.get({sh.l, sh.m + 1})), l10, 1) * cplx(sh.m + 1));
    rep.rows.push_back({"dgamma-derived" + tag, sh, (lhs + inhom).max_abs()});
    const double lit_sign = sh.l >= 1 ? -1.0 : 1.0;
    rep.rows.push_back({"dgamma-literal" + tag, sh, (lhs + inhom * cplx(lit_sign)).max_abs()});
  }
  return rep;
}

CMat label_weights(const OneParticleModel& m) {
  const auto& g = m.alg;
  CMat w = CMat::Zero(g.dim_g, g.cartan_dim);
  for (int p = 0; p < g.num_pos_roots; ++p) {
    w.row(g.cartan_dim + p) = g.roots.row(p);
    w.row(g.cartan_dim + g.num_pos_roots + p) = -g.roots.row(p);
  }
  return w;
}

KernelDistribution grading_support_filter(const OneParticleModel& m, const KernelDistribution& k,
                                          double tol) {
  const CMat w = label_weights(m);
  KernelDistribution out(k.l, k.m);
  out.sym_flag = k.sym_flag;
  for (const auto& [idx, v] : k.coeffs) {
    CVec total = CVec::Zero(w.cols());
    for (int a : idx) total += w.row(m.g_index_of(a)).transpose();
    if (total.norm() <= tol) out.coeffs[idx] = v;
  }
  return out;
}

VanishingReport vanishing_chain_report(const OneParticleModel& m, const ConstraintSystem& sys,
                                       const NullSpaceResult& ns, double tol) {
  VanishingReport rep;
  auto add = [&](std::string name, double value, bool pass) {
    rep.rows.push_back({std::move(name), value, pass});
    rep.pass = rep.pass && pass;
  };
  const auto& g = m.alg;
  Eigen::JacobiSVD<CMat> svd(g.roots);
  const double root_min = g.roots.size() ? svd.singularValues().minCoeff() : 0.0;
  add("root evaluation matrix: smallest singular value", root_min, root_min > 1e-8);

  const LabelSpace ls = LabelSpace::from_model(m);
  const auto& shapes = sys.basis.shapes();
  for (std::size_t i = 0; i < ns.basis.size(); ++i) {
    const KernelStack st = KernelStack::from_coords(sys.basis, ns.basis[i]);
    const std::string pre = "null[" + std::to_string(i) + "] ";
    const auto norms = st.shape_norms();
    for (std::size_t s = 0; s < shapes.size(); ++s) {
      if (shapes[s].l + shapes[s].m == 0) continue;
      add(pre + "|kappa_" + std::to_string(shapes[s].l) + "," + std::to_string(shapes[s].m) + "|",
          norms[s], norms[s] < tol);
    }
    double pairing = 0;
    for (const auto& sh : shapes) {
      if (sh.m != 0 || sh.l < 1) continue;
      const KernelDistribution k = s_lm(st.get(sh));
      for (const auto& psi : sys.directions) {
        const CVec dpsi = d_psi(m, psi);
        if (dpsi.norm() == 0.0) continue;
        pairing = std::max(pairing,
                           contract(ls, k, KernelDistribution::product(1, 0, {dpsi}), 1).max_abs());
      }
    }
    add(pre + "<kappa_{l+1,0}, dPsi (x) e>", pairing, pairing < tol);

    double rootsum = 0;
    for (const auto& sh : shapes) {
      if (sh.m != 1) continue;
      std::map<std::pair<LabelTuple, int>, CVec> acc;  // (creators, mode) -> sum over Cartan j
      for (const auto& [idx, v] : s_lm(st.get(sh)).coeffs) {
        const int a = idx.back(), j = m.g_index_of(a);
        if (j >= g.cartan_dim) continue;
        auto& s = acc[{LabelTuple(idx.begin(), idx.end() - 1), m.mode_of(a)}];
        if (s.size() == 0) s = CVec::Zero(g.num_pos_roots);
        s += v * g.roots.col(j);
      }
      for (const auto& [key, s] : acc) rootsum = std::max(rootsum, s.cwiseAbs().maxCoeff());
    }
    add(pre + "sum_j <kappa_{l,1}, e (x) e(i,j)> alpha_k(u_j)", rootsum, rootsum < tol);
  }
  return rep;
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace wnlab
