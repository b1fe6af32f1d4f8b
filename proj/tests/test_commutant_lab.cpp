#include <cmath>

#include "doctest.h"
#include "test_util.hpp"
#include "wnlab/commutant_lab.hpp"

using namespace wnlab;

namespace {

KernelStack random_stack(const KernelStackBasis& basis, std::mt19937_64& rng, bool with_scalar) {
  CVec c = testing::random_cvec(rng, basis.size());
  if (!with_scalar) c[0] = 0;
  return KernelStack::from_coords(basis, c / c.norm());
}

double interior_diff(const FockBasis& b, const SectorOperator& x, const SectorOperator& y) {
  double mx = 0;
  for (int no = 0; no < b.n_max(); ++no)
    for (int ni = 0; ni < b.n_max(); ++ni) {
      CMat d = CMat(x.block(b, no, ni)) - CMat(y.block(b, no, ni));
      if (d.size()) mx = std::max(mx, d.cwiseAbs().maxCoeff());
    }
  return mx;
}

}  // namespace

TEST_CASE("shapes and stack basis") {
  const auto sh = shapes_upto(2);
  REQUIRE(sh.size() == 6);
  CHECK(sh[0] == Shape{0, 0});
  CHECK(sh[1] == Shape{1, 0});
  CHECK(sh[5] == Shape{0, 2});
  KernelStackBasis basis(sh, 3);
  // 1 + 3 + 3 + 6 + 9 + 6
  CHECK(basis.size() == 28);
  for (int k = 0; k < basis.size(); ++k) {
    const auto kk = basis.kernel(k);
    CHECK(symmetry_defect(kk) < 1e-15);
    double n2 = 0;
    for (const auto& [idx, v] : kk.coeffs) n2 += std::norm(v);
    CHECK(n2 == doctest::Approx(1.0));
  }
  std::mt19937_64 rng(1);
  CVec c = testing::random_cvec(rng, basis.size());
  const auto st = KernelStack::from_coords(basis, c);
  const auto norms = st.shape_norms();
  for (int s = 0; s < 6; ++s) {
    const auto [a, e] = basis.shape_range(s);
    CHECK(norms[s] == doctest::Approx(c.segment(a, e - a).norm()));
  }
}

TEST_CASE("default directions") {
  const auto g = build_su2();
  CHECK(default_directions(g).size() == 15);
  CHECK(constant_directions(g).size() == 3);
  CHECK(default_directions(g, 1).size() == 9);
}

TEST_CASE("relation residual equals the commutator kernel") {
  OneParticleModel m(build_su2(), 1, 5);
  FockBasis b = FockBasis::for_model(m, 4);
  const auto ls = LabelSpace::from_model(m);
  KernelStackBasis basis(shapes_upto(2), m.dim());
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 3; ++trial) {
    const auto st = random_stack(basis, rng, true);
    auto psi = GaugeAlgebraElement::cos_mode(3, 1, trial) + GaugeAlgebraElement::constant(3, 2, 0.7);
    const auto lam = generator_triple(m, psi);
    SectorOperator x;
    x.n_max = b.n_max();
    for (const auto& k : st.kernels) x = x + xi_matrix(b, k);
    const auto p = pi_direct(m, b, psi);
    SectorOperator rhs;
    rhs.n_max = b.n_max();
    for (const auto& sh : shapes_upto(3)) rhs = rhs + xi_matrix(b, relation_residual(ls, st, lam, sh));
    CHECK(interior_diff(b, x * p - p * x, rhs) < 1e-12);
    for (const auto& sh : shapes_upto(4))
      if (sh.l + sh.m == 3) CHECK(relation_residual(ls, st, lam, sh).max_abs() == 0.0);
  }
}

TEST_CASE("dGamma form agrees with the relation residual") {
  OneParticleModel m(build_su2(), 1, 5);
  const auto ls = LabelSpace::from_model(m);
  KernelStackBasis basis(shapes_upto(2), m.dim());
  std::mt19937_64 rng(3);
  const auto st = random_stack(basis, rng, true);
  auto psi = GaugeAlgebraElement::sin_mode(3, 1, 0) + GaugeAlgebraElement::constant(3, 1, -0.4);
  const auto rep = check_identity_suite(m, st, psi);
  const auto lam = generator_triple(m, psi);
  const CMat vd = bilinear_dual(m, V_alg(m, psi));
  CHECK((vd + V_alg(m, psi)).cwiseAbs().maxCoeff() < 1e-13);
  for (const auto& row : rep.rows) {
    if (row.name.rfind("dgamma-derived", 0) != 0) continue;
    const double rel = relation_residual(ls, st, lam, row.shape).max_abs();
    CHECK(row.residual == doctest::Approx(rel).epsilon(1e-10));
  }
  CHECK(rep.max_residual() > 1e-3);

  const auto scalar = check_identity_suite(m, KernelStack::scalar(shapes_upto(2), 2.0), psi);
  CHECK(scalar.max_residual() == 0.0);
}

TEST_CASE("dGamma on kernels: symmetrizer identity") {
  std::mt19937_64 rng(4);
  OneParticleModel m(build_su2(), 1, 5);
  const CMat a = testing::random_cmat(rng, m.dim(), m.dim());
  KernelStackBasis basis({{2, 1}}, m.dim());
  const auto k = KernelStack::from_coords(basis, testing::random_cvec(rng, basis.size())).kernels[0];
  KernelDistribution last(2, 1), first(2, 1);
  for (const auto& [idx, v] : k.coeffs) {
    for (int x = 0; x < m.dim(); ++x) {
      LabelTuple t = idx;
      t[2] = x;
      last.coeffs[t] += a(x, idx[2]) * v;
      t = idx;
      t[0] = x;
      first.coeffs[t] += a(x, idx[0]) * v;
    }
  }
  const auto both = dgamma_on_kernel(k, a);
  CHECK((both - s_lm(first * cplx(2.0) + last)).max_abs() < 1e-13);
}

TEST_CASE("grading filter") {
  OneParticleModel m(build_su2(), 1, 5);
  KernelDistribution k10(1, 0);
  for (int a = 0; a < m.dim(); ++a) k10.coeffs[{a}] = 1.0;
  const auto f10 = grading_support_filter(m, k10);
  for (int a = 0; a < m.dim(); ++a)
    CHECK((f10.at({a}) != cplx(0)) == (m.g_index_of(a) < m.alg.cartan_dim));
  const auto kx = KernelDistribution::basis_element(1, 1, {m.label(0, 1), m.label(2, 2)});
  CHECK(grading_support_filter(m, kx).coeffs.size() == 1);

  std::mt19937_64 rng(5);
  KernelStackBasis basis({{1, 1}, {2, 1}}, m.dim());
  const auto st = KernelStack::from_coords(basis, testing::random_cvec(rng, basis.size()));
  for (const auto& k : st.kernels) {
    const auto f = grading_support_filter(m, k);
    CHECK((grading_support_filter(m, f) - f).max_abs() == 0.0);
    CHECK(f.coeffs.size() < k.coeffs.size());
  }
}

TEST_CASE("grading filter commutes with constant Cartan constraints") {
  OneParticleModel m(build_su2(), 1, 5);
  FockBasis b = FockBasis::for_model(m, 4);
  KernelStackBasis basis(shapes_upto(2), m.dim());
  std::mt19937_64 rng(6);
  const auto st = random_stack(basis, rng, true);
  KernelStack filtered = st;
  for (auto& k : filtered.kernels) k = grading_support_filter(m, k);
  const auto h = GaugeAlgebraElement::constant(3, 0);
  const auto ls = LabelSpace::from_model(m);
  const auto lam = generator_triple(m, h);
  for (const auto& sh : st.shapes) {
    const auto a = grading_support_filter(m, relation_residual(ls, st, lam, sh));
    const auto c = relation_residual(ls, filtered, lam, sh);
    CHECK((a - c).max_abs() < 1e-13);
  }
}

TEST_CASE("scalar stacks commute, random stacks do not") {
  OneParticleModel m(build_su2(), 1, 5);
  FockBasis b = FockBasis::for_model(m, 3);
  const auto dirs = default_directions(m.alg, 1);
  CHECK(commutator_residual(m, b, dirs[4], KernelStack::scalar(shapes_upto(2), 1.5)) == 0.0);
  KernelStackBasis basis(shapes_upto(2), m.dim());
  std::mt19937_64 rng(7);
  int violated = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto st = random_stack(basis, rng, false);
    double r2 = 0;
    for (const auto& d : dirs) r2 += std::pow(commutator_residual(m, b, d, st), 2);
    violated += std::sqrt(r2) >= 1e-3;
  }
  CHECK(violated >= 99);
}

TEST_CASE("translation Casimir commutes") {
  OneParticleModel m(build_su2(), 1, 5);
  FockBasis b = FockBasis::for_model(m, 4);
  const auto q = translation_casimir(m);
  for (const auto& d : default_directions(m.alg, 1)) CHECK(commutator_residual(m, b, d, q) < 1e-12);
  // Operator check: sum_a P(e_a) P(e_abar) built from ladder operators.
  SectorOperator direct;
  direct.n_max = b.n_max();
  for (int a = 0; a < m.dim(); ++a) {
    const CVec ea = CVec::Unit(m.dim(), a), eb = CVec::Unit(m.dim(), m.conj_label(a));
    direct = direct + (creation(b, ea) - annihilation(b, ea)) * (creation(b, eb) - annihilation(b, eb));
  }
  SectorOperator x;
  x.n_max = b.n_max();
  for (const auto& k : q.kernels) x = x + xi_matrix(b, k);
  CHECK(interior_diff(b, direct, x) < 1e-12);
}

TEST_CASE("null space at small truncation") {
  OneParticleModel m(build_su2(), 1, 5);
  const auto shapes = shapes_upto(2);
  const auto sys = assemble_constraints(m, shapes, default_directions(m.alg, 1), 3);
  CHECK(sys.basis.size() == 1 + 9 + 9 + 45 + 81 + 45);
  CHECK((sys.gram - CMat(sys.gram.adjoint())).cwiseAbs().maxCoeff() < 1e-9);

  // Scalars and the translation Casimir.
  const auto ns = null_space(m, sys);
  CHECK(ns.null_dim == 2);
  CHECK_FALSE(ns.ambiguous);
  CHECK(ns.gap >= 1e4);
  for (const auto& [t, d] : ns.sweep) CHECK(d == 2);
  REQUIRE(ns.basis.size() == 2);
  CHECK(span_defect(ns, to_coords(sys.basis, KernelStack::scalar(shapes, 1.0))) < 1e-9);
  CHECK(span_defect(ns, to_coords(sys.basis, translation_casimir(m))) < 1e-9);
  for (const auto& v : ns.basis)
    CHECK(constraint_residual(m, sys, KernelStack::from_coords(sys.basis, v)) < 1e-10);
  const auto rep = vanishing_chain_report(m, sys, ns);
  CHECK_FALSE(rep.pass);
  CHECK(rep.rows[0].pass);

  // A random coordinate vector: Gram quadratic form equals the squared residual.
  std::mt19937_64 rng(8);
  CVec v = testing::random_cvec(rng, sys.basis.size());
  const double quad = std::real(v.dot(sys.gram * v));
  const double r = constraint_residual(m, sys, KernelStack::from_coords(sys.basis, v));
  CHECK(std::sqrt(quad) == doctest::Approx(r).epsilon(1e-10));

  auto par = assemble_constraints(m, shapes, default_directions(m.alg, 1), 3, {true});
  CHECK((par.gram - sys.gram).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("identity suite on the null basis") {
  OneParticleModel m(build_su2(), 1, 5);
  const auto shapes = shapes_upto(2);
  const auto dirs = default_directions(m.alg, 1);
  const auto sys = assemble_constraints(m, shapes, dirs, 3);
  const auto ns = null_space(m, sys);
  for (const auto& v : ns.basis) {
    const auto st = KernelStack::from_coords(sys.basis, v);
    for (const auto& d : dirs) {
      const auto rep = check_identity_suite(m, st, d);
      for (const auto& row : rep.rows)
        if (row.name.rfind("dgamma-literal", 0) != 0) CHECK(row.residual < 1e-9);
    }
  }
  // The two signs of the inhomogeneous term differ on a generic stack.
  std::mt19937_64 rng(9);
  KernelStackBasis basis(shapes, m.dim());
  const auto rep = check_identity_suite(m, random_stack(basis, rng, false), dirs[3]);
  double gap = 0;
  for (std::size_t i = 0; i + 1 < rep.rows.size(); ++i)
    if (rep.rows[i].name.rfind("dgamma-derived", 0) == 0 && rep.rows[i].shape.l >= 1)
      gap = std::max(gap, std::abs(rep.rows[i].residual - rep.rows[i + 1].residual));
  CHECK(gap > 1e-3);
}

TEST_CASE("constants alone leave a larger null space") {
  OneParticleModel m(build_su2(), 1, 5);
  const auto shapes = shapes_upto(2);
  const auto full = null_space(m, assemble_constraints(m, shapes, default_directions(m.alg, 1), 3));
  const auto cst = null_space(m, assemble_constraints(m, shapes, constant_directions(m.alg), 3));
  CHECK(cst.null_dim > full.null_dim);
  // Adding directions never enlarges the null space.
  auto more = default_directions(m.alg, 1);
  more.pop_back();
  const auto fewer = null_space(m, assemble_constraints(m, shapes, more, 3));
  CHECK(fewer.null_dim >= full.null_dim);
}

TEST_CASE("errors") {
  OneParticleModel m(build_su2(), 1, 5);
  CHECK_THROWS_AS(assemble_constraints(m, shapes_upto(1), {}, 3), std::invalid_argument);
  CHECK_THROWS_AS(assemble_constraints(m, {{1, 0}}, constant_directions(m.alg), 3),
                  std::invalid_argument);
  CHECK(fnv1a("") == 14695981039346656037ull);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cull);
}
