#include <cmath>

#include "doctest.h"
#include "test_util.hpp"
#include "wnlab/one_particle.hpp"

using namespace wnlab;

namespace {

OneParticleModel su2_model(int cutoff) { return OneParticleModel(build_su2(), cutoff, 4 * cutoff + 1); }

CVec random_real_vector(const OneParticleModel& m, std::mt19937_64& rng, int max_freq) {
  CVec f = testing::random_cvec(rng, m.dim());
  f = 0.5 * (f + conj_vector(m, f));
  return band_limit(m, f, max_freq);
}

GaugeGroupElement random_constant(const OneParticleModel& m, std::mt19937_64& rng) {
  CVec z = testing::random_rvec(rng, m.alg.dim_g);
  return GaugeGroupElement::constant(m, exp_rep(m.alg.to_matrix(z)));
}

// k0 * diag(e^{i theta}, e^{-i theta}) * k1: entries band-limited at frequency 1.
GaugeGroupElement random_loop(const OneParticleModel& m, std::mt19937_64& rng) {
  return random_constant(m, rng) * GaugeGroupElement::torus_loop(m, {1, -1}) *
         random_constant(m, rng);
}

}  // namespace

TEST_CASE("circle model eigenvalues and grid guard") {
  CircleModel c(3, 13);
  CHECK(c.num_modes() == 7);
  for (int i = 0; i < c.num_modes(); ++i) CHECK(c.eigenvalues[i] >= 2.0);
  for (int i = 1; i < c.num_modes(); ++i) CHECK(c.eigenvalues[i] >= c.eigenvalues[i - 1]);
  CHECK_THROWS_AS(CircleModel(3, 12), std::invalid_argument);
}

TEST_CASE("inner0 and Hilbert-scale norms") {
  auto m = su2_model(2);
  std::mt19937_64 rng(1);
  CHECK(std::abs(inner0(m.basis_vector(0, 0), m.basis_vector(0, 0)) - 1.0) < 1e-15);
  CHECK(std::abs(inner0(m.basis_vector(0, 0), m.basis_vector(1, 0))) == 0.0);
  CVec f = testing::random_cvec(rng, m.dim()), g = testing::random_cvec(rng, m.dim());
  CHECK(std::abs(inner0(f, g) - std::conj(inner0(g, f))) < 1e-13);
  CHECK_THROWS_AS(inner0(f, CVec::Zero(2)), std::invalid_argument);

  for (int mode = 0; mode < m.circle.num_modes(); ++mode)
    for (int j = 0; j < 3; ++j) {
      CVec e = m.basis_vector(mode, j);
      CHECK(norm_p(m, e, 0.0) == doctest::Approx(1.0));
      for (double p : {0.5, 1.0, 2.5}) CHECK(std::abs(norm_p(m, e, p) * norm_p(m, e, -p) - 1.0) < 1e-14);
    }
  for (double p : {-2.0, -0.5, 0.0, 1.0})
    for (double q : {0.0, 0.3, 1.0}) CHECK(norm_p(m, f, p) <= norm_p(m, f, p + q) + 1e-12);
}

TEST_CASE("Hilbert-Schmidt sum") {
  auto m = su2_model(2);
  for (double a : {0.5, 1.0, 2.0}) {
    const double expect = 3.0 * (std::pow(2.0, -2 * a) + 2 * std::pow(3.0, -2 * a) + 2 * std::pow(6.0, -2 * a));
    CHECK(std::abs(hs_delta_sq(m, a) - expect) < 1e-14);
  }
  CHECK(hs_delta_sq(m, 1.0) > hs_delta_sq(m, 1.5));
  CHECK_THROWS_AS(hs_delta_sq(m, 0.0), std::invalid_argument);
  // Successive differences shrink; the remaining tail is bounded by 6 / (3 I^3).
  double prev = hs_delta_sq(su2_model(1), 1.0), prev_diff = 1e9;
  for (int cutoff = 2; cutoff <= 12; ++cutoff) {
    const double cur = hs_delta_sq(su2_model(cutoff), 1.0);
    const double diff = cur - prev;
    CHECK(diff > 0);
    CHECK(diff < prev_diff);
    CHECK(diff < 6.0 / std::pow(cutoff, 4));
    prev = cur;
    prev_diff = diff;
  }
}

TEST_CASE("conjugation and bilinear pairing") {
  auto m = su2_model(2);
  std::mt19937_64 rng(2);
  CVec f = testing::random_cvec(rng, m.dim()), g = testing::random_cvec(rng, m.dim());
  CHECK((conj_vector(m, conj_vector(m, f)) - f).norm() < 1e-15);
  CHECK(std::abs(bilinear(m, f, g) - bilinear(m, g, f)) < 1e-12);
  CHECK(reality_defect(m, random_real_vector(m, rng, 2)) < 1e-15);
}

TEST_CASE("beta of the identity and of constant maps vanishes") {
  auto m = su2_model(4);
  std::mt19937_64 rng(3);
  CHECK(beta(m, GaugeGroupElement::identity(m)).norm() < 1e-14);
  CHECK(beta(m, random_constant(m, rng)).norm() < 1e-12);
}

TEST_CASE("beta of a torus loop is the constant winding element") {
  auto m = su2_model(4);
  CVec b = beta(m, GaugeGroupElement::torus_loop(m, {1, -1}));
  // d(diag(e^{i t}, e^{-i t})) psi^{-1} = diag(i, -i), a constant Cartan 1-form.
  CMat samples(m.circle.grid_size, 3);
  CVec h = m.alg.to_coords(CMat((CVec(2) << cplx(0, 1), cplx(0, -1)).finished().asDiagonal()));
  for (int n = 0; n < m.circle.grid_size; ++n) samples.row(n) = h.transpose();
  CHECK((b - m.project_one_form(samples)).norm() < 1e-12);
  CHECK(bandwidth(m, b) == 0);
}

TEST_CASE("Maurer-Cartan cocycle on band-limited maps") {
  auto m = su2_model(4);
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 5; ++trial) {
    auto psi = random_loop(m, rng), phi = random_loop(m, rng);
    CVec lhs = beta(m, psi * phi);
    CVec rhs = V_group(m, psi) * beta(m, phi) + beta(m, psi);
    CHECK((lhs - rhs).norm() < 1e-10);
  }
}

TEST_CASE("beta(exp tPsi)/t tends to dPsi") {
  auto m = su2_model(4);
  auto psi = GaugeAlgebraElement::cos_mode(3, 1, 0) + GaugeAlgebraElement::sin_mode(3, 1, 2, 0.7) +
             GaugeAlgebraElement::constant(3, 1, 0.4);
  CVec dpsi = d_psi(m, psi);
  double prev = 0;
  for (double t : {1e-2, 1e-3, 1e-4}) {
    const double err = (beta(m, GaugeGroupElement::exp_of(m, psi, t)) / t - dpsi).norm();
    if (prev > 0) CHECK(prev / err == doctest::Approx(10.0).epsilon(0.1));
    prev = err;
  }
  CHECK(prev < 1e-3);
}

TEST_CASE("V_group: identity, homomorphism and unitarity") {
  auto m = su2_model(4);
  std::mt19937_64 rng(6);
  CHECK((V_group(m, GaugeGroupElement::identity(m)) - CMat::Identity(m.dim(), m.dim())).norm() < 1e-12);

  auto k = random_constant(m, rng);
  CMat vk = V_group(m, k);
  CHECK((vk * V_group(m, k.inverse()) - CMat::Identity(m.dim(), m.dim())).norm() < 1e-12);
  CHECK((vk.adjoint() * vk - CMat::Identity(m.dim(), m.dim())).norm() < 1e-12);

  // Ad of a loop shifts frequencies by at most 2; inputs of frequency <= I - 2 stay inside.
  auto psi = random_loop(m, rng), phi = random_loop(m, rng);
  CMat vp = V_group(m, psi), vq = V_group(m, phi), vpq = V_group(m, psi * phi);
  for (int trial = 0; trial < 5; ++trial) {
    CVec f = band_limit(m, testing::random_cvec(rng, m.dim()), 2);
    CHECK(std::abs((vp * f).norm() - f.norm()) < 1e-12);
    CHECK((V_group(m, psi.inverse()) * (vp * f) - f).norm() < 1e-12);
    CHECK((vpq * f - vp * (vq * f)).norm() < 1e-12);
  }
}

TEST_CASE("V_alg: Cartan eigenvalues, skewness and derivative of V_group") {
  auto m = su2_model(4);
  const auto& g = m.alg;
  CHECK(V_alg(m, GaugeAlgebraElement::zero(3, 1)).norm() == 0.0);
  CMat vh = V_alg(m, GaugeAlgebraElement::constant(3, 0));
  for (int i = 0; i < m.circle.num_modes(); ++i) {
    CVec e = m.basis_vector(i, 1);
    CHECK((vh * e - g.roots(0, 0) * e).norm() < 1e-12);
  }
  auto psi = GaugeAlgebraElement::cos_mode(3, 1, 1) + GaugeAlgebraElement::constant(3, 2, 0.5);
  CMat va = V_alg(m, psi);
  CHECK((va + va.adjoint()).norm() < 1e-12);

  // Only vectors well inside the cutoff see no truncation leakage.
  double prev = 0;
  for (double t : {1e-2, 1e-3}) {
    CMat fd = (V_group(m, GaugeGroupElement::exp_of(m, psi, t)) - CMat::Identity(m.dim(), m.dim())) / t;
    const double err = (fd - va).norm();
    if (prev > 0) CHECK(prev / err == doctest::Approx(10.0).epsilon(0.1));
    prev = err;
  }
}

TEST_CASE("adjoint of root directions") {
  auto m = su2_model(2);
  auto r = V_alg_adjoint_check(m, 0);
  CHECK(r.root_residual < 1e-10);
  CHECK(r.cartan_residual < 1e-10);
  CHECK_THROWS_AS(V_alg_adjoint_check(m, 1), std::out_of_range);
}

TEST_CASE("span of generator family") {
  auto m = su2_model(2);
  CHECK_THROWS_AS(span_generators(m, {}), std::invalid_argument);
  CHECK(span_generators(m, {GaugeAlgebraElement::constant(3, 0)}).rank == 0);

  std::vector<GaugeAlgebraElement> dirs;
  int prev_rank = 0;
  for (int k = 1; k <= 2; ++k)
    for (int a = 0; a < 3; ++a) {
      dirs.push_back(GaugeAlgebraElement::cos_mode(3, k, a));
      dirs.push_back(GaugeAlgebraElement::sin_mode(3, k, a));
      const int r = span_generators(m, dirs).rank;
      CHECK(r >= prev_rank);
      prev_rank = r;
    }
  CHECK(prev_rank <= m.dim());
  CHECK(prev_rank >= m.dim() - 3);
}
