#include <cmath>

#include "doctest.h"
#include "test_util.hpp"
#include "wnlab/fock_space.hpp"

using namespace wnlab;

namespace {

FockVector random_fock(const FockBasis& b, std::mt19937_64& rng) {
  FockVector v = FockVector::zero(b);
  for (auto& s : v.sectors) s = testing::random_cvec(rng, static_cast<int>(s.size()));
  return v;
}

CMat dense_block(const SectorOperator& op, const FockBasis& b, int n_out, int n_in) {
  return CMat(op.block(b, n_out, n_in));
}

double op_diff(const SectorOperator& a, const SectorOperator& c) { return (a - c).max_abs(); }

}  // namespace

TEST_CASE("symmetric basis enumeration") {
  FockBasis b(4, 3);
  CHECK(b.sector_dim(0) == 1);
  CHECK(b.sector(0)[0].empty());
  CHECK(b.sector_dim(1) == 4);
  CHECK(b.sector_dim(2) == 10);
  CHECK(b.sector_dim(3) == 20);
  for (int n = 0; n <= 3; ++n)
    for (int k = 0; k < b.sector_dim(n); ++k) {
      CHECK(std::is_sorted(b.sector(n)[k].begin(), b.sector(n)[k].end()));
      CHECK(b.index_of(b.sector(n)[k]) == k);
      if (k > 0) CHECK(b.sector(n)[k - 1] < b.sector(n)[k]);
    }
  CHECK(b.index_of({3, 2}) == -1);
  CHECK(b.index_of({0, 0, 0, 0}) == -1);
  CHECK_THROWS_AS(FockBasis(3, 2, {0, 1}), std::invalid_argument);
}

TEST_CASE("symmetrizer") {
  std::mt19937_64 rng(1);
  CVec g = testing::random_cvec(rng, 3), h = testing::random_cvec(rng, 3);
  DenseTensor gh = DenseTensor::outer({g, h}), hg = DenseTensor::outer({h, g});
  DenseTensor s = symmetrize(gh);
  for (std::size_t p = 0; p < s.data.size(); ++p)
    CHECK(std::abs(s.data[p] - 0.5 * (gh.data[p] + hg.data[p])) < 1e-15);

  DenseTensor t(3, 4);
  for (auto& x : t.data) x = testing::random_cvec(rng, 1)(0);
  DenseTensor st = symmetrize(t), sst = symmetrize(st);
  for (std::size_t p = 0; p < st.data.size(); ++p) CHECK(std::abs(st.data[p] - sst.data[p]) < 1e-14);
  CHECK_THROWS_AS(symmetrize(DenseTensor(2, 7)), std::invalid_argument);

  FockBasis b(3, 4);
  CVec c = tensor_to_sector(b, st);
  DenseTensor back = sector_to_tensor(b, 4, c);
  for (std::size_t p = 0; p < st.data.size(); ++p) CHECK(std::abs(st.data[p] - back.data[p]) < 1e-14);
}

TEST_CASE("unit-tensor coefficients are orthonormal") {
  FockBasis b(3, 4);
  for (int n = 0; n <= 4; ++n)
    for (int k = 0; k < b.sector_dim(n); ++k) {
      DenseTensor t = sector_to_tensor(b, n, CVec::Unit(b.sector_dim(n), k));
      double norm2 = 0;
      for (auto x : t.data) norm2 += std::norm(x);
      CHECK(norm2 == doctest::Approx(1.0));
    }
}

TEST_CASE("Fock inner product") {
  FockBasis b(3, 4);
  std::mt19937_64 rng(2);
  CHECK(std::abs(fock_inner(FockVector::vacuum(b), FockVector::vacuum(b)) - 1.0) < 1e-15);
  FockVector x = FockVector::zero(b), y = FockVector::zero(b);
  x.sectors[3] = testing::random_cvec(rng, b.sector_dim(3));
  y.sectors[3] = testing::random_cvec(rng, b.sector_dim(3));
  CHECK(std::abs(fock_inner(x, y) - 6.0 * x.sectors[3].dot(y.sectors[3])) < 1e-13);
  FockVector z = random_fock(b, rng);
  CHECK(fock_inner(z, z).real() > 0);
  FockVector other = FockVector::zero(FockBasis(3, 2));
  CHECK_THROWS_AS(fock_inner(z, other), std::invalid_argument);
}

TEST_CASE("coherent vectors") {
  FockBasis b(3, 12);
  std::mt19937_64 rng(3);
  FockVector e0 = exp_vector(b, CVec::Zero(3));
  CHECK(fock_norm(e0 - FockVector::vacuum(b)) == 0.0);

  FockVector e1 = exp_vector(b, CVec::Unit(3, 0), 1e-8);
  for (int n = 0; n <= 12; ++n) {
    // e(1)^{(x)n} is a unit tensor, so its coefficient is 1/n!.
    CHECK(std::abs(e1.sectors[n](0) - 1.0 / factorial(n)) < 1e-16);
    CHECK(e1.sectors[n].tail(b.sector_dim(n) - 1).norm() == 0.0);
  }

  for (int trial = 0; trial < 20; ++trial) {
    CVec f = testing::random_cvec(rng, 3), g = testing::random_cvec(rng, 3);
    f *= 0.5 * std::uniform_real_distribution<double>(0.1, 1.0)(rng) / f.norm();
    g *= 0.5 * std::uniform_real_distribution<double>(0.1, 1.0)(rng) / g.norm();
    cplx direct = 0, term = 1;
    const cplx fg = f.dot(g);
    for (int n = 0; n <= 40; ++n) {
      direct += term;
      term *= fg / static_cast<double>(n + 1);
    }
    CHECK(std::abs(fock_inner(exp_vector(b, f), exp_vector(b, g)) - direct) < 1e-10);
  }
  CHECK_THROWS_AS(exp_vector(FockBasis(3, 4), CVec::Constant(3, 2.0)), std::domain_error);

  std::vector<CVec> fs;
  for (int k = 0; k < 5; ++k) fs.push_back(testing::random_cvec(rng, 3, 0.15));
  CMat gram(5, 5);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) gram(i, j) = fock_inner(exp_vector(b, fs[i]), exp_vector(b, fs[j]));
  Eigen::SelfAdjointEigenSolver<CMat> es(gram);
  CHECK(es.eigenvalues().minCoeff() > 0);
}

TEST_CASE("permanent") {
  CMat a(2, 2);
  a << 1.0, 2.0, 3.0, 4.0;
  CHECK(std::abs(permanent(a) - 10.0) < 1e-15);
  CHECK(std::abs(permanent(CMat(0, 0)) - 1.0) == 0.0);
  CHECK(std::abs(permanent(CMat::Identity(5, 5)) - 1.0) < 1e-15);
  CHECK(std::abs(permanent(CMat::Ones(4, 4)) - 24.0) < 1e-12);
}

TEST_CASE("second quantization") {
  FockBasis b(3, 6);
  std::mt19937_64 rng(4);
  CMat id = CMat::Identity(3, 3);
  CHECK(op_diff(gamma_b(b, id), SectorOperator::identity(b)) < 1e-14);

  CMat B1 = testing::random_cmat(rng, 3, 3, 0.5), B2 = testing::random_cmat(rng, 3, 3, 0.5);
  auto G1 = gamma_b(b, B1);
  FockVector vac = G1.apply(FockVector::vacuum(b));
  CHECK(fock_norm(vac - FockVector::vacuum(b)) < 1e-15);
  for (int n = 0; n <= 6; ++n) {
    CMat lhs = dense_block(gamma_b(b, B1 * B2), b, n, n);
    CMat rhs = dense_block(G1, b, n, n) * dense_block(gamma_b(b, B2), b, n, n);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12 * std::max(1.0, lhs.cwiseAbs().maxCoeff()));
  }

  FockBasis bc(3, 12);
  CVec f = testing::random_cvec(rng, 3);
  f *= 0.3 / f.norm();
  CMat U = exp_series(testing::random_cmat(rng, 3, 3, 0.3));
  U = U / (U.norm() / std::sqrt(3.0));
  CHECK(fock_norm(gamma_b(bc, U).apply(exp_vector(bc, f)) - exp_vector(bc, U * f)) < 1e-12);
}

TEST_CASE("differential second quantization") {
  FockBasis b(3, 6);
  std::mt19937_64 rng(5);
  CMat B = testing::random_cmat(rng, 3, 3);
  auto dG = d_gamma_b(b, B);
  CHECK(fock_norm(dG.apply(FockVector::vacuum(b))) == 0.0);
  auto N = d_gamma_b(b, CMat::Identity(3, 3));
  for (int n = 0; n <= 6; ++n) {
    CMat blk = dense_block(N, b, n, n);
    CHECK((blk - n * CMat::Identity(blk.rows(), blk.cols())).norm() < 1e-13);
  }
  double prev = 0;
  for (double t : {1e-4, 1e-5}) {
    auto fd = (gamma_b(b, exp_series(t * B)) - SectorOperator::identity(b)) * cplx(1.0 / t);
    const double err = op_diff(fd, dG);
    if (prev > 0) CHECK(prev / err == doctest::Approx(10.0).epsilon(0.2));
    prev = err;
  }
}

TEST_CASE("symmetrizer identity s(B x id)s = dGamma(B)/n") {
  FockBasis b(3, 4);
  std::mt19937_64 rng(6);
  CMat B = testing::random_cmat(rng, 3, 3);
  auto dG = d_gamma_b(b, B);
  for (int n = 1; n <= 4; ++n) {
    CMat blk = dense_block(dG, b, n, n) / static_cast<double>(n);
    DenseTensor t(3, n);
    for (auto& x : t.data) x = testing::random_cvec(rng, 1)(0);
    DenseTensor st = symmetrize(t);
    DenseTensor applied(3, n);
    for (std::size_t p = 0; p < st.data.size(); ++p) {
      auto idx = st.unflat(p);
      cplx s = 0;
      for (int a = 0; a < 3; ++a) {
        auto src = idx;
        src[0] = a;
        s += B(idx[0], a) * st.at(src);
      }
      applied.data[p] = s;
    }
    CVec lhs = tensor_to_sector(b, symmetrize(applied));
    CVec rhs = blk * tensor_to_sector(b, st);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("creation and annihilation against the tensor route") {
  std::vector<int> conj = {0, 2, 1};
  FockBasis b(3, 4, conj);
  std::mt19937_64 rng(7);
  CVec g = testing::random_cvec(rng, 3);
  auto cr = creation(b, g);
  auto an = annihilation(b, g);
  for (int n = 0; n < 4; ++n) {
    CVec c = testing::random_cvec(rng, b.sector_dim(n));
    DenseTensor f = sector_to_tensor(b, n, c);
    DenseTensor gf(3, n + 1);
    for (std::size_t p = 0; p < gf.data.size(); ++p) {
      auto idx = gf.unflat(p);
      std::vector<int> rest(idx.begin() + 1, idx.end());
      gf.data[p] = g(idx[0]) * (n == 0 ? c(0) : f.at(rest));
    }
    CVec expect_cr = tensor_to_sector(b, symmetrize(gf));
    CHECK((CMat(cr.block(b, n + 1, n)) * c - expect_cr).norm() < 1e-13);

    CVec c1 = testing::random_cvec(rng, b.sector_dim(n + 1));
    DenseTensor f1 = sector_to_tensor(b, n + 1, c1);
    DenseTensor contracted(3, n);
    for (std::size_t p = 0; p < contracted.data.size(); ++p) {
      auto idx = contracted.unflat(p);
      cplx s = 0;
      for (int a = 0; a < 3; ++a) {
        std::vector<int> full = {a};
        full.insert(full.end(), idx.begin(), idx.end());
        s += g(conj[a]) * f1.at(full);
      }
      contracted.data[p] = static_cast<double>(n + 1) * s;
    }
    CVec expect_an = tensor_to_sector(b, contracted);
    CHECK((CMat(an.block(b, n, n + 1)) * c1 - expect_an).norm() < 1e-12);
  }
}

TEST_CASE("Hilbert adjoint of a sector operator") {
  FockBasis b(3, 4);
  std::mt19937_64 rng(8);
  auto op = creation(b, testing::random_cvec(rng, 3)) + d_gamma_b(b, testing::random_cmat(rng, 3, 3));
  auto adj = op.adjoint();
  FockVector x = random_fock(b, rng), y = random_fock(b, rng);
  CHECK(std::abs(fock_inner(x, op.apply(y)) - fock_inner(adj.apply(x), y)) < 1e-10);
  CHECK(op_diff(adj.adjoint(), op) < 1e-12);
}

TEST_CASE("ladder monomials") {
  SymIndex out;
  double f = 0;
  CHECK_FALSE(apply_monomial({0, 1}, {}, {2}, out, f));
  REQUIRE(apply_monomial({0, 0, 1}, {2}, {0}, out, f));
  CHECK(out == SymIndex{0, 1, 2});
  CHECK(f == doctest::Approx(std::sqrt(2.0)));
  REQUIRE(apply_monomial({1}, {1}, {}, out, f));
  CHECK(out == SymIndex{1, 1});
  // occupation factor sqrt(2) times sqrt(1!/2!)
  CHECK(f == doctest::Approx(1.0));
}

TEST_CASE("grading eigenvalue matches dGamma of a Cartan direction") {
  OneParticleModel m(build_su2(), 1, 5);
  FockBasis b = FockBasis::for_model(m, 3);
  CVec h = CVec::Unit(3, 0);
  CMat vh = V_const(m, h);
  auto dG = d_gamma_b(b, vh);
  CHECK(std::abs(grading_eigenvalue(m, h, {m.label(0, 0), m.label(1, 0)})) == 0.0);
  CHECK(std::abs(grading_eigenvalue(m, h, {m.label(0, 1)}) - m.alg.roots(0, 0)) < 1e-15);
  for (int n = 0; n <= 3; ++n) {
    CMat blk = dense_block(dG, b, n, n);
    CVec ev(b.sector_dim(n));
    for (int k = 0; k < b.sector_dim(n); ++k) ev(k) = grading_eigenvalue(m, h, b.sector(n)[k]);
    CMat diag = ev.asDiagonal();
    CHECK((blk - diag).cwiseAbs().maxCoeff() < 1e-10);
  }
  CHECK_THROWS_AS(grading_eigenvalue(m, CVec::Unit(3, 1), {}), std::invalid_argument);
}
