#include <Eigen/SVD>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "wnlab/cli_reports.hpp"
#include "wnlab/commutant_lab.hpp"

namespace wnlab {

namespace {

using Clock = std::chrono::steady_clock;

std::mt19937_64 suite_rng(const RunConfig& cfg, const std::string& suite) {
  std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                    static_cast<std::uint32_t>(fnv1a(suite))};
  return std::mt19937_64(seq);
}

CVec random_cvec(std::mt19937_64& rng, int n, double scale = 1.0) {
  std::normal_distribution<double> nd;
  CVec v(n);
  for (int i = 0; i < n; ++i) v[i] = scale * cplx(nd(rng), nd(rng));
  return v;
}

RVec random_rvec(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> nd;
  RVec v(n);
  for (int i = 0; i < n; ++i) v[i] = nd(rng);
  return v;
}

CMat random_cmat(std::mt19937_64& rng, int r, int c, double scale = 1.0) {
  std::normal_distribution<double> nd;
  CMat m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = scale * cplx(nd(rng), nd(rng));
  return m;
}

CVec random_real_vector(const OneParticleModel& m, std::mt19937_64& rng, int max_freq, double norm) {
  CVec f = random_cvec(rng, m.dim());
  f = band_limit(m, 0.5 * (f + conj_vector(m, f)), max_freq);
  return f * (norm / f.norm());
}

GaugeGroupElement random_constant(const OneParticleModel& m, std::mt19937_64& rng) {
  return GaugeGroupElement::constant(m, exp_rep(m.alg.to_matrix(random_rvec(rng, m.alg.dim_g).cast<cplx>())));
}

GaugeGroupElement random_loop(const OneParticleModel& m, std::mt19937_64& rng) {
  return random_constant(m, rng) * GaugeGroupElement::torus_loop(m, {1, -1}) * random_constant(m, rng);
}

GaugeAlgebraElement random_direction(int dim_g, int max_freq, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  auto psi = GaugeAlgebraElement::zero(dim_g, max_freq);
  for (int r = 0; r < psi.coeffs.rows(); ++r)
    for (int a = 0; a < dim_g; ++a) psi.coeffs(r, a) = nd(rng);
  return psi;
}

KernelDistribution random_kernel(std::mt19937_64& rng, int l, int m, int dim) {
  DenseTensor t(dim, l + m);
  const CVec v = random_cvec(rng, static_cast<int>(t.data.size()));
  for (std::size_t p = 0; p < t.data.size(); ++p) t.data[p] = v(static_cast<int>(p));
  return KernelDistribution::from_dense(l, m, t);
}

double fit_slope(const std::vector<double>& ts, const std::vector<double>& errs) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (!(errs[i] > 0)) continue;
    const double x = std::log(ts[i]), y = std::log(errs[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  return n >= 2 ? (n * sxy - sx * sy) / (n * sxx - sx * sx) : 0.0;
}

double block_diff(const SectorOperator& a, const SectorOperator& c, const FockBasis& b, int max_in,
                  int max_out) {
  double mx = 0;
  for (int no = 0; no <= std::min(b.n_max(), max_out); ++no)
    for (int ni = 0; ni <= std::min(b.n_max(), max_in); ++ni) {
      const CMat d = CMat(a.block(b, no, ni)) - CMat(c.block(b, no, ni));
      if (d.size()) mx = std::max(mx, d.cwiseAbs().maxCoeff());
    }
  return mx;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

LieAlgebraData config_algebra(const RunConfig& cfg) {
  return build_algebra(cfg.get("general", "algebra", "su2"));
}

OneParticleModel section_model(const RunConfig& cfg, const std::string& section) {
  return OneParticleModel(config_algebra(cfg), cfg.get_int(section, "i_geo", 1),
                          cfg.get_int(section, "n_grid", 5));
}

std::vector<int> conj_labels(const LieAlgebraData& g) { return g.conj_index; }

}  // namespace

SuiteResult run_algebra_suite(const RunConfig& cfg) {
  cfg.validate();
  const auto t0 = Clock::now();
  SuiteResult r;
  r.suite = "algebra";
  const LieAlgebraData g = config_algebra(cfg);
  const double tol = cfg.tol("algebra", 1e-12);
  const auto res = check_lie_algebra(g);
  r.at_most("structure constants antisymmetric", "bracket antisymmetry", res.antisymmetry, tol);
  r.at_most("Jacobi identity", "Jacobi", res.jacobi, tol);

  double invariance = 0;
  std::vector<CVec> e;
  for (int a = 0; a < g.dim_g; ++a) e.push_back(CVec::Unit(g.dim_g, a));
  for (int a = 0; a < g.dim_g; ++a)
    for (int b = 0; b < g.dim_g; ++b)
      for (int c = 0; c < g.dim_g; ++c)
        invariance = std::max(invariance, std::abs(killing(g, g.bracket(e[a], e[b]), e[c]) +
                                                   killing(g, e[b], g.bracket(e[a], e[c]))));
  r.at_most("K([X,Y],Z) = -K(Y,[X,Z])", "Killing antisymmetry lemma", invariance, tol);
  r.at_most("-K orthonormal real basis", "Killing normalization", res.killing_orthonormality, tol);
  r.at_most("Cartan-Weyl basis orthonormal for (.,.)_g", "Cartan-Weyl basis", res.cw_orthonormality, tol);

  double eigen = res.cartan_eigen;
  if (cfg.negative_control) {
    // Compare [H, X_a] with -a(H) X_a.
    eigen = 0;
    const int n1 = g.cartan_dim, n2 = g.num_pos_roots;
    for (int q = 0; q < n1; ++q)
      for (int p = 0; p < n2; ++p)
        eigen = std::max(eigen, (g.ad_matrix(g.u(q)) - g.ad_matrix(g.u(q))).norm() +
                                    (g.ad_real(g.u(q)) * g.u(n1 + p) + g.roots(p, q) * g.u(n1 + p)).norm());
  }
  r.at_most("[H, X_{+-a}] = +-a(H) X_{+-a}", "Cartan-Weyl eigenrelations", eigen, tol);
  r.at_most("conj X_a = X_{-a}", "conjugation", res.conjugation, tol);
  r.at_most("ad(Z) skew for real Z", "ad skew-adjoint", res.ad_skew, tol);
  r.at_most("largest Killing eigenvalue", "Killing negative definite", res.max_killing_eigen, -1e-8);

  Eigen::JacobiSVD<CMat> svd(g.roots);
  r.at_least("root evaluation matrix smallest singular value", "root matrix invertible",
             g.roots.size() ? svd.singularValues().minCoeff() : 0.0, 1e-8);
  r.data["algebra"] = g.name;
  r.data["dim_g"] = g.dim_g;
  r.data["cartan_dim"] = g.cartan_dim;
  r.data["num_pos_roots"] = g.num_pos_roots;
  r.seconds = seconds_since(t0);
  r.at_most("runtime (s)", "desk-scale budget", r.seconds, 1.0);
  r.rows.back().pass = r.rows.back().value <= 1.0;
  return r;
}

SuiteResult run_one_particle_suite(const RunConfig& cfg) {
  cfg.validate();
  const auto t0 = Clock::now();
  SuiteResult r;
  r.suite = "one-particle";
  auto rng = suite_rng(cfg, r.suite);
  const OneParticleModel m = section_model(cfg, "one-particle");
  const int cutoff = m.circle.mode_cutoff;
  const int dg = m.alg.dim_g;

  double duality = 0;
  for (int mode = 0; mode < m.circle.num_modes(); ++mode)
    for (int j = 0; j < dg; ++j) {
      const CVec e = m.basis_vector(mode, j);
      for (double p : {0.5, 1.0, 2.5}) duality = std::max(duality, std::abs(norm_p(m, e, p) * norm_p(m, e, -p) - 1.0));
    }
  r.at_most("|e|_p |e|_{-p} = 1 on basis vectors", "norm duality", duality, cfg.tol("norm_duality", 1e-13));

  double cocycle = 0;
  const double sign = cfg.negative_control ? -1.0 : 1.0;
  for (int trial = 0; trial < 5; ++trial) {
    const auto psi = random_loop(m, rng), phi = random_loop(m, rng);
    const CVec lhs = beta(m, psi * phi);
    const CVec rhs = V_group(m, psi) * beta(m, phi) + sign * beta(m, psi);
    cocycle = std::max(cocycle, (lhs - rhs).norm());
  }
  r.at_most("beta(psi phi) - V(psi) beta(phi) - beta(psi)", "Maurer-Cartan cocycle", cocycle,
            cfg.tol("cocycle", 1e-10));

  double unitarity = 0;
  for (int trial = 0; trial < 5; ++trial) {
    const auto k = random_constant(m, rng);
    const CMat vk = V_group(m, k);
    unitarity = std::max(unitarity, (vk.adjoint() * vk - CMat::Identity(m.dim(), m.dim())).norm());
    const auto psi = random_loop(m, rng);
    const CMat vp = V_group(m, psi);
    const CVec f = band_limit(m, random_cvec(rng, m.dim()), cutoff - 2);
    unitarity = std::max(unitarity, std::abs((vp * f).norm() / f.norm() - 1.0));
  }
  r.at_most("V(psi) unitarity defect", "V unitary", unitarity, cfg.tol("unitarity", 1e-8));

  const auto dir = GaugeAlgebraElement::cos_mode(dg, 1, 0) + GaugeAlgebraElement::sin_mode(dg, 1, dg - 1, 0.7) +
                   GaugeAlgebraElement::constant(dg, 1 % dg, 0.4);
  const CMat va = V_alg(m, dir);
  r.at_most("V(Psi) + V(Psi)^dagger", "V generator skew", (va + va.adjoint()).norm(), 1e-12);
  std::vector<double> ts = {1e-2, 1e-3, 1e-4}, errs, berrs;
  const CVec dpsi = d_psi(m, dir);
  for (double t : ts) {
    const auto g = GaugeGroupElement::exp_of(m, dir, t);
    const CMat fd = (V_group(m, g) - CMat::Identity(m.dim(), m.dim())) / t;
    errs.push_back((fd - sign * va).norm());
    berrs.push_back((beta(m, g) / t - dpsi).norm());
  }
  r.within("finite-difference slope of V(exp tPsi)", "V generator", fit_slope(ts, errs), 1.0, 0.1);
  r.within("finite-difference slope of beta(exp tPsi)/t", "dPsi = derivative of beta", fit_slope(ts, berrs), 1.0,
           0.1);

  if (m.alg.num_pos_roots > 0 && cutoff >= 1) {
    const auto adj = V_alg_adjoint_check(OneParticleModel(m.alg, 2, 9), 0);
    r.at_most("V(X_a) adjoint relation", "adjoint of V on root directions",
              std::max(adj.root_residual, adj.cartan_residual), 1e-10);
  }
  const double hs = hs_delta_sq(m, 1.0);
  double expect = 0;
  for (int mode = 0; mode < m.circle.num_modes(); ++mode) expect += dg * std::pow(m.circle.eigenvalues[mode], -2.0);
  r.at_most("|delta|^2_{HS,-1} against mode sum", "Hilbert-Schmidt sum", std::abs(hs - expect), 1e-12);

  r.data["i_geo"] = cutoff;
  r.data["n_grid"] = m.circle.grid_size;
  r.data["fd_errors"] = errs;
  r.seconds = seconds_since(t0);
  r.at_most("runtime (s)", "desk-scale budget", r.seconds, 10.0);
  return r;
}

SuiteResult run_fock_suite(const RunConfig& cfg) {
  cfg.validate();
  const auto t0 = Clock::now();
  SuiteResult r;
  r.suite = "fock";
  auto rng = suite_rng(cfg, r.suite);
  const LieAlgebraData g = config_algebra(cfg);
  const int d = g.dim_g;
  const int n_coh = cfg.get_int("fock", "coherent_n_max", 12);
  const int n_op = cfg.get_int("fock", "operator_n_max", 6);
  const FockBasis bc(d, n_coh, conj_labels(g));
  const FockBasis bo(d, n_op, conj_labels(g));
  const double sign = cfg.negative_control ? -1.0 : 1.0;

  double coherent = 0;
  std::uniform_real_distribution<double> unit(0.1, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    CVec f = random_cvec(rng, d), h = random_cvec(rng, d);
    f *= 0.5 * unit(rng) / f.norm();
    h *= 0.5 * unit(rng) / h.norm();
    const cplx lhs = fock_inner(exp_vector(bc, f), exp_vector(bc, h));
    coherent = std::max(coherent, std::abs(lhs - std::exp(sign * f.dot(h))));
  }
  r.at_most("<<exp f, exp g>> - e^{<f,g>}, |f|,|g| <= 0.5", "coherent inner product", coherent,
            cfg.tol("coherent", 1e-10));

  double mult = 0;
  const CMat b1 = random_cmat(rng, d, d, 0.5), b2 = random_cmat(rng, d, d, 0.5);
  const auto g12 = gamma_b(bo, b1 * b2), g1 = gamma_b(bo, b1), g2 = gamma_b(bo, b2);
  for (int n = 0; n <= n_op; ++n) {
    const CMat lhs = g12.block(bo, n, n);
    const CMat rhs = CMat(g1.block(bo, n, n)) * CMat(g2.block(bo, n, n));
    mult = std::max(mult, (lhs - rhs).cwiseAbs().maxCoeff() / std::max(1.0, lhs.cwiseAbs().maxCoeff()));
  }
  r.at_most("Gamma(B1 B2) - Gamma(B1) Gamma(B2) per sector", "Gamma multiplicative", mult,
            cfg.tol("gamma", 1e-12));

  CVec f = random_cvec(rng, d);
  f *= 0.3 / f.norm();
  CMat u = exp_series(random_cmat(rng, d, d, 0.3));
  u /= u.norm() / std::sqrt(static_cast<double>(d));
  r.at_most("Gamma(U) exp f - exp(U f)", "Gamma on coherent vectors",
            fock_norm(gamma_b(bc, u).apply(exp_vector(bc, f)) - exp_vector(bc, u * f)), 1e-12);

  double symm = 0;
  const CMat bm = random_cmat(rng, d, d);
  const auto dg = d_gamma_b(bo, bm);
  for (int n = 1; n <= n_op && std::pow(d, n) <= 1e6; ++n) {
    const CMat blk = CMat(dg.block(bo, n, n)) / static_cast<double>(n);
    DenseTensor t(d, n);
    const CVec v = random_cvec(rng, static_cast<int>(t.data.size()));
    for (std::size_t p = 0; p < t.data.size(); ++p) t.data[p] = v(static_cast<int>(p));
    const DenseTensor st = symmetrize(t);
    DenseTensor applied(d, n);
    for (std::size_t p = 0; p < st.data.size(); ++p) {
      auto idx = st.unflat(p);
      cplx s = 0;
      for (int a = 0; a < d; ++a) {
        auto src = idx;
        src[0] = a;
        s += bm(idx[0], a) * st.at(src);
      }
      applied.data[p] = s;
    }
    const CVec lhs = tensor_to_sector(bo, symmetrize(applied));
    const CVec rhs = blk * tensor_to_sector(bo, st);
    symm = std::max(symm, (lhs - rhs).cwiseAbs().maxCoeff());
  }
  r.at_most("s_n (B (x) id) s_n - dGamma(B)^{(n)}/n", "symmetrizer and second quantization", symm,
            cfg.tol("symmetrizer", 1e-12));

  double number = 0;
  const auto nop = d_gamma_b(bo, CMat::Identity(d, d));
  for (int n = 0; n <= n_op; ++n)
    number = std::max(number, (CMat(nop.block(bo, n, n)) - n * CMat::Identity(bo.sector_dim(n), bo.sector_dim(n)))
                                  .cwiseAbs()
                                  .maxCoeff());
  r.at_most("dGamma(1) - n on each sector", "number operator", number, 1e-13);

  r.data["one_particle_dim"] = d;
  r.data["coherent_n_max"] = n_coh;
  r.data["operator_n_max"] = n_op;
  r.seconds = seconds_since(t0);
  r.at_most("runtime (s)", "desk-scale budget", r.seconds, 30.0);
  return r;
}

SuiteResult run_kernels_suite(const RunConfig& cfg) {
  cfg.validate();
  const auto t0 = Clock::now();
  SuiteResult r;
  r.suite = "kernels";
  auto rng = suite_rng(cfg, r.suite);
  const LieAlgebraData g = config_algebra(cfg);
  const int d = g.dim_g;
  const int n_max = cfg.get_int("kernels", "n_max", 5);
  const FockBasis b(d, n_max, conj_labels(g));
  const LabelSpace ls_op = LabelSpace::generic(d, conj_labels(g));
  const double tol = cfg.tol("kernel_identities", 1e-11);

  double adjoint = 0;
  int adj_pairs = 0;
  for (int trial = 0; trial < 20; ++trial)
    for (int l = 0; l <= 2; ++l)
      for (int m = 0; m + l <= 2; ++m) {
        const auto k = random_kernel(rng, l, m, d);
        const auto via = cfg.negative_control ? transpose_ml(k) : hilbert_adjoint_kernel(ls_op, k);
        adjoint = std::max(adjoint, block_diff(xi_matrix(b, k).adjoint(), xi_matrix(b, via), b, n_max, n_max));
        ++adj_pairs;
      }
  r.at_most("Xi(kappa)^dagger - Xi(adjoint kernel)", "adjoint of integral kernel operators", adjoint, tol);
  r.at_least("adjoint: kernel pairs checked", "sample size", adj_pairs, 100);

  double product = 0;
  int prod_pairs = 0;
  for (int trial = 0; trial < 18; ++trial)
    for (int l = 0; l <= 2; ++l)
      for (int m = 0; m + l <= 2; ++m) {
        const int lp = trial % 3, mp = (trial / 3) % (3 - lp);
        const auto kap = random_kernel(rng, l, m, d), lam = random_kernel(rng, lp, mp, d);
        const auto lhs = xi_matrix(b, kap) * xi_matrix(b, lam);
        SectorOperator rhs;
        rhs.n_max = n_max;
        for (const auto& t : product_expansion(ls_op, kap, lam))
          rhs = rhs + xi_matrix(b, t.kernel) * cplx(t.weight);
        product = std::max(product, block_diff(lhs, rhs, b, n_max - std::max(0, lp - mp), n_max));
        ++prod_pairs;
      }
  r.at_most("Xi(kappa) Xi(lambda) - sum_k Xi(S-composition)", "product expansion", product, tol);
  r.at_least("product: kernel pairs checked", "sample size", prod_pairs, 100);

  double ladder = 0;
  for (int l = 0; l <= 2; ++l)
    for (int m = 0; m + l <= 3; ++m) {
      const auto k = random_kernel(rng, l, m, d);
      FockVector phi = FockVector::zero(b);
      for (auto& s : phi.sectors) s = random_cvec(rng, static_cast<int>(s.size()));
      ladder = std::max(ladder, fock_norm(xi_matrix(b, k).apply(phi) - xi_apply(b, k, phi)));
    }
  r.at_most("ladder matrices against the defining formula", "integral kernel operator", ladder, 1e-10);

  const OneParticleModel model = section_model(cfg, "kernels");
  const LabelSpace ls = LabelSpace::from_model(model);
  const int dm = model.dim();
  std::uniform_int_distribution<int> small(0, 2);
  double contraction_ratio = 0, contraction_ratio_sq = 0;
  int contraction_n = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int l = 1 + small(rng) % 2, m = small(rng) % 2, n = small(rng) % 2;
    const auto f = random_kernel(rng, m, l, dm), h = random_kernel(rng, n, l, dm);
    const double p = 0.5 + small(rng);
    const double lhs = weighted_norm(ls, contract(ls, f, h, l), m, n, -p, -p);
    const double rhs = weighted_norm(ls, f, m + l, 0, -p, -p) * weighted_norm(ls, h, n + l, 0, p, p);
    contraction_ratio = std::max(contraction_ratio, lhs / rhs);
    contraction_ratio_sq = std::max(contraction_ratio_sq, lhs * lhs / (rhs * rhs));
    ++contraction_n;
  }
  r.at_most("|F (x)_l g|_{-p} / (|F|_{-p} |g|_p), max", "contraction norm inequality", contraction_ratio,
            1.0 + 1e-12);
  r.at_least("contraction: instances checked", "sample size", contraction_n, 1000);

  double scomp_ratio = 0;
  int scomp_n = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int l = small(rng) % 2, m = 1 + small(rng) % 2, lp = 1 + small(rng) % 2, mp = small(rng) % 2;
    const int k = std::min(m, lp) == 1 ? 1 : 1 + small(rng) % 2;
    const auto kap = random_kernel(rng, l, m, dm), lam = random_kernel(rng, lp, mp, dm);
    const double p = 0.5 * small(rng), q = 0.5 * small(rng);
    const auto s = s_composition(ls, kap, lam, k);
    const double lhs = weighted_norm(ls, s, l + lp - k, m + mp - k, -p, -(p + q));
    const double rhs = weighted_norm(ls, kap, l + m, 0, -p, -p) * weighted_norm(ls, lam, lp, mp, p, -(p + q));
    scomp_ratio = std::max(scomp_ratio, lhs / rhs);
    ++scomp_n;
  }
  r.at_most("|S-composition| / (|kappa| |lambda|), max", "S-composition norm inequality", scomp_ratio,
            1.0 + 1e-12);
  r.at_least("S-composition: instances checked", "sample size", scomp_n, 1000);

  r.data["operator_labels"] = d;
  r.data["norm_labels"] = dm;
  r.data["n_max"] = n_max;
  r.data["contraction_ratio_squared_max"] = contraction_ratio_sq;
  r.seconds = seconds_since(t0);
  r.at_most("runtime (s)", "desk-scale budget", r.seconds, 60.0);
  return r;
}

SuiteResult run_energy_rep_suite(const RunConfig& cfg) {
  cfg.validate();
  const auto t0 = Clock::now();
  SuiteResult r;
  r.suite = "energy-rep";
  auto rng = suite_rng(cfg, r.suite);
  const OneParticleModel m = section_model(cfg, "energy-rep");
  const int n_max = cfg.get_int("energy-rep", "n_max", 4);
  const FockBasis b = FockBasis::for_model(m, n_max);
  const int dg = m.alg.dim_g;
  const int top = n_max;
  const double sign = cfg.negative_control ? -1.0 : 1.0;

  r.at_most("Xi_11(tau) - N", "tau kernel", block_diff(xi_matrix(b, tau_kernel(m)), d_gamma_b(b, CMat::Identity(m.dim(), m.dim())), b, top, top), 1e-13);

  double skew = 0, routes = 0;
  for (int trial = 0; trial < 2; ++trial) {
    const auto psi = random_direction(dg, 1, rng);
    const auto pk = pi_matrix(m, b, psi * sign);
    routes = std::max(routes, block_diff(pk, pi_direct(m, b, psi), b, top, top));
    skew = std::max(skew, block_diff(pk.adjoint(), pk * cplx(-1.0), b, top, top));
  }
  r.at_most("pi(Psi)^dagger + pi(Psi)", "pi skew-adjoint", skew, cfg.tol("skew", 1e-10));
  r.at_most("kernel-built pi - dGamma(V) - a*(dPsi) + a(dPsi)", "pi from integral kernels", routes,
            cfg.tol("pi_routes", 1e-11));

  double closure = 0;
  int trusted_cols = 0;
  {
    const auto x = random_direction(dg, 1, rng), y = random_direction(dg, 1, rng);
    const auto px = pi_direct(m, b, x), py = pi_direct(m, b, y);
    const auto pxy = pi_direct(m, b, pointwise_bracket(m.alg, x, y) * sign);
    const auto resid = px * py - py * px - pxy;
    const int trusted = m.circle.mode_cutoff - x.max_frequency() - y.max_frequency();
    for (int ni = 0; ni <= n_max - 2; ++ni) {
      const auto cols = low_frequency_states(m, b, ni, trusted);
      trusted_cols += static_cast<int>(cols.size());
      for (int no = 0; no <= n_max; ++no) {
        const CMat blk = resid.block(b, no, ni);
        if (blk.size() == 0) continue;
        for (int c : cols) closure = std::max(closure, blk.col(c).cwiseAbs().maxCoeff());
      }
    }
  }
  r.at_most("[pi(Psi), pi(Psi')] - pi([Psi, Psi']) on trusted states", "bracket closure", closure,
            cfg.tol("bracket", 1e-9));
  r.at_least("bracket closure: trusted columns", "sample size", trusted_cols, 1);

  const OneParticleModel mc(m.alg, cfg.get_int("energy-rep", "coherent_i_geo", 4),
                            4 * cfg.get_int("energy-rep", "coherent_i_geo", 4) + 1);
  const int fmax = mc.circle.mode_cutoff - 4;
  double law = 0, unit = 0;
  for (int trial = 0; trial < 5; ++trial) {
    const auto psi = random_loop(mc, rng), phi = random_loop(mc, rng);
    const CVec f = random_real_vector(mc, rng, fmax, 0.4);
    if (cfg.negative_control) {
      const auto joint = coherent_U(mc, psi * phi, f);
      const auto swapped = coherent_U(group_action(mc, phi), coherent_U(mc, psi, f));
      law = std::max(law, std::abs(joint.scalar - swapped.scalar) + (joint.h - swapped.h).norm());
    } else {
      const auto g = group_law_check(mc, psi, phi, f);
      law = std::max({law, g.scalar, g.vector});
    }
    std::vector<CVec> fs;
    for (int k = 0; k < 3; ++k) fs.push_back(random_real_vector(mc, rng, fmax, 0.4));
    unit = std::max(unit, unitarity_defect(group_action(mc, psi), fs));
  }
  r.at_most("U(psi phi) exp f - U(psi) U(phi) exp f", "U group law", law, cfg.tol("group_law", 1e-9));
  r.at_most("<<U exp f, U exp g>> - <<exp f, exp g>>", "U unitary", unit, cfg.tol("unitarity", 1e-9));

  const CVec f = random_real_vector(m, rng, 1, 0.05);
  const auto psi = random_direction(dg, 1, rng) * 0.1;
  const auto fd = generator_fd_check(m, b, psi * sign, f);
  std::vector<double> ts, errs;
  for (const auto& row : fd.rows) {
    ts.push_back(row.t);
    errs.push_back(row.residual);
  }
  r.within("finite-difference slope of U(exp tPsi) exp f", "pi generates U", fd.slope, 1.0, 0.1);
  const auto vac = generator_fd_check(m, b, GaugeAlgebraElement::constant(dg, 0), CVec::Zero(m.dim()));
  double vac_max = 0;
  for (const auto& row : vac.rows) vac_max = std::max(vac_max, row.residual);
  r.at_most("constant Psi on the vacuum", "pi(const) vacuum", vac_max, 1e-14);

  r.data["i_geo"] = m.circle.mode_cutoff;
  r.data["n_max"] = n_max;
  r.data["coherent_i_geo"] = mc.circle.mode_cutoff;
  r.data["fd_t"] = ts;
  r.data["fd_residual"] = errs;
  r.seconds = seconds_since(t0);
  r.at_most("runtime (s)", "desk-scale budget", r.seconds, 60.0);
  return r;
}

namespace {

std::string commutant_cache_key(const RunConfig& cfg, const std::string& dirs, int max_k) {
  std::string s = "commutant-gram-v1;" + cfg.get("general", "algebra", "su2");
  for (const std::string k : {"i_geo", "n_grid", "n_max", "l_max"}) s += ";" + cfg.get("commutant", k, "");
  s += ";" + dirs + ";" + std::to_string(max_k);
  return hex64(fnv1a(s));
}

bool read_gram(const std::filesystem::path& p, int n, CMat& out) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return false;
  std::int64_t rows = 0, cols = 0;
  in.read(reinterpret_cast<char*>(&rows), sizeof rows);
  in.read(reinterpret_cast<char*>(&cols), sizeof cols);
  if (!in || rows != n || cols != n) return false;
  out.resize(n, n);
  in.read(reinterpret_cast<char*>(out.data()), static_cast<std::streamsize>(sizeof(cplx) * n * n));
  return static_cast<bool>(in);
}

void write_gram(const std::filesystem::path& p, const CMat& g) {
  std::filesystem::create_directories(p.parent_path());
  const std::filesystem::path tmp = p.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    const std::int64_t rows = g.rows(), cols = g.cols();
    out.write(reinterpret_cast<const char*>(&rows), sizeof rows);
    out.write(reinterpret_cast<const char*>(&cols), sizeof cols);
    out.write(reinterpret_cast<const char*>(g.data()), static_cast<std::streamsize>(sizeof(cplx) * g.size()));
  }
  std::filesystem::rename(tmp, p);
}

ConstraintSystem cached_constraints(const RunConfig& cfg, const OneParticleModel& m,
                                    const std::vector<Shape>& shapes, const std::string& dirs, int max_k,
                                    int n_max, bool* from_cache) {
  const auto directions = dirs == "constants" ? constant_directions(m.alg) : default_directions(m.alg, max_k);
  const std::string dir = cfg.cache_dir();
  *from_cache = false;
  if (dir != "none") {
    const std::filesystem::path p = std::filesystem::path(dir) / (commutant_cache_key(cfg, dirs, max_k) + ".gram");
    ConstraintSystem sys{KernelStackBasis(shapes, m.dim()), directions, n_max, {}};
    if (read_gram(p, sys.basis.size(), sys.gram)) {
      *from_cache = true;
      return sys;
    }
    sys = assemble_constraints(m, shapes, directions, n_max, {cfg.parallel});
    write_gram(p, sys.gram);
    return sys;
  }
  return assemble_constraints(m, shapes, directions, n_max, {cfg.parallel});
}

}  // namespace

SuiteResult run_commutant_suite(const RunConfig& cfg) {
  cfg.validate();
  const auto t0 = Clock::now();
  SuiteResult r;
  r.suite = "commutant";
  auto rng = suite_rng(cfg, r.suite);
  const OneParticleModel m = section_model(cfg, "commutant");
  const int n_max = cfg.get_int("commutant", "n_max", 4);
  const int l_max = cfg.get_int("commutant", "l_max", 2);
  const int max_k = cfg.get_int("commutant", "max_k", 2);
  const double threshold = cfg.get_double("commutant", "threshold", 1e-8);
  std::string dirs = cfg.get("commutant", "directions", "default");
  if (cfg.negative_control) dirs = "constants";
  const auto shapes = shapes_upto(l_max);

  bool cached = false;
  const ConstraintSystem sys = cached_constraints(cfg, m, shapes, dirs, max_k, n_max, &cached);
  const NullSpaceResult ns = null_space(m, sys, threshold);

  r.equals("null space dimension", "trivial commutant", ns.null_dim, 1);
  r.at_least("singular-value gap", "rank certificate", ns.gap, 1e4);
  r.equals("rank decision ambiguous", "rank certificate", ns.ambiguous ? 1 : 0, 0);
  int lo = ns.null_dim, hi = ns.null_dim;
  for (const auto& [t, dim] : ns.sweep) {
    lo = std::min(lo, dim);
    hi = std::max(hi, dim);
  }
  r.equals("threshold sweep 1e-6..1e-10: dimension spread", "rank certificate", hi - lo, 0);

  double off_scalar = 0;
  for (const auto& v : ns.basis) {
    const auto norms = KernelStack::from_coords(sys.basis, v).shape_norms();
    for (std::size_t s = 1; s < norms.size(); ++s) off_scalar = std::max(off_scalar, norms[s]);
  }
  r.at_most("off-scalar kernel norms of the null basis", "surviving stack is scalar", off_scalar, 1e-9);

  double relation = 0, derived = 0, literal = 0;
  for (const auto& v : ns.basis) {
    const auto st = KernelStack::from_coords(sys.basis, v);
    for (const auto& psi : sys.directions)
      for (const auto& row : check_identity_suite(m, st, psi).rows) {
        if (row.name.rfind("relation", 0) == 0) relation = std::max(relation, row.residual);
        if (row.name.rfind("dgamma-derived", 0) == 0) derived = std::max(derived, row.residual);
        if (row.name.rfind("dgamma-literal", 0) == 0) literal = std::max(literal, row.residual);
      }
  }
  r.at_most("commutation relations on the null basis", "commutation relations (l,m)", relation, 1e-9);
  r.at_most("dGamma forms (derived sign) on the null basis", "dGamma forms", derived, 1e-9);
  r.at_most("dGamma forms (displayed sign) on the null basis", "dGamma forms", literal, 1e-9);

  const auto chain = vanishing_chain_report(m, sys, ns);
  for (const auto& row : chain.rows) {
    if (row.name.find("root evaluation") != std::string::npos)
      r.at_least(row.name, "vanishing chain", row.value, 1e-8);
    else
      r.at_most(row.name, "vanishing chain", row.value, 1e-9);
  }

  const double casimir = span_defect(ns, to_coords(sys.basis, translation_casimir(m)));
  r.data["translation_casimir_span_defect"] = casimir;

  // Negative controls.
  bool cached_c = false;
  const ConstraintSystem csys = cached_constraints(cfg, m, shapes, "constants", max_k, n_max, &cached_c);
  const NullSpaceResult cns = null_space(m, csys, threshold);
  r.at_least("constants-only directions: null space dimension", "negative control: grading alone",
             cns.null_dim, ns.null_dim + 1);

  int violated = 0;
  const int samples = 200;
  for (int k = 0; k < samples; ++k) {
    CVec v = random_cvec(rng, sys.basis.size());
    for (const auto& b : ns.basis) v -= b * b.dot(v);
    v /= v.norm();
    const double res = std::sqrt(std::max(0.0, std::real(v.dot(sys.gram * v))));
    violated += res >= 1e-3;
  }
  r.at_least("random stacks off the null space with residual >= 1e-3 (fraction)",
             "negative control: random stacks", static_cast<double>(violated) / samples, 0.99);

  CVec v = random_cvec(rng, sys.basis.size());
  v[0] = 0;
  const auto rand_rep = check_identity_suite(m, KernelStack::from_coords(sys.basis, v / v.norm()), sys.directions.back());
  r.at_least("identity suite on a random stack, max residual", "negative control: relations",
             rand_rep.max_residual(), 1e-3);

  KernelDistribution k10(1, 0);
  for (int a = 0; a < m.dim(); ++a) k10.coeffs[{a}] = 1.0;
  const auto kept = grading_support_filter(m, k10);
  bool cartan_only = static_cast<int>(kept.coeffs.size()) == m.circle.num_modes() * m.alg.cartan_dim;
  for (const auto& [idx, c] : kept.coeffs) cartan_only = cartan_only && m.g_index_of(idx[0]) < m.alg.cartan_dim;
  r.equals("grading filter on (1,0) keeps exactly the Cartan labels", "grading lemma", cartan_only ? 1 : 0, 1);

  nlohmann::ordered_json sv = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < ns.singular_values.size() && i < 24; ++i) sv.push_back(ns.singular_values[i]);
  r.data["directions"] = dirs;
  r.data["num_directions"] = sys.directions.size();
  nlohmann::ordered_json sh = nlohmann::ordered_json::array();
  for (const auto& s : shapes) sh.push_back({s.l, s.m});
  r.data["shapes"] = sh;
  r.data["unknowns"] = sys.basis.size();
  r.data["null_dim"] = ns.null_dim;
  r.data["threshold"] = threshold;
  r.data["gap"] = ns.gap;
  r.data["smallest_singular_values"] = sv;
  r.data["largest_singular_value"] = ns.singular_values.empty() ? 0.0 : ns.singular_values.back();
  nlohmann::ordered_json sweep = nlohmann::ordered_json::array();
  for (const auto& [t, dim] : ns.sweep) sweep.push_back({t, dim});
  r.data["threshold_sweep"] = sweep;
  nlohmann::ordered_json null_norms = nlohmann::ordered_json::array();
  for (const auto& b : ns.basis) null_norms.push_back(KernelStack::from_coords(sys.basis, b).shape_norms());
  r.data["null_basis_shape_norms"] = null_norms;
  r.data["constants_only_null_dim"] = cns.null_dim;
  r.data["identity_literal_max"] = literal;
  r.seconds = seconds_since(t0);
  r.at_most("runtime (s)", "desk-scale budget", r.seconds, 300.0);
  (void)cached;
  (void)cached_c;
  return r;
}

}  // namespace wnlab
