#include "wnlab/one_particle.hpp"

#include <cmath>
#include <stdexcept>

namespace wnlab {

CircleModel::CircleModel(int cutoff, int n_grid) : mode_cutoff(cutoff), grid_size(n_grid) {
  if (cutoff < 0) throw std::invalid_argument("CircleModel: negative mode cutoff");
  if (n_grid < 4 * cutoff + 1) throw std::invalid_argument("CircleModel: n_grid < 4*I_geo+1");
  const int modes = num_modes();
  eigenvalues.resize(modes);
  frequency.resize(modes);
  for (int i = 0; i < modes; ++i) {
    frequency[i] = (i + 1) / 2;
    eigenvalues[i] = frequency[i] * frequency[i] + 2.0;
  }
  grid.resize(n_grid);
  for (int n = 0; n < n_grid; ++n) grid[n] = 2.0 * kPi * n / n_grid;
  mode_values.resize(modes, n_grid);
  for (int i = 0; i < modes; ++i)
    for (int n = 0; n < n_grid; ++n) mode_values(i, n) = mode_function(i, grid[n]);

  // Trigonometric interpolation derivative; the Nyquist mode of an even grid
  // is dropped.
  diff = RMat::Zero(n_grid, n_grid);
  const int kmax = (n_grid - 1) / 2;
  for (int n = 0; n < n_grid; ++n)
    for (int m = 0; m < n_grid; ++m) {
      double s = 0;
      for (int k = 1; k <= kmax; ++k) s += k * std::sin(k * (grid[n] - grid[m]));
      diff(n, m) = -2.0 * s / n_grid;
    }
}

double CircleModel::mode_function(int mode, double theta) {
  if (mode == 0) return 1.0 / std::sqrt(2.0 * kPi);
  const int k = (mode + 1) / 2;
  return (mode % 2 == 1 ? std::cos(k * theta) : std::sin(k * theta)) / std::sqrt(kPi);
}

OneParticleModel::OneParticleModel(LieAlgebraData a, int mode_cutoff, int grid_size)
    : alg(std::move(a)), circle(mode_cutoff, grid_size) {}

CVec OneParticleModel::basis_vector(int mode, int j) const {
  return CVec::Unit(dim(), label(mode, j));
}

CVec OneParticleModel::project_one_form(const CMat& samples) const {
  const int n_grid = circle.grid_size, d = alg.dim_g;
  if (samples.rows() != n_grid || samples.cols() != d)
    throw std::invalid_argument("project_one_form: sample shape mismatch");
  CMat cw = samples * alg.cw_basis.conjugate();  // row n: (C^dagger y_n)^T
  CVec out = CVec::Zero(dim());
  const double w = circle.weight();
  for (int i = 0; i < circle.num_modes(); ++i) {
    CVec acc = (circle.mode_values.row(i).cast<cplx>() * cw).transpose();
    for (int j = 0; j < d; ++j) out(label(i, j)) = w * acc(j);
  }
  return out;
}

// ---------------------------------------------------------------------------

GaugeAlgebraElement GaugeAlgebraElement::zero(int dim_g, int max_freq) {
  return {RMat::Zero(2 * max_freq + 1, dim_g)};
}

GaugeAlgebraElement GaugeAlgebraElement::constant(int dim_g, int a, double amp) {
  auto e = zero(dim_g, 0);
  e.coeffs(0, a) = amp;
  return e;
}

GaugeAlgebraElement GaugeAlgebraElement::cos_mode(int dim_g, int k, int a, double amp) {
  auto e = zero(dim_g, k);
  e.coeffs(2 * k - 1, a) = amp;
  return e;
}

GaugeAlgebraElement GaugeAlgebraElement::sin_mode(int dim_g, int k, int a, double amp) {
  auto e = zero(dim_g, k);
  e.coeffs(2 * k, a) = amp;
  return e;
}

RVec GaugeAlgebraElement::value(double theta) const {
  RVec v = coeffs.row(0).transpose();
  for (int k = 1; k <= max_frequency(); ++k)
    v += std::cos(k * theta) * coeffs.row(2 * k - 1).transpose() +
         std::sin(k * theta) * coeffs.row(2 * k).transpose();
  return v;
}

RVec GaugeAlgebraElement::derivative(double theta) const {
  RVec v = RVec::Zero(coeffs.cols());
  for (int k = 1; k <= max_frequency(); ++k)
    v += -k * std::sin(k * theta) * coeffs.row(2 * k - 1).transpose() +
         k * std::cos(k * theta) * coeffs.row(2 * k).transpose();
  return v;
}

GaugeAlgebraElement GaugeAlgebraElement::operator+(const GaugeAlgebraElement& o) const {
  const auto rows = std::max(coeffs.rows(), o.coeffs.rows());
  RMat c = RMat::Zero(rows, coeffs.cols());
  c.topRows(coeffs.rows()) += coeffs;
  c.topRows(o.coeffs.rows()) += o.coeffs;
  return {c};
}

GaugeAlgebraElement GaugeAlgebraElement::operator*(double s) const { return {coeffs * s}; }

GaugeAlgebraElement pointwise_bracket(const LieAlgebraData& g, const GaugeAlgebraElement& x,
                                      const GaugeAlgebraElement& y) {
  // Exact product of trig polynomials via sampling on a grid fine enough.
  const int kmax = x.max_frequency() + y.max_frequency();
  const int n = 2 * (2 * kmax + 1) + 1;
  auto out = GaugeAlgebraElement::zero(g.dim_g, kmax);
  for (int s = 0; s < n; ++s) {
    const double th = 2.0 * kPi * s / n;
    RVec b = g.bracket(x.value(th).cast<cplx>(), y.value(th).cast<cplx>()).real();
    out.coeffs.row(0) += b.transpose() / n;
    for (int k = 1; k <= kmax; ++k) {
      out.coeffs.row(2 * k - 1) += 2.0 * std::cos(k * th) * b.transpose() / n;
      out.coeffs.row(2 * k) += 2.0 * std::sin(k * th) * b.transpose() / n;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

GaugeGroupElement GaugeGroupElement::identity(const OneParticleModel& m) {
  return constant(m, CMat::Identity(m.alg.rep_dim, m.alg.rep_dim));
}

GaugeGroupElement GaugeGroupElement::constant(const OneParticleModel& m, const CMat& g0) {
  return {std::vector<CMat>(m.circle.grid_size, g0)};
}

GaugeGroupElement GaugeGroupElement::exp_of(const OneParticleModel& m,
                                            const GaugeAlgebraElement& psi, double t) {
  GaugeGroupElement out;
  out.values.reserve(m.circle.grid_size);
  for (double th : m.circle.grid)
    out.values.push_back(exp_rep(m.alg.to_matrix(t * psi.value(th).cast<cplx>())));
  return out;
}

GaugeGroupElement GaugeGroupElement::torus_loop(const OneParticleModel& m,
                                                const std::vector<int>& windings) {
  const int n = m.alg.rep_dim;
  if (static_cast<int>(windings.size()) != n) throw std::invalid_argument("torus_loop: size");
  int total = 0;
  for (int w : windings) total += w;
  if (total != 0) throw std::invalid_argument("torus_loop: windings must sum to zero");
  GaugeGroupElement out;
  for (double th : m.circle.grid) {
    CMat d = CMat::Zero(n, n);
    for (int k = 0; k < n; ++k) d(k, k) = std::polar(1.0, windings[k] * th);
    out.values.push_back(d);
  }
  return out;
}

GaugeGroupElement GaugeGroupElement::operator*(const GaugeGroupElement& o) const {
  GaugeGroupElement out;
  out.values.reserve(values.size());
  for (std::size_t n = 0; n < values.size(); ++n) out.values.push_back(values[n] * o.values[n]);
  return out;
}

GaugeGroupElement GaugeGroupElement::inverse() const {
  GaugeGroupElement out;
  for (const auto& v : values) out.values.push_back(v.adjoint());
  return out;
}

// ---------------------------------------------------------------------------

cplx inner0(const OneParticleVector& f, const OneParticleVector& g) {
  if (f.size() != g.size()) throw std::invalid_argument("inner0: dimension mismatch");
  return f.dot(g);
}

double norm_p(const OneParticleModel& m, const OneParticleVector& f, double p) {
  double s = 0;
  for (int l = 0; l < f.size(); ++l) s += std::pow(m.eigenvalue(l), 2 * p) * std::norm(f(l));
  return std::sqrt(s);
}

double hs_delta_sq(const OneParticleModel& m, double alpha) {
  if (!(alpha > 0)) throw std::invalid_argument("hs_delta_sq: alpha must be positive");
  double s = 0;
  for (int l = 0; l < m.dim(); ++l) s += std::pow(m.eigenvalue(l), -2 * alpha);
  return s;
}

OneParticleVector conj_vector(const OneParticleModel& m, const OneParticleVector& f) {
  CVec out(f.size());
  for (int l = 0; l < f.size(); ++l) out(m.conj_label(l)) = std::conj(f(l));
  return out;
}

double reality_defect(const OneParticleModel& m, const OneParticleVector& f) {
  return (f - conj_vector(m, f)).norm();
}

cplx bilinear(const OneParticleModel& m, const OneParticleVector& f, const OneParticleVector& g) {
  return inner0(conj_vector(m, f), g);
}

int bandwidth(const OneParticleModel& m, const OneParticleVector& f, double tol) {
  int bw = -1;
  for (int l = 0; l < f.size(); ++l)
    if (std::abs(f(l)) > tol) bw = std::max(bw, m.frequency_of(l));
  return bw;
}

OneParticleVector band_limit(const OneParticleModel& m, const OneParticleVector& f, int max_freq) {
  CVec out = f;
  for (int l = 0; l < f.size(); ++l)
    if (m.frequency_of(l) > max_freq) out(l) = 0;
  return out;
}

OneParticleVector beta(const OneParticleModel& m, const GaugeGroupElement& psi) {
  const int n_grid = m.circle.grid_size, r = m.alg.rep_dim;
  if (static_cast<int>(psi.values.size()) != n_grid)
    throw std::invalid_argument("beta: grid mismatch");
  CMat samples(n_grid, m.alg.dim_g);
  for (int n = 0; n < n_grid; ++n) {
    CMat dpsi = CMat::Zero(r, r);
    for (int q = 0; q < n_grid; ++q)
      if (m.circle.diff(n, q) != 0.0) dpsi += m.circle.diff(n, q) * psi.values[q];
    Eigen::PartialPivLU<CMat> lu(psi.values[n]);
    if (std::abs(lu.determinant()) < 1e-12) throw std::domain_error("beta: singular psi(x)");
    CMat x = dpsi * lu.inverse();
    samples.row(n) = m.alg.to_coords(x).transpose();
  }
  return m.project_one_form(samples);
}

OneParticleVector d_psi(const OneParticleModel& m, const GaugeAlgebraElement& psi) {
  CMat samples(m.circle.grid_size, m.alg.dim_g);
  for (int n = 0; n < m.circle.grid_size; ++n)
    samples.row(n) = psi.derivative(m.circle.grid[n]).cast<cplx>().transpose();
  return m.project_one_form(samples);
}

namespace {

// sum_n w e_i(theta_n) e_i'(theta_n) pointwise[n], assembled into the label space.
template <typename PointOp>
CMat assemble_pointwise(const OneParticleModel& m, PointOp&& cw_matrix_at) {
  const int modes = m.circle.num_modes(), d = m.alg.dim_g;
  CMat out = CMat::Zero(m.dim(), m.dim());
  const double w = m.circle.weight();
  for (int n = 0; n < m.circle.grid_size; ++n) {
    CMat a = cw_matrix_at(n);
    for (int i = 0; i < modes; ++i) {
      const double ei = m.circle.mode_values(i, n);
      for (int ip = 0; ip < modes; ++ip) {
        const double f = w * ei * m.circle.mode_values(ip, n);
        if (f == 0.0) continue;
        out.block(i * d, ip * d, d, d) += f * a;
      }
    }
  }
  return out;
}

}  // namespace

CMat V_group(const OneParticleModel& m, const GaugeGroupElement& psi) {
  const auto& g = m.alg;
  return assemble_pointwise(m, [&](int n) {
    const CMat& p = psi.values[n];
    CMat pinv = p.inverse();
    CMat ad(g.dim_g, g.dim_g);
    for (int b = 0; b < g.dim_g; ++b) ad.col(b) = g.to_coords(p * g.basis[b] * pinv);
    return CMat(g.cw_basis.adjoint() * ad * g.cw_basis);
  });
}

CMat V_alg(const OneParticleModel& m, const GaugeAlgebraElement& psi) {
  const auto& g = m.alg;
  return assemble_pointwise(m, [&](int n) {
    return g.ad_matrix(psi.value(m.circle.grid[n]).cast<cplx>());
  });
}

CMat V_const(const OneParticleModel& m, const CVec& z) {
  const int modes = m.circle.num_modes(), d = m.alg.dim_g;
  CMat a = m.alg.ad_matrix(z);
  CMat out = CMat::Zero(m.dim(), m.dim());
  for (int i = 0; i < modes; ++i) out.block(i * d, i * d, d, d) = a;
  return out;
}

AdjointCheck V_alg_adjoint_check(const OneParticleModel& m, int root_index) {
  const auto& g = m.alg;
  if (root_index < 0 || root_index >= g.num_pos_roots)
    throw std::out_of_range("V_alg_adjoint_check: root index");
  AdjointCheck r;
  const int n1 = g.cartan_dim, n2 = g.num_pos_roots;
  CMat vp = V_const(m, g.u(n1 + root_index));
  CMat vm = V_const(m, g.u(n1 + n2 + root_index));
  r.root_residual = (vp.adjoint() + vm).norm();
  for (int q = 0; q < n1; ++q) {
    CMat vh = V_const(m, g.u(q));
    r.cartan_residual = std::max(r.cartan_residual, (vh.adjoint() + vh).norm());
  }
  return r;
}

RankReport span_generators(const OneParticleModel& m,
                           const std::vector<GaugeAlgebraElement>& directions,
                           double rel_threshold) {
  if (directions.empty()) throw std::invalid_argument("span_generators: empty direction list");
  std::vector<CVec> dpsis;
  std::vector<CMat> vs;
  for (const auto& psi : directions) {
    dpsis.push_back(d_psi(m, psi));
    vs.push_back(V_alg(m, psi));
  }
  const std::size_t nd = directions.size();
  CMat family(m.dim(), nd + nd * nd);
  for (std::size_t i = 0; i < nd; ++i) family.col(i) = dpsis[i];
  for (std::size_t i = 0; i < nd; ++i)
    for (std::size_t j = 0; j < nd; ++j) family.col(nd + i * nd + j) = vs[i] * dpsis[j];

  RankReport rep;
  rep.ambient_dim = m.dim();
  rep.family_size = static_cast<int>(family.cols());
  Eigen::JacobiSVD<CMat> svd(family);
  const auto& sv = svd.singularValues();
  rep.singular_values.assign(sv.data(), sv.data() + sv.size());
  const double smax = sv.size() ? sv(0) : 0.0;
  rep.threshold = std::max(rel_threshold * smax, 1e-13);
  for (int k = 0; k < sv.size(); ++k)
    if (sv(k) > rep.threshold) ++rep.rank;
  return rep;
}

}  // namespace wnlab
