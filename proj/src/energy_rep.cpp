#include "wnlab/energy_rep.hpp"

#include <cmath>
#include <stdexcept>

namespace wnlab {

KernelDistribution tau_kernel(const OneParticleModel& m) {
  KernelDistribution k(1, 1);
  for (int a = 0; a < m.dim(); ++a) k.coeffs[{a, m.conj_label(a)}] = 1.0;
  k.sym_flag = true;
  return k;
}

GeneratorTriple generator_triple(const OneParticleModel& m, const GaugeAlgebraElement& psi) {
  GeneratorTriple g;
  const CMat v = V_alg(m, psi);
  // <lambda_11, e_c (x) e_d> = <e_c, V e_d>, i.e. coefficient (a, b) = V(a, bbar).
  g.lambda_11 = KernelDistribution(1, 1);
  for (int a = 0; a < m.dim(); ++a)
    for (int b = 0; b < m.dim(); ++b) {
      const cplx x = v(a, m.conj_label(b));
      if (x != cplx(0)) g.lambda_11.coeffs[{a, b}] = x;
    }
  g.lambda_11.sym_flag = true;
  g.lambda_10 = d_psi(m, psi);
  g.lambda_01 = g.lambda_10;
  return g;
}

SectorOperator pi_matrix(const OneParticleModel& m, const FockBasis& b,
                         const GaugeAlgebraElement& psi) {
  const GeneratorTriple g = generator_triple(m, psi);
  return xi_matrix(b, g.lambda_11) + xi_matrix(b, KernelDistribution::product(1, 0, {g.lambda_10})) -
         xi_matrix(b, KernelDistribution::product(0, 1, {g.lambda_01}));
}

SectorOperator pi_direct(const OneParticleModel& m, const FockBasis& b,
                         const GaugeAlgebraElement& psi) {
  const CVec dpsi = d_psi(m, psi);
  return d_gamma_b(b, V_alg(m, psi)) + creation(b, dpsi) - annihilation(b, dpsi);
}

GroupAction group_action(const OneParticleModel& m, const GaugeGroupElement& psi) {
  return {V_group(m, psi), beta(m, psi)};
}

CoherentImage coherent_U(const GroupAction& a, const OneParticleVector& f) {
  CoherentImage out;
  const CVec vf = a.V * f;
  out.scalar = std::exp(-0.5 * a.beta.squaredNorm() - inner0(a.beta, vf));
  out.h = vf + a.beta;
  return out;
}

CoherentImage coherent_U(const OneParticleModel& m, const GaugeGroupElement& psi,
                         const OneParticleVector& f) {
  return coherent_U(group_action(m, psi), f);
}

CoherentImage coherent_U(const GroupAction& a, const CoherentImage& v) {
  CoherentImage out = coherent_U(a, v.h);
  out.scalar *= v.scalar;
  return out;
}

cplx coherent_inner(const CoherentImage& x, const CoherentImage& y) {
  return std::conj(x.scalar) * y.scalar * std::exp(inner0(x.h, y.h));
}

GroupLawResidual group_law_check(const OneParticleModel& m, const GaugeGroupElement& psi,
                                 const GaugeGroupElement& phi, const OneParticleVector& f) {
  const CoherentImage joint = coherent_U(m, psi * phi, f);
  const CoherentImage stepwise = coherent_U(group_action(m, psi), coherent_U(m, phi, f));
  return {std::abs(joint.scalar - stepwise.scalar), (joint.h - stepwise.h).norm()};
}

double unitarity_defect(const GroupAction& a, const std::vector<OneParticleVector>& fs) {
  double worst = 0;
  for (const auto& f : fs)
    for (const auto& g : fs) {
      const cplx before = std::exp(inner0(f, g));
      const cplx after = coherent_inner(coherent_U(a, f), coherent_U(a, g));
      worst = std::max(worst, std::abs(after - before));
    }
  return worst;
}

double fock_norm_upto(const FockVector& phi, int max_sector) {
  double s = 0;
  for (int n = 0; n <= max_sector && n < static_cast<int>(phi.sectors.size()); ++n)
    s += factorial(n) * phi.sectors[n].squaredNorm();
  return std::sqrt(s);
}

FdReport generator_fd_check(const OneParticleModel& m, const FockBasis& b,
                            const GaugeAlgebraElement& psi, const OneParticleVector& f,
                            const std::vector<double>& ts) {
  const FockVector ef = exp_vector(b, f);
  const FockVector target = pi_direct(m, b, psi).apply(ef);
  FdReport rep;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (double t : ts) {
    const CoherentImage img = coherent_U(m, GaugeGroupElement::exp_of(m, psi, t), f);
    const FockVector moved = exp_vector(b, img.h) * img.scalar;
    const FockVector fd = (moved - ef) * cplx(1.0 / t);
    // The top sector of pi(Psi) exp f is missing its annihilation term.
    const double r = fock_norm_upto(fd - target, b.n_max() - 1);
    rep.rows.push_back({t, r});
    if (r > 0) {
      const double x = std::log(t), y = std::log(r);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++count;
    }
  }
  if (count >= 2) rep.slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
  return rep;
}

std::vector<int> low_frequency_states(const OneParticleModel& m, const FockBasis& b, int n,
                                      int max_freq) {
  std::vector<int> out;
  const auto& sec = b.sector(n);
  for (std::size_t k = 0; k < sec.size(); ++k) {
    bool ok = true;
    for (int a : sec[k]) ok = ok && m.frequency_of(a) <= max_freq;
    if (ok) out.push_back(static_cast<int>(k));
  }
  return out;
}

}  // namespace wnlab
