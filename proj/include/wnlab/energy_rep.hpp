#pragma once

#include <vector>

#include "wnlab/fock_space.hpp"
#include "wnlab/kernel_calculus.hpp"
#include "wnlab/one_particle.hpp"

namespace wnlab {

/// <tau, f (x) g> = <f, g>: coefficients delta(b, abar).
KernelDistribution tau_kernel(const OneParticleModel& m);

/// Kernels of pi(Psi) = Xi_{1,1}(lambda_11) + Xi_{1,0}(lambda_10) - Xi_{0,1}(lambda_01).
struct GeneratorTriple {
  KernelDistribution lambda_11;  // (id (x) V(Psi))^* tau
  OneParticleVector lambda_10;   // dPsi
  OneParticleVector lambda_01;   // dPsi
};

GeneratorTriple generator_triple(const OneParticleModel& m, const GaugeAlgebraElement& psi);

/// pi(Psi) assembled from the three integral kernel operators.
SectorOperator pi_matrix(const OneParticleModel& m, const FockBasis& b,
                         const GaugeAlgebraElement& psi);
/// dGamma(V(Psi)) + a*(dPsi) - a(dPsi), assembled without kernels.
SectorOperator pi_direct(const OneParticleModel& m, const FockBasis& b,
                         const GaugeAlgebraElement& psi);

/// One-particle data of a gauge group element: V(psi) and beta(psi).
struct GroupAction {
  CMat V;
  OneParticleVector beta;
};
GroupAction group_action(const OneParticleModel& m, const GaugeGroupElement& psi);

/// U(psi) exp(f) = scalar * exp(h).
struct CoherentImage {
  cplx scalar = 1.0;
  OneParticleVector h;
};
CoherentImage coherent_U(const GroupAction& a, const OneParticleVector& f);
CoherentImage coherent_U(const OneParticleModel& m, const GaugeGroupElement& psi,
                         const OneParticleVector& f);
/// U(psi) applied to scalar * exp(f).
CoherentImage coherent_U(const GroupAction& a, const CoherentImage& v);

/// <<s1 exp(h1), s2 exp(h2)>> = conj(s1) s2 exp(<h1, h2>_0).
cplx coherent_inner(const CoherentImage& x, const CoherentImage& y);

struct GroupLawResidual {
  double scalar = 0;  // |c(psi phi) - c(psi) c(phi)|
  double vector = 0;  // |h(psi phi) - h(psi, h(phi))|_0
};
/// Compares U(psi phi) exp f with U(psi) U(phi) exp f on coherent data.
GroupLawResidual group_law_check(const OneParticleModel& m, const GaugeGroupElement& psi,
                                 const GaugeGroupElement& phi, const OneParticleVector& f);

/// |<<U exp f, U exp g>> - <<exp f, exp g>>| for each pair of inputs.
double unitarity_defect(const GroupAction& a, const std::vector<OneParticleVector>& fs);

struct FdRow {
  double t = 0;
  double residual = 0;
};
struct FdReport {
  std::vector<FdRow> rows;
  double slope = 0;  // least-squares slope of log residual against log t
};
/// |(U(exp tPsi) exp f - exp f)/t - pi(Psi) exp f| on sectors below n_max.
FdReport generator_fd_check(const OneParticleModel& m, const FockBasis& b,
                            const GaugeAlgebraElement& psi, const OneParticleVector& f,
                            const std::vector<double>& ts = {1e-2, 1e-3, 1e-4, 1e-5});

/// Fock norm of phi restricted to sectors 0..max_sector.
double fock_norm_upto(const FockVector& phi, int max_sector);

/// Basis states of sector n whose labels all have frequency <= max_freq.
std::vector<int> low_frequency_states(const OneParticleModel& m, const FockBasis& b, int n,
                                      int max_freq);

}  // namespace wnlab
