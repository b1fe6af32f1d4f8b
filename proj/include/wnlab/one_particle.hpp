#pragma once

#include <memory>
#include <vector>

#include "wnlab/lie_algebra.hpp"
#include "wnlab/types.hpp"

namespace wnlab {

/// Fourier eigenbasis of A = (Delta + 2) on 1-forms over the circle.
///
/// Mode 0 is dtheta/sqrt(2 pi); modes 2k-1, 2k are cos(k theta), sin(k theta)
/// times dtheta/sqrt(pi). Eigenvalues k^2 + 2, so every a_i >= 2.
struct CircleModel {
  int mode_cutoff = 0;  // I_geo
  int grid_size = 0;    // n_grid
  std::vector<double> eigenvalues;
  std::vector<int> frequency;
  std::vector<double> grid;  // theta_n = 2 pi n / n_grid
  RMat mode_values;          // (mode, grid point) -> e_i(theta_n)
  RMat diff;                 // spectral differentiation on the grid

  CircleModel() = default;
  CircleModel(int mode_cutoff, int grid_size);

  int num_modes() const { return 2 * mode_cutoff + 1; }
  double weight() const { return 2.0 * kPi / grid_size; }
  static double mode_function(int mode, double theta);
};

/// Truncated one-particle space H(S^1, g): labels (i, j) flattened as
/// i * N0 + j, i a circle mode and j a Cartan-Weyl index.
struct OneParticleModel {
  LieAlgebraData alg;
  CircleModel circle;

  OneParticleModel(LieAlgebraData alg, int mode_cutoff, int grid_size);

  int dim() const { return circle.num_modes() * alg.dim_g; }
  int label(int mode, int j) const { return mode * alg.dim_g + j; }
  int mode_of(int label) const { return label / alg.dim_g; }
  int g_index_of(int label) const { return label % alg.dim_g; }
  int frequency_of(int label) const { return circle.frequency[mode_of(label)]; }
  int conj_label(int label) const {
    return label - g_index_of(label) + alg.conj_index[g_index_of(label)];
  }
  double eigenvalue(int label) const { return circle.eigenvalues[mode_of(label)]; }

  /// Basis vector e(i, j).
  CVec basis_vector(int mode, int j) const;
  /// Projects a g^c-valued 1-form sampled on the grid (rows = grid points,
  /// columns = real-basis coordinates) onto the truncated basis.
  CVec project_one_form(const CMat& samples) const;
};

using OneParticleVector = CVec;

/// Psi: S^1 -> g as a real trigonometric polynomial. Row 0 is the constant
/// term, rows 2k-1 and 2k the cos(k theta) and sin(k theta) amplitudes;
/// columns index the real basis of g.
struct GaugeAlgebraElement {
  RMat coeffs;

  static GaugeAlgebraElement zero(int dim_g, int max_freq = 0);
  static GaugeAlgebraElement constant(int dim_g, int a, double amp = 1.0);
  static GaugeAlgebraElement cos_mode(int dim_g, int k, int a, double amp = 1.0);
  static GaugeAlgebraElement sin_mode(int dim_g, int k, int a, double amp = 1.0);

  int max_frequency() const { return static_cast<int>(coeffs.rows() - 1) / 2; }
  int dim_g() const { return static_cast<int>(coeffs.cols()); }
  RVec value(double theta) const;
  RVec derivative(double theta) const;

  GaugeAlgebraElement operator+(const GaugeAlgebraElement& o) const;
  GaugeAlgebraElement operator*(double s) const;
};

/// Pointwise bracket [Psi, Psi'] (bandwidth adds).
GaugeAlgebraElement pointwise_bracket(const LieAlgebraData& g, const GaugeAlgebraElement& x,
                                      const GaugeAlgebraElement& y);

/// psi: S^1 -> G sampled on the model grid, in the defining representation.
struct GaugeGroupElement {
  std::vector<CMat> values;

  static GaugeGroupElement identity(const OneParticleModel& m);
  static GaugeGroupElement constant(const OneParticleModel& m, const CMat& g0);
  /// exp(t Psi(theta)) pointwise.
  static GaugeGroupElement exp_of(const OneParticleModel& m, const GaugeAlgebraElement& psi,
                                  double t = 1.0);
  /// theta -> diag(exp(i w_1 theta), ..., exp(i w_n theta)) with sum w = 0.
  static GaugeGroupElement torus_loop(const OneParticleModel& m, const std::vector<int>& windings);

  GaugeGroupElement operator*(const GaugeGroupElement& o) const;
  GaugeGroupElement inverse() const;
};

cplx inner0(const OneParticleVector& f, const OneParticleVector& g);
double norm_p(const OneParticleModel& m, const OneParticleVector& f, double p);
double hs_delta_sq(const OneParticleModel& m, double alpha);

/// Componentwise conjugation in H(S^1, g): f -> fbar.
OneParticleVector conj_vector(const OneParticleModel& m, const OneParticleVector& f);
/// Residual |f - fbar|; zero for g-valued (real) 1-forms.
double reality_defect(const OneParticleModel& m, const OneParticleVector& f);
/// Canonical bilinear pairing <f, g> = <fbar, g>_0.
cplx bilinear(const OneParticleModel& m, const OneParticleVector& f, const OneParticleVector& g);
/// Largest frequency carrying weight above tol (-1 for the zero vector).
int bandwidth(const OneParticleModel& m, const OneParticleVector& f, double tol = 1e-13);
/// Zeroes every component above the given frequency.
OneParticleVector band_limit(const OneParticleModel& m, const OneParticleVector& f, int max_freq);

/// Right logarithmic derivative beta(psi) = dpsi psi^{-1}.
OneParticleVector beta(const OneParticleModel& m, const GaugeGroupElement& psi);
/// dPsi projected onto the truncated basis.
OneParticleVector d_psi(const OneParticleModel& m, const GaugeAlgebraElement& psi);

/// Matrix of V(psi) = id (x) Ad(psi(x)) by grid quadrature.
CMat V_group(const OneParticleModel& m, const GaugeGroupElement& psi);
/// Matrix of V(Psi) = id (x) ad(Psi(x)) by grid quadrature.
CMat V_alg(const OneParticleModel& m, const GaugeAlgebraElement& psi);
/// V(Z) for a constant, possibly complex, direction Z (real-basis coords).
CMat V_const(const OneParticleModel& m, const CVec& z);

struct AdjointCheck {
  double root_residual = 0;    // |V(X_a)^dagger + V(X_-a)|
  double cartan_residual = 0;  // |V(H_q)^dagger + V(H_q)|
};
AdjointCheck V_alg_adjoint_check(const OneParticleModel& m, int root_index);

struct RankReport {
  int rank = 0;
  int ambient_dim = 0;
  int family_size = 0;
  std::vector<double> singular_values;
  double threshold = 0;
};
/// Numerical rank of {dPsi_i} u {V(Psi_i) dPsi_j}.
RankReport span_generators(const OneParticleModel& m,
                           const std::vector<GaugeAlgebraElement>& directions,
                           double rel_threshold = 1e-10);

}  // namespace wnlab
