#pragma once

#include <map>
#include <vector>

#include "wnlab/fock_space.hpp"
#include "wnlab/one_particle.hpp"
#include "wnlab/types.hpp"

namespace wnlab {

using LabelTuple = std::vector<int>;

/// One-particle label data needed by the kernel calculus: the conjugation
/// used by the bilinear pairing <e_a, e_b> = delta(b, abar) and the
/// eigenvalues of A for the weighted norms.
struct LabelSpace {
  int dim = 0;
  std::vector<int> conj;
  std::vector<double> eigenvalues;

  static LabelSpace from_model(const OneParticleModel& m);
  /// Labels 0..dim-1 with the given conjugation (identity if empty) and
  /// eigenvalues (all 2 if empty).
  static LabelSpace generic(int dim, std::vector<int> conj = {}, std::vector<double> eig = {});
};

/// Kernel of shape (l, m), stored as a sparse tensor in E^{(x)(l+m)}: the
/// first l slots are creation slots, the last m annihilation slots. Slots
/// are contracted against vectors with the bilinear pairing.
struct KernelDistribution {
  int l = 0;
  int m = 0;
  std::map<LabelTuple, cplx> coeffs;
  bool sym_flag = false;

  KernelDistribution() = default;
  KernelDistribution(int l_, int m_) : l(l_), m(m_) {}

  static KernelDistribution scalar(cplx c);
  /// factors[0] (x) ... (x) factors[l+m-1].
  static KernelDistribution product(int l, int m, const std::vector<CVec>& factors);
  static KernelDistribution from_dense(int l, int m, const DenseTensor& t);
  static KernelDistribution basis_element(int l, int m, const LabelTuple& labels);

  int rank() const { return l + m; }
  cplx at(const LabelTuple& t) const;
  void add(const LabelTuple& t, cplx v);
  DenseTensor to_dense(int dim) const;
  double max_abs() const;
  void prune(double tol = 0.0);

  KernelDistribution operator+(const KernelDistribution& o) const;
  KernelDistribution operator-(const KernelDistribution& o) const;
  KernelDistribution operator*(cplx s) const;
};

/// F (x)_l g: contracts the last l slots of F with the last l slots of g.
/// The result has the remaining slots of F followed by those of g and shape
/// (F.rank() - l, g.rank() - l).
KernelDistribution contract(const LabelSpace& ls, const KernelDistribution& f,
                            const KernelDistribution& g, int l);

/// |F|_{l,m;p,q}: squared coefficients weighted by a^{2p} on the first l
/// slots and a^{2q} on the last m.
double weighted_norm(const LabelSpace& ls, const KernelDistribution& f, int l, int m, double p,
                     double q);

/// Independent symmetrization of the creation block and the annihilation block.
KernelDistribution s_lm(const KernelDistribution& k);
/// Largest coefficient of s_lm(k) - k.
double symmetry_defect(const KernelDistribution& k);

/// Swaps the creation and annihilation blocks: shape (l, m) -> (m, l).
KernelDistribution transpose_ml(const KernelDistribution& k);
/// Componentwise conjugate kernel: coefficient at t is conj(k at tbar).
KernelDistribution conj_kernel(const LabelSpace& ls, const KernelDistribution& k);
/// Kernel of the Hilbert adjoint of Xi_{l,m}(k) with respect to fock_inner.
KernelDistribution hilbert_adjoint_kernel(const LabelSpace& ls, const KernelDistribution& k);

/// S-composition: contracts the last k annihilation slots of kappa against
/// the first k creation slots of lambda. Output slot order:
/// kappa creations, lambda remaining creations, kappa remaining
/// annihilations, lambda annihilations.
KernelDistribution s_composition(const LabelSpace& ls, const KernelDistribution& kappa,
                                 const KernelDistribution& lambda, int k);

struct ProductTerm {
  int k = 0;
  double weight = 0;
  KernelDistribution kernel;
};
/// Xi(kappa) Xi(lambda) = sum_k weight_k Xi(term_k); inputs are s_lm-symmetrized first.
std::vector<ProductTerm> product_expansion(const LabelSpace& ls, const KernelDistribution& kappa,
                                           const KernelDistribution& lambda);

/// Xi_{l,m}(kappa) phi evaluated from the defining tensor formula
/// sum_n (n+m)!/n! s(kappa (x)_m f_{n+m}). Output sectors above n_max are
/// dropped; their squared Fock norm is added to *leakage when given.
FockVector xi_apply(const FockBasis& b, const KernelDistribution& kappa, const FockVector& phi,
                    double* leakage = nullptr);

/// Sector matrices of Xi_{l,m}(kappa), assembled from normal-ordered ladder
/// monomials a*_{t_1}..a*_{t_l} a_{tbar_{l+1}}..a_{tbar_{l+m}}. Blocks whose
/// output sector exceeds n_max are omitted.
SectorOperator xi_matrix(const FockBasis& b, const KernelDistribution& kappa);

}  // namespace wnlab
