#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wnlab/energy_rep.hpp"

namespace wnlab {

struct Shape {
  int l = 0;
  int m = 0;
  bool operator==(const Shape& o) const { return l == o.l && m == o.m; }
};

/// All (l, m) with l + m <= l_max, ordered by l + m, then by decreasing l.
std::vector<Shape> shapes_upto(int l_max);

/// Orthonormal coordinates on s_{l,m}-symmetric kernels: one coordinate per
/// (shape, creation multiset, annihilation multiset), the kernel being the
/// symmetrized basis tensor scaled to unit coefficient norm.
class KernelStackBasis {
 public:
  struct Element {
    int shape = 0;
    SymIndex creators;
    SymIndex annihilators;
  };

  KernelStackBasis(std::vector<Shape> shapes, int one_dim);

  const std::vector<Shape>& shapes() const { return shapes_; }
  int one_dim() const { return one_dim_; }
  int size() const { return static_cast<int>(elements_.size()); }
  const Element& element(int k) const { return elements_[k]; }
  /// Range [first, last) of coordinates belonging to shape s.
  std::pair<int, int> shape_range(int s) const { return ranges_[s]; }
  int shape_index(Shape sh) const;
  KernelDistribution kernel(int k) const;

 private:
  std::vector<Shape> shapes_;
  int one_dim_ = 0;
  std::vector<Element> elements_;
  std::vector<std::pair<int, int>> ranges_;
};

/// Xi = sum over shapes of Xi_{l,m}(kernels[s]).
struct KernelStack {
  std::vector<Shape> shapes;
  std::vector<KernelDistribution> kernels;

  static KernelStack from_coords(const KernelStackBasis& basis, const CVec& coords);
  static KernelStack scalar(const std::vector<Shape>& shapes, cplx c);
  /// Kernel of the given shape, or an empty kernel of that shape if absent.
  KernelDistribution get(Shape sh) const;
  /// Root of the summed squared coefficients of each shape.
  std::vector<double> shape_norms() const;
};

/// Coordinates of the s_{l,m}-symmetrized kernels of st; shapes of st that
/// are not in the basis are ignored.
CVec to_coords(const KernelStackBasis& basis, const KernelStack& st);

/// sum_a P(e_a) P(e_abar) with P(f) = a*(f) - a(f): tau on (2,0) and (0,2),
/// -2 tau on (1,1) and -dim on (0,0).
KernelStack translation_casimir(const OneParticleModel& m);

/// Directions: a constant for every real basis element of g, then cos k and
/// sin k for k = 1..max_k in every real basis direction.
std::vector<GaugeAlgebraElement> default_directions(const LieAlgebraData& g, int max_k = 2);
std::vector<GaugeAlgebraElement> constant_directions(const LieAlgebraData& g);

/// Gram matrix of the linear map kappa-stack -> [pi(Psi_d), Xi(kappa)] over
/// all directions, on interior blocks (n_in, n_out <= n_max - 1), measured
/// in the orthonormal occupation basis.
struct ConstraintSystem {
  KernelStackBasis basis;
  std::vector<GaugeAlgebraElement> directions;
  int n_max = 0;
  CMat gram;
};

struct ConstraintOptions {
  bool parallel = false;
};

ConstraintSystem assemble_constraints(const OneParticleModel& m, const std::vector<Shape>& shapes,
                                      const std::vector<GaugeAlgebraElement>& directions,
                                      int n_max, const ConstraintOptions& opt = {});

/// Interior blocks of [pi(Psi), Xi] as one flattened residual, in the
/// occupation basis. Its norm is |A v| for the corresponding direction.
double commutator_residual(const OneParticleModel& m, const FockBasis& b,
                           const GaugeAlgebraElement& psi, const KernelStack& stack);
/// sqrt(sum over directions of commutator_residual^2).
double constraint_residual(const OneParticleModel& m, const ConstraintSystem& sys,
                           const KernelStack& stack);

struct NullSpaceResult {
  std::vector<double> singular_values;  // ascending, certified where small
  int null_dim = 0;
  double threshold = 0;                 // relative to the largest singular value
  double gap = 0;                       // sigma_{null_dim+1} / max(sigma_1..sigma_null_dim)
  bool ambiguous = false;               // no gap >= 10 x threshold
  std::vector<CVec> basis;              // orthonormal null vectors (coordinates)
  std::vector<std::pair<double, int>> sweep;  // (threshold, dimension)
};

/// Numerical null space of the constraint system. Small singular values are
/// recomputed as the exact residual of their singular vector.
NullSpaceResult null_space(const OneParticleModel& m, const ConstraintSystem& sys,
                           double threshold = 1e-8);

/// |v - projection of v onto the null basis| / |v|.
double span_defect(const NullSpaceResult& ns, const CVec& v);

/// Per-equation kernel residuals of the commutation relations for one
/// direction. Each entry is named by its shape.
struct IdentityRow {
  std::string name;
  Shape shape;
  double residual = 0;
};
struct IdentityReport {
  std::vector<IdentityRow> rows;
  double max_residual() const;
};

/// Residual kernel of the commutation relation at shape (l, m):
///   s_{l,m}( m S(kappa_{l,m} o_1 lambda_11) + (m+1) S(kappa_{l,m+1} o_1 lambda_10)
///          - l S(lambda_11 o_1 kappa_{l,m}) + (l+1) S(lambda_01 o_1 kappa_{l+1,m}) ).
/// Shapes missing from the stack count as zero.
KernelDistribution relation_residual(const LabelSpace& ls, const KernelStack& stack,
                                     const GeneratorTriple& lam, Shape sh);

/// Bilinear dual of V: the matrix with (id (x) V)^* acting on the last slot.
CMat bilinear_dual(const OneParticleModel& m, const CMat& v);

/// (dGamma(A)^{(l)} (x) id_m + id_l (x) dGamma(A)^{(m)}) kappa.
KernelDistribution dgamma_on_kernel(const KernelDistribution& k, const CMat& a);

/// The four relation families, and the dGamma forms with both signs of
/// the inhomogeneous term ("derived" and "literal").
IdentityReport check_identity_suite(const OneParticleModel& m, const KernelStack& stack,
                                    const GaugeAlgebraElement& psi);

/// Cartan weight of each Cartan-Weyl index: 0 on h, +-alpha on X_{+-alpha}.
CMat label_weights(const OneParticleModel& m);
/// Keeps basis terms whose total Cartan weight vanishes.
KernelDistribution grading_support_filter(const OneParticleModel& m, const KernelDistribution& k,
                                          double tol = 1e-12);

struct VanishingRow {
  std::string name;
  double value = 0;
  bool pass = false;
};
struct VanishingReport {
  std::vector<VanishingRow> rows;
  bool pass = true;
};
/// Per-shape norms of every null vector, the root evaluation matrix, and the
/// pairing conditions <kappa_{l+1,0}, dPsi (x) e> and the root-weighted
/// kappa_{l,1} sums.
VanishingReport vanishing_chain_report(const OneParticleModel& m, const ConstraintSystem& sys,
                                       const NullSpaceResult& ns, double tol = 1e-9);

/// FNV-1a over a byte string.
std::uint64_t fnv1a(const std::string& bytes);

}  // namespace wnlab
