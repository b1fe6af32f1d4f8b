#pragma once

#include <map>
#include <utility>
#include <vector>

#include "wnlab/one_particle.hpp"
#include "wnlab/types.hpp"

namespace wnlab {

/// Sorted multiset of one-particle labels: the canonical form of an
/// unordered n-particle index (lexicographic on the flattened (i, j)).
using SymIndex = std::vector<int>;

/// Multiplicity of each distinct label in a SymIndex.
std::vector<std::pair<int, int>> multiplicities(const SymIndex& s);
/// prod_k (mu_k)! for a SymIndex.
double multiplicity_factorial(const SymIndex& s);
double factorial(int n);

/// Enumeration of the symmetric basis of every sector 0..n_max.
///
/// Sector n coefficients are taken against unit-norm symmetric tensors
/// eps_s = sqrt(n! / prod mu!) s_n(e_{s_1} (x) ... (x) e_{s_n}), so that a
/// Fock vector's component f_n = sum_s c_s eps_s.
class FockBasis {
 public:
  FockBasis(int one_particle_dim, int n_max, std::vector<int> conj_labels = {});
  static FockBasis for_model(const OneParticleModel& m, int n_max);

  int one_dim() const { return one_dim_; }
  int n_max() const { return n_max_; }
  int sector_dim(int n) const { return static_cast<int>(sectors_[n].size()); }
  int total_dim() const;
  const std::vector<SymIndex>& sector(int n) const { return sectors_[n]; }
  /// Position of s in its sector, or -1.
  int index_of(const SymIndex& s) const;
  int conj_label(int label) const { return conj_[label]; }

 private:
  int one_dim_;
  int n_max_;
  std::vector<int> conj_;
  std::vector<std::vector<SymIndex>> sectors_;
};

std::vector<SymIndex> enumerate_sym_basis(int one_particle_dim, int n);

struct FockVector {
  std::vector<CVec> sectors;

  static FockVector zero(const FockBasis& b);
  static FockVector vacuum(const FockBasis& b);

  FockVector& operator+=(const FockVector& o);
  FockVector& operator-=(const FockVector& o);
  FockVector operator+(const FockVector& o) const;
  FockVector operator-(const FockVector& o) const;
  FockVector operator*(cplx s) const;
};

/// <<phi, chi>> = sum_n n! <f_n, g_n>_0.
cplx fock_inner(const FockVector& phi, const FockVector& chi);
double fock_norm(const FockVector& phi);

/// Coherent vector exp(f) = sum f^{(x)n} / n!, truncated at n_max.
/// Throws std::domain_error when the dropped tail exceeds tail_budget.
FockVector exp_vector(const FockBasis& b, const OneParticleVector& f, double tail_budget = 1e-14);
/// Upper bound on the squared Fock norm dropped by truncating exp(f).
double exp_vector_tail(double norm_f, int n_max);

/// Dense rank-n tensor over a dim-dimensional space, row-major.
struct DenseTensor {
  int dim = 0;
  int rank = 0;
  std::vector<cplx> data;

  DenseTensor() = default;
  DenseTensor(int dim, int rank);
  std::size_t flat(const std::vector<int>& idx) const;
  cplx& at(const std::vector<int>& idx) { return data[flat(idx)]; }
  cplx at(const std::vector<int>& idx) const { return data[flat(idx)]; }
  std::vector<int> unflat(std::size_t pos) const;
  static DenseTensor outer(const std::vector<CVec>& factors);
};

/// s_n: average over all permutations of the tensor slots (rank <= 6).
DenseTensor symmetrize(const DenseTensor& t);

/// Sector coefficients -> symmetric full tensor, and back (the inverse
/// reads the symmetric projection of t).
DenseTensor sector_to_tensor(const FockBasis& b, int n, const CVec& c);
CVec tensor_to_sector(const FockBasis& b, const DenseTensor& t);

/// Operator on the truncated Fock space, stored as sector blocks acting on
/// the unit-tensor coefficients of FockVector.
struct SectorOperator {
  int n_max = 0;
  std::map<std::pair<int, int>, SpMat> blocks;  // (n_out, n_in) -> matrix

  static SectorOperator identity(const FockBasis& b);

  FockVector apply(const FockVector& phi) const;
  SpMat block(const FockBasis& b, int n_out, int n_in) const;
  void add_block(int n_out, int n_in, const SpMat& m);

  SectorOperator operator+(const SectorOperator& o) const;
  SectorOperator operator-(const SectorOperator& o) const;
  SectorOperator operator*(const SectorOperator& o) const;
  SectorOperator operator*(cplx s) const;

  /// Hilbert adjoint with respect to fock_inner.
  SectorOperator adjoint() const;
  /// Keeps blocks with n_in, n_out <= limit.
  SectorOperator restricted(int limit) const;
  /// Largest absolute entry over all blocks.
  double max_abs() const;
};

/// Gamma_b(B): B^{(x)n} on each symmetric sector.
SectorOperator gamma_b(const FockBasis& b, const CMat& one_particle);
/// dGamma_b(B): sum_j id^{j-1} (x) B (x) id^{n-j} on each symmetric sector.
SectorOperator d_gamma_b(const FockBasis& b, const CMat& one_particle);
/// Creation a*(g) f = g (x)^ f.
SectorOperator creation(const FockBasis& b, const OneParticleVector& g);
/// Annihilation with the bilinear pairing: a(g) f_{n+1} = (n+1) <g, f_{n+1}>.
SectorOperator annihilation(const FockBasis& b, const OneParticleVector& g);

/// sum_p alpha_p(H)(n_{p,+}(j) - n_{p,-}(j)) for a Cartan direction H
/// (real-basis coordinates supported on the Cartan block).
cplx grading_eigenvalue(const OneParticleModel& m, const CVec& h, const SymIndex& idx);

/// Ladder-operator normal-ordered monomial a*_{c_1}..a*_{c_l} a_{d_1}..a_{d_m}
/// applied to basis state s. Returns false if it annihilates s. The factor
/// is with respect to unit-tensor coefficients.
bool apply_monomial(const SymIndex& s, const std::vector<int>& creators,
                    const std::vector<int>& annihilators, SymIndex& out, double& factor);

/// Permanent by Ryser's formula.
cplx permanent(const CMat& a);

}  // namespace wnlab
