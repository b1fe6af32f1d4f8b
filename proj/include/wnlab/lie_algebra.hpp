#pragma once

#include <string>
#include <vector>

#include "wnlab/types.hpp"

namespace wnlab {

/// Compact semi-simple Lie algebra g = su(n) with its complexification.
///
/// Elements of g^c are coordinate vectors over a real basis b_a of g that is
/// orthonormal for the negative Killing form. The first cartan_dim basis
/// elements span the Cartan subalgebra. The Cartan-Weyl basis
///   u = (H_1..H_N1, X_{a_1}..X_{a_N2}, X_{-a_1}..X_{-a_N2})
/// is stored column-wise in cw_basis, with conj(X_a) = X_{-a} exactly.
struct LieAlgebraData {
  std::string name;
  int dim_g = 0;          // N0
  int cartan_dim = 0;     // N1
  int num_pos_roots = 0;  // N2
  int rep_dim = 0;        // size of the defining representation

  std::vector<CMat> basis;          // anti-hermitian rep matrices b_a
  std::vector<double> structure;    // c[a][b][k]: [b_a, b_b] = sum_k c_abk b_k
  RMat killing_matrix;              // K(b_a, b_b)
  CMat cw_basis;                    // column j = coordinates of u_j
  CMat roots;                       // roots(p, q) = alpha_p(H_q)
  std::vector<int> conj_index;      // j -> jbar
  RMat trace_gram_inv;              // inverse of tr(b_a b_b), for projection

  double c(int a, int b, int k) const {
    return structure[(static_cast<std::size_t>(a) * dim_g + b) * dim_g + k];
  }

  CVec u(int j) const { return cw_basis.col(j); }

  /// Coordinates of a (complex) rep matrix in the real basis.
  CVec to_coords(const CMat& x) const;
  CMat to_matrix(const CVec& coords) const;

  /// ad(Z) in the real basis; Z given in real-basis coordinates.
  CMat ad_real(const CVec& z) const;
  /// ad(Z) in the Cartan-Weyl basis.
  CMat ad_matrix(const CVec& z) const;

  /// Lie bracket of coordinate vectors.
  CVec bracket(const CVec& x, const CVec& y) const;
};

LieAlgebraData build_sun(int n);
inline LieAlgebraData build_su2() { return build_sun(2); }
inline LieAlgebraData build_su3() { return build_sun(3); }
LieAlgebraData build_algebra(const std::string& name);

/// Killing form, bilinear: trace(ad X ad Y).
cplx killing(const LieAlgebraData& g, const CVec& x, const CVec& y);

/// (X, Y)_g := -K(conj X, Y); conjugate-linear in the first slot.
cplx inner_g(const LieAlgebraData& g, const CVec& x, const CVec& y);

/// Conjugation of g^c with respect to the real form g.
inline CVec conj_g(const CVec& x) { return x.conjugate(); }

/// exp of an element of g in the defining representation.
CMat exp_rep(const CMat& x);

/// exp of a square matrix by scaling-and-squaring Taylor series.
CMat exp_series(const CMat& m);

struct LieAlgebraResiduals {
  double antisymmetry = 0;
  double jacobi = 0;
  double killing_orthonormality = 0;  // |(-K) - I| on the real basis
  double cw_orthonormality = 0;       // |(u_j,u_k) - delta|
  double cartan_eigen = 0;            // [H, X_{+-a}] -+ a(H) X_{+-a}
  double conjugation = 0;             // conj(u_j) - u_{jbar}
  double ad_skew = 0;                 // ad(Z) + ad(Z)^dagger for real Z
  double max_killing_eigen = 0;       // largest eigenvalue of K (must be < 0)
};

LieAlgebraResiduals check_lie_algebra(const LieAlgebraData& g);

}  // namespace wnlab
