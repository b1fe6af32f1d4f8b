#include "wnlab/lie_algebra.hpp"

#include <cmath>
#include <stdexcept>

namespace wnlab {

namespace {

CMat matrix_unit(int n, int j, int k) {
  CMat e = CMat::Zero(n, n);
  e(j, k) = 1.0;
  return e;
}

// Generalized Gell-Mann family times i: Cartan (diagonal) elements first.
std::vector<CMat> raw_sun_basis(int n) {
  const cplx I(0, 1);
  std::vector<CMat> out;
  for (int l = 1; l < n; ++l) {
    CMat d = CMat::Zero(n, n);
    for (int j = 0; j < l; ++j) d(j, j) = I;
    d(l, l) = -static_cast<double>(l) * I;
    out.push_back(d);
  }
  for (int j = 0; j < n; ++j) {
    for (int k = j + 1; k < n; ++k) {
      out.push_back(matrix_unit(n, j, k) - matrix_unit(n, k, j));
      out.push_back(I * (matrix_unit(n, j, k) + matrix_unit(n, k, j)));
    }
  }
  return out;
}

void fill_tables(LieAlgebraData& g) {
  const int d = g.dim_g;
  RMat gram(d, d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) gram(a, b) = (g.basis[a] * g.basis[b]).trace().real();
  g.trace_gram_inv = gram.inverse();

  g.structure.assign(static_cast<std::size_t>(d) * d * d, 0.0);
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) {
      CMat comm = g.basis[a] * g.basis[b] - g.basis[b] * g.basis[a];
      CVec x = g.to_coords(comm);
      for (int k = 0; k < d; ++k)
        g.structure[(static_cast<std::size_t>(a) * d + b) * d + k] = x(k).real();
    }
  }
  g.killing_matrix.resize(d, d);
  for (int a = 0; a < d; ++a) {
    CVec ea = CVec::Unit(d, a);
    for (int b = 0; b < d; ++b) {
      CVec eb = CVec::Unit(d, b);
      g.killing_matrix(a, b) = killing(g, ea, eb).real();
    }
  }
}

}  // namespace

CVec LieAlgebraData::to_coords(const CMat& x) const {
  CVec rhs(dim_g);
  for (int a = 0; a < dim_g; ++a) rhs(a) = (basis[a] * x).trace();
  return trace_gram_inv.cast<cplx>() * rhs;
}

CMat LieAlgebraData::to_matrix(const CVec& coords) const {
  CMat out = CMat::Zero(rep_dim, rep_dim);
  for (int a = 0; a < dim_g; ++a) out += coords(a) * basis[a];
  return out;
}

CMat LieAlgebraData::ad_real(const CVec& z) const {
  if (z.size() != dim_g) throw std::invalid_argument("ad_real: dimension mismatch");
  CMat m = CMat::Zero(dim_g, dim_g);
  for (int a = 0; a < dim_g; ++a) {
    if (z(a) == cplx(0)) continue;
    for (int b = 0; b < dim_g; ++b)
      for (int k = 0; k < dim_g; ++k) m(k, b) += z(a) * c(a, b, k);
  }
  return m;
}

CMat LieAlgebraData::ad_matrix(const CVec& z) const {
  return cw_basis.adjoint() * ad_real(z) * cw_basis;
}

CVec LieAlgebraData::bracket(const CVec& x, const CVec& y) const {
  return ad_real(x) * y;
}

cplx killing(const LieAlgebraData& g, const CVec& x, const CVec& y) {
  if (x.size() != g.dim_g || y.size() != g.dim_g)
    throw std::invalid_argument("killing: dimension mismatch");
  return (g.ad_real(x) * g.ad_real(y)).trace();
}

cplx inner_g(const LieAlgebraData& g, const CVec& x, const CVec& y) {
  return -killing(g, conj_g(x), y);
}

LieAlgebraData build_sun(int n) {
  if (n < 2) throw std::invalid_argument("build_sun: n must be >= 2");
  LieAlgebraData g;
  g.name = "su(" + std::to_string(n) + ")";
  g.rep_dim = n;
  g.dim_g = n * n - 1;
  g.cartan_dim = n - 1;
  g.num_pos_roots = n * (n - 1) / 2;
  g.basis = raw_sun_basis(n);
  fill_tables(g);

  // Gram-Schmidt against -K, in order, so the Cartan block stays first.
  const int d = g.dim_g;
  std::vector<CMat> ortho;
  RMat negk = -g.killing_matrix;
  RMat coeffs = RMat::Zero(d, d);  // column a = raw coords of new b_a
  for (int a = 0; a < d; ++a) {
    RVec v = RVec::Unit(d, a);
    for (int b = 0; b < a; ++b) {
      RVec w = coeffs.col(b);
      v -= (w.dot(negk * v)) * w;
    }
    v /= std::sqrt(v.dot(negk * v));
    coeffs.col(a) = v;
  }
  for (int a = 0; a < d; ++a) {
    CMat m = CMat::Zero(n, n);
    for (int b = 0; b < d; ++b) m += coeffs(b, a) * g.basis[b];
    ortho.push_back(m);
  }
  g.basis = std::move(ortho);
  fill_tables(g);

  const int n1 = g.cartan_dim, n2 = g.num_pos_roots;
  g.cw_basis = CMat::Zero(d, d);
  for (int q = 0; q < n1; ++q) g.cw_basis(q, q) = 1.0;
  int p = 0;
  for (int j = 0; j < n; ++j) {
    for (int k = j + 1; k < n; ++k, ++p) {
      CVec x = g.to_coords(matrix_unit(n, j, k));
      x /= std::sqrt(inner_g(g, x, x).real());
      g.cw_basis.col(n1 + p) = x;
      g.cw_basis.col(n1 + n2 + p) = conj_g(x);
    }
  }

  g.roots.resize(n2, n1);
  for (int pp = 0; pp < n2; ++pp) {
    CVec x = g.u(n1 + pp);
    for (int q = 0; q < n1; ++q)
      g.roots(pp, q) = inner_g(g, x, g.ad_real(g.u(q)) * x);
  }

  g.conj_index.resize(d);
  for (int j = 0; j < n1; ++j) g.conj_index[j] = j;
  for (int pp = 0; pp < n2; ++pp) {
    g.conj_index[n1 + pp] = n1 + n2 + pp;
    g.conj_index[n1 + n2 + pp] = n1 + pp;
  }
  return g;
}

LieAlgebraData build_algebra(const std::string& name) {
  if (name == "su2") return build_su2();
  if (name == "su3") return build_su3();
  throw std::invalid_argument("unknown algebra '" + name + "'");
}

CMat exp_series(const CMat& m) {
  const double norm = m.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  CMat a = m / std::ldexp(1.0, squarings);
  CMat term = CMat::Identity(m.rows(), m.cols());
  CMat sum = term;
  for (int k = 1; k <= 30; ++k) {
    term = term * a / static_cast<double>(k);
    sum += term;
    if (term.cwiseAbs().maxCoeff() < 1e-18) break;
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}

CMat exp_rep(const CMat& x) {
  // x anti-hermitian: x = -i h with h hermitian.
  const cplx I(0, 1);
  CMat h = I * x;
  h = 0.5 * (h + h.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<CMat> es(h);
  CVec phases = (-I * es.eigenvalues().cast<cplx>()).array().exp();
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

LieAlgebraResiduals check_lie_algebra(const LieAlgebraData& g) {
  LieAlgebraResiduals r;
  const int d = g.dim_g, n1 = g.cartan_dim, n2 = g.num_pos_roots;
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int k = 0; k < d; ++k) {
        r.antisymmetry = std::max(r.antisymmetry, std::abs(g.c(a, b, k) + g.c(b, a, k)));
        for (int e = 0; e < d; ++e) {
          // [[a,b],k] + [[b,k],a] + [[k,a],b], component e
          double jac = 0;
          for (int f = 0; f < d; ++f) {
            jac += g.c(a, b, f) * g.c(f, k, e) + g.c(b, k, f) * g.c(f, a, e) +
                   g.c(k, a, f) * g.c(f, b, e);
          }
          r.jacobi = std::max(r.jacobi, std::abs(jac));
        }
      }
  r.killing_orthonormality = ((-g.killing_matrix) - RMat::Identity(d, d)).cwiseAbs().maxCoeff();
  Eigen::SelfAdjointEigenSolver<RMat> ks(g.killing_matrix);
  r.max_killing_eigen = ks.eigenvalues().maxCoeff();

  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k) {
      cplx ip = inner_g(g, g.u(j), g.u(k));
      r.cw_orthonormality = std::max(r.cw_orthonormality, std::abs(ip - (j == k ? 1.0 : 0.0)));
    }
  for (int q = 0; q < n1; ++q) {
    CMat adh = g.ad_real(g.u(q));
    for (int p = 0; p < n2; ++p) {
      CVec xp = g.u(n1 + p), xm = g.u(n1 + n2 + p);
      r.cartan_eigen = std::max(r.cartan_eigen, (adh * xp - g.roots(p, q) * xp).norm());
      r.cartan_eigen = std::max(r.cartan_eigen, (adh * xm + g.roots(p, q) * xm).norm());
    }
  }
  for (int j = 0; j < d; ++j)
    r.conjugation = std::max(r.conjugation, (conj_g(g.u(j)) - g.u(g.conj_index[j])).norm());
  for (int a = 0; a < d; ++a) {
    CMat m = g.ad_matrix(CVec::Unit(d, a));
    r.ad_skew = std::max(r.ad_skew, (m + m.adjoint()).norm());
  }
  return r;
}

}  // namespace wnlab
