#include "reftor/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <unsupported/Eigen/MatrixFunctions>

#include "reftor/errors.hpp"

namespace reftor {

void require_finite(const ComplexMatrix& m, const char* what) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag()))
        throw StructuralError(std::string(what) + ": non-finite entry");
}

namespace {

Eigen::JacobiSVD<ComplexMatrix> full_svd(const ComplexMatrix& m) {
  return Eigen::JacobiSVD<ComplexMatrix>(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
}

double rank_threshold(const Eigen::VectorXd& sv, double rel_tol) {
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  return std::max(rel_tol * smax, kAbsoluteRankFloor);
}

}  // namespace

RankInfo numerical_rank(const ComplexMatrix& m, double rel_tol) {
  RankInfo info;
  if (m.size() == 0) return info;
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  const Eigen::VectorXd& sv = svd.singularValues();
  info.threshold = rank_threshold(sv, rel_tol);
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > info.threshold) ++info.rank;
    if (sv(i) > info.threshold / 10.0 && sv(i) < info.threshold * 10.0 && sv(0) > kAbsoluteRankFloor)
      info.ill_conditioned = true;
  }
  return info;
}

ComplexMatrix column_space(const ComplexMatrix& m, double rel_tol) {
  if (m.rows() == 0) return ComplexMatrix(0, 0);
  if (m.cols() == 0) return ComplexMatrix(m.rows(), 0);
  auto svd = full_svd(m);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double thr = rank_threshold(sv, rel_tol);
  Eigen::Index r = 0;
  while (r < sv.size() && sv(r) > thr) ++r;
  return svd.matrixU().leftCols(r);
}

ComplexMatrix null_space(const ComplexMatrix& m, double rel_tol) {
  const Eigen::Index n = m.cols();
  if (n == 0) return ComplexMatrix(0, 0);
  if (m.rows() == 0) return ComplexMatrix::Identity(n, n);
  auto svd = full_svd(m);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double thr = rank_threshold(sv, rel_tol);
  Eigen::Index r = 0;
  while (r < sv.size() && sv(r) > thr) ++r;
  return svd.matrixV().rightCols(n - r);
}

ComplexMatrix truncate_singular_values(const ComplexMatrix& m, double floor) {
  if (m.size() == 0) return m;
  Eigen::JacobiSVD<ComplexMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::VectorXd sv = svd.singularValues();
  bool changed = false;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > 0.0 && sv(i) < floor) {
      sv(i) = 0.0;
      changed = true;
    }
  if (!changed) return m;
  return svd.matrixU() * sv.cast<Complex>().asDiagonal() * svd.matrixV().adjoint();
}

ComplexMatrix complement_in(const ComplexMatrix& outer, const ComplexMatrix& sub, double rel_tol) {
  const ComplexMatrix q_outer = column_space(outer, rel_tol);
  const Eigen::Index n = outer.rows();
  if (q_outer.cols() == 0) return ComplexMatrix(n, 0);
  const ComplexMatrix q_sub = sub.cols() > 0 ? column_space(sub, rel_tol) : ComplexMatrix(n, 0);
  // Remove the sub-space component, then take an orthonormal basis of what remains.
  ComplexMatrix residual = q_outer;
  if (q_sub.cols() > 0) residual -= q_sub * (q_sub.adjoint() * q_outer);
  const Eigen::Index want = q_outer.cols() - q_sub.cols();
  if (want <= 0) return ComplexMatrix(n, 0);
  auto svd = full_svd(residual);
  return svd.matrixU().leftCols(want);
}

ComplexMatrix coordinates_in(const ComplexMatrix& basis, const ComplexMatrix& v, double tol) {
  if (basis.cols() == 0) {
    if (v.size() > 0 && v.norm() > tol) throw DegeneracyError("vector outside empty span");
    return ComplexMatrix(0, v.cols());
  }
  ComplexMatrix x = basis.completeOrthogonalDecomposition().solve(v);
  const double res = (basis * x - v).norm();
  if (res > tol * (1.0 + v.norm()))
    throw DegeneracyError("vector not in span of basis (residual " + std::to_string(res) + ")");
  return x;
}

ComplexMatrix oblique_projector(const ComplexMatrix& range, const ComplexMatrix& kernel) {
  const Eigen::Index n = std::max(range.rows(), kernel.rows());
  if (range.cols() + kernel.cols() != n)
    throw StructuralError("oblique_projector: subspaces are not complementary");
  ComplexMatrix m = hstack(range, kernel);
  Eigen::PartialPivLU<ComplexMatrix> lu(m);
  if (std::abs(lu.determinant()) < 1e-300) throw DegeneracyError("oblique_projector: singular basis");
  ComplexMatrix head = ComplexMatrix::Zero(n, n);
  head.leftCols(range.cols()) = range;
  return head * lu.inverse();
}

Complex determinant(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) throw StructuralError("determinant of non-square matrix");
  if (m.rows() == 0) return Complex(1.0, 0.0);
  return m.partialPivLu().determinant();
}

double frobenius(const ComplexMatrix& m) { return m.size() == 0 ? 0.0 : m.norm(); }

ComplexMatrix hstack(const ComplexMatrix& a, const ComplexMatrix& b) {
  const Eigen::Index rows = a.cols() > 0 ? a.rows() : b.rows();
  ComplexMatrix out(rows, a.cols() + b.cols());
  if (a.cols() > 0) out.leftCols(a.cols()) = a;
  if (b.cols() > 0) out.rightCols(b.cols()) = b;
  return out;
}

ComplexMatrix block_diag(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out = ComplexMatrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

ComplexMatrix expm(const ComplexMatrix& a) {
  if (a.size() == 0) return a;
  return a.exp();
}

ComplexVector eigenvalues(const ComplexMatrix& a) {
  if (a.rows() == 0) return ComplexVector(0);
  Eigen::ComplexSchur<ComplexMatrix> schur(a, false);
  return schur.matrixT().diagonal();
}

int ordered_schur(const ComplexMatrix& a, const std::function<bool(Complex)>& select,
                  ComplexMatrix& u, ComplexMatrix& t) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n) throw StructuralError("ordered_schur: matrix not square");
  if (n == 0) {
    u = t = ComplexMatrix(0, 0);
    return 0;
  }
  Eigen::ComplexSchur<ComplexMatrix> schur(a);
  u = schur.matrixU();
  t = schur.matrixT();
  std::vector<bool> flags(static_cast<size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) flags[static_cast<size_t>(i)] = select(t(i, i));

  // Swap diagonal entries k and k+1 with a 2x2 unitary built from the
  // eigenvector of the trailing entry.
  auto swap_adjacent = [&](Eigen::Index k) {
    const Complex t11 = t(k, k), t22 = t(k + 1, k + 1), t12 = t(k, k + 1);
    Eigen::Vector2cd x(t12, t22 - t11);
    const double nx = x.norm();
    if (nx == 0.0) {
      std::swap(flags[static_cast<size_t>(k)], flags[static_cast<size_t>(k + 1)]);
      return;
    }
    x /= nx;
    Eigen::Matrix2cd q;
    q.col(0) = x;
    q.col(1) << -std::conj(x(1)), std::conj(x(0));
    t.middleRows(k, 2) = q.adjoint() * t.middleRows(k, 2);
    t.middleCols(k, 2) = t.middleCols(k, 2) * q;
    u.middleCols(k, 2) = u.middleCols(k, 2) * q;
    t(k + 1, k) = Complex(0.0, 0.0);
    t(k, k) = t22;
    t(k + 1, k + 1) = t11;
    std::swap(flags[static_cast<size_t>(k)], flags[static_cast<size_t>(k + 1)]);
  };

  int pos = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!flags[static_cast<size_t>(i)]) continue;
    for (Eigen::Index k = i - 1; k >= pos; --k) swap_adjacent(k);
    ++pos;
  }
  return pos;
}

ComplexMatrix projector_from_schur(const ComplexMatrix& u, const ComplexMatrix& t, int k) {
  const Eigen::Index n = t.rows();
  if (k == 0) return ComplexMatrix::Zero(n, n);
  if (k == n) return ComplexMatrix::Identity(n, n);
  const Eigen::Index m = n - k;
  const ComplexMatrix t11 = t.topLeftCorner(k, k);
  const ComplexMatrix t12 = t.topRightCorner(k, m);
  const ComplexMatrix t22 = t.bottomRightCorner(m, m);
  // Solve t11 r - r t22 = t12 column by column (both blocks upper triangular).
  ComplexMatrix r(k, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    ComplexVector rhs = t12.col(j);
    for (Eigen::Index i = 0; i < j; ++i) rhs += r.col(i) * t22(i, j);
    ComplexMatrix shifted = t11;
    shifted.diagonal().array() -= t22(j, j);
    for (Eigen::Index d = 0; d < k; ++d)
      if (std::abs(shifted(d, d)) == 0.0)
        throw DegeneracyError("spectral projector: selected and rejected eigenvalues coincide");
    r.col(j) = shifted.triangularView<Eigen::Upper>().solve(rhs);
  }
  ComplexMatrix pt = ComplexMatrix::Zero(n, n);
  pt.topLeftCorner(k, k).setIdentity();
  pt.topRightCorner(k, m) = r;
  return u * pt * u.adjoint();
}

ComplexMatrix spectral_projector(const ComplexMatrix& a, const std::function<bool(Complex)>& select) {
  ComplexMatrix u, t;
  const int k = ordered_schur(a, select, u, t);
  return projector_from_schur(u, t, k);
}

}  // namespace reftor
