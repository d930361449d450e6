#pragma once

#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace reftor {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

/// Throws StructuralError if any entry is NaN or infinite.
void require_finite(const ComplexMatrix& m, const char* what);

/// Numerical rank of a matrix together with the margin information used to
/// flag ill-conditioned rank decisions.
struct RankInfo {
  int rank = 0;
  double threshold = 0.0;
  /// True when some singular value falls within a factor 10 of the threshold.
  bool ill_conditioned = false;
};

/// Relative rank tolerance: singular values below rel_tol * sigma_max are zero.
inline constexpr double kRankTolerance = 1e-8;

/// Singular values below this absolute floor are zero regardless of scale.
inline constexpr double kAbsoluteRankFloor = 1e-13;

RankInfo numerical_rank(const ComplexMatrix& m, double rel_tol = kRankTolerance);

/// Orthonormal basis (columns) of the column space.
ComplexMatrix column_space(const ComplexMatrix& m, double rel_tol = kRankTolerance);

/// Orthonormal basis (columns) of the null space.
ComplexMatrix null_space(const ComplexMatrix& m, double rel_tol = kRankTolerance);

/// Orthonormal basis of the orthogonal complement of span(sub) inside span(outer).
/// Both arguments are matrices whose columns span the respective subspaces.
ComplexMatrix complement_in(const ComplexMatrix& outer, const ComplexMatrix& sub,
                            double rel_tol = kRankTolerance);

/// Least-squares coordinates x with basis * x = v; throws DegeneracyError if
/// the residual exceeds tol * (1 + |v|).
ComplexMatrix coordinates_in(const ComplexMatrix& basis, const ComplexMatrix& v,
                             double tol = 1e-8);

/// m with every singular value below the absolute `floor` set to zero. Used
/// where a derived matrix should be judged on the scale of its source rather
/// than its own (e.g. a restriction that is roundoff only).
ComplexMatrix truncate_singular_values(const ComplexMatrix& m, double floor);

/// Oblique projector onto span(range) along span(kernel). The two column sets
/// must together form a basis of the ambient space.
ComplexMatrix oblique_projector(const ComplexMatrix& range, const ComplexMatrix& kernel);

/// Determinant with LU; the empty matrix has determinant 1.
Complex determinant(const ComplexMatrix& m);

/// Frobenius norm, returning 0 for empty matrices.
double frobenius(const ComplexMatrix& m);

/// Horizontal concatenation [a b]; either side may have zero columns.
ComplexMatrix hstack(const ComplexMatrix& a, const ComplexMatrix& b);

/// Block diagonal matrix diag(a, b).
ComplexMatrix block_diag(const ComplexMatrix& a, const ComplexMatrix& b);

/// Matrix exponential (Eigen MatrixFunctions, scaling and squaring).
ComplexMatrix expm(const ComplexMatrix& a);

/// Ordered complex Schur decomposition a = U T U^*, with the eigenvalues
/// accepted by `select` moved to the leading block by adjacent Givens swaps.
/// Returns the size of that block.
int ordered_schur(const ComplexMatrix& a, const std::function<bool(Complex)>& select,
                  ComplexMatrix& u, ComplexMatrix& t);

/// Projector built from an ordered Schur form whose leading `k` diagonal
/// entries are the selected eigenvalues (triangular Sylvester solve).
ComplexMatrix projector_from_schur(const ComplexMatrix& u, const ComplexMatrix& t, int k);

/// Spectral (Riesz) projector onto the invariant subspace of the eigenvalues
/// accepted by `select`. Valid for defective matrices.
ComplexMatrix spectral_projector(const ComplexMatrix& a, const std::function<bool(Complex)>& select);

/// Eigenvalues (complex Schur diagonal).
ComplexVector eigenvalues(const ComplexMatrix& a);

}  // namespace reftor
