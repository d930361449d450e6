#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "reftor/chain_complex.hpp"
#include "reftor/cw_twisted.hpp"
#include "reftor/refined_finite.hpp"

namespace reftor {

/// Matrix with entries polynomial in z: sum_k coeffs[k] z^k. With
/// `antiholomorphic` set the polynomial is evaluated at conj(z) (used for
/// control curves).
struct MatrixPolynomial {
  std::vector<ComplexMatrix> coeffs;
  bool antiholomorphic = false;

  ComplexMatrix operator()(Complex z) const;
  Eigen::Index rows() const;
  Eigen::Index cols() const;
  static MatrixPolynomial constant(const ComplexMatrix& m);
  /// a + z b
  static MatrixPolynomial linear(const ComplexMatrix& a, const ComplexMatrix& b);
};

/// z -> representation; every generator matrix is polynomial in z.
struct RepresentationCurve {
  int rank = 1;
  std::map<std::string, MatrixPolynomial> generators;
  double radius = 0.25;

  Representation at(Complex z) const;
  /// Relation residuals at 5 points of the disc |z| <= radius; DomainError if
  /// any exceeds tol.
  void validate(const CWData& k, double tol = 1e-10) const;
};

/// z -> GradedComplex with polynomial differentials.
struct ComplexFamily {
  std::vector<int> dims;
  std::vector<MatrixPolynomial> diffs;

  GradedComplex at(Complex z) const;
};

/// z -> ChiralityComplex; Gamma and the metric do not depend on z.
struct ChiralityFamily {
  ComplexFamily complex;
  std::vector<ComplexMatrix> gamma;
  std::vector<ComplexMatrix> metric;

  ChiralityComplex at(Complex z) const;
};

using ScalarFunction = std::function<Complex(Complex)>;

/// |(g(z+h) - g(z-h)) + i (g(z+ih) - g(z-ih))| / (4h), an estimate of |dg/dzbar|.
double cr_residual(const ScalarFunction& g, Complex z0, double h);

struct CRCertificate {
  double h = 0.0;
  double residual = 0.0;       // at h
  double residual_half = 0.0;  // at h / 2
  /// log2(residual / residual_half); NaN when both residuals sit at the
  /// roundoff floor (nothing left to converge).
  double order = 0.0;
  /// Both residuals below the roundoff floor 64 eps max|g| / (h / 2).
  bool at_roundoff = false;
  /// residual < tol and (order >= min_order or at_roundoff).
  bool pass = false;
};

CRCertificate certify_holomorphic(const ScalarFunction& g, Complex z0, double h, double tol = 1e-6,
                                  double min_order = 1.8);

/// Source model W(z) with a z-independent chirality, the CW complex and
/// curve for the target C(K, gamma(z)), and the quasi-isomorphism
/// I_z: W(z) -> C(K, gamma(z)) given per degree.
struct SectionModel {
  ChiralityFamily model;
  CWData cw;
  RepresentationCurve curve;
  std::vector<MatrixPolynomial> iso;
};

struct SectionValue {
  /// rho_Gamma(W(z)) / tau(gamma(z)), computed directly.
  Complex ratio;
  /// Torsion of cone(I_z) with the standard element.
  Complex cone_torsion;
  /// ratio / cone_torsion: the cone of I_z has torsion +-tau_std(W) / tau(C), so
  /// this is the z-independent constant rho_Gamma(W) / tau_std(W), up to sign.
  Complex cone_constant;
};

/// DomainError if I_z is not a chain map or the cone is not acyclic.
SectionValue section_ratio(const SectionModel& model, Complex z);

/// z -> Det_gr(B(z)) for the family; raises SpectralGapError if the number
/// of B^2 eigenvalues of modulus <= lambda changes over the stencil points and
/// a ring of radius `ring` around z0 (admissibility lost near z0).
ScalarFunction graded_determinant_curve(const ChiralityFamily& family, double lambda, double theta);
void check_uniform_admissibility(const ChiralityFamily& family, double lambda, Complex z0, double ring);

/// Admissibility on the ring of radius max(ring, 2h), then certify_holomorphic
/// of the graded determinant at z0.
CRCertificate graded_det_along_curve(const ChiralityFamily& family, double lambda, double theta, Complex z0, double h,
                                    double ring = 0.0, double tol = 1e-6);

/// P_+ = projection onto im(D P) along im(Gamma D P) + range(I - P), and P_-
/// with the roles of D and Gamma D exchanged; P = Pi_{(lambda, inf)}.
struct SignedProjections {
  ComplexMatrix large, plus, minus;
};

SignedProjections signed_projections(const ChiralityComplex& x, double lambda);

struct ProjectionDerivative {
  /// max over +- of |P P' P| + |(I - P) P' (I - P)| (Frobenius).
  double diag_residual = 0.0;
  /// min over +- of |P P' (I - P)| + |(I - P) P' P|.
  double offdiag_magnitude = 0.0;
};

/// Central difference P' = (P(z0 + h) - P(z0 - h)) / 2h; with `richardson`
/// the O(h^2) term is removed using the step h / 2.
ProjectionDerivative projection_derivative_check(const ChiralityFamily& family, double lambda, Complex z0,
                                                 double h, bool richardson = false);

}  // namespace reftor
