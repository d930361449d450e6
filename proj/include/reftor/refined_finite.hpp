#pragma once

#include <optional>
#include <vector>

#include "reftor/chain_complex.hpp"

namespace reftor {

/// Angular distance from the branch ray below which an eigenvalue is rejected.
inline constexpr double kAgmonTolerance = 1e-6;

/// A spectral cut closer than this (relative to 1 + lambda) to an eigenvalue
/// modulus of B^2 is rejected.
inline constexpr double kGapTolerance = 1e-6;

/// Odd-length complex 0 -> C^0 -> ... -> C^m -> 0 (m = 2r - 1) with an
/// involution Gamma_k: C^k -> C^{m-k} and positive-definite Hermitian inner
/// products H_k (<x, y> = x^* H_k y).
struct ChiralityComplex {
  GradedComplex complex;
  std::vector<ComplexMatrix> gamma;
  std::vector<ComplexMatrix> metric;

  int m() const { return complex.top_degree(); }
  /// Throws StructuralError on shape errors, even length, or metrics that are
  /// not Hermitian positive definite; DomainError if Gamma is not an
  /// h-self-adjoint involution (tolerance relative 1e-9).
  void validate() const;
};

/// Offsets of the degree blocks inside the total space.
std::vector<int> degree_offsets(const GradedComplex& c);

/// Total-space matrices of D, Gamma and the metric.
ComplexMatrix total_differential(const GradedComplex& c);
ComplexMatrix total_gamma(const ChiralityComplex& x);
ComplexMatrix total_metric(const ChiralityComplex& x);

/// Adjoint with respect to the total metric: H^{-1} T^* H.
ComplexMatrix h_adjoint(const ChiralityComplex& x, const ComplexMatrix& t);

/// D' = (Gamma D Gamma)^{*h}, so that Gamma D = (D')^{*h} Gamma.
GradedComplex dual_differential(const ChiralityComplex& x);

struct OddSignatureData {
  ChiralityComplex x;
  std::vector<int> offsets;
  ComplexMatrix d, gamma;
  /// B = Gamma D + D Gamma and B^2 on the total space.
  ComplexMatrix b, b2;
  /// Degree blocks of B^2 (B^2 preserves degree).
  std::vector<ComplexMatrix> b2_blocks;
  /// Indices of the even-degree coordinates in the total space.
  std::vector<int> even_coordinates;
};

OddSignatureData odd_signature(const ChiralityComplex& x);

struct SpectralSplit {
  double lambda = 0.0;
  /// Pi_{[0, lambda]} and Pi_{(lambda, inf)} on the total space.
  ComplexMatrix small, large;
  std::vector<ComplexMatrix> small_blocks;
  int small_rank = 0;
};

/// Spectral projectors of B^2 for eigenvalue moduli in [0, lambda] and
/// (lambda, inf), one ordered Schur form per degree. Eigenvalues of modulus
/// below 1e-6 (1 + |B^2|_F) count as zero. Throws SpectralGapError if lambda is
/// within kGapTolerance (1 + lambda) of a nonzero eigenvalue modulus.
SpectralSplit spectral_split(const OddSignatureData& s, double lambda);

/// log|mu| + i arg(mu) with arg taken in (theta, theta + 2 pi).
Complex branch_log(Complex mu, double theta);

/// Restrictions of B to the even part of range Pi_{(lambda, inf)}, split into
/// ker(D Gamma) (plus part) and ker(Gamma D) (minus part).
struct EvenSplitting {
  ComplexMatrix plus_basis, minus_basis;
  ComplexMatrix b_plus, b_minus;
};

EvenSplitting even_splitting(const OddSignatureData& s, const SpectralSplit& split);

/// Det_theta(B^+) / Det_theta(-B^-) on the (lambda, inf) part. In finite
/// dimensions exp(sum log_theta mu) = prod mu, so the value does not depend on
/// theta, which is nevertheless checked for admissibility (AgmonError if some
/// eigenvalue of B_even^{(lambda,inf)} lies within kAgmonTolerance of the rays
/// theta, theta + pi). Empty part gives 1.
Complex graded_determinant(const OddSignatureData& s, double lambda, double theta);

/// exp(sum log_theta mu(B+) - sum log_theta mu(-B-)) for explicit restrictions.
Complex graded_determinant_from_parts(const ComplexMatrix& b_plus, const ComplexMatrix& b_minus, double theta);

/// The refined torsion element of the small complex range Pi_{[0,lambda]},
/// pushed to Det H(C). The small-complex bases are w_j (j < r) and
/// w_{m-j} = Gamma w_j; the cohomology basis is `h` (default: the automatic
/// basis of the full complex), carried into the small complex by Pi.
/// `small_bases`, if given, replaces the w_j for j < r (columns must span
/// range Pi_j).
DetLineElement refined_torsion_element(const OddSignatureData& s, const SpectralSplit& split,
                                       const std::optional<CohomologyBasis>& h = std::nullopt,
                                       const std::optional<std::vector<ComplexMatrix>>& small_bases = std::nullopt);

/// rho = Det_gr * rho_{[0, lambda]}; independent of lambda and theta.
DetLineElement rho(const ChiralityComplex& x, double lambda, double theta,
                   const std::optional<CohomologyBasis>& h = std::nullopt);

struct EtaXi {
  /// (1/2)(#{arg_theta mu in (theta, theta+pi)} - #{arg_theta mu in (theta+pi, theta+2pi)})
  /// over the eigenvalues of B_even on the (lambda, inf) part.
  double eta = 0.0;
  /// -(1/2) sum_k (-1)^k k sum log_{2 theta} mu over spec B^2_k on (lambda, inf).
  Complex xi;
  /// (1/2) sum_k (-1)^k k #spec B^2_k on (lambda, inf).
  double xi_prime = 0.0;
  /// (1/2) sum_k (-1)^k k #(nonzero spec B^2_k).
  double xi_hat = 0.0;
  /// exp(xi - i pi xi' - i pi eta); equals the graded determinant.
  Complex reconstructed;
};

EtaXi eta_xi_finite(const OddSignatureData& s, double lambda, double theta);

/// Admissible cuts: 0 when B^2 has a nonzero eigenvalue, midpoints between
/// consecutive distinct nonzero moduli, and twice the largest modulus.
std::vector<double> admissible_cuts(const OddSignatureData& s);

/// Direct sum of two chirality complexes of the same length.
ChiralityComplex direct_sum(const ChiralityComplex& x, const ChiralityComplex& y);

}  // namespace reftor
