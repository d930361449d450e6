#include "reftor/holomorphy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "reftor/errors.hpp"
#include "reftor/linalg.hpp"

namespace reftor {

ComplexMatrix MatrixPolynomial::operator()(Complex z) const {
  if (coeffs.empty()) throw StructuralError("matrix polynomial without coefficients");
  const Complex w = antiholomorphic ? std::conj(z) : z;
  // Horner
  ComplexMatrix out = coeffs.back();
  for (size_t k = coeffs.size() - 1; k-- > 0;) out = (out * w + coeffs[k]).eval();
  return out;
}

Eigen::Index MatrixPolynomial::rows() const { return coeffs.empty() ? 0 : coeffs.front().rows(); }
Eigen::Index MatrixPolynomial::cols() const { return coeffs.empty() ? 0 : coeffs.front().cols(); }

MatrixPolynomial MatrixPolynomial::constant(const ComplexMatrix& m) { return MatrixPolynomial{{m}, false}; }

MatrixPolynomial MatrixPolynomial::linear(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw StructuralError("linear family: shape mismatch");
  return MatrixPolynomial{{a, b}, false};
}

Representation RepresentationCurve::at(Complex z) const {
  Representation r;
  r.rank = rank;
  for (const auto& [name, poly] : generators) {
    ComplexMatrix m = poly(z);
    if (m.rows() != rank || m.cols() != rank)
      throw StructuralError("curve generator '" + name + "' is not " + std::to_string(rank) + "x" + std::to_string(rank));
    r.generators.emplace(name, std::move(m));
  }
  return r;
}

void RepresentationCurve::validate(const CWData& k, double tol) const {
  const Complex samples[] = {0.0, radius, Complex(0.0, radius), -radius, Complex(0.5 * radius, -0.5 * radius)};
  for (Complex z : samples) {
    const double res = validate_representation(at(z), k);
    if (res > tol)
      throw DomainError("curve leaves the representation variety at z = (" + std::to_string(z.real()) + ", " +
                        std::to_string(z.imag()) + "): relation residual " + std::to_string(res));
  }
}

GradedComplex ComplexFamily::at(Complex z) const {
  std::vector<ComplexMatrix> d;
  d.reserve(diffs.size());
  for (const auto& p : diffs) d.push_back(p(z));
  return GradedComplex(dims, d);
}

ChiralityComplex ChiralityFamily::at(Complex z) const { return ChiralityComplex{complex.at(z), gamma, metric}; }

double cr_residual(const ScalarFunction& g, Complex z0, double h) {
  if (!(h > 0.0)) throw DomainError("cr_residual: step must be positive");
  const Complex ih(0.0, h);
  const Complex v = (g(z0 + h) - g(z0 - h)) + Complex(0.0, 1.0) * (g(z0 + ih) - g(z0 - ih));
  return std::abs(v) / (4.0 * h);
}

CRCertificate certify_holomorphic(const ScalarFunction& g, Complex z0, double h, double tol, double min_order) {
  CRCertificate c;
  c.h = h;
  c.residual = cr_residual(g, z0, h);
  c.residual_half = cr_residual(g, z0, 0.5 * h);
  double scale = std::abs(g(z0));
  for (Complex dz : {Complex(h), Complex(-h), Complex(0.0, h), Complex(0.0, -h)}) scale = std::max(scale, std::abs(g(z0 + dz)));
  const double floor = 64.0 * std::numeric_limits<double>::epsilon() * std::max(scale, 1.0) / (0.5 * h);
  c.at_roundoff = c.residual < floor && c.residual_half < floor;
  c.order = c.at_roundoff ? std::numeric_limits<double>::quiet_NaN() : std::log2(c.residual / c.residual_half);
  c.pass = c.residual < tol && (c.at_roundoff || c.order >= min_order);
  return c;
}

SectionValue section_ratio(const SectionModel& model, Complex z) {
  const ChiralityComplex w = model.model.at(z);
  const GradedComplex target = build_cochain(model.cw, model.curve.at(z));
  if (w.m() != target.top_degree()) throw StructuralError("model and target complexes have different lengths");
  std::vector<ComplexMatrix> maps;
  for (const auto& p : model.iso) maps.push_back(p(z));
  const ChainMap iso{w.complex, target, maps};
  const GradedComplex c = cone(iso);
  if (!cohomology(c).acyclic()) throw DomainError("I_z is not a quasi-isomorphism (cone not acyclic)");
  if (!cohomology(target).acyclic()) throw DomainError("target complex is not acyclic at this z");

  SectionValue out;
  const OddSignatureData s = odd_signature(w);
  const SpectralSplit whole = spectral_split(s, 2.0 * (1.0 + frobenius(s.b2)));
  const Complex rho_w = refined_torsion_element(s, whole).coordinate;
  out.ratio = rho_w / sigma(model.cw, model.curve.at(z)).coordinate;
  out.cone_torsion = torsion_acyclic(c).coordinate;
  out.cone_constant = out.ratio / out.cone_torsion;
  return out;
}

void check_uniform_admissibility(const ChiralityFamily& family, double lambda, Complex z0, double ring) {
  auto small_count = [&](Complex z) { return spectral_split(odd_signature(family.at(z)), lambda).small_rank; };
  const int base = small_count(z0);
  constexpr int kRing = 16;
  for (int k = 0; k < kRing; ++k) {
    const Complex z = z0 + std::polar(ring, 2.0 * std::numbers::pi * k / kRing);
    if (small_count(z) != base)
      throw SpectralGapError("an eigenvalue of B^2 crosses the cut " + std::to_string(lambda) + " within distance " +
                             std::to_string(ring) + " of z0");
  }
}

ScalarFunction graded_determinant_curve(const ChiralityFamily& family, double lambda, double theta) {
  return [family, lambda, theta](Complex z) { return graded_determinant(odd_signature(family.at(z)), lambda, theta); };
}

CRCertificate graded_det_along_curve(const ChiralityFamily& family, double lambda, double theta, Complex z0, double h,
                                    double ring, double tol) {
  check_uniform_admissibility(family, lambda, z0, std::max(ring, 2.0 * h));
  return certify_holomorphic(graded_determinant_curve(family, lambda, theta), z0, h, tol);
}

SignedProjections signed_projections(const ChiralityComplex& x, double lambda) {
  const OddSignatureData s = odd_signature(x);
  const SpectralSplit split = spectral_split(s, lambda);
  const int n = s.offsets.back();
  SignedProjections out;
  out.large = split.large;
  const ComplexMatrix image_d = column_space(s.d * split.large);
  const ComplexMatrix image_gd = column_space(s.gamma * s.d * split.large);
  const ComplexMatrix rest = column_space(split.small);
  if (image_d.cols() + image_gd.cols() + rest.cols() != n)
    throw DegeneracyError("im(D P), im(Gamma D P) and range(I - P) do not span the total space");
  out.plus = oblique_projector(image_d, hstack(image_gd, rest));
  out.minus = oblique_projector(image_gd, hstack(image_d, rest));
  return out;
}

ProjectionDerivative projection_derivative_check(const ChiralityFamily& family, double lambda, Complex z0, double h,
                                                 bool richardson) {
  check_uniform_admissibility(family, lambda, z0, 2.0 * h);
  const SignedProjections p0 = signed_projections(family.at(z0), lambda);
  const auto central = [&](double step) {
    const SignedProjections pp = signed_projections(family.at(z0 + step), lambda);
    const SignedProjections pm = signed_projections(family.at(z0 - step), lambda);
    return std::pair<ComplexMatrix, ComplexMatrix>{(pp.plus - pm.plus) / (2.0 * step),
                                                   (pp.minus - pm.minus) / (2.0 * step)};
  };
  auto [dplus, dminus] = central(h);
  if (richardson) {
    const auto [hplus, hminus] = central(0.5 * h);
    dplus = (4.0 * hplus - dplus) / 3.0;
    dminus = (4.0 * hminus - dminus) / 3.0;
  }
  const Eigen::Index n = p0.plus.rows();
  const ComplexMatrix id = ComplexMatrix::Identity(n, n);
  ProjectionDerivative out;
  out.offdiag_magnitude = std::numeric_limits<double>::infinity();
  for (int sign = 0; sign < 2; ++sign) {
    const ComplexMatrix& p = sign == 0 ? p0.plus : p0.minus;
    const ComplexMatrix& d = sign == 0 ? dplus : dminus;
    const ComplexMatrix q = id - p;
    out.diag_residual = std::max(out.diag_residual, frobenius(p * d * p) + frobenius(q * d * q));
    out.offdiag_magnitude = std::min(out.offdiag_magnitude, frobenius(p * d * q) + frobenius(q * d * p));
  }
  return out;
}

}  // namespace reftor
