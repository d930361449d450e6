#include "reftor/spectral_1d.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "reftor/chain_complex.hpp"
#include "reftor/cw_twisted.hpp"
#include "reftor/errors.hpp"
#include "reftor/holomorphy.hpp"

namespace reftor {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr Complex kI{0.0, 1.0};

// c^{-2s} F(2s) at s = 0: value F(0), derivative -2 log c F(0) + 2 F'(0).
ZetaValue scaled_square(const ZetaValue& f, double c) {
  return ZetaValue{f.value, -2.0 * std::log(c) * f.value + 2.0 * f.derivative};
}

}  // namespace

void CircleModel::validate() const {
  if (!(length > 0.0)) throw StructuralError("circle: circumference must be positive");
  if (std::abs(holonomy) == 0.0) throw StructuralError("circle: holonomy must be nonzero");
  if (rank != 1) throw StructuralError("circle: only rank 1 is supported");
}

double CircleModel::theta() const {
  double t = std::arg(holonomy);
  if (t < 0.0) t += 2.0 * kPi;
  return t;
}

Complex CircleModel::frequency() const { return Complex(theta(), -std::log(modulus())); }

bool CircleModel::acyclic() const { return std::abs(holonomy - 1.0) > 1e-14; }

std::vector<Complex> circle_laplace_spectrum(const CircleModel& m, int cutoff) {
  m.validate();
  if (cutoff < 1) throw DomainError("circle_laplace_spectrum: cutoff must be >= 1");
  const Complex w = m.frequency();
  std::vector<Complex> out;
  out.reserve(2 * cutoff + 1);
  for (int n = -cutoff; n <= cutoff; ++n) {
    const Complex l = (2.0 * kPi * n + w) / m.length;
    out.push_back(l * l);
  }
  return out;
}

CircleFamilies circle_families(const CircleModel& m) {
  m.validate();
  CircleFamilies f;
  f.scale = 2.0 * kPi / m.length;
  if (!m.acyclic()) {
    f.a_plus = f.a_minus = 1.0;
    f.zero_modes = 1;
    return f;
  }
  if (m.holonomy.imag() == 0.0 && m.holonomy.real() > 0.0)
    throw DomainError("holonomy on the positive real axis: the two spectral families are not separated");
  f.a_plus = m.frequency() / (2.0 * kPi);
  f.a_minus = 1.0 - f.a_plus;
  return f;
}

LaplaceDeterminant zeta_det_laplacian_circle(const CircleModel& m, const ZetaEvaluator& z) {
  const CircleFamilies f = circle_families(m);
  const ZetaValue p = z.hurwitz(0.0, f.a_plus);
  const ZetaValue q = z.hurwitz(0.0, f.a_minus);
  const ZetaValue zeta = scaled_square(ZetaValue{p.value + q.value, p.derivative + q.derivative}, f.scale);
  LaplaceDeterminant out;
  out.zeta_at_zero = zeta.value;
  out.zeta_prime_at_zero = zeta.derivative;
  out.value = std::exp(-zeta.derivative);
  out.zero_modes = f.zero_modes;
  return out;
}

Complex eta_circle(const CircleModel& m, const ZetaEvaluator& z) {
  const CircleFamilies f = circle_families(m);
  // the scale factor c^{-s} is 1 at s = 0
  return z.hurwitz(0.0, f.a_plus).value - z.hurwitz(0.0, f.a_minus).value;
}

CircleGradedDeterminant graded_det_circle(const CircleModel& m, double theta_agmon, const ZetaEvaluator& z) {
  m.validate();
  if (!m.acyclic()) throw DomainError("graded_det_circle: lambda = 1 is not acyclic");
  if (!(theta_agmon > -kPi && theta_agmon < 0.0)) throw AgmonError("graded_det_circle: theta must lie in (-pi, 0)");
  const CircleFamilies f = circle_families(m);
  // The ray separates the families iff the extreme members n + a (n = 0) have
  // arguments in (theta, theta + pi); larger n only shrink |arg|.
  for (Complex a : {f.a_plus, f.a_minus}) {
    const double arg = std::arg(a);
    if (!(arg > theta_agmon && arg < theta_agmon + kPi))
      throw AgmonError("Agmon ray at angle " + std::to_string(theta_agmon) + " does not separate the spectrum");
  }
  const LaplaceDeterminant lap = zeta_det_laplacian_circle(m, z);
  CircleGradedDeterminant out;
  out.xi = -0.5 * lap.zeta_prime_at_zero;
  out.xi_prime = -0.5 * lap.zeta_at_zero;
  out.eta = eta_circle(m, z);
  out.value = std::exp(out.xi - kI * kPi * out.xi_prime - kI * kPi * 0.5 * out.eta);
  return out;
}

IntervalDeterminant interval_det(const IntervalModel& i, const ZetaEvaluator& z) {
  if (!(i.length > 0.0)) throw StructuralError("interval: length must be positive");
  const ZetaValue zeta = scaled_square(z.hurwitz(0.0, 1.0), kPi / i.length);
  IntervalDeterminant out;
  out.value = std::exp(-zeta.derivative.real());
  out.zero_modes = i.condition == BoundaryCondition::absolute ? 1 : 0;
  return out;
}

namespace {

// log of the L^2 norm of a determinant-line basis: sum_j (-1)^j log |h_j|,
// with 0-classes constant functions and 1-classes measured by their integral.
double log_l2_norm(const CohomologyBasis& h, double length) {
  double out = 0.0;
  for (size_t j = 0; j < h.reps.size(); ++j) {
    if (h.reps[j].cols() == 0) continue;
    if (h.reps[j].cols() != 1 || j > 1) throw StructuralError("lesch check expects one class per degree");
    const double norm = j == 0 ? std::abs(h.reps[j](0, 0)) * std::sqrt(length)
                               : std::abs(h.reps[j].col(0).sum()) / std::sqrt(length);
    out += j == 0 ? std::log(norm) : -std::log(norm);
  }
  return out;
}

// Constant 0-cocycle and the first coordinate 1-cocycle, where present.
CohomologyBasis simple_basis(const GradedComplex& c, const std::string& tag) {
  const std::vector<int> b = cohomology(c).betti();
  CohomologyBasis h;
  h.tag = tag;
  for (int j = 0; j <= c.top_degree(); ++j) {
    const int n = c.dim(j);
    if (b[j] == 0) {
      h.reps.push_back(ComplexMatrix(n, 0));
    } else if (j == 0) {
      h.reps.push_back(ComplexMatrix::Ones(n, 1));
    } else {
      ComplexMatrix e = ComplexMatrix::Zero(n, 1);
      e(0, 0) = 1.0;
      h.reps.push_back(e);
    }
  }
  return h;
}

}  // namespace

LeschCheck gluing_check_lesch(double l1, double l2, const ZetaEvaluator& z) {
  if (!(l1 > 0.0 && l2 > 0.0)) throw DomainError("gluing_check_lesch: lengths must be positive");
  const double l = l1 + l2;
  const CWData k = fixtures::circle_two_vertices();
  const TransmissionSplit split = transmission_split(k, {"v1", "v2"}, trivial_representation(k, 1));
  if (split.interior1 != std::vector<std::string>{"e1"})
    throw StructuralError("gluing_check_lesch: unexpected transmission split");
  // 0 -> C(M1, N) -> C(M) -> C(M2) -> 0
  const ShortExactSequenceData& ses = split.first;
  const CohomologyBasis ha = simple_basis(ses.a, "M1");
  const CohomologyBasis hb = simple_basis(ses.b, "M");
  const CohomologyBasis hc = simple_basis(ses.c, "M2");
  const LongExactSequence les = les_of_ses(ses, ha, hb, hc);

  // Ray-Singer factor prod_q det'(Delta_q)^{(-1)^q q / 2}: only q = 1 enters.
  // Relative 1-forms see Neumann conditions, absolute ones Dirichlet.
  const double det_m = std::abs(zeta_det_laplacian_circle(CircleModel{l, 1.0, 1}, z).value);
  const double det_1 = interval_det(IntervalModel{l1, BoundaryCondition::absolute}, z).value;
  const double det_2 = interval_det(IntervalModel{l2, BoundaryCondition::relative}, z).value;

  const double log_m = log_l2_norm(hb, l) - 0.5 * std::log(det_m);
  const double log_1 = log_l2_norm(ha, l1) - 0.5 * std::log(det_1);
  const double log_2 = log_l2_norm(hc, l2) - 0.5 * std::log(det_2);

  LeschCheck out;
  out.phi_modulus = std::abs(les.phi.coordinate);
  out.log_ratio = std::log(out.phi_modulus) + log_m - log_1 - log_2;
  out.expected = 0.5 * 2.0 * std::log(2.0);
  out.residual = std::abs(out.log_ratio - out.expected);
  return out;
}

Complex gluing_constant_K(Complex eta_m, Complex eta_m1, Complex eta_m2, int chi_n) {
  return std::pow(2.0, chi_n) * std::exp(kI * kPi * (eta_m - eta_m1 - eta_m2));
}

double K_squared_holomorphy(const std::function<Complex(Complex)>& lambda, Complex z0, double h,
                            const ZetaEvaluator& z) {
  const ScalarFunction g = [&](Complex x) {
    const CircleModel m{1.0, lambda(x), 1};
    if (!m.acyclic()) throw DomainError("K_squared_holomorphy: the curve passes through lambda = 1");
    return std::exp(2.0 * kPi * kI * eta_circle(m, z));
  };
  return cr_residual(g, z0, h);
}

CircleAnalyticTorsion rat_circle(const CircleModel& m, double theta_agmon, const ZetaEvaluator& z) {
  CircleAnalyticTorsion out;
  out.graded_determinant = graded_det_circle(m, theta_agmon, z).value;
  const CircleModel trivial{m.length, 1.0, 1};
  out.eta_trivial = eta_circle(trivial, z).real();
  // Only k = 1 contributes: (1/2)(-1)^1 * 1 * zeta(0, Delta_1).
  out.xi_hat = -0.5 * zeta_det_laplacian_circle(trivial, z).zeta_at_zero.real();
  out.value = out.graded_determinant * std::exp(kI * kPi * (out.eta_trivial + out.xi_hat));
  return out;
}

}  // namespace reftor
