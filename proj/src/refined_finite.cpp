#include "reftor/refined_finite.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Cholesky>

#include "reftor/errors.hpp"

namespace reftor {

namespace {

constexpr double kPi = std::numbers::pi;

double zero_cluster(const ComplexMatrix& b2) { return 1e-6 * (1.0 + frobenius(b2)); }


// Angle of mu measured from the ray theta, in [0, 2 pi).
double angle_from(Complex mu, double theta) {
  double a = std::arg(mu) - theta;
  a = std::fmod(a, 2.0 * kPi);
  if (a < 0.0) a += 2.0 * kPi;
  return a;
}

double ray_distance(Complex mu, double ray) {
  const double a = angle_from(mu, ray);
  return std::min(a, 2.0 * kPi - a);
}

ComplexMatrix select_columns(int n, const std::vector<int>& idx) {
  ComplexMatrix e = ComplexMatrix::Zero(n, static_cast<int>(idx.size()));
  for (size_t i = 0; i < idx.size(); ++i) e(idx[i], static_cast<int>(i)) = 1.0;
  return e;
}

ComplexVector concat(const ComplexVector& a, const ComplexVector& b) {
  ComplexVector out(a.size() + b.size());
  out << a, b;
  return out;
}

void check_agmon(const ComplexVector& eigs, double theta) {
  if (!(theta > -kPi && theta < 0.0)) throw DomainError("Agmon angle must lie in (-pi, 0)");
  for (Eigen::Index i = 0; i < eigs.size(); ++i) {
    const double dist = std::min(ray_distance(eigs(i), theta), ray_distance(eigs(i), theta + kPi));
    if (dist < kAgmonTolerance)
      throw AgmonError("eigenvalue (" + std::to_string(eigs(i).real()) + ", " + std::to_string(eigs(i).imag()) +
                       ") lies on the branch ray");
  }
}

}  // namespace

void ChiralityComplex::validate() const {
  const int mm = m();
  if (mm < 1 || mm % 2 == 0) throw StructuralError("chirality complex must have odd top degree");
  if (static_cast<int>(gamma.size()) != mm + 1 || static_cast<int>(metric.size()) != mm + 1)
    throw StructuralError("chirality complex needs one Gamma and one metric block per degree");
  for (int k = 0; k <= mm; ++k) {
    const ComplexMatrix& g = gamma[static_cast<size_t>(k)];
    const ComplexMatrix& h = metric[static_cast<size_t>(k)];
    if (g.rows() != complex.dim(mm - k) || g.cols() != complex.dim(k))
      throw StructuralError("Gamma_" + std::to_string(k) + " has the wrong shape");
    if (h.rows() != complex.dim(k) || h.cols() != complex.dim(k))
      throw StructuralError("metric block " + std::to_string(k) + " has the wrong shape");
    require_finite(g, "Gamma");
    require_finite(h, "metric");
    if (h.size() == 0) continue;
    if ((h - h.adjoint()).norm() > 1e-12 * (1.0 + h.norm()))
      throw StructuralError("metric block " + std::to_string(k) + " is not Hermitian");
    Eigen::LLT<ComplexMatrix> llt(h);
    if (llt.info() != Eigen::Success)
      throw StructuralError("metric block " + std::to_string(k) + " is not positive definite");
  }
  for (int k = 0; k <= mm; ++k) {
    const ComplexMatrix& g = gamma[static_cast<size_t>(k)];
    const ComplexMatrix& gb = gamma[static_cast<size_t>(mm - k)];
    if (g.size() == 0) continue;
    const ComplexMatrix id = ComplexMatrix::Identity(g.cols(), g.cols());
    if ((gb * g - id).norm() > 1e-9 * (1.0 + g.norm() * gb.norm()))
      throw DomainError("Gamma is not an involution in degree " + std::to_string(k));
    const ComplexMatrix adj =
        metric[static_cast<size_t>(k)].inverse() * g.adjoint() * metric[static_cast<size_t>(mm - k)];
    if ((adj - gb).norm() > 1e-9 * (1.0 + gb.norm()))
      throw DomainError("Gamma is not self-adjoint in degree " + std::to_string(k));
  }
}

std::vector<int> degree_offsets(const GradedComplex& c) {
  std::vector<int> off{0};
  for (int j = 0; j <= c.top_degree(); ++j) off.push_back(off.back() + c.dim(j));
  return off;
}

ComplexMatrix total_differential(const GradedComplex& c) {
  const auto off = degree_offsets(c);
  ComplexMatrix d = ComplexMatrix::Zero(off.back(), off.back());
  for (int j = 0; j < c.top_degree(); ++j) d.block(off[j + 1], off[j], c.dim(j + 1), c.dim(j)) = c.d(j);
  return d;
}

ComplexMatrix total_gamma(const ChiralityComplex& x) {
  const auto off = degree_offsets(x.complex);
  const int m = x.m();
  ComplexMatrix g = ComplexMatrix::Zero(off.back(), off.back());
  for (int k = 0; k <= m; ++k)
    g.block(off[m - k], off[k], x.complex.dim(m - k), x.complex.dim(k)) = x.gamma[static_cast<size_t>(k)];
  return g;
}

ComplexMatrix total_metric(const ChiralityComplex& x) {
  const auto off = degree_offsets(x.complex);
  ComplexMatrix h = ComplexMatrix::Zero(off.back(), off.back());
  for (int k = 0; k <= x.m(); ++k)
    h.block(off[k], off[k], x.complex.dim(k), x.complex.dim(k)) = x.metric[static_cast<size_t>(k)];
  return h;
}

ComplexMatrix h_adjoint(const ChiralityComplex& x, const ComplexMatrix& t) {
  const ComplexMatrix h = total_metric(x);
  return h.ldlt().solve(t.adjoint() * h);
}

GradedComplex dual_differential(const ChiralityComplex& x) {
  x.validate();
  const ComplexMatrix g = total_gamma(x);
  const ComplexMatrix dp = h_adjoint(x, g * total_differential(x.complex) * g);
  const auto off = degree_offsets(x.complex);
  std::vector<ComplexMatrix> diffs;
  for (int j = 0; j < x.m(); ++j)
    diffs.push_back(dp.block(off[j + 1], off[j], x.complex.dim(j + 1), x.complex.dim(j)));
  return GradedComplex(x.complex.dims(), diffs);
}

OddSignatureData odd_signature(const ChiralityComplex& x) {
  x.validate();
  OddSignatureData s;
  s.x = x;
  s.offsets = degree_offsets(x.complex);
  s.d = total_differential(x.complex);
  s.gamma = total_gamma(x);
  s.b = s.gamma * s.d + s.d * s.gamma;
  s.b2 = s.b * s.b;
  for (int k = 0; k <= x.m(); ++k) {
    const int o = s.offsets[static_cast<size_t>(k)], n = x.complex.dim(k);
    s.b2_blocks.push_back(s.b2.block(o, o, n, n));
    if (k % 2 == 0)
      for (int i = 0; i < n; ++i) s.even_coordinates.push_back(o + i);
  }
  return s;
}

SpectralSplit spectral_split(const OddSignatureData& s, double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw DomainError("spectral cut must be a finite real >= 0");
  SpectralSplit out;
  out.lambda = lambda;
  const int n = s.offsets.back();
  out.small = ComplexMatrix::Zero(n, n);
  const double zero = zero_cluster(s.b2);
  const double gap = kGapTolerance * (1.0 + lambda);
  for (size_t k = 0; k < s.b2_blocks.size(); ++k) {
    const ComplexMatrix& a = s.b2_blocks[k];
    const ComplexVector ev = eigenvalues(a);
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
      const double mod = std::abs(ev(i));
      if (mod >= zero && std::abs(mod - lambda) < gap)
        throw SpectralGapError("cut " + std::to_string(lambda) + " is within the gap tolerance of eigenvalue modulus " +
                               std::to_string(mod));
    }
    const ComplexMatrix p =
        spectral_projector(a, [&](Complex mu) { return std::abs(mu) < zero || std::abs(mu) <= lambda; });
    out.small_blocks.push_back(p);
    const int o = s.offsets[k];
    out.small.block(o, o, a.rows(), a.cols()) = p;
    for (Eigen::Index i = 0; i < ev.size(); ++i)
      if (std::abs(ev(i)) < zero || std::abs(ev(i)) <= lambda) ++out.small_rank;
  }
  out.large = ComplexMatrix::Identity(n, n) - out.small;
  return out;
}

Complex branch_log(Complex mu, double theta) {
  if (std::abs(mu) == 0.0) throw DegeneracyError("logarithm of zero");
  return {std::log(std::abs(mu)), theta + angle_from(mu, theta)};
}

EvenSplitting even_splitting(const OddSignatureData& s, const SpectralSplit& split) {
  const int n = s.offsets.back();
  EvenSplitting out;
  const ComplexMatrix e = select_columns(n, s.even_coordinates);
  const ComplexMatrix v = column_space(split.large * e);
  if (v.cols() == 0) {
    out.plus_basis = out.minus_basis = ComplexMatrix::Zero(n, 0);
    out.b_plus = out.b_minus = ComplexMatrix(0, 0);
    return out;
  }
  const ComplexMatrix dg = s.d * s.gamma, gd = s.gamma * s.d;
  out.plus_basis = v * null_space(truncate_singular_values(dg * v, kRankTolerance * frobenius(dg)));
  out.minus_basis = v * null_space(truncate_singular_values(gd * v, kRankTolerance * frobenius(gd)));
  if (out.plus_basis.cols() + out.minus_basis.cols() != v.cols())
    throw DegeneracyError("ker(D Gamma) and ker(Gamma D) do not split the (lambda, inf) part");
  out.b_plus = coordinates_in(out.plus_basis, s.b * out.plus_basis, 1e-6);
  out.b_minus = coordinates_in(out.minus_basis, s.b * out.minus_basis, 1e-6);
  return out;
}

Complex graded_determinant_from_parts(const ComplexMatrix& b_plus, const ComplexMatrix& b_minus, double theta) {
  const ComplexVector plus = eigenvalues(b_plus), minus = eigenvalues(b_minus);
  check_agmon(concat(plus, minus), theta);
  Complex log_sum = 0.0;
  for (Eigen::Index i = 0; i < plus.size(); ++i) {
    if (std::abs(plus(i)) == 0.0) throw DegeneracyError("B is not invertible on the (lambda, inf) part");
    log_sum += branch_log(plus(i), theta);
  }
  for (Eigen::Index i = 0; i < minus.size(); ++i) {
    if (std::abs(minus(i)) == 0.0) throw DegeneracyError("B is not invertible on the (lambda, inf) part");
    log_sum -= branch_log(-minus(i), theta);
  }
  return std::exp(log_sum);
}

Complex graded_determinant(const OddSignatureData& s, double lambda, double theta) {
  const EvenSplitting e = even_splitting(s, spectral_split(s, lambda));
  return graded_determinant_from_parts(e.b_plus, e.b_minus, theta);
}

DetLineElement refined_torsion_element(const OddSignatureData& s, const SpectralSplit& split,
                                       const std::optional<CohomologyBasis>& h,
                                       const std::optional<std::vector<ComplexMatrix>>& small_bases) {
  const ChiralityComplex& x = s.x;
  const int m = x.m(), r = (m + 1) / 2;
  std::vector<ComplexMatrix> w(static_cast<size_t>(m + 1));
  for (int j = 0; j < r; ++j) {
    const ComplexMatrix& p = split.small_blocks[static_cast<size_t>(j)];
    ComplexMatrix basis;
    if (small_bases) {
      basis = (*small_bases)[static_cast<size_t>(j)];
      const int want = numerical_rank(p).rank;
      if (basis.rows() != p.rows() || basis.cols() != want || frobenius(p * basis - basis) > 1e-8 * (1.0 + frobenius(basis)))
        throw StructuralError("small basis in degree " + std::to_string(j) + " does not span the spectral subspace");
    } else {
      basis = p.rows() ? column_space(p) : ComplexMatrix(0, 0);
    }
    if (basis.cols() == 0) basis = ComplexMatrix::Zero(x.complex.dim(j), 0);
    w[static_cast<size_t>(j)] = basis;
    w[static_cast<size_t>(m - j)] = x.gamma[static_cast<size_t>(j)] * basis;
    if (numerical_rank(split.small_blocks[static_cast<size_t>(m - j)]).rank != basis.cols())
      throw StructuralError("Gamma does not pair the spectral subspaces of degrees " + std::to_string(j) + " and " +
                            std::to_string(m - j));
  }
  std::vector<int> dims;
  for (int j = 0; j <= m; ++j) dims.push_back(static_cast<int>(w[static_cast<size_t>(j)].cols()));
  std::vector<ComplexMatrix> diffs;
  for (int j = 0; j < m; ++j) {
    const ComplexMatrix img = x.complex.d(j) * w[static_cast<size_t>(j)];
    diffs.push_back(img.cols() == 0 || dims[static_cast<size_t>(j + 1)] == 0
                        ? ComplexMatrix::Zero(dims[static_cast<size_t>(j + 1)], dims[static_cast<size_t>(j)])
                        : truncate_singular_values(coordinates_in(w[static_cast<size_t>(j + 1)], img, 1e-6),
                                         kRankTolerance * (1.0 + frobenius(x.complex.d(j)))));
  }
  const GradedComplex small(dims, diffs);
  const CohomologyBasis full = h ? *h : cohomology(x.complex).as_basis();
  CohomologyBasis reps;
  reps.tag = full.tag;
  for (int j = 0; j <= m; ++j) {
    const ComplexMatrix& hj = full.reps[static_cast<size_t>(j)];
    if (hj.cols() == 0) {
      reps.reps.push_back(ComplexMatrix::Zero(dims[static_cast<size_t>(j)], 0));
      continue;
    }
    reps.reps.push_back(coordinates_in(w[static_cast<size_t>(j)], split.small_blocks[static_cast<size_t>(j)] * hj, 1e-6));
  }
  return canonical_iso(small, DetLineElement{}, reps);
}

DetLineElement rho(const ChiralityComplex& x, double lambda, double theta, const std::optional<CohomologyBasis>& h) {
  const OddSignatureData s = odd_signature(x);
  const SpectralSplit split = spectral_split(s, lambda);
  DetLineElement out = refined_torsion_element(s, split, h);
  out.coordinate *= graded_determinant(s, lambda, theta);
  return out;
}

EtaXi eta_xi_finite(const OddSignatureData& s, double lambda, double theta) {
  const SpectralSplit split = spectral_split(s, lambda);
  const EvenSplitting e = even_splitting(s, split);
  const ComplexVector even = concat(eigenvalues(e.b_plus), eigenvalues(e.b_minus));
  check_agmon(even, theta);
  EtaXi out;
  for (Eigen::Index i = 0; i < even.size(); ++i) out.eta += angle_from(even(i), theta) < kPi ? 0.5 : -0.5;
  const double zero = zero_cluster(s.b2);
  out.xi = 0.0;
  for (size_t k = 0; k < s.b2_blocks.size(); ++k) {
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    const ComplexVector ev = eigenvalues(s.b2_blocks[k]);
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
      const double mod = std::abs(ev(i));
      if (mod < zero) continue;
      out.xi_hat += 0.5 * sign * static_cast<double>(k);
      if (mod <= lambda) continue;
      if (ray_distance(ev(i), 2.0 * theta) < kAgmonTolerance) throw AgmonError("eigenvalue of B^2 on the ray 2 theta");
      out.xi_prime += 0.5 * sign * static_cast<double>(k);
      out.xi -= 0.5 * sign * static_cast<double>(k) * branch_log(ev(i), 2.0 * theta);
    }
  }
  out.reconstructed = std::exp(out.xi - Complex(0.0, kPi) * (out.xi_prime + out.eta));
  return out;
}

std::vector<double> admissible_cuts(const OddSignatureData& s) {
  const double zero = zero_cluster(s.b2);
  std::vector<double> mods;
  for (const auto& blk : s.b2_blocks) {
    const ComplexVector ev = eigenvalues(blk);
    for (Eigen::Index i = 0; i < ev.size(); ++i)
      if (std::abs(ev(i)) >= zero) mods.push_back(std::abs(ev(i)));
  }
  std::sort(mods.begin(), mods.end());
  std::vector<double> distinct;
  for (double v : mods)
    if (distinct.empty() || v - distinct.back() > 1e-4 * (1.0 + v)) distinct.push_back(v);
  std::vector<double> cuts;
  if (distinct.empty()) return {1.0};
  cuts.push_back(0.0);
  for (size_t i = 0; i + 1 < distinct.size(); ++i) cuts.push_back(0.5 * (distinct[i] + distinct[i + 1]));
  cuts.push_back(2.0 * distinct.back());
  return cuts;
}

ChiralityComplex direct_sum(const ChiralityComplex& x, const ChiralityComplex& y) {
  if (x.m() != y.m()) throw StructuralError("direct sum of chirality complexes of different lengths");
  ChiralityComplex out;
  out.complex = direct_sum(x.complex, y.complex);
  for (int k = 0; k <= x.m(); ++k) {
    out.gamma.push_back(block_diag(x.gamma[static_cast<size_t>(k)], y.gamma[static_cast<size_t>(k)]));
    out.metric.push_back(block_diag(x.metric[static_cast<size_t>(k)], y.metric[static_cast<size_t>(k)]));
  }
  return out;
}

}  // namespace reftor
