#include <algorithm>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "oracles.hpp"
#include "reftor/errors.hpp"
#include "reftor/linalg.hpp"
#include "reftor/refined_finite.hpp"

using namespace reftor;

namespace {

constexpr double kPi = std::numbers::pi;

ComplexMatrix scalar(Complex a) {
  ComplexMatrix m(1, 1);
  m(0, 0) = a;
  return m;
}

double rel(Complex a, Complex b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

// m = 1, C^0 = C^1 = C, D = a, Gamma = swap, unit metric.
ChiralityComplex two_term(Complex a) {
  ChiralityComplex x;
  x.complex = GradedComplex({1, 1}, {scalar(a)});
  x.gamma = {scalar(1.0), scalar(1.0)};
  x.metric = {scalar(1.0), scalar(1.0)};
  return x;
}

// m = 3, all dims 1, only d_1 = b nonzero, Gamma swaps 0<->3 and 1<->2.
ChiralityComplex middle_term(Complex b) {
  ChiralityComplex x;
  x.complex = GradedComplex({1, 1, 1, 1}, {scalar(0.0), scalar(b), scalar(0.0)});
  x.gamma = {scalar(1.0), scalar(1.0), scalar(1.0), scalar(1.0)};
  x.metric = x.gamma;
  return x;
}

ComplexMatrix block(const OddSignatureData& s, const ComplexMatrix& t, int row_deg, int col_deg) {
  return t.block(s.offsets[row_deg], s.offsets[col_deg], s.x.complex.dim(row_deg), s.x.complex.dim(col_deg));
}

}  // namespace

TEST_CASE("chirality complex validation") {
  CHECK_NOTHROW(two_term(2.0).validate());
  auto even = two_term(1.0);
  even.complex = GradedComplex({1, 1, 1}, {scalar(0.0), scalar(0.0)});
  even.gamma.push_back(scalar(1.0));
  even.metric.push_back(scalar(1.0));
  CHECK_THROWS_AS(even.validate(), StructuralError);
  auto not_involution = two_term(1.0);
  not_involution.gamma[0] = scalar(2.0);
  CHECK_THROWS_AS(not_involution.validate(), DomainError);
  auto bad_metric = two_term(1.0);
  bad_metric.metric[1] = scalar(-1.0);
  CHECK_THROWS_AS(bad_metric.validate(), StructuralError);
}

TEST_CASE("dual differential") {
  auto zero = two_term(0.0);
  CHECK(frobenius(dual_differential(zero).d(0)) == 0.0);
  // Real a: D^{*h} = Gamma D Gamma, so D' = D.
  auto unitary_like = two_term(1.7);
  CHECK(rel(dual_differential(unitary_like).d(0)(0, 0), 1.7) < 1e-14);
  CHECK(rel(dual_differential(two_term(Complex(1.0, 2.0))).d(0)(0, 0), Complex(1.0, -2.0)) < 1e-14);

  oracle::Rng rng(11);
  for (int t = 0; t < 20; ++t) {
    const auto x = oracle::random_chirality(rng, t % 2 ? 3 : 1, 4);
    const ComplexMatrix g = total_gamma(x), d = total_differential(x.complex);
    const ComplexMatrix dp = total_differential(dual_differential(x));
    // Gamma D = D'^{*h} Gamma, with the adjoint computed independently as H^{-1} T^* H.
    const ComplexMatrix h = total_metric(x);
    const ComplexMatrix dp_adj = h.inverse() * dp.adjoint() * h;
    CHECK(frobenius(g * d - dp_adj * g) < 1e-12 * (1.0 + frobenius(g) * frobenius(d)));
  }
}

TEST_CASE("odd signature operator") {
  auto zero = odd_signature(two_term(0.0));
  CHECK(frobenius(zero.b) == 0.0);
  const Complex a(0.6, -1.3);
  auto s = odd_signature(two_term(a));
  CHECK(frobenius(s.b - a * ComplexMatrix::Identity(2, 2)) < 1e-15);

  oracle::Rng rng(12);
  for (int t = 0; t < 20; ++t) {
    const auto x = oracle::random_chirality(rng, t % 2 ? 3 : 1, 4);
    const auto o = odd_signature(x);
    const double scale = 1.0 + frobenius(o.b2);
    CHECK(frobenius(o.b * o.b2 - o.b2 * o.b) < 1e-11 * scale * (1.0 + frobenius(o.b)));
    CHECK(frobenius(o.gamma * o.b * o.gamma - o.b) < 1e-11 * (1.0 + frobenius(o.b)));
    // B^2 is block diagonal in degree.
    for (int i = 0; i <= x.m(); ++i)
      for (int j = 0; j <= x.m(); ++j)
        if (i != j && x.complex.dim(i) && x.complex.dim(j)) CHECK(frobenius(block(o, o.b2, i, j)) < 1e-11 * scale);
    // B preserves ker(D Gamma) and ker(Gamma D).
    for (const ComplexMatrix& op : {ComplexMatrix(o.d * o.gamma), ComplexMatrix(o.gamma * o.d)}) {
      const ComplexMatrix k = null_space(op);
      if (k.cols() == 0) continue;
      const ComplexMatrix image = o.b * k;
      CHECK(frobenius(image - k * (k.adjoint() * image)) < 1e-9 * (1.0 + frobenius(image)));
    }
  }
}

TEST_CASE("spectral split examples") {
  // B^2 = diag(1, 9) in degree 0.
  const auto s = odd_signature(direct_sum(two_term(1.0), two_term(3.0)));
  CHECK(frobenius(s.b2_blocks[0] - ComplexMatrix(Eigen::Vector2cd(1.0, 9.0).asDiagonal())) < 1e-14);
  const auto split = spectral_split(s, 4.0);
  ComplexMatrix expect = ComplexMatrix::Zero(2, 2);
  expect(0, 0) = 1.0;
  CHECK(frobenius(split.small_blocks[0] - expect) < 1e-12);
  CHECK(split.small_rank == 2);
  CHECK(frobenius(spectral_split(s, 100.0).small - ComplexMatrix::Identity(4, 4)) < 1e-12);
  CHECK_THROWS_AS(spectral_split(s, 9.0), SpectralGapError);
  CHECK_THROWS_AS(spectral_split(s, -1.0), DomainError);

  // Jordan block with eigenvalue 2 against a contour oracle, radius 1.
  ComplexMatrix jordan(2, 2);
  jordan << 2.0, 1.0, 0.0, 2.0;
  const ComplexMatrix p = spectral_projector(jordan, [](Complex mu) { return std::abs(mu) <= 1.0; });
  CHECK(frobenius(p) < 1e-14);
  CHECK(frobenius(oracle::contour_projector(jordan, 1.0)) < 1e-10);
  const ComplexMatrix all = spectral_projector(jordan, [](Complex mu) { return std::abs(mu) <= 3.0; });
  CHECK(frobenius(all - oracle::contour_projector(jordan, 3.0)) < 1e-10);
}

TEST_CASE("spectral projector against oracles on random complexes") {
  oracle::Rng rng(13);
  double worst_eig = 0.0, worst_contour = 0.0;
  int diagonalizable = 0;
  for (int t = 0; t < 30; ++t) {
    const auto x = oracle::random_chirality(rng, t % 2 ? 3 : 1, 4);
    const auto s = odd_signature(x);
    double smallest_nonzero = 1e300;
    for (const auto& b2 : s.b2_blocks) {
      const ComplexVector ev = eigenvalues(b2);
      for (Eigen::Index i = 0; i < ev.size(); ++i)
        if (std::abs(ev(i)) > 1e-6 * (1.0 + frobenius(s.b2))) smallest_nonzero = std::min(smallest_nonzero, std::abs(ev(i)));
    }
    for (double lambda : admissible_cuts(s)) {
      const auto split = spectral_split(s, lambda);
      CHECK(frobenius(split.small * split.small - split.small) < 1e-9);
      CHECK(frobenius(split.small * s.b - s.b * split.small) < 1e-8 * (1.0 + frobenius(s.b)));
      CHECK(frobenius(split.small * s.d - s.d * split.small) < 1e-8 * (1.0 + frobenius(s.d)));
      // The even part of the large range splits into the two kernels.
      ComplexMatrix even = ComplexMatrix::Zero(s.offsets.back(), static_cast<int>(s.even_coordinates.size()));
      for (size_t i = 0; i < s.even_coordinates.size(); ++i) even(s.even_coordinates[i], static_cast<int>(i)) = 1.0;
      const auto e = even_splitting(s, split);
      CHECK(e.plus_basis.cols() + e.minus_basis.cols() == column_space(split.large * even).cols());
      for (size_t k = 0; k < s.b2_blocks.size(); ++k) {
        const ComplexMatrix& a = s.b2_blocks[k];
        if (a.rows() == 0) continue;
        // At lambda = 0 the contour encloses only the zero cluster.
        const double radius = lambda > 0.0 ? lambda : 0.5 * smallest_nonzero;
        try {
          worst_eig = std::max(worst_eig, frobenius(split.small_blocks[k] - oracle::eigen_projector(a, radius)));
          ++diagonalizable;
        } catch (const std::runtime_error&) {
        }
        // Trapezoid error decays like q^nodes, q the closest eigenvalue-to-contour modulus ratio.
        double q = 0.0;
        const ComplexVector ev = eigenvalues(a);
        for (Eigen::Index i = 0; i < ev.size(); ++i)
          if (std::abs(ev(i)) > 0.0) q = std::max(q, std::min(std::abs(ev(i)) / radius, radius / std::abs(ev(i))));
        const int nodes = q > 0.0 ? static_cast<int>(std::clamp(30.0 / -std::log(q), 64.0, 262144.0)) : 64;
        worst_contour = std::max(worst_contour, frobenius(split.small_blocks[k] - oracle::contour_projector(a, radius, nodes)));
      }
    }
  }
  CHECK(diagonalizable > 20);
  CHECK(worst_eig < 1e-10);
  CHECK(worst_contour < 1e-8);
}

TEST_CASE("graded determinant examples") {
  CHECK(rel(graded_determinant_from_parts(scalar(2.0), scalar(-3.0), -kPi / 2), 2.0 / 3.0) < 1e-14);
  // log_theta(-2) = ln 2 + i pi for theta = -pi/2.
  CHECK(rel(branch_log(-2.0, -kPi / 2), Complex(std::log(2.0), kPi)) < 1e-15);
  CHECK(rel(graded_determinant_from_parts(scalar(-2.0), ComplexMatrix(0, 0), -kPi / 2), -2.0) < 1e-14);
  CHECK(graded_determinant_from_parts(ComplexMatrix(0, 0), ComplexMatrix(0, 0), -1.0) == Complex(1.0));

  // The same values through the full pipeline.
  const auto plus = odd_signature(two_term(-2.0));
  CHECK(rel(graded_determinant(plus, 0.0, -kPi / 2), -2.0) < 1e-12);
  const auto minus = odd_signature(middle_term(-3.0));
  const auto parts = even_splitting(minus, spectral_split(minus, 0.0));
  CHECK(parts.plus_basis.cols() == 0);
  CHECK(parts.minus_basis.cols() == 1);
  CHECK(rel(graded_determinant(minus, 0.0, -kPi / 2), 1.0 / 3.0) < 1e-12);
  CHECK(graded_determinant(plus, 10.0, -kPi / 2) == Complex(1.0));

  CHECK_THROWS_AS(graded_determinant(odd_signature(two_term(Complex(0.0, -1.0))), 0.0, -kPi / 2), AgmonError);
  CHECK_THROWS_AS(graded_determinant(odd_signature(two_term(Complex(0.0, 1.0))), 0.0, -kPi / 2), AgmonError);
  CHECK_THROWS_AS(graded_determinant(plus, 0.0, 0.5), DomainError);
}

TEST_CASE("graded determinant is multiplicative under direct sums") {
  oracle::Rng rng(14);
  for (int t = 0; t < 20; ++t) {
    const int m = t % 2 ? 3 : 1;
    const auto x = oracle::random_chirality(rng, m, 3), y = oracle::random_chirality(rng, m, 3);
    const double theta = -0.9;
    try {
      const Complex gx = graded_determinant(odd_signature(x), 0.0, theta);
      const Complex gy = graded_determinant(odd_signature(y), 0.0, theta);
      const Complex gxy = graded_determinant(odd_signature(direct_sum(x, y)), 0.0, theta);
      CHECK(rel(gxy, gx * gy) < 1e-10);
    } catch (const AgmonError&) {
    }
  }
}

TEST_CASE("refined torsion element") {
  // D = 0, Gamma = swap: rho = c_0 (x) (Gamma c_0)^{-1} has coordinate 1.
  const auto s = odd_signature(two_term(0.0));
  const auto split = spectral_split(s, 1.0);
  CohomologyBasis unit{"unit", {scalar(1.0), scalar(1.0)}};
  CHECK(rel(refined_torsion_element(s, split, unit).coordinate, 1.0) < 1e-14);
  CHECK(rel(rho(two_term(0.0), 1.0, -1.0, unit).coordinate, 1.0) < 1e-14);

  // B invertible, lambda = 0: empty small complex.
  const auto inv = two_term(Complex(1.5, 0.5));
  const auto si = odd_signature(inv);
  CHECK(spectral_split(si, 0.0).small_rank == 0);
  CHECK(refined_torsion_element(si, spectral_split(si, 0.0)).coordinate == Complex(1.0));
  CHECK(rel(rho(inv, 0.0, -1.0).coordinate, graded_determinant(si, 0.0, -1.0)) < 1e-14);

  oracle::Rng rng(15);
  int acyclic_cases = 0;
  for (int t = 0; t < 40; ++t) {
    const int m = t % 2 ? 3 : 1;
    const auto x = oracle::random_chirality(rng, m, 4);
    const auto o = odd_signature(x);
    const auto cuts = admissible_cuts(o);
    const auto whole = spectral_split(o, cuts.back());
    const int r = (m + 1) / 2;
    // Arbitrary bases c_k of the small spaces.
    std::vector<ComplexMatrix> c;
    for (int k = 0; k < r; ++k) c.push_back(rng.invertible(x.complex.dim(k)));
    const Complex auto_coord = refined_torsion_element(o, whole).coordinate;
    CHECK(rel(refined_torsion_element(o, whole, std::nullopt, c).coordinate, auto_coord) < 1e-9);
    // Rescaling c_k leaves the element unchanged.
    auto scaled = c;
    for (auto& ck : scaled) ck *= Complex(0.3, 1.1);
    CHECK(rel(refined_torsion_element(o, whole, std::nullopt, scaled).coordinate, auto_coord) < 1e-9);
    if (!cohomology(x.complex).acyclic()) continue;
    ++acyclic_cases;
    // Direct evaluation: write D in the bases c_k, Gamma c_k and feed the Leibniz oracle.
    std::vector<ComplexMatrix> w(static_cast<size_t>(m + 1));
    for (int k = 0; k < r; ++k) {
      w[k] = c[k];
      w[m - k] = x.gamma[k] * c[k];
    }
    std::vector<ComplexMatrix> diffs;
    for (int j = 0; j < m; ++j) diffs.push_back(oracle::adjugate_inverse(w[j + 1]) * x.complex.d(j) * w[j]);
    const std::vector<ComplexMatrix> none(static_cast<size_t>(m + 1));
    const Complex brute = oracle::canonical_coordinate(GradedComplex(x.complex.dims(), diffs), none);
    CHECK(rel(auto_coord, brute) < 1e-9);
  }
  CHECK(acyclic_cases > 3);
}

TEST_CASE("rho does not depend on the spectral cut or the Agmon angle") {
  oracle::Rng rng(16);
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const auto x = oracle::random_chirality(rng, t % 2 ? 3 : 1, 4);
    const auto o = odd_signature(x);
    Complex first = 0.0;
    for (double lambda : admissible_cuts(o))
      for (double theta : {-0.4, -2.2}) {
        Complex v;
        try {
          v = rho(x, lambda, theta).coordinate;
        } catch (const AgmonError&) {
          continue;
        }
        if (first == Complex(0.0)) first = v;
        worst = std::max(worst, std::abs(v - first) / std::abs(first));
      }
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("eta and xi in the finite model") {
  const auto sym = odd_signature(direct_sum(two_term(1.0), two_term(-1.0)));
  CHECK(eta_xi_finite(sym, 0.0, -kPi / 2).eta == 0.0);
  const auto four = eta_xi_finite(odd_signature(two_term(2.0)), 0.0, -kPi / 2);
  CHECK(four.xi_hat == -0.5);
  CHECK(four.xi_prime == -0.5);

  oracle::Rng rng(17);
  double worst = 0.0;
  for (int t = 0; t < 40; ++t) {
    const auto x = oracle::random_chirality(rng, 2 * (t % 3) + 1, 3);
    const auto o = odd_signature(x);
    for (double lambda : admissible_cuts(o))
      for (double theta : {-0.3, -1.6, -2.9}) {
        try {
          const auto e = eta_xi_finite(o, lambda, theta);
          worst = std::max(worst, rel(e.reconstructed, graded_determinant(o, lambda, theta)));
        } catch (const AgmonError&) {
        }
      }
  }
  CHECK(worst < 1e-10);
}
