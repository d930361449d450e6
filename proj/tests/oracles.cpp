#include "oracles.hpp"

#include <algorithm>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace oracle {

namespace {

bool next_subset(std::vector<int>& s, int n) {
  const int k = static_cast<int>(s.size());
  int i = k - 1;
  while (i >= 0 && s[static_cast<size_t>(i)] == n - k + i) --i;
  if (i < 0) return false;
  ++s[static_cast<size_t>(i)];
  for (int j = i + 1; j < k; ++j) s[static_cast<size_t>(j)] = s[static_cast<size_t>(j - 1)] + 1;
  return true;
}

std::vector<int> first_subset(int k) {
  std::vector<int> s(static_cast<size_t>(k));
  std::iota(s.begin(), s.end(), 0);
  return s;
}

ComplexMatrix unit_columns(int n, const std::vector<int>& s) {
  ComplexMatrix e = ComplexMatrix::Zero(n, static_cast<int>(s.size()));
  for (size_t i = 0; i < s.size(); ++i) e(s[i], static_cast<int>(i)) = 1.0;
  return e;
}

ComplexMatrix cat(const ComplexMatrix& a, const ComplexMatrix& b, int rows) {
  ComplexMatrix out(rows, a.cols() + b.cols());
  if (a.cols()) out.leftCols(a.cols()) = a;
  if (b.cols()) out.rightCols(b.cols()) = b;
  return out;
}

}  // namespace

Complex leibniz_det(const ComplexMatrix& m) {
  const int n = static_cast<int>(m.rows());
  if (m.cols() != n) throw std::invalid_argument("leibniz_det: not square");
  if (n == 0) return 1.0;
  std::vector<int> p(static_cast<size_t>(n));
  std::iota(p.begin(), p.end(), 0);
  Complex total = 0.0;
  do {
    int inversions = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (p[static_cast<size_t>(i)] > p[static_cast<size_t>(j)]) ++inversions;
    Complex term = (inversions % 2) ? -1.0 : 1.0;
    for (int i = 0; i < n; ++i) term *= m(i, p[static_cast<size_t>(i)]);
    total += term;
  } while (std::next_permutation(p.begin(), p.end()));
  return total;
}

ComplexMatrix adjugate_inverse(const ComplexMatrix& m) {
  const int n = static_cast<int>(m.rows());
  const Complex det = leibniz_det(m);
  ComplexMatrix inv(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      ComplexMatrix minor(n - 1, n - 1);
      for (int r = 0, rr = 0; r < n; ++r) {
        if (r == j) continue;
        for (int c = 0, cc = 0; c < n; ++c) {
          if (c == i) continue;
          minor(rr, cc++) = m(r, c);
        }
        ++rr;
      }
      inv(i, j) = (((i + j) % 2) ? -1.0 : 1.0) * leibniz_det(minor) / det;
    }
  return inv;
}

int minor_rank(const ComplexMatrix& m, double tol) {
  const int rows = static_cast<int>(m.rows()), cols = static_cast<int>(m.cols());
  for (int k = std::min(rows, cols); k > 0; --k) {
    std::vector<int> r = first_subset(k);
    do {
      std::vector<int> c = first_subset(k);
      do {
        ComplexMatrix sub(k, k);
        for (int i = 0; i < k; ++i)
          for (int j = 0; j < k; ++j) sub(i, j) = m(r[static_cast<size_t>(i)], c[static_cast<size_t>(j)]);
        if (std::abs(leibniz_det(sub)) > tol) return k;
      } while (next_subset(c, cols));
    } while (next_subset(r, rows));
  }
  return 0;
}

Complex canonical_coordinate(const GradedComplex& c, const std::vector<ComplexMatrix>& h) {
  const int m = c.top_degree();
  Complex coord = 1.0;
  ComplexMatrix prev_v;  // complement chosen in the previous degree
  std::vector<int> ranks, betti;
  for (int j = 0; j <= m; ++j) {
    const int k = c.dim(j);
    const ComplexMatrix image = j > 0 ? ComplexMatrix(c.d(j - 1) * prev_v) : ComplexMatrix(k, 0);
    const ComplexMatrix hj = h[static_cast<size_t>(j)].cols() ? h[static_cast<size_t>(j)] : ComplexMatrix(k, 0);
    const int need = k - static_cast<int>(image.cols()) - static_cast<int>(hj.cols());
    if (need < 0) throw std::runtime_error("oracle: too many vectors");
    const ComplexMatrix head = cat(image, hj, k);
    // Pick the coordinate subset with the best-conditioned assembled determinant.
    std::vector<int> s = first_subset(need), best;
    double best_abs = -1.0;
    do {
      const double a = std::abs(leibniz_det(cat(head, unit_columns(k, s), k)));
      if (a > best_abs) {
        best_abs = a;
        best = s;
      }
    } while (need > 0 && next_subset(s, k));
    if (best_abs <= 1e-12) throw std::runtime_error("oracle: no complement found");
    prev_v = unit_columns(k, best);
    const Complex det = leibniz_det(cat(head, prev_v, k));
    coord *= (j % 2 == 0) ? 1.0 / det : det;
    ranks.push_back(need);
    betti.push_back(static_cast<int>(hj.cols()));
  }
  if (reftor::canonical_sign_exponent(c.dims(), ranks, betti) % 2) coord = -coord;
  return coord;
}

Complex fusion_coordinate(const reftor::ShortExactSequenceData& ses) {
  Complex coord = 1.0;
  for (int j = 0; j <= ses.b.top_degree(); ++j) {
    const int nb = ses.b.dim(j), nc = ses.c.dim(j);
    const ComplexMatrix pi = ses.pi_at(j);
    ComplexMatrix lifts(nb, 0);
    if (nc > 0) {
      std::vector<int> s = first_subset(nc), best;
      double best_abs = -1.0;
      do {
        const double a = std::abs(leibniz_det(pi * unit_columns(nb, s)));
        if (a > best_abs) {
          best_abs = a;
          best = s;
        }
      } while (next_subset(s, nb));
      const ComplexMatrix e = unit_columns(nb, best);
      lifts = e * adjugate_inverse(pi * e);
    }
    const Complex det = leibniz_det(cat(ses.iota_at(j), lifts, nb));
    coord *= (j % 2 == 0) ? det : 1.0 / det;
  }
  return coord;
}


ComplexMatrix contour_projector(const ComplexMatrix& a, double radius, int nodes) {
  const int n = static_cast<int>(a.rows());
  ComplexMatrix p = ComplexMatrix::Zero(n, n);
  const ComplexMatrix id = ComplexMatrix::Identity(n, n);
  for (int k = 0; k < nodes; ++k) {
    const Complex z = std::polar(radius, 2.0 * std::numbers::pi * k / nodes);
    // dz / (2 pi i) = z dt / (2 pi), dt = 2 pi / nodes
    p += (z / static_cast<double>(nodes)) * (z * id - a).partialPivLu().inverse();
  }
  return p;
}

ComplexMatrix eigen_projector(const ComplexMatrix& a, double radius) {
  Eigen::ComplexEigenSolver<ComplexMatrix> es(a);
  const ComplexMatrix v = es.eigenvectors();
  const Eigen::JacobiSVD<ComplexMatrix> svd(v);
  const auto sv = svd.singularValues();
  if (sv.size() && sv(sv.size() - 1) < 1e-8 * sv(0)) throw std::runtime_error("eigen_projector: not diagonalizable");
  const ComplexMatrix w = v.inverse();
  ComplexMatrix p = ComplexMatrix::Zero(a.rows(), a.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    if (std::abs(es.eigenvalues()(i)) <= radius) p += v.col(i) * w.row(i);
  return p;
}


}  // namespace oracle

namespace oracle {

Complex lanczos_log_gamma(Complex z) {
  static const double p[] = {0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
                             771.32342877765313,   -176.61502916214059,   12.507343278686905,
                             -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
  if (z.real() < 0.5) return lanczos_log_gamma(z + 1.0) - std::log(z);
  z -= 1.0;
  Complex x = p[0];
  for (int i = 1; i < 9; ++i) x += p[i] / (z + double(i));
  const Complex t = z + 7.5;
  return 0.5 * std::log(2.0 * std::numbers::pi) + (z + 0.5) * std::log(t) - t + std::log(x);
}

Complex hurwitz_direct(Complex s, Complex a, long terms) {
  Complex sum = 0.0;
  for (long n = terms - 1; n >= 0; --n) sum += std::pow(double(n) + a, -s);
  const Complex x = double(terms) - 0.5 + a;
  return sum + std::pow(x, 1.0 - s) / (s - 1.0);
}

Complex circle_det_product(Complex a, double length, long terms) {
  const double c = 2.0 * std::numbers::pi / length;
  Complex log_prod = 2.0 * std::log(c * a);
  for (long n = terms; n >= 1; --n) log_prod += 2.0 * std::log(1.0 - a * a / (double(n) * double(n)));
  // sum_{n > N} log(1 - a^2/n^2) = -a^2 (1/N - 1/(2N^2) + 1/(6N^3)) + O(a^4 / N^3)
  const double nn = double(terms);
  log_prod += -2.0 * a * a * (1.0 / nn - 0.5 / (nn * nn) + 1.0 / (6.0 * nn * nn * nn));
  return std::exp(log_prod) * length * length;
}

}  // namespace oracle
