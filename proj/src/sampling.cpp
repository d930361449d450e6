#include "reftor/sampling.hpp"

#include <algorithm>

namespace reftor {

double Sampler::normal() { return std::normal_distribution<double>(0.0, 1.0)(gen); }
double Sampler::uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(gen); }
int Sampler::integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen); }
Complex Sampler::cnormal() { return {normal(), normal()}; }

ComplexMatrix Sampler::matrix(int rows, int cols) {
  ComplexMatrix m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = cnormal();
  return m;
}

ComplexMatrix Sampler::invertible(int n) {
  // Identity plus a moderate perturbation keeps the condition number tame.
  ComplexMatrix m = ComplexMatrix::Identity(n, n) * 1.5 + 0.4 * matrix(n, n);
  return m;
}

GradedComplex random_complex(Sampler& rng, const std::vector<int>& ranks, const std::vector<int>& betti) {
  const int m = static_cast<int>(ranks.size()) - 1;
  std::vector<int> dims;
  for (int j = 0; j <= m; ++j) dims.push_back((j > 0 ? ranks[static_cast<size_t>(j - 1)] : 0) + betti[static_cast<size_t>(j)] + ranks[static_cast<size_t>(j)]);
  std::vector<ComplexMatrix> g;
  for (int j = 0; j <= m; ++j) g.push_back(rng.invertible(dims[static_cast<size_t>(j)]));
  std::vector<ComplexMatrix> diffs;
  for (int j = 0; j < m; ++j) {
    const int r = ranks[static_cast<size_t>(j)];
    ComplexMatrix d = ComplexMatrix::Zero(dims[static_cast<size_t>(j + 1)], dims[static_cast<size_t>(j)]);
    // The last r coordinates of degree j map onto the first r of degree j+1.
    const int off = dims[static_cast<size_t>(j)] - r;
    for (int i = 0; i < r; ++i) d(i, off + i) = rng.uniform(0.5, 2.0);
    diffs.push_back(g[static_cast<size_t>(j + 1)] * d * g[static_cast<size_t>(j)].inverse());
  }
  return GradedComplex(dims, diffs);
}

GradedComplex random_acyclic(Sampler& rng, int degrees, int max_dim) {
  for (;;) {
    std::vector<int> ranks(static_cast<size_t>(degrees), 0), betti(static_cast<size_t>(degrees), 0);
    for (int j = 0; j + 1 < degrees; ++j) ranks[static_cast<size_t>(j)] = rng.integer(0, max_dim);
    bool ok = true;
    for (int j = 0; j < degrees; ++j) {
      const int k = (j > 0 ? ranks[static_cast<size_t>(j - 1)] : 0) + ranks[static_cast<size_t>(j)];
      if (k > max_dim) ok = false;
    }
    if (ok) return random_complex(rng, ranks, betti);
  }
}

GradedComplex random_any(Sampler& rng, int degrees, int max_dim) {
  for (;;) {
    std::vector<int> ranks(static_cast<size_t>(degrees), 0), betti(static_cast<size_t>(degrees), 0);
    for (int j = 0; j + 1 < degrees; ++j) ranks[static_cast<size_t>(j)] = rng.integer(0, 2);
    for (int j = 0; j < degrees; ++j) betti[static_cast<size_t>(j)] = rng.integer(0, 2);
    bool ok = true;
    for (int j = 0; j < degrees; ++j) {
      const int k = (j > 0 ? ranks[static_cast<size_t>(j - 1)] : 0) + ranks[static_cast<size_t>(j)] + betti[static_cast<size_t>(j)];
      if (k > max_dim) ok = false;
    }
    if (ok) return random_complex(rng, ranks, betti);
  }
}

ShortExactSequenceData random_ses(Sampler& rng, const GradedComplex& a, const GradedComplex& c) {
  const int m = std::max(a.top_degree(), c.top_degree());
  const auto coh_a = cohomology(a);
  const auto coh_c = cohomology(c);
  std::vector<int> dims;
  for (int j = 0; j <= m; ++j) dims.push_back(a.dim(j) + c.dim(j));
  // theta_j: C^j -> A^{j+1} with dA theta + theta dC = 0: a homotopy part plus
  // products (cocycle of A) x (functional on C killing boundaries).
  std::vector<ComplexMatrix> hom;
  for (int j = 0; j <= m + 1; ++j) hom.push_back(rng.matrix(a.dim(j), c.dim(j)));
  std::vector<ComplexMatrix> diffs;
  for (int j = 0; j < m; ++j) {
    ComplexMatrix theta = a.d(j) * hom[static_cast<size_t>(j)] - hom[static_cast<size_t>(j + 1)] * c.d(j);
    if (j + 1 <= a.top_degree() && j <= c.top_degree()) {
      const ComplexMatrix za = null_space(a.d(j + 1).rows() ? a.d(j + 1) : ComplexMatrix::Zero(1, a.dim(j + 1)));
      const ComplexMatrix prev = j > 0 ? c.d(j - 1) : ComplexMatrix::Zero(c.dim(j), 0);
      // Functionals vanishing on im dC_{j-1}: left null space of prev.
      const ComplexMatrix fc = prev.cols() ? null_space(prev.adjoint()) : ComplexMatrix(ComplexMatrix::Identity(c.dim(j), c.dim(j)));
      if (za.cols() && fc.cols())
        theta += za * rng.matrix(static_cast<int>(za.cols()), static_cast<int>(fc.cols())) * fc.adjoint();
    }
    ComplexMatrix d = ComplexMatrix::Zero(dims[static_cast<size_t>(j + 1)], dims[static_cast<size_t>(j)]);
    d.topLeftCorner(a.dim(j + 1), a.dim(j)) = a.d(j);
    d.topRightCorner(a.dim(j + 1), c.dim(j)) = theta;
    d.bottomRightCorner(c.dim(j + 1), c.dim(j)) = c.d(j);
    diffs.push_back(d);
  }
  std::vector<ComplexMatrix> g;
  for (int j = 0; j <= m; ++j) g.push_back(rng.invertible(dims[static_cast<size_t>(j)]));
  ShortExactSequenceData ses;
  ses.a = a;
  ses.c = c;
  std::vector<ComplexMatrix> bd;
  for (int j = 0; j < m; ++j) bd.push_back(g[static_cast<size_t>(j + 1)] * diffs[static_cast<size_t>(j)] * g[static_cast<size_t>(j)].inverse());
  ses.b = GradedComplex(dims, bd);
  for (int j = 0; j <= m; ++j) {
    const int na = a.dim(j), nc = c.dim(j), nb = dims[static_cast<size_t>(j)];
    ComplexMatrix inc = ComplexMatrix::Zero(nb, na);
    inc.topRows(na).setIdentity();
    ComplexMatrix proj = ComplexMatrix::Zero(nc, nb);
    proj.rightCols(nc).setIdentity();
    ses.iota.push_back(g[static_cast<size_t>(j)] * inc);
    ses.pi.push_back(proj * g[static_cast<size_t>(j)].inverse());
  }
  return ses;
}

ChiralityComplex random_chirality(Sampler& rng, int m, int max_dim) {
  const int r = (m + 1) / 2;
  for (;;) {
    std::vector<int> dims(static_cast<size_t>(m + 1));
    for (int j = 0; j < r; ++j) dims[static_cast<size_t>(j)] = dims[static_cast<size_t>(m - j)] = rng.integer(1, max_dim);
    std::vector<int> ranks(static_cast<size_t>(m + 1), 0), betti(static_cast<size_t>(m + 1));
    for (int j = 0; j < m; ++j) ranks[static_cast<size_t>(j)] = rng.integer(0, max_dim);
    bool ok = true;
    for (int j = 0; j <= m; ++j) {
      const int b = dims[static_cast<size_t>(j)] - (j > 0 ? ranks[static_cast<size_t>(j - 1)] : 0) - ranks[static_cast<size_t>(j)];
      if (b < 0) ok = false;
      betti[static_cast<size_t>(j)] = b;
    }
    if (!ok) continue;
    ChiralityComplex x;
    x.complex = random_complex(rng, ranks, betti);
    x.gamma.resize(static_cast<size_t>(m + 1));
    x.metric.resize(static_cast<size_t>(m + 1));
    for (int k = 0; k < r; ++k) {
      const int n = dims[static_cast<size_t>(k)];
      const ComplexMatrix g = rng.invertible(n);
      const ComplexMatrix a = rng.matrix(n, n);
      const ComplexMatrix h = a * a.adjoint() * 0.3 + ComplexMatrix::Identity(n, n);
      const ComplexMatrix gi = g.inverse();
      x.gamma[static_cast<size_t>(k)] = g;
      x.gamma[static_cast<size_t>(m - k)] = gi;
      x.metric[static_cast<size_t>(k)] = h;
      ComplexMatrix hm = gi.adjoint() * h * gi;
      x.metric[static_cast<size_t>(m - k)] = 0.5 * (hm + hm.adjoint());
    }
    return x;
  }
}

}  // namespace reftor
