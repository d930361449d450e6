#pragma once

#include <random>
#include <vector>

#include "reftor/chain_complex.hpp"
#include "reftor/refined_finite.hpp"

namespace reftor {

/// Seeded generator for the randomized property suites.
struct Sampler {
  std::mt19937_64 gen;
  explicit Sampler(unsigned long long seed) : gen(seed) {}
  double normal();
  double uniform(double a, double b);
  int integer(int lo, int hi);  // inclusive
  Complex cnormal();
  ComplexMatrix matrix(int rows, int cols);
  /// 1.5 I + 0.4 N, comfortably invertible.
  ComplexMatrix invertible(int n);
};

/// Random complex with prescribed ranks r_j of d_j and Betti numbers b_j,
/// conjugated by random invertible matrices. ranks.size() == betti.size().
GradedComplex random_complex(Sampler& rng, const std::vector<int>& ranks, const std::vector<int>& betti);

/// Random acyclic complex with `degrees` degrees and every dimension <= max_dim.
GradedComplex random_acyclic(Sampler& rng, int degrees, int max_dim);

/// Random complex, possibly with cohomology, every dimension <= max_dim.
GradedComplex random_any(Sampler& rng, int degrees, int max_dim);

/// 0 -> A -> B -> C -> 0 with B built as A (+) C twisted by a coupling that
/// produces nonzero connecting maps, then conjugated by a random basis change.
ShortExactSequenceData random_ses(Sampler& rng, const GradedComplex& a, const GradedComplex& c);

/// Random chirality complex of top degree m (odd) with per-degree dims <= max_dim:
/// Gamma_k = G_k, Gamma_{m-k} = G_k^{-1}, H_{m-k} = G_k^{-*} H_k G_k^{-1}.
ChiralityComplex random_chirality(Sampler& rng, int m, int max_dim);

}  // namespace reftor
