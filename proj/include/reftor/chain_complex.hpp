#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "reftor/linalg.hpp"

namespace reftor {

/// Relative tolerance for d∘d = 0 checks.
inline constexpr double kComplexTolerance = 1e-10;

/// Tag of the element of Det(C) defined by the standard coordinate bases.
inline const std::string kStandardTag = "standard";

/// Finite cochain complex 0 -> C^0 -> C^1 -> ... -> C^m -> 0 of complex
/// vector spaces. Degrees outside [0, m] are zero spaces.
class GradedComplex {
 public:
  GradedComplex() = default;

  /// Builds the complex from explicit dimensions and differentials; the
  /// differential j maps C^j to C^{j+1} and must be dims[j+1] x dims[j].
  /// Pass dims.size() - 1 differentials (the last space has none).
  GradedComplex(std::vector<int> dims, std::vector<ComplexMatrix> differentials);

  /// Complex with every differential zero.
  static GradedComplex zero(std::vector<int> dims);

  int top_degree() const { return static_cast<int>(dims_.size()) - 1; }
  int dim(int j) const;
  const std::vector<int>& dims() const { return dims_; }
  int total_dim() const;

  /// The differential C^j -> C^{j+1}; a correctly shaped zero matrix for j
  /// outside [0, m-1].
  ComplexMatrix d(int j) const;
  const std::vector<ComplexMatrix>& differentials() const { return diffs_; }

 private:
  std::vector<int> dims_;
  std::vector<ComplexMatrix> diffs_;
};

/// True iff max_j |d_{j+1} d_j| <= tol (1 + |d_{j+1}| |d_j|).
bool verify_complex(const GradedComplex& c, double tol = kComplexTolerance);

/// Largest relative d∘d residual over degrees.
double complex_residual(const GradedComplex& c);

/// A nonzero element of a determinant line, stored as its coordinate with
/// respect to the element defined by the bases named in `basis_tag`.
struct DetLineElement {
  Complex coordinate{1.0, 0.0};
  std::string basis_tag = kStandardTag;
  /// (degree, dimension) pairs of the graded space the line is built from.
  std::vector<std::pair<int, int>> grading;

  /// Coordinate ratio this / other; both must live on the same line with the
  /// same basis tag (StructuralError otherwise).
  Complex ratio_to(const DetLineElement& other) const;
};

/// Tensor product of two lines: coordinates multiply and tags are joined.
DetLineElement tensor(const DetLineElement& a, const DetLineElement& b);

/// Per-degree representatives of a cohomology basis, plus the tag naming it.
struct CohomologyBasis {
  std::string tag;
  /// reps[j] is dim C^j x dim H^j; columns are cocycles.
  std::vector<ComplexMatrix> reps;
};

struct CohomologyDegree {
  int dim = 0;
  /// Orthonormal cocycles spanning a complement of im d_{j-1} inside ker d_j.
  ComplexMatrix basis;
};

struct Cohomology {
  std::vector<CohomologyDegree> degrees;
  /// ranks[j] = rank d_j.
  std::vector<int> ranks;
  /// Some singular value sat within 10x of the rank threshold.
  bool ill_conditioned_rank = false;

  std::vector<int> betti() const;
  bool acyclic() const;
  /// The representatives as a CohomologyBasis with tag "auto".
  CohomologyBasis as_basis() const;
};

inline const std::string kAutoCohomologyTag = "auto";

Cohomology cohomology(const GradedComplex& c);

/// Per-degree complements: complements[j] spans a complement of ker d_j in C^j
/// (so d_j maps it injectively). std::nullopt selects the right singular
/// vectors of d_j.
using Complements = std::optional<std::vector<ComplexMatrix>>;

/// Sign exponent N(C) attached to the canonical isomorphism. Depends only on
/// the dimension data: dims k_j, ranks r_j of d_j and cohomology dims b_j.
int canonical_sign_exponent(const std::vector<int>& dims, const std::vector<int>& ranks,
                            const std::vector<int>& betti);

/// Torsion of an acyclic complex: the image of the standard-basis element
/// under Det(C) -> C. With v_j a complement of ker d_j and A_j the matrix whose
/// columns are (d_{j-1} v_{j-1}, v_j) in standard coordinates,
///
///     phi(c) = (-1)^{N(C)} prod_j det(A_j)^{(-1)^{j+1}}.
///
/// For 0 -> C -a-> C -> 0 this gives a. Throws DomainError on non-acyclic
/// input and DegeneracyError if some A_j is singular.
DetLineElement torsion_acyclic(const GradedComplex& c, const Complements& complements = std::nullopt);

/// Canonical isomorphism Det(C) -> Det(H(C)) applied to `c` (an element given
/// relative to the standard bases), expressed relative to the cohomology basis
/// `h`. The assembled basis of C^j is (d_{j-1} v_{j-1}, h_j, v_j). Rescaling
/// the degree-j cohomology basis by s multiplies the result by s^{(-1)^{j+1}}.
DetLineElement canonical_iso(const GradedComplex& c, const DetLineElement& elem,
                             const CohomologyBasis& h, const Complements& complements = std::nullopt);

/// Same with the automatic (orthonormal) cohomology basis.
DetLineElement canonical_iso(const GradedComplex& c, const DetLineElement& elem);

/// Coordinates of cocycles in the given cohomology basis of degree j.
ComplexMatrix cohomology_coordinates(const GradedComplex& c, int j, const ComplexMatrix& basis,
                                     const ComplexMatrix& cocycles);

/// Chain map between two complexes: maps[j]: source^j -> target^j.
struct ChainMap {
  GradedComplex source;
  GradedComplex target;
  std::vector<ComplexMatrix> maps;

  /// maps[j], or a zero matrix of the right shape outside the stored range.
  ComplexMatrix at(int j) const;
  /// Largest relative residual of f d - d f.
  double commutation_residual() const;
};

/// 0 -> A -iota-> B -pi-> C -> 0.
struct ShortExactSequenceData {
  GradedComplex a, b, c;
  std::vector<ComplexMatrix> iota;
  std::vector<ComplexMatrix> pi;

  ComplexMatrix iota_at(int j) const;
  ComplexMatrix pi_at(int j) const;
  /// Throws StructuralError on shape errors and DomainError if the sequence is
  /// not an exact sequence of chain maps.
  void validate(double tol = 1e-9) const;
};

/// Fusion isomorphism Det(A) (x) Det(C) -> Det(B). In degree j the basis of
/// B^j is (iota a_j, lifted c_j); the result is a c prod_j det(M_j)^{(-1)^j}
/// relative to the standard basis of B.
DetLineElement fusion(const DetLineElement& a, const DetLineElement& c, const ShortExactSequenceData& ses);

/// Mapping cone of f: W -> C with Cone^j = W^j (+) C^{j-1} and differential
/// [[d_j, 0], [f_j, -dC_{j-1}]].
GradedComplex cone(const ChainMap& f, double tol = 1e-9);

/// Long exact cohomology sequence of a short exact sequence, realised as an
/// acyclic complex H^0A -> H^0B -> H^0C -> H^1A -> ..., with the induced
/// isomorphism Phi: Det H(A) (x) Det H(C) -> Det H(B).
struct LongExactSequence {
  GradedComplex complex;
  CohomologyBasis basis_a, basis_b, basis_c;
  /// Phi(h_A (x) h_C) = phi.coordinate * h_B for the three bases above.
  DetLineElement phi;
};

LongExactSequence les_of_ses(const ShortExactSequenceData& ses);

/// Same with caller-supplied cohomology bases.
LongExactSequence les_of_ses(const ShortExactSequenceData& ses, const CohomologyBasis& ha,
                             const CohomologyBasis& hb, const CohomologyBasis& hc);

/// Direct sum of two complexes (degrees aligned at 0).
GradedComplex direct_sum(const GradedComplex& x, const GradedComplex& y);

}  // namespace reftor
