#pragma once

#include <map>
#include <string>
#include <vector>

#include "reftor/chain_complex.hpp"

namespace reftor {

/// tol for relation residuals: representations are exact input data.
inline constexpr double kRepresentationTolerance = 1e-10;

/// One letter g^k of a group word.
struct Letter {
  std::string generator;
  int power = 1;
  bool operator==(const Letter&) const = default;
};

/// Group word, read left to right; the empty word is the identity.
using Word = std::vector<Letter>;

/// Parses "a b^-1 a^2", "a*b", "1" or "" (identity).
Word parse_word(const std::string& text);
std::string format_word(const Word& w);
Word inverse(const Word& w);
Word concat(const Word& a, const Word& b);

/// Boundary term: incidence times the lift word, attached to a face.
struct Incidence {
  std::string face;
  int coefficient = 1;
  Word word;
};

struct Cell {
  std::string id;
  int dim = 0;
  std::vector<Incidence> boundary;
  /// Membership in the boundary subcomplex K'.
  bool in_subcomplex = false;
};

struct CWData {
  std::vector<Cell> cells;
  std::vector<std::string> generators;
  std::vector<Word> relations;

  int top_dim() const;
  /// Cell ids of dimension j, in list order.
  std::vector<std::string> cells_of_dim(int j) const;
  const Cell& cell(const std::string& id) const;
  /// Throws StructuralError on unknown ids/generators, boundary faces of the
  /// wrong dimension, duplicate ids, or a K' that is not a subcomplex.
  void validate() const;
};

struct Representation {
  int rank = 1;
  std::map<std::string, ComplexMatrix> generators;

  /// rho(w); StructuralError for unknown generators.
  ComplexMatrix eval(const Word& w) const;
};

Representation trivial_representation(const CWData& k, int rank);

/// Maximum Frobenius residual |rho(r) - I| over the relations.
double validate_representation(const Representation& rho, const CWData& k);

/// Twisted cochain complex: dims n k_j; block (e, f) of d_{j-1} is the sum of
/// incidence * rho(word) over the boundary terms of e on f. Throws DataError
/// if d∘d ≠ 0 (naming a cell pair) and DomainError on invalid representations.
GradedComplex build_cochain(const CWData& k, const Representation& rho);

/// Cochains of K vanishing on K': the subcomplex supported on cells outside
/// K', realized on those coordinates.
GradedComplex build_relative(const CWData& k, const Representation& rho);

/// Cochain complex of the subcomplex K'.
GradedComplex build_boundary(const CWData& k, const Representation& rho);

/// 0 -> C(K,K') -> C(K) -> C(K') -> 0 by extension by zero and restriction.
ShortExactSequenceData restriction_sequence(const CWData& k, const Representation& rho);

DetLineElement sigma(const CWData& k, const Representation& rho);
DetLineElement sigma_boundary(const CWData& k, const Representation& rho);
DetLineElement sigma_relative(const CWData& k, const Representation& rho);

/// sigma (x) sigma_relative.
DetLineElement tau_section(const CWData& k, const Representation& rho);

struct SigmaRelation {
  /// nu(sigma'' (x) sigma') / sigma per representation (fusion conjugated by
  /// the canonical isomorphisms).
  std::vector<Complex> ratios;
  /// Phi(sigma'' (x) sigma') / sigma with Phi from the cohomology sequence.
  std::vector<Complex> les_ratios;
  int sign = 1;
  int les_sign = 1;
  bool pass = false;
  double max_deviation = 0.0;
};

/// Evaluates both ratios for each representation; pass iff every ratio is
/// within tol of +-1 and each sign is the same across the list.
SigmaRelation check_sigma_relation(const CWData& k, const std::vector<Representation>& reps, double tol = 1e-8);

struct TransmissionSplit {
  /// Cells of K_1 and K_2 outside N, and the cells of N.
  std::vector<std::string> interior1, interior2, separating;
  /// 0 -> C(K1,N) -> C(K1#K2) -> C(K2) -> 0.
  ShortExactSequenceData first;
  /// 0 -> C(K2,N) -> C(K1#K2) -> C(K1) -> 0.
  ShortExactSequenceData second;
};

/// Splits K along the subcomplex N (cell ids). K minus N must have exactly two
/// connected components (DomainError otherwise); the first component is the
/// one containing the earliest listed cell. The transmission complex uses the
/// coordinates (interior K1, interior K2, N) in each degree.
TransmissionSplit transmission_split(const CWData& k, const std::vector<std::string>& separating,
                                     const Representation& rho);

/// Replaces the lift of `cell` by g^{-1} times it: boundary words w of the
/// cell become g^{-1} w and words on it in cofaces become w g. The torsion
/// element changes by det rho(g)^{(-1)^j} for a j-cell.
CWData change_lift(const CWData& k, const std::string& cell, const Word& g);

/// Cohomology basis of the complex with a changed lift corresponding to `h`
/// (representatives transported by the coordinate change).
CohomologyBasis transport_basis(const CWData& k, const std::string& cell, const Word& g, const Representation& rho,
                                const CohomologyBasis& h);

/// Restriction of a cochain complex of K to the cells flagged in `mask`
/// (indexed like k.cells); realizes subcomplexes and open cell sets.
GradedComplex restrict_cells(const CWData& k, const Representation& rho, const std::vector<bool>& mask);

namespace fixtures {
/// One vertex, one edge with boundary t.v - v.
CWData circle();
/// Vertices v1, v2 and edges e1: v1 -> v2, e2: v2 -> v1 (word t on v1); K' = {v1, v2}.
CWData circle_two_vertices();
/// Edge from v0 to v1 with the v1 lift word t; K' = {v0, v1}.
CWData interval();
/// Disc made of two 2-cells glued along an interior edge; K' = boundary circle.
CWData disc();
/// Torus presentation <a, b | a b a^-1 b^-1> with one vertex, two edges, one face.
CWData torus();
}  // namespace fixtures

}  // namespace reftor
