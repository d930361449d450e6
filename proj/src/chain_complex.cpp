#include "reftor/chain_complex.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "reftor/errors.hpp"

namespace reftor {

namespace {

inline const std::string kTrivialTag = "trivial";

ComplexMatrix zeros(int rows, int cols) { return ComplexMatrix::Zero(rows, cols); }

// Orthonormal basis of (ker d)^perp, i.e. right singular vectors with
// nonzero singular value.
ComplexMatrix row_space(const ComplexMatrix& d, int cols) {
  if (d.rows() == 0 || cols == 0) return zeros(cols, 0);
  return column_space(d.adjoint());
}

int rank_of(const ComplexMatrix& d) { return d.size() == 0 ? 0 : numerical_rank(d).rank; }

std::vector<std::pair<int, int>> grading_of(const std::vector<int>& dims) {
  std::vector<std::pair<int, int>> g;
  for (size_t j = 0; j < dims.size(); ++j) g.emplace_back(static_cast<int>(j), dims[j]);
  return g;
}

Complex signed_power(Complex x, int j) { return (j % 2 == 0) ? 1.0 / x : x; }

struct Splitting {
  std::vector<int> ranks;
  std::vector<ComplexMatrix> complements;
};

Splitting resolve_complements(const GradedComplex& c, const Complements& complements) {
  Splitting s;
  const int m = c.top_degree();
  for (int j = 0; j <= m; ++j) {
    const ComplexMatrix d = c.d(j);
    ComplexMatrix v;
    if (complements) {
      if (static_cast<int>(complements->size()) != m + 1)
        throw StructuralError("complements: expected one matrix per degree");
      v = (*complements)[static_cast<size_t>(j)];
      if (v.rows() != c.dim(j)) throw StructuralError("complements: wrong row count in degree " + std::to_string(j));
      const int r = rank_of(d);
      if (v.cols() != r || rank_of(d * v) != r)
        throw DomainError("complements: degree " + std::to_string(j) + " does not complement the kernel");
    } else {
      v = row_space(d, c.dim(j));
    }
    s.ranks.push_back(static_cast<int>(v.cols()));
    s.complements.push_back(v);
  }
  return s;
}

// phi(standard element) relative to the given cohomology representatives.
Complex assembled_coordinate(const GradedComplex& c, const std::vector<ComplexMatrix>& h, const Splitting& s) {
  const int m = c.top_degree();
  Complex coord(1.0, 0.0);
  std::vector<int> betti;
  for (int j = 0; j <= m; ++j) {
    const ComplexMatrix& hj = h[static_cast<size_t>(j)];
    betti.push_back(static_cast<int>(hj.cols()));
    ComplexMatrix prev = j > 0 ? ComplexMatrix(c.d(j - 1) * s.complements[static_cast<size_t>(j - 1)])
                               : zeros(c.dim(j), 0);
    ComplexMatrix a = hstack(hstack(prev, hj), s.complements[static_cast<size_t>(j)]);
    if (a.cols() != c.dim(j))
      throw DomainError("degree " + std::to_string(j) + ": assembled basis has " + std::to_string(a.cols()) +
                        " vectors for dimension " + std::to_string(c.dim(j)));
    const Complex det = determinant(a);
    if (!(std::abs(det) > 1e-300) || !std::isfinite(std::abs(det)))
      throw DegeneracyError("degree " + std::to_string(j) + ": assembled basis is singular");
    coord *= signed_power(det, j);
  }
  if (canonical_sign_exponent(c.dims(), s.ranks, betti) % 2 != 0) coord = -coord;
  return coord;
}

void check_cohomology_basis(const GradedComplex& c, const CohomologyBasis& h) {
  const int m = c.top_degree();
  if (static_cast<int>(h.reps.size()) != m + 1)
    throw StructuralError("cohomology basis '" + h.tag + "': expected one matrix per degree");
  for (int j = 0; j <= m; ++j) {
    const ComplexMatrix& r = h.reps[static_cast<size_t>(j)];
    if (r.cols() > 0 && r.rows() != c.dim(j))
      throw StructuralError("cohomology basis '" + h.tag + "': wrong row count in degree " + std::to_string(j));
    require_finite(r, "cohomology basis");
    if (r.cols() == 0) continue;
    const double scale = 1.0 + frobenius(c.d(j)) * frobenius(r);
    if (frobenius(c.d(j) * r) > 1e-8 * scale)
      throw DomainError("cohomology basis '" + h.tag + "': degree " + std::to_string(j) + " contains non-cocycles");
  }
}

std::vector<ComplexMatrix> shaped_reps(const GradedComplex& c, const CohomologyBasis& h) {
  std::vector<ComplexMatrix> reps;
  for (int j = 0; j <= c.top_degree(); ++j) {
    const ComplexMatrix& r = h.reps[static_cast<size_t>(j)];
    reps.push_back(r.cols() == 0 ? zeros(c.dim(j), 0) : r);
  }
  return reps;
}

}  // namespace

GradedComplex::GradedComplex(std::vector<int> dims, std::vector<ComplexMatrix> differentials)
    : dims_(std::move(dims)), diffs_(std::move(differentials)) {
  if (dims_.empty()) throw StructuralError("complex needs at least one degree");
  for (int k : dims_)
    if (k < 0) throw StructuralError("negative dimension");
  if (diffs_.size() + 1 != dims_.size())
    throw StructuralError("complex with " + std::to_string(dims_.size()) + " degrees needs " +
                          std::to_string(dims_.size() - 1) + " differentials");
  for (size_t j = 0; j < diffs_.size(); ++j) {
    ComplexMatrix& d = diffs_[j];
    if (d.size() == 0) d = zeros(dims_[j + 1], dims_[j]);
    if (d.rows() != dims_[j + 1] || d.cols() != dims_[j])
      throw StructuralError("differential " + std::to_string(j) + " has shape " + std::to_string(d.rows()) + "x" +
                            std::to_string(d.cols()) + ", expected " + std::to_string(dims_[j + 1]) + "x" +
                            std::to_string(dims_[j]));
    require_finite(d, "differential");
  }
}

GradedComplex GradedComplex::zero(std::vector<int> dims) {
  std::vector<ComplexMatrix> d;
  for (size_t j = 0; j + 1 < dims.size(); ++j) d.push_back(zeros(dims[j + 1], dims[j]));
  return GradedComplex(std::move(dims), std::move(d));
}

int GradedComplex::dim(int j) const {
  if (j < 0 || j > top_degree()) return 0;
  return dims_[static_cast<size_t>(j)];
}

int GradedComplex::total_dim() const {
  int t = 0;
  for (int k : dims_) t += k;
  return t;
}

ComplexMatrix GradedComplex::d(int j) const {
  if (j < 0 || j >= top_degree()) return zeros(dim(j + 1), dim(j));
  return diffs_[static_cast<size_t>(j)];
}

double complex_residual(const GradedComplex& c) {
  double worst = 0.0;
  for (int j = 0; j + 1 < c.top_degree(); ++j) {
    const ComplexMatrix a = c.d(j), b = c.d(j + 1);
    const double r = frobenius(b * a) / (1.0 + frobenius(b) * frobenius(a));
    worst = std::max(worst, r);
  }
  return worst;
}

bool verify_complex(const GradedComplex& c, double tol) { return complex_residual(c) <= tol; }

Complex DetLineElement::ratio_to(const DetLineElement& other) const {
  if (basis_tag != other.basis_tag)
    throw StructuralError("determinant-line tags differ: '" + basis_tag + "' vs '" + other.basis_tag + "'");
  if (grading != other.grading) throw StructuralError("determinant lines of different graded spaces");
  return coordinate / other.coordinate;
}

DetLineElement tensor(const DetLineElement& a, const DetLineElement& b) {
  DetLineElement out;
  out.coordinate = a.coordinate * b.coordinate;
  out.basis_tag = a.basis_tag + "(x)" + b.basis_tag;
  out.grading = a.grading;
  out.grading.insert(out.grading.end(), b.grading.begin(), b.grading.end());
  return out;
}

std::vector<int> Cohomology::betti() const {
  std::vector<int> b;
  for (const auto& d : degrees) b.push_back(d.dim);
  return b;
}

bool Cohomology::acyclic() const {
  return std::all_of(degrees.begin(), degrees.end(), [](const CohomologyDegree& d) { return d.dim == 0; });
}

CohomologyBasis Cohomology::as_basis() const {
  CohomologyBasis h;
  h.tag = kAutoCohomologyTag;
  for (const auto& d : degrees) h.reps.push_back(d.basis);
  return h;
}

Cohomology cohomology(const GradedComplex& c) {
  Cohomology out;
  const int m = c.top_degree();
  for (int j = 0; j <= m; ++j) {
    const ComplexMatrix d = c.d(j);
    if (d.size() == 0) {
      out.ranks.push_back(0);
      continue;
    }
    const RankInfo info = numerical_rank(d);
    out.ranks.push_back(info.rank);
    out.ill_conditioned_rank = out.ill_conditioned_rank || info.ill_conditioned;
  }
  for (int j = 0; j <= m; ++j) {
    const int k = c.dim(j);
    const ComplexMatrix ker = c.d(j).size() == 0 ? ComplexMatrix(ComplexMatrix::Identity(k, k)) : null_space(c.d(j));
    const ComplexMatrix im = j > 0 ? c.d(j - 1) : zeros(k, 0);
    CohomologyDegree deg;
    deg.dim = k - out.ranks[static_cast<size_t>(j)] - (j > 0 ? out.ranks[static_cast<size_t>(j - 1)] : 0);
    if (deg.dim < 0) throw DegeneracyError("negative cohomology dimension (d∘d ≠ 0?)");
    deg.basis = deg.dim > 0 ? complement_in(ker, im) : zeros(k, 0);
    if (deg.basis.cols() != deg.dim) throw DegeneracyError("inconsistent rank decisions in degree " + std::to_string(j));
    out.degrees.push_back(std::move(deg));
  }
  return out;
}

int canonical_sign_exponent(const std::vector<int>& dims, const std::vector<int>& ranks,
                            const std::vector<int>& betti) {
  const int m = static_cast<int>(dims.size()) - 1;
  const int half = (m + 1) / 2;
  auto r = [&](int j) { return j >= 0 && j < static_cast<int>(ranks.size()) ? ranks[static_cast<size_t>(j)] : 0; };
  auto b = [&](int j) { return j >= 0 && j < static_cast<int>(betti.size()) ? betti[static_cast<size_t>(j)] : 0; };
  long long n = 0;
  // Cross terms: moving image columns of one summand past the cohomology and
  // complement columns of the other.
  for (int j = 1; j < m - j; ++j) n += static_cast<long long>(r(j)) * r(m - j);
  for (int j = 0; j <= m; ++j) n += static_cast<long long>(r(j - 1)) * b(j);
  for (int j = 0; j + 1 < half; ++j) n += r(j);
  n += static_cast<long long>(half - 1) * r(half - 1);
  return static_cast<int>(n % 2);
}

DetLineElement torsion_acyclic(const GradedComplex& c, const Complements& complements) {
  const Cohomology h = cohomology(c);
  if (!h.acyclic()) throw DomainError("torsion_acyclic: complex is not acyclic");
  const Splitting s = resolve_complements(c, complements);
  std::vector<ComplexMatrix> empty;
  for (int j = 0; j <= c.top_degree(); ++j) empty.push_back(zeros(c.dim(j), 0));
  DetLineElement out;
  out.coordinate = assembled_coordinate(c, empty, s);
  out.basis_tag = kTrivialTag;
  out.grading = grading_of(std::vector<int>(static_cast<size_t>(c.top_degree() + 1), 0));
  return out;
}

DetLineElement canonical_iso(const GradedComplex& c, const DetLineElement& elem, const CohomologyBasis& h,
                             const Complements& complements) {
  if (elem.basis_tag != kStandardTag)
    throw StructuralError("canonical_iso: input element must be given relative to the standard basis, got '" +
                          elem.basis_tag + "'");
  check_cohomology_basis(c, h);
  const Cohomology coh = cohomology(c);
  const std::vector<ComplexMatrix> reps = shaped_reps(c, h);
  for (int j = 0; j <= c.top_degree(); ++j)
    if (reps[static_cast<size_t>(j)].cols() != coh.degrees[static_cast<size_t>(j)].dim)
      throw DomainError("cohomology basis '" + h.tag + "': degree " + std::to_string(j) + " has " +
                        std::to_string(reps[static_cast<size_t>(j)].cols()) + " vectors, cohomology has dimension " +
                        std::to_string(coh.degrees[static_cast<size_t>(j)].dim));
  const Splitting s = resolve_complements(c, complements);
  DetLineElement out;
  out.coordinate = elem.coordinate * assembled_coordinate(c, reps, s);
  out.basis_tag = coh.acyclic() ? kTrivialTag : h.tag;
  out.grading = grading_of(coh.betti());
  return out;
}

DetLineElement canonical_iso(const GradedComplex& c, const DetLineElement& elem) {
  return canonical_iso(c, elem, cohomology(c).as_basis());
}

ComplexMatrix cohomology_coordinates(const GradedComplex& c, int j, const ComplexMatrix& basis,
                                     const ComplexMatrix& cocycles) {
  const int k = c.dim(j);
  const ComplexMatrix b = basis.cols() == 0 ? zeros(k, 0) : basis;
  if (cocycles.cols() == 0) return zeros(static_cast<int>(b.cols()), 0);
  const ComplexMatrix im = j > 0 ? column_space(c.d(j - 1)) : zeros(k, 0);
  const ComplexMatrix x = coordinates_in(hstack(b, im), cocycles);
  return x.topRows(b.cols());
}

ComplexMatrix ChainMap::at(int j) const {
  if (j < 0 || j >= static_cast<int>(maps.size()) || maps[static_cast<size_t>(j)].size() == 0)
    return zeros(target.dim(j), source.dim(j));
  return maps[static_cast<size_t>(j)];
}

double ChainMap::commutation_residual() const {
  const int m = std::max(source.top_degree(), target.top_degree());
  double worst = 0.0;
  for (int j = 0; j <= m; ++j) {
    const ComplexMatrix f = at(j);
    if (f.rows() != target.dim(j) || f.cols() != source.dim(j))
      throw StructuralError("chain map degree " + std::to_string(j) + " has the wrong shape");
    const ComplexMatrix lhs = at(j + 1) * source.d(j);
    const ComplexMatrix rhs = target.d(j) * f;
    const double scale = 1.0 + frobenius(at(j + 1)) * frobenius(source.d(j)) + frobenius(target.d(j)) * frobenius(f);
    worst = std::max(worst, frobenius(lhs - rhs) / scale);
  }
  return worst;
}

ComplexMatrix ShortExactSequenceData::iota_at(int j) const {
  if (j < 0 || j >= static_cast<int>(iota.size()) || iota[static_cast<size_t>(j)].size() == 0)
    return zeros(b.dim(j), a.dim(j));
  return iota[static_cast<size_t>(j)];
}

ComplexMatrix ShortExactSequenceData::pi_at(int j) const {
  if (j < 0 || j >= static_cast<int>(pi.size()) || pi[static_cast<size_t>(j)].size() == 0)
    return zeros(c.dim(j), b.dim(j));
  return pi[static_cast<size_t>(j)];
}

void ShortExactSequenceData::validate(double tol) const {
  const int m = std::max({a.top_degree(), b.top_degree(), c.top_degree()});
  for (int j = 0; j <= m; ++j) {
    const ComplexMatrix i = iota_at(j), p = pi_at(j);
    const std::string deg = std::to_string(j);
    if (i.rows() != b.dim(j) || i.cols() != a.dim(j)) throw StructuralError("iota degree " + deg + " has the wrong shape");
    if (p.rows() != c.dim(j) || p.cols() != b.dim(j)) throw StructuralError("pi degree " + deg + " has the wrong shape");
    if (a.dim(j) + c.dim(j) != b.dim(j)) throw DomainError("dimensions do not add up in degree " + deg);
    if (rank_of(i) != a.dim(j)) throw DomainError("iota is not injective in degree " + deg);
    if (rank_of(p) != c.dim(j)) throw DomainError("pi is not surjective in degree " + deg);
    if (frobenius(p * i) > tol * (1.0 + frobenius(p) * frobenius(i)))
      throw DomainError("pi∘iota ≠ 0 in degree " + deg);
  }
  ChainMap fi{a, b, iota}, fp{b, c, pi};
  if (fi.commutation_residual() > tol) throw DomainError("iota is not a chain map");
  if (fp.commutation_residual() > tol) throw DomainError("pi is not a chain map");
}

DetLineElement fusion(const DetLineElement& a, const DetLineElement& c, const ShortExactSequenceData& ses) {
  if (a.basis_tag != kStandardTag || c.basis_tag != kStandardTag)
    throw StructuralError("fusion: factors must be given relative to standard bases");
  ses.validate();
  const int m = ses.b.top_degree();
  Complex coord = a.coordinate * c.coordinate;
  for (int j = 0; j <= m; ++j) {
    const ComplexMatrix p = ses.pi_at(j);
    const ComplexMatrix lifts =
        p.rows() == 0 ? zeros(ses.b.dim(j), 0) : ComplexMatrix(p.completeOrthogonalDecomposition().pseudoInverse());
    const Complex det = determinant(hstack(ses.iota_at(j), lifts));
    if (!(std::abs(det) > 1e-300)) throw DegeneracyError("fusion: singular basis in degree " + std::to_string(j));
    coord *= (j % 2 == 0) ? det : 1.0 / det;
  }
  DetLineElement out;
  out.coordinate = coord;
  out.basis_tag = kStandardTag;
  out.grading = grading_of(ses.b.dims());
  return out;
}

GradedComplex cone(const ChainMap& f, double tol) {
  const double res = f.commutation_residual();
  if (res > tol) throw DomainError("cone: map is not a chain map (residual " + std::to_string(res) + ")");
  const GradedComplex& w = f.source;
  const GradedComplex& c = f.target;
  const int m = std::max(w.top_degree(), c.top_degree()) + 1;
  std::vector<int> dims;
  for (int j = 0; j <= m; ++j) dims.push_back(w.dim(j) + c.dim(j - 1));
  std::vector<ComplexMatrix> diffs;
  for (int j = 0; j < m; ++j) {
    ComplexMatrix d = zeros(dims[static_cast<size_t>(j + 1)], dims[static_cast<size_t>(j)]);
    const int wj = w.dim(j), wj1 = w.dim(j + 1), cj1 = c.dim(j - 1), cj = c.dim(j);
    d.topLeftCorner(wj1, wj) = w.d(j);
    d.bottomLeftCorner(cj, wj) = f.at(j);
    d.bottomRightCorner(cj, cj1) = -c.d(j - 1);
    diffs.push_back(d);
  }
  return GradedComplex(dims, diffs);
}

LongExactSequence les_of_ses(const ShortExactSequenceData& ses) {
  return les_of_ses(ses, cohomology(ses.a).as_basis(), cohomology(ses.b).as_basis(), cohomology(ses.c).as_basis());
}

LongExactSequence les_of_ses(const ShortExactSequenceData& ses, const CohomologyBasis& ha, const CohomologyBasis& hb,
                             const CohomologyBasis& hc) {
  ses.validate();
  check_cohomology_basis(ses.a, ha);
  check_cohomology_basis(ses.b, hb);
  check_cohomology_basis(ses.c, hc);
  const std::vector<ComplexMatrix> ra = shaped_reps(ses.a, ha), rb = shaped_reps(ses.b, hb), rc = shaped_reps(ses.c, hc);
  const int m = std::max({ses.a.top_degree(), ses.b.top_degree(), ses.c.top_degree()});
  auto rep = [](const std::vector<ComplexMatrix>& r, const GradedComplex& x, int j) {
    return j <= x.top_degree() ? r[static_cast<size_t>(j)] : zeros(0, 0);
  };

  std::vector<int> dims;
  std::vector<ComplexMatrix> diffs;
  for (int j = 0; j <= m; ++j) {
    const ComplexMatrix haj = rep(ra, ses.a, j), hbj = rep(rb, ses.b, j), hcj = rep(rc, ses.c, j);
    const int na = static_cast<int>(haj.cols()), nb = static_cast<int>(hbj.cols()), nc = static_cast<int>(hcj.cols());
    dims.insert(dims.end(), {na, nb, nc});
    diffs.push_back(nb == 0 || na == 0 ? zeros(nb, na)
                                       : cohomology_coordinates(ses.b, j, hbj, ses.iota_at(j) * haj));
    diffs.push_back(nc == 0 || nb == 0 ? zeros(nc, nb) : cohomology_coordinates(ses.c, j, hcj, ses.pi_at(j) * hbj));
    if (j < m) {
      const ComplexMatrix haj1 = rep(ra, ses.a, j + 1);
      const int na1 = static_cast<int>(haj1.cols());
      if (na1 == 0 || nc == 0) {
        diffs.push_back(zeros(na1, nc));
      } else {
        // Connecting map: lift, apply the differential, pull back along iota.
        const ComplexMatrix p = ses.pi_at(j);
        const ComplexMatrix lift = p.completeOrthogonalDecomposition().pseudoInverse() * hcj;
        const ComplexMatrix db = ses.b.d(j) * lift;
        const ComplexMatrix a = coordinates_in(ses.iota_at(j + 1), db);
        diffs.push_back(cohomology_coordinates(ses.a, j + 1, haj1, a));
      }
    }
  }
  // Maps that vanish exactly (e.g. H(A) -> H(B) when the connecting map is
  // onto) come out as roundoff; judge ranks on the scale of the whole sequence.
  double scale = 1.0;
  for (const auto& d : diffs) scale = std::max(scale, frobenius(d));
  for (auto& d : diffs) d = truncate_singular_values(d, kRankTolerance * scale);
  LongExactSequence out;
  out.complex = GradedComplex(dims, diffs);
  if (!cohomology(out.complex).acyclic())
    throw DegeneracyError("long exact sequence is not exact (connecting-map rank deficiency)");
  out.basis_a = ha;
  out.basis_b = hb;
  out.basis_c = hc;
  out.phi = torsion_acyclic(out.complex);
  out.phi.basis_tag = ha.tag + "(x)" + hc.tag + "->" + hb.tag;
  out.phi.grading = grading_of(cohomology(ses.b).betti());
  return out;
}

GradedComplex direct_sum(const GradedComplex& x, const GradedComplex& y) {
  const int m = std::max(x.top_degree(), y.top_degree());
  std::vector<int> dims;
  std::vector<ComplexMatrix> diffs;
  for (int j = 0; j <= m; ++j) dims.push_back(x.dim(j) + y.dim(j));
  for (int j = 0; j < m; ++j) diffs.push_back(block_diag(x.d(j), y.d(j)));
  return GradedComplex(dims, diffs);
}

}  // namespace reftor
