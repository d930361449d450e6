#include "reftor/cw_twisted.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "reftor/errors.hpp"

namespace reftor {

namespace {

int sign_of(Complex x) { return x.real() >= 0.0 ? 1 : -1; }

struct CellIndex {
  // Position of each cell inside its degree block.
  std::map<std::string, int> slot;
  std::vector<std::vector<int>> by_dim;  // cell list indices per degree
};

CellIndex index_cells(const CWData& k, const std::vector<bool>& mask) {
  CellIndex idx;
  idx.by_dim.resize(static_cast<size_t>(std::max(k.top_dim(), 0) + 1));
  for (size_t i = 0; i < k.cells.size(); ++i) {
    if (!mask[i]) continue;
    const Cell& c = k.cells[i];
    auto& list = idx.by_dim[static_cast<size_t>(c.dim)];
    idx.slot[c.id] = static_cast<int>(list.size());
    list.push_back(static_cast<int>(i));
  }
  return idx;
}

ComplexMatrix selection(int n, const std::vector<int>& rows_in_full, int full) {
  // Matrix of the coordinate inclusion of a subset of cells (n x n blocks).
  ComplexMatrix s = ComplexMatrix::Zero(full * n, static_cast<int>(rows_in_full.size()) * n);
  for (size_t i = 0; i < rows_in_full.size(); ++i)
    s.block(rows_in_full[i] * n, static_cast<int>(i) * n, n, n).setIdentity();
  return s;
}

// Position of each masked cell inside the full degree block.
std::vector<int> positions(const CWData& k, int dim, const std::vector<bool>& mask) {
  std::vector<int> out;
  int pos = 0;
  for (size_t i = 0; i < k.cells.size(); ++i) {
    if (k.cells[i].dim != dim) continue;
    if (mask[i]) out.push_back(pos);
    ++pos;
  }
  return out;
}

std::vector<bool> subcomplex_mask(const CWData& k) {
  std::vector<bool> m;
  for (const Cell& c : k.cells) m.push_back(c.in_subcomplex);
  return m;
}

std::vector<bool> complement(const std::vector<bool>& m) {
  std::vector<bool> out(m.size());
  for (size_t i = 0; i < m.size(); ++i) out[i] = !m[i];
  return out;
}

GradedComplex full_complex_unchecked(const CWData& k, const Representation& rho, const std::vector<bool>& mask) {
  const int n = rho.rank;
  const CellIndex idx = index_cells(k, mask);
  const int top = k.top_dim();
  std::vector<int> dims;
  for (int j = 0; j <= top; ++j) dims.push_back(static_cast<int>(idx.by_dim[static_cast<size_t>(j)].size()) * n);
  std::vector<ComplexMatrix> diffs;
  for (int j = 0; j < top; ++j) {
    ComplexMatrix d = ComplexMatrix::Zero(dims[static_cast<size_t>(j + 1)], dims[static_cast<size_t>(j)]);
    for (int ci : idx.by_dim[static_cast<size_t>(j + 1)]) {
      const Cell& e = k.cells[static_cast<size_t>(ci)];
      const int row = idx.slot.at(e.id);
      for (const Incidence& inc : e.boundary) {
        auto it = idx.slot.find(inc.face);
        if (it == idx.slot.end()) continue;  // face outside the selected cells
        d.block(row * n, it->second * n, n, n) += static_cast<double>(inc.coefficient) * rho.eval(inc.word);
      }
    }
    diffs.push_back(d);
  }
  return GradedComplex(dims, diffs);
}

void check_twisted_square(const CWData& k, const Representation& rho, const GradedComplex& c) {
  const int n = rho.rank;
  for (int j = 0; j + 1 < c.top_degree(); ++j) {
    const ComplexMatrix a = c.d(j), b = c.d(j + 1);
    const ComplexMatrix sq = b * a;
    const double scale = 1.0 + frobenius(a) * frobenius(b);
    if (frobenius(sq) <= kComplexTolerance * scale) continue;
    const auto hi = k.cells_of_dim(j + 2), lo = k.cells_of_dim(j);
    for (size_t r = 0; r < hi.size(); ++r)
      for (size_t q = 0; q < lo.size(); ++q)
        if (sq.block(static_cast<int>(r) * n, static_cast<int>(q) * n, n, n).norm() > kComplexTolerance * scale)
          throw DataError("twisted boundary does not square to zero between cells '" + hi[r] + "' and '" + lo[q] +
                          "' (residual " + std::to_string(sq.norm()) + ")");
    throw DataError("twisted boundary does not square to zero");
  }
}

void require_valid(const Representation& rho, const CWData& k) {
  const double r = validate_representation(rho, k);
  if (r > kRepresentationTolerance)
    throw DomainError("representation violates a relation (residual " + std::to_string(r) + ")");
}

}  // namespace

Word parse_word(const std::string& text) {
  std::string cleaned = text;
  std::replace(cleaned.begin(), cleaned.end(), '*', ' ');
  std::istringstream in(cleaned);
  Word w;
  std::string tok;
  while (in >> tok) {
    if (tok == "1") continue;
    Letter l;
    const auto caret = tok.find('^');
    l.generator = tok.substr(0, caret);
    if (l.generator.empty()) throw StructuralError("malformed word '" + text + "'");
    if (caret != std::string::npos) {
      try {
        size_t used = 0;
        l.power = std::stoi(tok.substr(caret + 1), &used);
        if (used != tok.size() - caret - 1) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw StructuralError("malformed exponent in word '" + text + "'");
      }
    }
    if (l.power != 0) w.push_back(l);
  }
  return w;
}

std::string format_word(const Word& w) {
  if (w.empty()) return "1";
  std::string out;
  for (const Letter& l : w) {
    if (!out.empty()) out += ' ';
    out += l.generator;
    if (l.power != 1) out += "^" + std::to_string(l.power);
  }
  return out;
}

Word inverse(const Word& w) {
  Word out(w.rbegin(), w.rend());
  for (Letter& l : out) l.power = -l.power;
  return out;
}

Word concat(const Word& a, const Word& b) {
  Word out = a;
  for (const Letter& l : b) {
    if (!out.empty() && out.back().generator == l.generator) {
      out.back().power += l.power;
      if (out.back().power == 0) out.pop_back();
    } else {
      out.push_back(l);
    }
  }
  return out;
}

int CWData::top_dim() const {
  int t = 0;
  for (const Cell& c : cells) t = std::max(t, c.dim);
  return t;
}

std::vector<std::string> CWData::cells_of_dim(int j) const {
  std::vector<std::string> out;
  for (const Cell& c : cells)
    if (c.dim == j) out.push_back(c.id);
  return out;
}

const Cell& CWData::cell(const std::string& id) const {
  for (const Cell& c : cells)
    if (c.id == id) return c;
  throw StructuralError("unknown cell '" + id + "'");
}

void CWData::validate() const {
  if (cells.empty()) throw StructuralError("CW complex has no cells");
  std::set<std::string> ids, gens(generators.begin(), generators.end());
  for (const Cell& c : cells) {
    if (c.dim < 0) throw StructuralError("cell '" + c.id + "' has negative dimension");
    if (!ids.insert(c.id).second) throw StructuralError("duplicate cell id '" + c.id + "'");
  }
  auto check_word = [&](const Word& w, const std::string& where) {
    for (const Letter& l : w)
      if (!gens.count(l.generator))
        throw StructuralError("unknown generator '" + l.generator + "' in " + where);
  };
  for (const Cell& c : cells) {
    for (const Incidence& inc : c.boundary) {
      const Cell& f = cell(inc.face);
      if (f.dim != c.dim - 1)
        throw StructuralError("cell '" + c.id + "' lists face '" + f.id + "' of dimension " + std::to_string(f.dim));
      check_word(inc.word, "boundary of '" + c.id + "'");
      if (c.in_subcomplex && !f.in_subcomplex)
        throw StructuralError("K' is not a subcomplex: face '" + f.id + "' of '" + c.id + "' is missing");
    }
  }
  for (const Word& r : relations) check_word(r, "a relation");
}

ComplexMatrix Representation::eval(const Word& w) const {
  ComplexMatrix out = ComplexMatrix::Identity(rank, rank);
  for (const Letter& l : w) {
    auto it = generators.find(l.generator);
    if (it == generators.end()) throw StructuralError("representation has no generator '" + l.generator + "'");
    ComplexMatrix g = it->second;
    if (l.power < 0) g = g.inverse().eval();
    for (int i = 0; i < std::abs(l.power); ++i) out = out * g;
  }
  return out;
}

Representation trivial_representation(const CWData& k, int rank) {
  Representation rho;
  rho.rank = rank;
  for (const auto& g : k.generators) rho.generators[g] = ComplexMatrix::Identity(rank, rank);
  return rho;
}

double validate_representation(const Representation& rho, const CWData& k) {
  if (rho.rank < 1) throw StructuralError("representation rank must be positive");
  for (const auto& g : k.generators) {
    auto it = rho.generators.find(g);
    if (it == rho.generators.end()) throw StructuralError("representation misses generator '" + g + "'");
    if (it->second.rows() != rho.rank || it->second.cols() != rho.rank)
      throw StructuralError("generator '" + g + "' has the wrong shape");
    require_finite(it->second, "generator matrix");
    const RankInfo info = numerical_rank(it->second, 1e-12);
    if (info.rank < rho.rank) throw DomainError("generator '" + g + "' is not invertible");
  }
  double worst = 0.0;
  for (const Word& r : k.relations)
    worst = std::max(worst, (rho.eval(r) - ComplexMatrix::Identity(rho.rank, rho.rank)).norm());
  return worst;
}

GradedComplex restrict_cells(const CWData& k, const Representation& rho, const std::vector<bool>& mask) {
  if (mask.size() != k.cells.size()) throw StructuralError("cell mask has the wrong length");
  return full_complex_unchecked(k, rho, mask);
}

GradedComplex build_cochain(const CWData& k, const Representation& rho) {
  k.validate();
  require_valid(rho, k);
  const GradedComplex c = full_complex_unchecked(k, rho, std::vector<bool>(k.cells.size(), true));
  check_twisted_square(k, rho, c);
  return c;
}

GradedComplex build_relative(const CWData& k, const Representation& rho) {
  build_cochain(k, rho);
  return full_complex_unchecked(k, rho, complement(subcomplex_mask(k)));
}

GradedComplex build_boundary(const CWData& k, const Representation& rho) {
  build_cochain(k, rho);
  return full_complex_unchecked(k, rho, subcomplex_mask(k));
}

ShortExactSequenceData restriction_sequence(const CWData& k, const Representation& rho) {
  ShortExactSequenceData ses;
  ses.b = build_cochain(k, rho);
  const std::vector<bool> sub = subcomplex_mask(k), rel = complement(sub);
  ses.a = full_complex_unchecked(k, rho, rel);
  ses.c = full_complex_unchecked(k, rho, sub);
  const int n = rho.rank;
  for (int j = 0; j <= k.top_dim(); ++j) {
    const int full = static_cast<int>(k.cells_of_dim(j).size());
    ses.iota.push_back(selection(n, positions(k, j, rel), full));
    ses.pi.push_back(selection(n, positions(k, j, sub), full).transpose());
  }
  return ses;
}

DetLineElement sigma(const CWData& k, const Representation& rho) {
  return canonical_iso(build_cochain(k, rho), DetLineElement{});
}

DetLineElement sigma_boundary(const CWData& k, const Representation& rho) {
  return canonical_iso(build_boundary(k, rho), DetLineElement{});
}

DetLineElement sigma_relative(const CWData& k, const Representation& rho) {
  return canonical_iso(build_relative(k, rho), DetLineElement{});
}

DetLineElement tau_section(const CWData& k, const Representation& rho) {
  return tensor(sigma(k, rho), sigma_relative(k, rho));
}

SigmaRelation check_sigma_relation(const CWData& k, const std::vector<Representation>& reps, double tol) {
  SigmaRelation out;
  if (reps.empty()) throw StructuralError("check_sigma_relation: no representations");
  bool ok = true;
  for (size_t i = 0; i < reps.size(); ++i) {
    const ShortExactSequenceData ses = restriction_sequence(k, reps[i]);
    const Cohomology ha = cohomology(ses.a), hb = cohomology(ses.b), hc = cohomology(ses.c);
    const Complex s_rel = canonical_iso(ses.a, DetLineElement{}, ha.as_basis()).coordinate;
    const Complex s_bdy = canonical_iso(ses.c, DetLineElement{}, hc.as_basis()).coordinate;
    const Complex s_all = canonical_iso(ses.b, DetLineElement{}, hb.as_basis()).coordinate;
    // nu = phi_K o fusion o (phi_rel^{-1} (x) phi_K'^{-1}).
    const DetLineElement fused = fusion(DetLineElement{}, DetLineElement{}, ses);
    const Complex nu = canonical_iso(ses.b, fused, hb.as_basis()).coordinate;
    const Complex ratio = nu / s_all;
    const LongExactSequence les = les_of_ses(ses, ha.as_basis(), hb.as_basis(), hc.as_basis());
    const Complex les_ratio = s_rel * s_bdy * les.phi.coordinate / s_all;
    out.ratios.push_back(ratio);
    out.les_ratios.push_back(les_ratio);
    const double dev = std::max(std::abs(ratio - Complex(sign_of(ratio))), std::abs(les_ratio - Complex(sign_of(les_ratio))));
    out.max_deviation = std::max(out.max_deviation, dev);
    if (dev > tol) ok = false;
    if (i == 0) {
      out.sign = sign_of(ratio);
      out.les_sign = sign_of(les_ratio);
    } else if (sign_of(ratio) != out.sign || sign_of(les_ratio) != out.les_sign) {
      ok = false;
    }
  }
  out.pass = ok;
  return out;
}

TransmissionSplit transmission_split(const CWData& k, const std::vector<std::string>& separating,
                                     const Representation& rho) {
  build_cochain(k, rho);
  const size_t nc = k.cells.size();
  std::vector<bool> in_n(nc, false);
  std::map<std::string, size_t> pos;
  for (size_t i = 0; i < nc; ++i) pos[k.cells[i].id] = i;
  for (const auto& id : separating) {
    auto it = pos.find(id);
    if (it == pos.end()) throw StructuralError("unknown separating cell '" + id + "'");
    in_n[it->second] = true;
  }
  for (size_t i = 0; i < nc; ++i)
    if (in_n[i])
      for (const Incidence& inc : k.cells[i].boundary)
        if (!in_n[pos.at(inc.face)])
          throw StructuralError("separating set is not a subcomplex (face '" + inc.face + "')");

  // Connected components of K minus N under the face relation.
  std::vector<int> comp(nc, -1);
  std::vector<std::vector<size_t>> adj(nc);
  for (size_t i = 0; i < nc; ++i)
    for (const Incidence& inc : k.cells[i].boundary) {
      const size_t f = pos.at(inc.face);
      adj[i].push_back(f);
      adj[f].push_back(i);
    }
  int ncomp = 0;
  for (size_t s = 0; s < nc; ++s) {
    if (in_n[s] || comp[s] >= 0) continue;
    std::vector<size_t> stack{s};
    comp[s] = ncomp;
    while (!stack.empty()) {
      const size_t v = stack.back();
      stack.pop_back();
      for (size_t w : adj[v])
        if (!in_n[w] && comp[w] < 0) {
          comp[w] = ncomp;
          stack.push_back(w);
        }
    }
    ++ncomp;
  }
  if (ncomp != 2)
    throw DomainError("separating set leaves " + std::to_string(ncomp) + " components, expected 2");

  TransmissionSplit out;
  std::vector<bool> m1(nc), m2(nc), k1(nc), k2(nc);
  for (size_t i = 0; i < nc; ++i) {
    m1[i] = comp[i] == 0;
    m2[i] = comp[i] == 1;
    k1[i] = m1[i] || in_n[i];
    k2[i] = m2[i] || in_n[i];
    const std::string& id = k.cells[i].id;
    if (m1[i]) out.interior1.push_back(id);
    if (m2[i]) out.interior2.push_back(id);
    if (in_n[i]) out.separating.push_back(id);
  }

  // Transmission complex: C(K) in the coordinates (interior K1, interior K2, N).
  const int n = rho.rank;
  const GradedComplex full = build_cochain(k, rho);
  std::vector<ComplexMatrix> perm;  // full coordinates -> transmission coordinates
  std::vector<std::vector<int>> order1, order2, ordern;
  for (int j = 0; j <= k.top_dim(); ++j) {
    const auto p1 = positions(k, j, m1), p2 = positions(k, j, m2), pn = positions(k, j, in_n);
    std::vector<int> all = p1;
    all.insert(all.end(), p2.begin(), p2.end());
    all.insert(all.end(), pn.begin(), pn.end());
    const int cells = static_cast<int>(all.size());
    perm.push_back(selection(n, all, cells).transpose());
    order1.push_back(p1);
    order2.push_back(p2);
    ordern.push_back(pn);
  }
  std::vector<ComplexMatrix> tdiffs;
  for (int j = 0; j < full.top_degree(); ++j)
    tdiffs.push_back(perm[static_cast<size_t>(j + 1)] * full.d(j) * perm[static_cast<size_t>(j)].transpose());
  const GradedComplex trans(full.dims(), tdiffs);

  auto make = [&](const std::vector<bool>& open, const std::vector<bool>& closed, bool first_block) {
    ShortExactSequenceData ses;
    ses.a = full_complex_unchecked(k, rho, open);
    ses.b = trans;
    ses.c = full_complex_unchecked(k, rho, closed);
    for (int j = 0; j <= k.top_dim(); ++j) {
      const int a1 = static_cast<int>(order1[static_cast<size_t>(j)].size());
      const int a2 = static_cast<int>(order2[static_cast<size_t>(j)].size());
      const int an = static_cast<int>(ordern[static_cast<size_t>(j)].size());
      const int total = (a1 + a2 + an) * n;
      // Transmission coordinates of the open part and of the closed part.
      std::vector<int> open_slots, closed_slots;
      if (first_block) {
        for (int i = 0; i < a1; ++i) open_slots.push_back(i);
        // Closed K2 = interior K2 then N, listed in cell order inside K2.
      } else {
        for (int i = 0; i < a2; ++i) open_slots.push_back(a1 + i);
      }
      // Map each cell of the closed side (in its own cell order) to its slot.
      const auto& inner = first_block ? order2[static_cast<size_t>(j)] : order1[static_cast<size_t>(j)];
      const int inner_off = first_block ? a1 : 0;
      const auto& nn = ordern[static_cast<size_t>(j)];
      std::vector<std::pair<int, int>> closed_cells;  // (position in full degree, transmission slot)
      for (size_t i = 0; i < inner.size(); ++i) closed_cells.emplace_back(inner[i], inner_off + static_cast<int>(i));
      for (size_t i = 0; i < nn.size(); ++i) closed_cells.emplace_back(nn[i], a1 + a2 + static_cast<int>(i));
      std::sort(closed_cells.begin(), closed_cells.end());
      for (const auto& cc : closed_cells) closed_slots.push_back(cc.second);
      ses.iota.push_back(selection(n, open_slots, total / n));
      ses.pi.push_back(selection(n, closed_slots, total / n).transpose());
    }
    ses.validate();
    return ses;
  };
  out.first = make(m1, k2, true);
  out.second = make(m2, k1, false);
  return out;
}

CWData change_lift(const CWData& k, const std::string& cell, const Word& g) {
  k.cell(cell);
  CWData out = k;
  const Word gi = inverse(g);
  for (Cell& c : out.cells) {
    if (c.id == cell)
      for (Incidence& inc : c.boundary) inc.word = concat(gi, inc.word);
    for (Incidence& inc : c.boundary)
      if (inc.face == cell) inc.word = concat(inc.word, g);
  }
  return out;
}

CohomologyBasis transport_basis(const CWData& k, const std::string& cell, const Word& g, const Representation& rho,
                                const CohomologyBasis& h) {
  const Cell& target = k.cell(cell);
  const int n = rho.rank;
  const auto ids = k.cells_of_dim(target.dim);
  const int slot = static_cast<int>(std::find(ids.begin(), ids.end(), cell) - ids.begin());
  const ComplexMatrix gi = rho.eval(inverse(g));
  CohomologyBasis out = h;
  out.tag = h.tag + "@lift(" + cell + ")";
  if (static_cast<int>(out.reps.size()) > target.dim && out.reps[static_cast<size_t>(target.dim)].cols() > 0) {
    ComplexMatrix& r = out.reps[static_cast<size_t>(target.dim)];
    r.middleRows(slot * n, n) = gi * r.middleRows(slot * n, n);
  }
  return out;
}

namespace fixtures {

namespace {
Incidence inc(const std::string& face, int coeff, const std::string& word = "") {
  return Incidence{face, coeff, parse_word(word)};
}
}  // namespace

CWData circle() {
  CWData k;
  k.generators = {"t"};
  k.cells.push_back(Cell{"v", 0, {}, false});
  k.cells.push_back(Cell{"e", 1, {inc("v", 1, "t"), inc("v", -1)}, false});
  return k;
}

CWData circle_two_vertices() {
  CWData k;
  k.generators = {"t"};
  k.cells.push_back(Cell{"v1", 0, {}, true});
  k.cells.push_back(Cell{"v2", 0, {}, true});
  k.cells.push_back(Cell{"e1", 1, {inc("v2", 1), inc("v1", -1)}, false});
  k.cells.push_back(Cell{"e2", 1, {inc("v1", 1, "t"), inc("v2", -1)}, false});
  return k;
}

CWData interval() {
  CWData k;
  k.generators = {"t"};
  k.cells.push_back(Cell{"v0", 0, {}, true});
  k.cells.push_back(Cell{"v1", 0, {}, true});
  k.cells.push_back(Cell{"e", 1, {inc("v1", 1, "t"), inc("v0", -1)}, false});
  return k;
}

CWData disc() {
  CWData k;
  k.generators = {"t"};
  k.cells.push_back(Cell{"v1", 0, {}, true});
  k.cells.push_back(Cell{"v2", 0, {}, true});
  for (const char* e : {"e1", "e2"}) k.cells.push_back(Cell{e, 1, {inc("v2", 1, "t"), inc("v1", -1)}, true});
  k.cells.push_back(Cell{"e3", 1, {inc("v2", 1, "t"), inc("v1", -1)}, false});
  k.cells.push_back(Cell{"f1", 2, {inc("e1", 1), inc("e3", -1)}, false});
  k.cells.push_back(Cell{"f2", 2, {inc("e3", 1), inc("e2", -1)}, false});
  return k;
}

CWData torus() {
  CWData k;
  k.generators = {"a", "b"};
  k.relations = {parse_word("a b a^-1 b^-1")};
  k.cells.push_back(Cell{"v", 0, {}, false});
  k.cells.push_back(Cell{"ea", 1, {inc("v", 1, "a"), inc("v", -1)}, false});
  k.cells.push_back(Cell{"eb", 1, {inc("v", 1, "b"), inc("v", -1)}, false});
  k.cells.push_back(Cell{"f", 2, {inc("ea", 1), inc("ea", -1, "b"), inc("eb", 1, "a"), inc("eb", -1)}, false});
  return k;
}

}  // namespace fixtures

}  // namespace reftor
