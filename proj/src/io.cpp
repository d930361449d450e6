#include "reftor/io.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace reftor::io {

namespace {

const std::set<std::string> kKinds = {"cw", "representation", "curve", "chirality", "circle", "interval", "gauge-field"};

[[noreturn]] void fail(const std::string& where, const std::string& what) { throw InputError(where + ": " + what); }

const Json& field(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) fail(where, std::string("missing field \"") + key + "\"");
  return j.at(key);
}

double real_field(const Json& j, const char* key, const std::string& where) {
  const Json& v = field(j, key, where);
  if (!v.is_number()) fail(where + "/" + key, "expected a number");
  return v.get<double>();
}

int int_field(const Json& j, const char* key, const std::string& where) {
  const Json& v = field(j, key, where);
  if (!v.is_number_integer()) fail(where + "/" + key, "expected an integer");
  return v.get<int>();
}

void require_kind(const Document& d, const std::string& kind) {
  if (d.kind != kind) fail(d.path, "expected kind \"" + kind + "\", found \"" + d.kind + "\"");
}

// Accepts a 0 x 0 placeholder for an expected empty block.
ComplexMatrix shaped(ComplexMatrix m, Eigen::Index rows, Eigen::Index cols, const std::string& where) {
  if (m.size() == 0 && rows * cols == 0) return ComplexMatrix(rows, cols);
  if (m.rows() != rows || m.cols() != cols)
    fail(where, "expected a " + std::to_string(rows) + "x" + std::to_string(cols) + " matrix, found " +
                    std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  return m;
}

std::vector<ComplexMatrix> matrix_list(const Json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array of matrices");
  std::vector<ComplexMatrix> out;
  for (size_t k = 0; k < j.size(); ++k) out.push_back(parse_matrix(j[k], where + "/" + std::to_string(k)));
  return out;
}

Word word_field(const Json& j, const std::string& where) {
  if (!j.is_string()) fail(where, "expected a word string such as \"a b^-1\"");
  try {
    return parse_word(j.get<std::string>());
  } catch (const Error& e) {
    fail(where, e.what());
  }
}

}  // namespace

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Document load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path + ": cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  Document d;
  d.path = path;
  d.digest = fnv1a_hex(ss.str());
  try {
    d.body = Json::parse(ss.str());
  } catch (const Json::parse_error& e) {
    throw InputError(path + ": invalid JSON: " + e.what());
  }
  const Json& kind = field(d.body, "kind", path);
  if (!kind.is_string() || !kKinds.count(kind.get<std::string>()))
    fail(path + "/kind", "unknown kind; expected one of cw, representation, curve, chirality, circle, interval, gauge-field");
  d.kind = kind.get<std::string>();
  return d;
}

Complex parse_complex(const Json& j, const std::string& where) {
  if (j.is_number()) return Complex(j.get<double>(), 0.0);
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return Complex(j[0].get<double>(), j[1].get<double>());
  fail(where, "expected a number or [re, im]");
}

ComplexMatrix parse_matrix(const Json& j, const std::string& where) {
  if (j.is_object()) {
    const int r = int_field(j, "rows", where);
    const int c = int_field(j, "cols", where);
    if (r < 0 || c < 0) fail(where, "negative matrix size");
    return ComplexMatrix::Zero(r, c);
  }
  if (!j.is_array()) fail(where, "expected a matrix (array of rows)");
  if (j.empty()) return ComplexMatrix(0, 0);
  const size_t rows = j.size();
  if (!j[0].is_array()) fail(where + "/0", "expected a row array");
  const size_t cols = j[0].size();
  ComplexMatrix m(rows, cols);
  for (size_t r = 0; r < rows; ++r) {
    const std::string wr = where + "/" + std::to_string(r);
    if (!j[r].is_array() || j[r].size() != cols) fail(wr, "rows must all have " + std::to_string(cols) + " entries");
    for (size_t c = 0; c < cols; ++c) m(r, c) = parse_complex(j[r][c], wr + "/" + std::to_string(c));
  }
  return m;
}

CWData parse_cw(const Document& d) {
  require_kind(d, "cw");
  const Json& b = d.body;
  CWData k;
  if (b.contains("generators")) {
    if (!b["generators"].is_array()) fail(d.path + "/generators", "expected an array of names");
    for (const auto& g : b["generators"]) {
      if (!g.is_string()) fail(d.path + "/generators", "generator names must be strings");
      k.generators.push_back(g.get<std::string>());
    }
  }
  if (b.contains("relations")) {
    if (!b["relations"].is_array()) fail(d.path + "/relations", "expected an array of words");
    for (size_t r = 0; r < b["relations"].size(); ++r)
      k.relations.push_back(word_field(b["relations"][r], d.path + "/relations/" + std::to_string(r)));
  }
  const Json& cells = field(b, "cells", d.path);
  if (!cells.is_array()) fail(d.path + "/cells", "expected an array");
  for (size_t c = 0; c < cells.size(); ++c) {
    const std::string w = d.path + "/cells/" + std::to_string(c);
    const Json& cj = cells[c];
    Cell cell;
    const Json& id = field(cj, "id", w);
    if (!id.is_string()) fail(w + "/id", "expected a string");
    cell.id = id.get<std::string>();
    cell.dim = int_field(cj, "dim", w);
    if (cj.contains("in_subcomplex")) {
      if (!cj["in_subcomplex"].is_boolean()) fail(w + "/in_subcomplex", "expected true or false");
      cell.in_subcomplex = cj["in_subcomplex"].get<bool>();
    }
    if (cj.contains("boundary")) {
      const Json& bd = cj["boundary"];
      if (!bd.is_array()) fail(w + "/boundary", "expected an array");
      for (size_t t = 0; t < bd.size(); ++t) {
        const std::string wt = w + "/boundary/" + std::to_string(t);
        Incidence inc;
        const Json& face = field(bd[t], "face", wt);
        if (!face.is_string()) fail(wt + "/face", "expected a cell id");
        inc.face = face.get<std::string>();
        inc.coefficient = int_field(bd[t], "coefficient", wt);
        if (bd[t].contains("word")) inc.word = word_field(bd[t]["word"], wt + "/word");
        cell.boundary.push_back(inc);
      }
    }
    k.cells.push_back(cell);
  }
  try {
    k.validate();
  } catch (const StructuralError& e) {
    fail(d.path, e.what());
  }
  return k;
}

Representation parse_representation(const Document& d) {
  require_kind(d, "representation");
  Representation r;
  r.rank = int_field(d.body, "rank", d.path);
  if (r.rank < 1) fail(d.path + "/rank", "rank must be >= 1");
  const Json& gens = field(d.body, "generators", d.path);
  if (!gens.is_object()) fail(d.path + "/generators", "expected an object name -> matrix");
  for (const auto& [name, m] : gens.items()) {
    const std::string w = d.path + "/generators/" + name;
    r.generators.emplace(name, shaped(parse_matrix(m, w), r.rank, r.rank, w));
  }
  return r;
}

RepresentationCurve parse_curve(const Document& d) {
  require_kind(d, "curve");
  RepresentationCurve c;
  c.rank = int_field(d.body, "rank", d.path);
  if (c.rank < 1) fail(d.path + "/rank", "rank must be >= 1");
  if (d.body.contains("radius")) c.radius = real_field(d.body, "radius", d.path);
  const Json& gens = field(d.body, "generators", d.path);
  if (!gens.is_object()) fail(d.path + "/generators", "expected an object name -> polynomial");
  for (const auto& [name, p] : gens.items()) {
    const std::string w = d.path + "/generators/" + name;
    MatrixPolynomial poly;
    poly.coeffs = matrix_list(field(p, "coefficients", w), w + "/coefficients");
    if (poly.coeffs.empty()) fail(w + "/coefficients", "at least one coefficient is required");
    for (size_t k = 0; k < poly.coeffs.size(); ++k)
      poly.coeffs[k] = shaped(poly.coeffs[k], c.rank, c.rank, w + "/coefficients/" + std::to_string(k));
    if (p.contains("antiholomorphic")) poly.antiholomorphic = p["antiholomorphic"].get<bool>();
    c.generators.emplace(name, poly);
  }
  return c;
}

ChiralityComplex parse_chirality(const Document& d) {
  require_kind(d, "chirality");
  const Json& dj = field(d.body, "dims", d.path);
  if (!dj.is_array() || dj.empty()) fail(d.path + "/dims", "expected a nonempty integer array");
  std::vector<int> dims;
  for (const auto& v : dj) {
    if (!v.is_number_integer() || v.get<int>() < 0) fail(d.path + "/dims", "dimensions must be integers >= 0");
    dims.push_back(v.get<int>());
  }
  const int m = static_cast<int>(dims.size()) - 1;
  auto diffs = matrix_list(field(d.body, "differentials", d.path), d.path + "/differentials");
  auto gamma = matrix_list(field(d.body, "gamma", d.path), d.path + "/gamma");
  auto metric = matrix_list(field(d.body, "metric", d.path), d.path + "/metric");
  if (static_cast<int>(diffs.size()) != m) fail(d.path + "/differentials", "expected " + std::to_string(m) + " matrices");
  if (static_cast<int>(gamma.size()) != m + 1) fail(d.path + "/gamma", "expected " + std::to_string(m + 1) + " matrices");
  if (static_cast<int>(metric.size()) != m + 1) fail(d.path + "/metric", "expected " + std::to_string(m + 1) + " matrices");
  for (int j = 0; j < m; ++j)
    diffs[j] = shaped(diffs[j], dims[j + 1], dims[j], d.path + "/differentials/" + std::to_string(j));
  for (int j = 0; j <= m; ++j) {
    gamma[j] = shaped(gamma[j], dims[m - j], dims[j], d.path + "/gamma/" + std::to_string(j));
    metric[j] = shaped(metric[j], dims[j], dims[j], d.path + "/metric/" + std::to_string(j));
  }
  ChiralityComplex x{GradedComplex(dims, diffs), gamma, metric};
  try {
    x.validate();
  } catch (const Error& e) {
    fail(d.path, e.what());
  }
  return x;
}

CircleModel parse_circle(const Document& d) {
  require_kind(d, "circle");
  CircleModel c;
  c.length = real_field(d.body, "length", d.path);
  c.holonomy = parse_complex(field(d.body, "holonomy", d.path), d.path + "/holonomy");
  if (d.body.contains("rank")) c.rank = int_field(d.body, "rank", d.path);
  try {
    c.validate();
  } catch (const StructuralError& e) {
    fail(d.path, e.what());
  }
  return c;
}

IntervalModel parse_interval(const Document& d) {
  require_kind(d, "interval");
  IntervalModel i;
  i.length = real_field(d.body, "length", d.path);
  if (!(i.length > 0.0)) fail(d.path + "/length", "must be positive");
  const Json& c = field(d.body, "condition", d.path);
  if (c == "relative")
    i.condition = BoundaryCondition::relative;
  else if (c == "absolute")
    i.condition = BoundaryCondition::absolute;
  else
    fail(d.path + "/condition", "expected \"relative\" or \"absolute\"");
  return i;
}

GaugeField parse_gauge_field(const Document& d) {
  require_kind(d, "gauge-field");
  const Json& b = d.body;
  const double eps = real_field(b, "epsilon", d.path);
  const int nx = int_field(b, "nx", d.path);
  const int ny = int_field(b, "ny", d.path);
  const int rank = int_field(b, "rank", d.path);
  if (!(eps > 0.0)) fail(d.path + "/epsilon", "must be positive");
  if (nx < 5 || nx % 2 == 0) fail(d.path + "/nx", "must be odd and >= 5");
  if (ny < 5) fail(d.path + "/ny", "must be >= 5");
  if (rank < 1) fail(d.path + "/rank", "must be >= 1");
  if (b.contains("pure_gauge") == b.contains("samples")) fail(d.path, "give exactly one of \"pure_gauge\" or \"samples\"");
  if (b.contains("pure_gauge")) {
    const std::string w = d.path + "/pure_gauge";
    PolynomialGauge g;
    g.rank = rank;
    const Json& terms = field(b["pure_gauge"], "terms", w);
    if (!terms.is_array()) fail(w + "/terms", "expected an array");
    for (size_t t = 0; t < terms.size(); ++t) {
      const std::string wt = w + "/terms/" + std::to_string(t);
      PolynomialGauge::Term term;
      term.px = int_field(terms[t], "px", wt);
      term.py = int_field(terms[t], "py", wt);
      if (term.px < 0 || term.py < 0) fail(wt, "powers must be >= 0");
      term.c = shaped(parse_matrix(field(terms[t], "matrix", wt), wt + "/matrix"), rank, rank, wt + "/matrix");
      g.terms.push_back(term);
    }
    return g.pure_gauge(eps, nx, ny);
  }
  const std::string w = d.path + "/samples";
  GaugeField f;
  f.epsilon = eps;
  f.nx = nx;
  f.ny = ny;
  f.rank = rank;
  f.omega0 = matrix_list(field(b["samples"], "omega0", w), w + "/omega0");
  f.omega_y = matrix_list(field(b["samples"], "omega_y", w), w + "/omega_y");
  try {
    f.validate();
  } catch (const StructuralError& e) {
    fail(w, e.what());
  }
  return f;
}

Json to_json(const PolynomialGauge& g) {
  Json terms = Json::array();
  for (const auto& t : g.terms) terms.push_back(Json{{"px", t.px}, {"py", t.py}, {"matrix", matrix(t.c)}});
  return Json{{"terms", terms}};
}

double round15(double x) {
  if (!std::isfinite(x) || x == 0.0) return x == 0.0 ? 0.0 : x;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", x);
  return std::strtod(buf, nullptr);
}

Json number(double x) {
  if (!std::isfinite(x)) return Json(format(x));
  return Json(round15(x));
}

Json number(Complex z) { return Json::array({number(z.real()), number(z.imag())}); }

Json matrix(const ComplexMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(number(m(r, c)));
    rows.push_back(row);
  }
  return rows;
}

std::string format(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", x == 0.0 ? 0.0 : x);
  return buf;
}

std::string format(Complex z) {
  const double im = z.imag() == 0.0 ? 0.0 : z.imag();
  char buf[90];
  std::snprintf(buf, sizeof buf, "%.15g%+.15gi", z.real() == 0.0 ? 0.0 : z.real(), im);
  return buf;
}

bool Report::pass() const {
  for (const auto& [name, ok] : checks)
    if (!ok) return false;
  return true;
}

Json Report::to_json() const {
  Json checks_json = Json::array();
  for (const auto& [name, ok] : checks) checks_json.push_back(Json{{"name", name}, {"pass", ok}});
  return Json{{"command", command}, {"inputs", inputs},   {"flags", flags}, {"results", results},
              {"tolerances", tolerances}, {"checks", checks_json}, {"pass", pass()}};
}

namespace {

std::string text_value(const Json& v) {
  if (v.is_number()) return format(v.get<double>());
  if (v.is_array() && v.size() == 2 && v[0].is_number_float() && v[1].is_number_float())
    return format(Complex(v[0].get<double>(), v[1].get<double>()));
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_null()) return "n/a";
  return v.dump();
}

void text_lines(const Json& obj, const std::string& prefix, std::string& out) {
  for (const auto& [key, v] : obj.items()) {
    const std::string name = prefix.empty() ? key : prefix + "." + key;
    if (v.is_object()) {
      text_lines(v, name, out);
    } else if (v.is_array() && !v.empty() && v[0].is_object()) {
      out += name + ":\n";
      for (const auto& row : v) {
        std::string line = " ";
        for (const auto& [k, x] : row.items()) line += " " + k + "=" + text_value(x);
        out += line + "\n";
      }
    } else {
      out += name + " = " + text_value(v) + "\n";
    }
  }
}

}  // namespace

std::string Report::to_text() const {
  std::string out = "command: " + command + "\n";
  for (const auto& in : inputs) out += "input: " + in["path"].get<std::string>() + " (" + in["digest"].get<std::string>() + ")\n";
  text_lines(results, "", out);
  text_lines(tolerances, "tol", out);
  for (const auto& [name, ok] : checks) out += std::string(ok ? "PASS " : "FAIL ") + name + "\n";
  out += std::string("overall: ") + (pass() ? "PASS" : "FAIL") + "\n";
  return out;
}

}  // namespace reftor::io
