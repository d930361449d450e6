#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "reftor/cw_twisted.hpp"
#include "reftor/errors.hpp"
#include "reftor/holomorphy.hpp"
#include "reftor/refined_finite.hpp"
#include "reftor/spectral_1d.hpp"
#include "reftor/temporal_gauge.hpp"

namespace reftor::io {

using Json = nlohmann::ordered_json;

/// Schema violation; the message starts with the offending location
/// ("file.json: /cells/2/boundary: ...").
class InputError : public Error {
 public:
  using Error::Error;
};

struct Document {
  std::string path;
  std::string kind;
  std::string digest;  // FNV-1a 64 of the file bytes, hex
  Json body;
};

/// Reads and parses a JSON input; InputError on I/O or syntax errors or a
/// missing/unknown "kind".
Document load(const std::string& path);

/// Number or [re, im].
Complex parse_complex(const Json& j, const std::string& where);
/// Row-major nested arrays of complex entries; `[]` is a 0 x 0 matrix and
/// {"rows": r, "cols": c} an all-zero r x c matrix (empty blocks).
ComplexMatrix parse_matrix(const Json& j, const std::string& where);

CWData parse_cw(const Document& d);
Representation parse_representation(const Document& d);
RepresentationCurve parse_curve(const Document& d);
ChiralityComplex parse_chirality(const Document& d);
CircleModel parse_circle(const Document& d);
IntervalModel parse_interval(const Document& d);
GaugeField parse_gauge_field(const Document& d);

Json to_json(const PolynomialGauge& g);

/// x rounded to 15 significant digits.
double round15(double x);
Json number(double x);
Json number(Complex z);  // [re, im]
Json matrix(const ComplexMatrix& m);
std::string format(double x);
std::string format(Complex z);

std::string fnv1a_hex(const std::string& bytes);

/// Deterministic command report.
struct Report {
  std::string command;
  Json inputs = Json::array();
  Json flags = Json::object();
  Json results = Json::object();
  Json tolerances = Json::object();
  std::vector<std::pair<std::string, bool>> checks;

  void check(const std::string& name, bool ok) { checks.emplace_back(name, ok); }
  bool pass() const;
  Json to_json() const;
  /// "key = value" lines, tables as rows, then one PASS/FAIL line per check.
  std::string to_text() const;
};

}  // namespace reftor::io
