#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "reftor/io.hpp"
#include "reftor/sampling.hpp"
#include "reftor/selftest.hpp"
#include "reftor/zeta.hpp"

using namespace reftor;
using io::Json;
using io::Report;

namespace {

constexpr double kPi = std::numbers::pi;

enum Exit { kOk = 0, kInput = 2, kNumerical = 3, kInvariant = 4 };

struct Globals {
  std::uint64_t seed = 1;
  std::optional<double> tol;
  std::string json_out;
  std::optional<double> h;
  std::optional<int> cutoff;

  double tol_or(double fallback) const { return tol.value_or(fallback); }
};

/// "pi", "-pi/2", "2pi/3", "2*pi/3" or a plain number.
double parse_angle(std::string text) {
  std::erase(text, ' ');
  const auto bad = [&]() -> double { throw io::InputError("cannot read angle '" + text + "'"); };
  const auto pos = text.find("pi");
  try {
    if (pos == std::string::npos) {
      size_t used = 0;
      const double v = std::stod(text, &used);
      return used == text.size() ? v : bad();
    }
    std::string coef = text.substr(0, pos);
    if (!coef.empty() && coef.back() == '*') coef.pop_back();
    double c = 1.0;
    if (coef == "-")
      c = -1.0;
    else if (!coef.empty() && coef != "+") {
      size_t used = 0;
      c = std::stod(coef, &used);
      if (used != coef.size()) return bad();
    }
    const std::string rest = text.substr(pos + 2);
    if (rest.empty()) return c * kPi;
    if (rest[0] != '/') return bad();
    size_t used = 0;
    const double d = std::stod(rest.substr(1), &used);
    if (used != rest.size() - 1 || d == 0.0) return bad();
    return c * kPi / d;
  } catch (const std::logic_error&) {
    return bad();
  }
}

Json input_entry(const io::Document& d) { return Json{{"path", d.path}, {"kind", d.kind}, {"digest", d.digest}}; }

io::Document load_kind(Report& r, const std::string& path, const std::string& kind) {
  io::Document d = io::load(path);
  if (d.kind != kind) throw io::InputError(path + ": expected kind \"" + kind + "\", found \"" + d.kind + "\"");
  r.inputs.push_back(input_entry(d));
  return d;
}

void echo_globals(Report& r, const Globals& g) {
  r.flags["seed"] = g.seed;
  if (g.tol) r.flags["tol"] = io::number(*g.tol);
  if (g.h) r.flags["h"] = io::number(*g.h);
  if (g.cutoff) r.flags["cutoff"] = *g.cutoff;
}

// ---- torsion ---------------------------------------------------------------

Report run_torsion(const Globals& g, const std::string& cw_path, const std::string& rep_path) {
  Report r;
  r.command = "torsion";
  echo_globals(r, g);
  const CWData k = io::parse_cw(load_kind(r, cw_path, "cw"));
  const Representation rho = io::parse_representation(load_kind(r, rep_path, "representation"));
  const double residual = validate_representation(rho, k);
  r.results["relation_residual"] = io::number(residual);
  const double tol = g.tol_or(1e-10);
  r.tolerances["relation_residual"] = io::number(tol);
  r.check("relations_hold", residual <= tol);
  r.results["dims"] = build_cochain(k, rho).dims();
  const auto item = [&](const char* name, DetLineElement (*f)(const CWData&, const Representation&)) {
    try {
      const DetLineElement e = f(k, rho);
      r.results[name] = io::number(e.coordinate);
      r.results[std::string(name) + "_basis"] = e.basis_tag;
    } catch (const DomainError& e) {
      r.results[name] = nullptr;
      r.results[std::string(name) + "_error"] = e.what();
    }
  };
  item("sigma", sigma);
  item("sigma_prime", sigma_boundary);
  item("sigma_double_prime", sigma_relative);
  item("tau", tau_section);
  return r;
}

// ---- refined ---------------------------------------------------------------

Report run_refined(const Globals& g, const std::string& path) {
  Report r;
  r.command = "refined";
  echo_globals(r, g);
  const ChiralityComplex x = io::parse_chirality(load_kind(r, path, "chirality"));
  const OddSignatureData o = odd_signature(x);
  Json table = Json::array();
  Complex first = 0.0;
  double worst = 0.0;
  int evaluated = 0;
  for (double lambda : admissible_cuts(o))
    for (double theta : {-0.4, -2.2}) {
      Json row{{"lambda", io::number(lambda)}, {"theta", io::number(theta)}};
      try {
        const Complex v = rho(x, lambda, theta).coordinate;
        const EtaXi e = eta_xi_finite(o, lambda, theta);
        row["rho"] = io::number(v);
        row["graded_det"] = io::number(graded_determinant(o, lambda, theta));
        row["eta"] = io::number(e.eta);
        row["xi_prime"] = io::number(e.xi_prime);
        if (evaluated++ == 0) first = v;
        worst = std::max(worst, std::abs(v - first) / std::abs(first));
      } catch (const AgmonError&) {
        row["rho"] = "skipped: eigenvalue on the Agmon ray";
      }
      table.push_back(row);
    }
  if (evaluated == 0) throw AgmonError("refined: every (lambda, theta) pair hits the Agmon ray");
  r.results["dims"] = x.complex.dims();
  r.results["rho"] = io::number(first);
  r.results["sweep"] = table;
  r.results["max_relative_deviation"] = io::number(worst);
  const double tol = g.tol_or(1e-8);
  r.tolerances["max_relative_deviation"] = io::number(tol);
  r.check("rho_independent_of_lambda_theta", worst <= tol);
  return r;
}

// ---- glue ------------------------------------------------------------------

Report run_glue(const Globals& g, const std::string& cw_path, const std::vector<std::string>& rep_paths) {
  Report r;
  r.command = "glue";
  echo_globals(r, g);
  const CWData k = io::parse_cw(load_kind(r, cw_path, "cw"));
  std::vector<Representation> reps;
  for (const auto& p : rep_paths) reps.push_back(io::parse_representation(load_kind(r, p, "representation")));
  if (reps.empty()) {
    if (!k.relations.empty())
      throw io::InputError(cw_path + ": the group has relations; pass representation files explicitly");
    Sampler rng(g.seed);
    for (int i = 0; i < 10; ++i) {
      Representation rho;
      rho.rank = 2;
      for (const auto& gen : k.generators) rho.generators[gen] = rng.invertible(2);
      reps.push_back(rho);
    }
    r.results["representations"] = "10 seeded rank-2";
  }
  const double tol = g.tol_or(1e-8);
  const SigmaRelation s = check_sigma_relation(k, reps, tol);
  Json rows = Json::array();
  for (size_t i = 0; i < s.ratios.size(); ++i)
    rows.push_back(Json{{"rep", i}, {"ratio", io::number(s.ratios[i])}, {"les_ratio", io::number(s.les_ratios[i])}});
  r.results["sign_relation"] = rows;
  r.results["sign"] = s.sign;
  r.results["les_sign"] = s.les_sign;
  r.results["max_deviation"] = io::number(s.max_deviation);
  r.tolerances["max_deviation"] = io::number(tol);
  r.check("sign_relation", s.pass);

  std::vector<std::string> separating;
  for (const Cell& c : k.cells)
    if (c.in_subcomplex) separating.push_back(c.id);
  try {
    const TransmissionSplit t = transmission_split(k, separating, reps.front());
    Json tr{{"separating", separating}, {"interior1", t.interior1}, {"interior2", t.interior2}};
    for (const auto* ses : {&t.first, &t.second}) {
      ses->validate();
      const LongExactSequence l = les_of_ses(*ses);
      tr[ses == &t.first ? "first" : "second"] =
          Json{{"dims_a", ses->a.dims()}, {"dims_c", ses->c.dims()}, {"phi", io::number(l.phi.coordinate)}};
    }
    r.results["transmission"] = tr;
    r.check("transmission_exact", true);
  } catch (const DomainError& e) {
    r.results["transmission"] = std::string("not applicable: ") + e.what();
  }
  return r;
}

// ---- holo ------------------------------------------------------------------

Report run_holo(const Globals& g, const std::string& cw_path, const std::string& curve_path, double z_re,
                double z_im) {
  Report r;
  r.command = "holo";
  echo_globals(r, g);
  const CWData k = io::parse_cw(load_kind(r, cw_path, "cw"));
  const RepresentationCurve curve = io::parse_curve(load_kind(r, curve_path, "curve"));
  curve.validate(k);
  const Complex z0(z_re, z_im);
  r.flags["z0"] = io::number(z0);
  const ScalarFunction f = [&](Complex z) { return sigma(k, curve.at(z)).coordinate; };
  const double h0 = g.h.value_or(1e-3);
  Json rows = Json::array();
  double previous = 0.0;
  for (int i = 0; i < 4; ++i) {
    const double h = h0 / std::pow(2.0, i);
    const double res = cr_residual(f, z0, h);
    Json row{{"h", io::number(h)}, {"residual", io::number(res)}};
    row["slope"] = i == 0 ? Json(nullptr) : io::number(std::log2(previous / res));
    rows.push_back(row);
    previous = res;
  }
  const double tol = g.tol_or(1e-6);
  const CRCertificate c = certify_holomorphic(f, z0, h0, tol);
  r.results["sigma_at_z0"] = io::number(f(z0));
  r.results["cr_table"] = rows;
  r.results["certificate"] = Json{{"residual", io::number(c.residual)},
                                  {"residual_half", io::number(c.residual_half)},
                                  {"order", io::number(c.order)},
                                  {"at_roundoff", c.at_roundoff}};
  r.tolerances["cr_residual"] = io::number(tol);
  r.tolerances["min_order"] = 1.8;
  r.check("holomorphic", c.pass);
  return r;
}

// ---- circle ----------------------------------------------------------------

Report run_circle(const Globals& g, const std::string& file, const std::string& theta, double length, double modulus,
                  const std::string& agmon) {
  Report r;
  r.command = "circle";
  echo_globals(r, g);
  CircleModel m;
  if (!file.empty()) {
    m = io::parse_circle(load_kind(r, file, "circle"));
  } else {
    m.length = length;
    m.holonomy = std::polar(modulus, parse_angle(theta));
    r.flags["theta"] = theta;
    r.flags["L"] = io::number(length);
    r.flags["r"] = io::number(modulus);
  }
  m.validate();
  const double theta_agmon = parse_angle(agmon);
  r.flags["agmon"] = agmon;
  ZetaEvaluator z;
  if (g.cutoff) {
    if (*g.cutoff < 1) throw io::InputError("--cutoff must be >= 1");
    z.direct_terms = *g.cutoff;
  }
  const double tol = g.tol_or(1e-8);
  r.results["holonomy"] = io::number(m.holonomy);
  r.results["length"] = io::number(m.length);

  const LaplaceDeterminant det = zeta_det_laplacian_circle(m, z);
  r.results["det_prime"] = io::number(det.value);
  r.results["zeta_at_zero"] = io::number(det.zeta_at_zero);
  r.results["zeta_prime_at_zero"] = io::number(det.zeta_prime_at_zero);
  r.results["zero_modes"] = det.zero_modes;
  const Complex s = std::sin(0.5 * m.frequency());
  const Complex closed = m.acyclic() ? 4.0 * s * s : Complex(m.length * m.length);
  r.results["det_prime_closed_form"] = io::number(closed);
  r.tolerances["det_prime"] = io::number(tol);
  r.check("det_prime_closed_form", std::abs(det.value - closed) <= tol * std::max(1.0, std::abs(closed)));

  r.results["eta"] = io::number(eta_circle(m, z));
  if (m.acyclic()) {
    const CircleGradedDeterminant d = graded_det_circle(m, theta_agmon, z);
    r.results["graded_det"] = io::number(d.value);
    r.results["xi"] = io::number(d.xi);
    r.results["xi_prime"] = io::number(d.xi_prime);
    r.check("graded_det_one_minus_lambda", std::abs(d.value - (1.0 - m.holonomy)) <= tol * std::max(1.0, std::abs(d.value)));
    const CircleAnalyticTorsion t = rat_circle(m, theta_agmon, z);
    r.results["rho_an"] = io::number(t.value);
    r.results["rho_an_modulus"] = io::number(std::abs(t.value));
    r.results["xi_hat"] = io::number(t.xi_hat);
  } else {
    r.results["graded_det"] = "n/a: lambda = 1 is not acyclic";
    r.results["rho_an"] = "n/a: lambda = 1 is not acyclic";
  }

  Json lesch = Json::array();
  double worst = 0.0;
  for (double f : {0.5, 0.25}) {
    const LeschCheck c = gluing_check_lesch(f * m.length, (1.0 - f) * m.length, z);
    lesch.push_back(Json{{"l1", io::number(f * m.length)},
                         {"l2", io::number((1.0 - f) * m.length)},
                         {"log_ratio", io::number(c.log_ratio)},
                         {"residual", io::number(c.residual)}});
    worst = std::max(worst, c.residual);
  }
  r.results["lesch"] = lesch;
  const double lesch_tol = g.tol_or(1e-6);
  r.tolerances["lesch_residual"] = io::number(lesch_tol);
  r.check("lesch_log2", worst <= lesch_tol);
  return r;
}

// ---- gauge -----------------------------------------------------------------

Report run_gauge(const Globals& g, const std::string& path, int steps) {
  Report r;
  r.command = "gauge";
  echo_globals(r, g);
  r.flags["steps"] = steps;
  if (steps < 1) throw io::InputError("--steps must be >= 1");
  const GaugeField w = io::parse_gauge_field(load_kind(r, path, "gauge-field"));
  const GaugePipeline p = run_gauge_pipeline(w, steps);
  const auto triple = [](const TemporalResidual& t, double curvature) {
    return Json{{"omega0_sup", io::number(t.omega0_sup)},
                {"dx_omega_sup", io::number(t.dx_omega_sup)},
                {"curvature", io::number(curvature)}};
  };
  r.results["grid"] = Json{{"epsilon", io::number(w.epsilon)}, {"nx", w.nx}, {"ny", w.ny}, {"rank", w.rank}};
  r.results["before"] = triple(p.before, p.curvature_before);
  r.results["after"] = triple(p.after, p.curvature_after);
  r.results["monodromy_eigen_deviation"] = io::number(p.monodromy_eigen_deviation);
  r.results["monodromy_deviation"] = io::number(p.monodromy_deviation);
  const double tol = g.tol_or(1e-6);
  r.tolerances["residual"] = io::number(tol);
  r.check("omega0_removed", p.after.omega0_sup <= tol);
  r.check("dx_omega_vanishes", p.after.dx_omega_sup <= tol);
  r.check("monodromy_eigenvalues_preserved", p.monodromy_eigen_deviation <= tol);
  return r;
}

// ---- validate --------------------------------------------------------------

Report run_validate(const Globals& g, const std::vector<std::string>& paths) {
  Report r;
  r.command = "validate";
  echo_globals(r, g);
  Json diagnostics = Json::array();
  const auto diag = [&](const std::string& path, const std::string& msg) {
    diagnostics.push_back(Json{{"file", path}, {"message", msg}});
  };
  std::optional<CWData> cw;
  std::vector<std::pair<std::string, Representation>> reps;
  std::vector<std::pair<std::string, RepresentationCurve>> curves;
  for (const auto& path : paths) {
    try {
      const io::Document d = io::load(path);
      r.inputs.push_back(input_entry(d));
      if (d.kind == "cw") {
        const CWData k = io::parse_cw(d);
        try {
          build_cochain(k, trivial_representation(k, 1));
        } catch (const DataError& e) {
          diag(path, e.what());
        }
        if (!cw) cw = k;
      } else if (d.kind == "representation") {
        reps.emplace_back(path, io::parse_representation(d));
      } else if (d.kind == "curve") {
        curves.emplace_back(path, io::parse_curve(d));
      } else if (d.kind == "chirality") {
        const ChiralityComplex x = io::parse_chirality(d);
        if (!verify_complex(x.complex)) diag(path, "d d != 0: residual " + io::format(complex_residual(x.complex)));
      } else if (d.kind == "circle") {
        io::parse_circle(d);
      } else if (d.kind == "interval") {
        io::parse_interval(d);
      } else {
        io::parse_gauge_field(d).validate();
      }
    } catch (const Error& e) {
      diag(path, e.what());
    }
  }
  const double tol = g.tol_or(1e-10);
  for (const auto& [path, rho] : reps) {
    if (!cw) continue;
    try {
      const double res = validate_representation(rho, *cw);
      if (res > tol) diag(path, "relation residual " + io::format(res) + " exceeds " + io::format(tol));
    } catch (const Error& e) {
      diag(path, e.what());
    }
  }
  for (const auto& [path, c] : curves) {
    if (!cw) continue;
    try {
      c.validate(*cw, tol);
    } catch (const Error& e) {
      diag(path, e.what());
    }
  }
  r.results["diagnostics"] = diagnostics;
  r.check("valid", diagnostics.empty());
  return r;
}

std::string error_kind(const std::exception& e) {
  if (dynamic_cast<const AgmonError*>(&e)) return "AgmonError";
  if (dynamic_cast<const SpectralGapError*>(&e)) return "SpectralGapError";
  if (dynamic_cast<const DegeneracyError*>(&e)) return "DegeneracyError";
  if (dynamic_cast<const IntegrationError*>(&e)) return "IntegrationError";
  if (dynamic_cast<const DomainError*>(&e)) return "DomainError";
  if (dynamic_cast<const DataError*>(&e)) return "DataError";
  if (dynamic_cast<const StructuralError*>(&e)) return "StructuralError";
  return "Error";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Torsion invariants of cochain complexes, chirality complexes and 1-D spectral models."};
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Seed for randomized suites and representations");
  app.add_option("--tol", g.tol, "Replace the tolerance of every check");
  app.add_option("--json-out", g.json_out, "Also write the report as JSON to this path");
  app.add_option("--h", g.h, "Finite-difference step (holo)")->check(CLI::PositiveNumber);
  app.add_option("--cutoff", g.cutoff, "Direct-sum terms of the Hurwitz evaluator (circle)");

  std::string a, b, chir, field, circle_file;
  std::vector<std::string> files;
  auto* torsion = app.add_subcommand("torsion", "sigma, sigma', sigma'' and tau of a CW complex");
  torsion->add_option("cw", a)->required();
  torsion->add_option("representation", b)->required();

  auto* refined = app.add_subcommand("refined", "rho of a chirality complex with its lambda/theta sweep");
  refined->add_option("chirality", chir)->required();

  auto* glue = app.add_subcommand("glue", "sign relation and transmission split");
  glue->add_option("cw", a)->required();
  glue->add_option("representations", files);

  double z_re = 0.0, z_im = 0.0;
  auto* holo = app.add_subcommand("holo", "Cauchy-Riemann table of sigma along a curve");
  holo->add_option("cw", a)->required();
  holo->add_option("curve", b)->required();
  holo->add_option("--z-re", z_re, "Real part of z0");
  holo->add_option("--z-im", z_im, "Imaginary part of z0");

  std::string theta = "pi", agmon = "-pi/2";
  double length = 1.0, modulus = 1.0;
  auto* circle = app.add_subcommand("circle", "det', eta, Det_gr, rho_an and the Lesch check on the circle");
  circle->add_option("file", circle_file, "Optional circle input");
  circle->add_option("--theta", theta, "Holonomy angle (pi, 2pi/3, 0.5, ...)");
  circle->add_option("--L", length, "Circumference")->check(CLI::PositiveNumber);
  circle->add_option("--r", modulus, "Holonomy modulus")->check(CLI::PositiveNumber);
  circle->add_option("--agmon", agmon, "Agmon angle in (-pi, 0)");

  int steps = 200;
  auto* gauge = app.add_subcommand("gauge", "temporal gauge pipeline on a grid field");
  gauge->add_option("field", field)->required();
  gauge->add_option("--steps", steps, "RK4 steps across [0, eps]");

  std::string level = "quick";
  auto* selftest = app.add_subcommand("selftest", "invariant suites of every module");
  selftest->add_option("--level", level)->check(CLI::IsMember({"quick", "full"}));

  auto* validate = app.add_subcommand("validate", "schema and invariant pre-checks");
  validate->add_option("files", files)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? kOk : kInput;
  }

  Report report;
  try {
    if (*torsion) report = run_torsion(g, a, b);
    else if (*refined) report = run_refined(g, chir);
    else if (*glue) report = run_glue(g, a, files);
    else if (*holo) report = run_holo(g, a, b, z_re, z_im);
    else if (*circle) report = run_circle(g, circle_file, theta, length, modulus, agmon);
    else if (*gauge) report = run_gauge(g, field, steps);
    else if (*selftest)
      report = run_selftest({g.seed, level == "full" ? SelftestLevel::full : SelftestLevel::quick, g.tol});
    else report = run_validate(g, files);
  } catch (const io::InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInput;
  } catch (const StructuralError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInput;
  } catch (const DataError& e) {
    std::cerr << "input error (DataError): " << e.what() << "\n";
    return kInput;
  } catch (const Error& e) {
    std::cerr << "numerical error (" << error_kind(e) << "): " << e.what() << "\n";
    return kNumerical;
  }

  std::cout << report.to_text();
  if (!g.json_out.empty()) {
    std::ofstream out(g.json_out);
    if (!out) {
      std::cerr << "input error: cannot write " << g.json_out << "\n";
      return kInput;
    }
    out << report.to_json().dump(2) << "\n";
  }
  if (!report.pass()) {
    for (const auto& [name, ok] : report.checks)
      if (!ok) std::cerr << "failed: " << name << "\n";
    if (*validate) return kInput;
    return kInvariant;
  }
  return kOk;
}
