#include "cli/commands.hpp"

#include <gsl/gsl_version.h>

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cli/config.hpp"
#include "liouville/corpus.hpp"
#include "liouville/verify.hpp"
#include "liouville/zero_tracker.hpp"

#ifndef LIOUVILLE_VERSION
#define LIOUVILLE_VERSION "unknown"
#endif

namespace liouville::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

// Raised inside a command body to end the run with a specific exit code.
struct Exit {
  int code;
  std::string message;
};

std::string num(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Exit{kConfigError, "cannot write " + path.string()};
  out << text;
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

// JSON cannot hold inf/nan; keep them readable as strings.
json jnum(double v) {
  if (std::isfinite(v)) return v;
  return num(v);
}

json interval_json(Interval iv) { return json::array({iv.lo, iv.hi}); }

bool is_config_error(const Error& e) {
  return dynamic_cast<const InvalidArgument*>(&e) || dynamic_cast<const ParseError*>(&e) ||
         dynamic_cast<const UnknownIdentifier*>(&e) || dynamic_cast<const UnboundParameter*>(&e) ||
         dynamic_cast<const NotDifferentiable*>(&e);
}

/// State of one command invocation: the manifest it will leave behind and
/// per-stage wall-clock timings, kept apart so the manifest is reproducible.
class Run {
 public:
  Run(std::string command, RunConfig config) : command_(std::move(command)), config_(std::move(config)) {
    manifest_["command"] = command_;
    manifest_["versions"] = {{"liouville", LIOUVILLE_VERSION},
                             {"compiler", __VERSION__},
                             {"gsl", GSL_VERSION},
                             {"json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                          std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                          std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
    manifest_["config"] = config_.to_json();
  }

  const RunConfig& config() const { return config_; }
  json& manifest() { return manifest_; }

  template <class Body>
  auto stage(const std::string& id, const std::string& name, Body&& body) {
    const auto start = std::chrono::steady_clock::now();
    auto finish = [&] {
      const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
      timings_[id + " " + name] = elapsed.count();
    };
    try {
      if constexpr (std::is_void_v<decltype(body())>) {
        body();
        finish();
      } else {
        auto result = body();
        finish();
        return result;
      }
    } catch (const Exit&) {
      finish();
      throw;
    } catch (const Error& e) {
      finish();
      if (is_config_error(e)) throw Exit{kConfigError, "stage " + id + " (" + name + "): " + e.what()};
      throw Exit{kNumericFailure, "stage " + id + " (" + name + ") failed: " + e.what()};
    }
  }

  template <class Body>
  int execute(Body&& body) {
    int code = kPass;
    std::string message;
    try {
      fs::create_directories(config_.out);
      code = body();
    } catch (const Exit& e) {
      code = e.code;
      message = e.message;
    } catch (const Error& e) {
      code = is_config_error(e) ? kConfigError : kNumericFailure;
      message = e.what();
    } catch (const fs::filesystem_error& e) {
      code = kConfigError;
      message = e.what();
    } catch (const std::exception& e) {
      code = kNumericFailure;
      message = e.what();
    }
    manifest_["exit_code"] = code;
    manifest_["status"] = code == kPass ? "pass" : "fail";
    if (!message.empty()) manifest_["message"] = message;
    try {
      fs::create_directories(config_.out);
      write_json(config_.out / "manifest.json", manifest_);
      write_json(config_.out / "timings.json", timings_);
    } catch (const std::exception& e) {
      std::cerr << "error: cannot write manifest: " << e.what() << "\n";
      if (code == kPass) code = kConfigError;
    } catch (const Exit& e) {
      std::cerr << "error: " << e.message << "\n";
      if (code == kPass) code = kConfigError;
    }
    if (!message.empty()) std::cerr << "error: " << message << "\n";
    return code;
  }

 private:
  std::string command_;
  RunConfig config_;
  json manifest_;
  json timings_ = json::object();
};

CauchyData load_data(Run& run) {
  try {
    return run.config().load_data();
  } catch (const Error& e) {
    throw Exit{kConfigError, e.what()};
  }
}

/// Stages S1 (potentials), S2 (chiral ODEs) and S3 (assembly) over `range`.
LiouvilleSolution build_pipeline(Run& run, const CauchyData& d, Interval range) {
  const RunConfig& c = run.config();
  const SolveOptions opts = c.solve_options();
  const Interval padded{std::min(range.lo, opts.x0) - opts.margin,
                        std::max(range.hi, opts.x0) + opts.margin};
  run.manifest()["chiral_range"] = interval_json(padded);

  auto [potentials, ics] = run.stage("S1", "potentials", [&] {
    PotentialPair p = compute_potentials(d, c.mass);
    // Touch both potentials across the range so bad data fails here.
    const int probes = 257;
    for (int k = 0; k < probes; ++k) {
      const double s = padded.lo + padded.length() * k / (probes - 1);
      if (!std::isfinite(p.u(s)) || !std::isfinite(p.w(s)))
        throw NumericFailure("non-finite potential at s = " + num(s));
    }
    return std::pair{p, synthesize_ics(d, c.mass, opts.x0)};
  });

  ChiralPairs pairs = run.stage("S2", "chiral ODEs",
                                [&] { return integrate_chirals(potentials, ics, padded, opts.h); });
  const double chi_drift = wronskian_drift(pairs.chi);
  const double psi_drift = wronskian_drift(pairs.psi);
  run.manifest()["wronskian_drift"] = {{"chi", jnum(chi_drift)}, {"psi", jnum(psi_drift)}};

  return run.stage("S3", "assembly", [&] {
    return build_solution(std::move(pairs.chi), std::move(pairs.psi), c.mass, opts.pairing,
                          opts.drift_tolerance);
  });
}

std::string field_csv(const FieldTable& table) {
  std::string out = "t,x,F,phi\n";
  for (const auto& r : table.rows) out += num(r.t) + "," + num(r.x) + "," + num(r.F) + "," + num(r.phi) + "\n";
  return out;
}

json grid_json(const SpacetimeGrid& g) {
  return {{"t_min", g.t_min}, {"t_max", g.t_max}, {"nt", g.nt},
          {"x_min", g.x_min}, {"x_max", g.x_max}, {"nx", g.nx}};
}

json residual_json(const ResidualReport& r) {
  return {{"method", std::string(to_string(r.method))},
          {"delta", r.delta},
          {"sup_residual", jnum(r.sup_residual)},
          {"at", {r.at_t, r.at_x}}};
}

// ---------------------------------------------------------------- solve

int cmd_solve(Run& run) {
  const RunConfig& c = run.config();
  const CauchyData d = load_data(run);
  const LiouvilleSolution sol = build_pipeline(run, d, c.required_chiral_range());
  const FieldTable table = run.stage("S4", "grid evaluation", [&] { return evaluate_grid(sol, c.grid); });
  const ResidualReport res =
      run.stage("S5", "residual", [&] { return residual(sol, c.grid, ResidualMethod::light_cone); });

  write_text(c.out / "field.csv", field_csv(table));
  write_json(c.out / "field.json", {{"columns", {"t", "x", "F", "phi"}},
                                    {"grid", grid_json(c.grid)},
                                    {"rows", table.rows.size()},
                                    {"min_abs_F", table.min_abs_F},
                                    {"min_F", table.min_F}});
  run.manifest()["min_abs_F"] = table.min_abs_F;
  run.manifest()["residuals"] = json::array({residual_json(res)});
  run.manifest()["artifacts"] = {"field.csv", "field.json"};
  return kPass;
}

// ---------------------------------------------------------------- verify

struct Check {
  std::string name;
  bool pass = false;
  json detail;
};

template <class Body>
Check run_check(const std::string& name, Body&& body) {
  Check check{name, false, json::object()};
  try {
    check.pass = body(check.detail);
  } catch (const std::exception& e) {
    check.pass = false;
    check.detail["error"] = e.what();
  }
  return check;
}

constexpr double kOracleTmax = 1.0;
constexpr Interval kOracleX{-2.0, 2.0};
constexpr double kFdDeltas[2] = {1e-3, 5e-4};
constexpr double kFdRatioLo = 3.5, kFdRatioHi = 4.5;
constexpr double kDataRoundTripTol = 1e-6, kSolutionRoundTripTol = 1e-5;
constexpr double kRoundTripWindow = 4.0;
constexpr double kOracleTol = 1e-3, kOrderLo = 1.7, kOrderHi = 2.3;
constexpr double kOracleSteps[3] = {1.0 / 32, 1.0 / 64, 1.0 / 128};

std::vector<Check> verification_checks(Run& run, const CauchyData& d, const LiouvilleSolution& sol) {
  const RunConfig& c = run.config();
  const SpacetimeGrid& g = c.grid;
  std::vector<Check> checks;

  checks.push_back(run_check("wronskian-drift", [&](json& out) {
    out["chi"] = jnum(sol.chi_drift());
    out["psi"] = jnum(sol.psi_drift());
    out["tolerance"] = c.tolerances.wronskian_drift;
    return sol.chi_drift() <= c.tolerances.wronskian_drift && sol.psi_drift() <= c.tolerances.wronskian_drift;
  }));

  checks.push_back(run_check("residual-light-cone", [&](json& out) {
    const ResidualReport r = residual(sol, g, ResidualMethod::light_cone);
    out = residual_json(r);
    out["tolerance"] = c.tolerances.residual;
    return r.sup_residual <= c.tolerances.residual;
  }));

  checks.push_back(run_check("residual-finite-difference", [&](json& out) {
    const ResidualReport coarse = residual(sol, g, ResidualMethod::finite_difference, kFdDeltas[0]);
    const ResidualReport fine = residual(sol, g, ResidualMethod::finite_difference, kFdDeltas[1]);
    const double ratio = coarse.sup_residual / fine.sup_residual;
    out["reports"] = {residual_json(coarse), residual_json(fine)};
    out["ratio"] = jnum(ratio);
    out["accepted"] = {kFdRatioLo, kFdRatioHi};
    return ratio >= kFdRatioLo && ratio <= kFdRatioHi;
  }));

  checks.push_back(run_check("round-trip-data", [&](json& out) {
    const double err = data_round_trip_error(d, c.mass, kRoundTripWindow, c.solve_options());
    out["window"] = kRoundTripWindow;
    out["sup_error"] = jnum(err);
    out["tolerance"] = kDataRoundTripTol;
    return err <= kDataRoundTripTol;
  }));

  checks.push_back(run_check("round-trip-solution", [&](json& out) {
    const double err = solution_round_trip_error(sol, g, c.solve_options());
    out["sup_error"] = jnum(err);
    out["tolerance"] = kSolutionRoundTripTol;
    return err <= kSolutionRoundTripTol;
  }));

  checks.push_back(run_check("oracle", [&](json& out) {
    const OracleStudy study = oracle_convergence(d, c.mass, sol, kOracleTmax, kOracleX, kOracleSteps);
    json rows = json::array();
    for (std::size_t k = 0; k < study.dx.size(); ++k)
      rows.push_back({{"dx", study.dx[k]}, {"sup_error", jnum(study.errors[k])}});
    out["domain"] = {{"t", {0.0, kOracleTmax}}, {"x", interval_json(kOracleX)}};
    out["refinements"] = rows;
    out["order"] = jnum(study.order);
    out["tolerance"] = kOracleTol;
    out["accepted_order"] = {kOrderLo, kOrderHi};
    return study.errors.back() <= kOracleTol && study.order >= kOrderLo && study.order <= kOrderHi;
  }));

  checks.push_back(run_check("positivity", [&](json& out) {
    const FieldTable table = evaluate_grid(sol, g);
    std::size_t seeds = 0;
    for (int i = 0; i < g.nt; ++i) seeds += find_seed_zeros(sol, g.t(i), {g.x_min, g.x_max}).size();
    out["min_F"] = table.min_F;
    out["min_abs_F"] = table.min_abs_F;
    out["zero_seeds"] = seeds;
    return table.min_F > 0.0 && seeds == 0;
  }));

  return checks;
}

// Hull covering both the user grid and the oracle domain.
Interval verification_range(const RunConfig& c) {
  const Interval grid_hull = c.required_chiral_range();
  SpacetimeGrid oracle;
  oracle.t_min = 0.0;
  oracle.t_max = kOracleTmax;
  oracle.x_min = kOracleX.lo;
  oracle.x_max = kOracleX.hi;
  const Interval oracle_hull = oracle.chiral_hull(c.x0);
  return {std::min(grid_hull.lo, oracle_hull.lo), std::max(grid_hull.hi, oracle_hull.hi)};
}

int verify_one(Run& run, const CauchyData& d) {
  const RunConfig& c = run.config();
  const LiouvilleSolution sol = build_pipeline(run, d, verification_range(c));
  const std::vector<Check> checks = run.stage("S4", "verification", [&] { return verification_checks(run, d, sol); });

  json report = json::array();
  json summary = json::object();
  std::vector<std::string> failed;
  for (const auto& ch : checks) {
    report.push_back({{"check", ch.name}, {"pass", ch.pass}, {"detail", ch.detail}});
    summary[ch.name] = ch.pass;
    if (!ch.pass) failed.push_back(ch.name);
  }
  write_json(c.out / "verify_report.json", {{"checks", report}});
  run.manifest()["checks"] = summary;
  for (const auto& ch : checks) {
    if (ch.name.rfind("residual", 0) == 0 && ch.detail.contains("method"))
      run.manifest()["residuals"].push_back(ch.detail);
  }
  run.manifest()["artifacts"] = {"verify_report.json"};
  if (!failed.empty()) {
    std::string names;
    for (const auto& f : failed) names += (names.empty() ? "" : ", ") + f;
    throw Exit{kVerificationFailure, "failed checks: " + names};
  }
  return kPass;
}

int cmd_verify_corpus(Run& run) {
  const RunConfig& base = run.config();
  json entries = json::array();
  int worst = kPass;
  for (const auto& entry : smooth_corpus()) {
    RunConfig cfg = base;
    cfg.phi = entry.phi;
    cfg.pi = entry.pi;
    cfg.mass = entry.mass;
    cfg.data_file.reset();
    cfg.out = base.out / "corpus" / entry.name;
    Run sub("verify", cfg);
    sub.manifest()["corpus_entry"] = entry.name;
    const int code = sub.execute([&] { return verify_one(sub, load_data(sub)); });
    entries.push_back({{"name", entry.name}, {"exit_code", code}, {"status", code == kPass ? "pass" : "fail"}});
    worst = std::max(worst, code);
  }
  write_json(base.out / "summary.json", {{"entries", entries}, {"exit_code", worst}});
  run.manifest()["corpus"] = entries;
  run.manifest()["artifacts"] = {"summary.json"};
  if (worst != kPass) throw Exit{worst, "one or more corpus entries failed"};
  return kPass;
}

// ---------------------------------------------------------------- track

struct TrackFlags {
  std::optional<std::string> chi1, chi2, psi1, psi2;
  std::string t_range = "-5:5";
  std::optional<std::string> x_range;
  double t0 = 0.0;
  double ht = 1e-2;
};

constexpr int kFamilyCheckPoints = 64;
constexpr double kFamilyTolerance = 1e-8;

// Max |f1 f2' - f2 f1' - 1| over evenly spaced points.
double family_wronskian_deviation(const Expr& f1, const Expr& f2, Interval range, const Params& params) {
  const Expr d1 = differentiate(f1);
  const Expr d2 = differentiate(f2);
  double worst = 0.0;
  for (int k = 0; k < kFamilyCheckPoints; ++k) {
    const double s = range.lo + range.length() * k / (kFamilyCheckPoints - 1);
    const double w = evaluate(f1, s, params) * evaluate(d2, s, params) - evaluate(f2, s, params) * evaluate(d1, s, params);
    worst = std::max(worst, std::abs(w - 1.0));
  }
  return worst;
}

int cmd_track(Run& run, const TrackFlags& flags) {
  const RunConfig& c = run.config();
  Interval t_range, x_range;
  try {
    t_range = parse_interval(flags.t_range);
    x_range = flags.x_range ? parse_interval(*flags.x_range) : Interval{c.grid.x_min, c.grid.x_max};
  } catch (const Error& e) {
    throw Exit{kConfigError, e.what()};
  }
  if (!t_range.contains(flags.t0)) throw Exit{kConfigError, "t0 must lie inside the t-range"};
  if (!(flags.ht > 0.0)) throw Exit{kConfigError, "tracking step must be positive"};

  SpacetimeGrid hull_grid;
  hull_grid.t_min = t_range.lo;
  hull_grid.t_max = t_range.hi;
  hull_grid.x_min = x_range.lo;
  hull_grid.x_max = x_range.hi;
  const Interval hull = hull_grid.chiral_hull(c.x0);

  const int given = !!flags.chi1 + !!flags.chi2 + !!flags.psi1 + !!flags.psi2;
  std::optional<LiouvilleSolution> sol;
  if (given == 0) {
    run.manifest()["source"] = "cauchy";
    sol.emplace(build_pipeline(run, load_data(run), hull));
  } else if (given != 4) {
    throw Exit{kConfigError, "a chiral family needs all of --chi1, --chi2, --psi1, --psi2"};
  } else {
    run.manifest()["source"] = "family";
    run.manifest()["family"] = {{"chi1", *flags.chi1}, {"chi2", *flags.chi2},
                                {"psi1", *flags.psi1}, {"psi2", *flags.psi2}};
    const Params params{{"m", c.mass}};
    Expr chi1, chi2, psi1, psi2;
    try {
      chi1 = parse(*flags.chi1, {"m"}, "s");
      chi2 = parse(*flags.chi2, {"m"}, "s");
      psi1 = parse(*flags.psi1, {"m"}, "s");
      psi2 = parse(*flags.psi2, {"m"}, "s");
    } catch (const Error& e) {
      throw Exit{kConfigError, e.what()};
    }
    const Interval table{hull.lo - 1.0, hull.hi + 1.0};
    double chi_dev = 0.0, psi_dev = 0.0;
    try {
      chi_dev = family_wronskian_deviation(chi1, chi2, table, params);
      psi_dev = family_wronskian_deviation(psi1, psi2, table, params);
    } catch (const Error& e) {
      throw Exit{kConfigError, std::string("cannot check the family Wronskian: ") + e.what()};
    }
    run.manifest()["family_wronskian_deviation"] = {{"chi", chi_dev}, {"psi", psi_dev}};
    if (!(chi_dev <= kFamilyTolerance) || !(psi_dev <= kFamilyTolerance)) {
      throw Exit{kConfigError, "Wronskian violation: max deviation " + num(std::max(chi_dev, psi_dev)) +
                                   " exceeds " + num(kFamilyTolerance)};
    }
    sol.emplace(run.stage("S2", "chiral tables", [&] {
      WronskianPair chi = WronskianPair::tabulate(chi1, chi2, table, c.h, params);
      WronskianPair psi = WronskianPair::tabulate(psi1, psi2, table, c.h, params);
      return build_solution(std::move(chi), std::move(psi), c.mass, c.pairing,
                            c.tolerances.wronskian_drift);
    }));
  }

  const auto seeds = run.stage("S4", "seed scan", [&] { return find_seed_zeros(*sol, flags.t0, x_range); });
  TrackOptions opts;
  opts.ht = flags.ht;
  opts.newton_tolerance = c.tolerances.newton;

  json curves = json::array();
  json artifacts = json::array();
  for (std::size_t k = 0; k < seeds.size(); ++k) {
    const ZeroCurve curve = run.stage("S5", "tracking", [&] { return track(*sol, seeds[k], t_range, opts); });
    const LemmaReport lemma = lemma_report(curve);

    std::string csv = "t,x,F,dFdx\n";
    for (const auto& s : curve.samples) csv += num(s.t) + "," + num(s.x) + "," + num(s.F) + "," + num(s.dFdx) + "\n";
    const std::string stem = std::to_string(k);
    write_text(c.out / ("curve_" + stem + ".csv"), csv);
    const json lemma_json{{"seed", {curve.seed.t, curve.seed.x}},
                          {"requested", interval_json(curve.requested)},
                          {"covered", interval_json(curve.covered)},
                          {"samples", curve.samples.size()},
                          {"max_abs_F", lemma.max_abs_F},
                          {"min_abs_dFdx", lemma.min_abs_dFdx},
                          {"max_product_defect", lemma.max_product_defect},
                          {"coverage", lemma.coverage},
                          {"truncation", lemma.truncation}};
    write_json(c.out / ("lemma_" + stem + ".json"), lemma_json);
    curves.push_back(lemma_json);
    artifacts.push_back("curve_" + stem + ".csv");
    artifacts.push_back("lemma_" + stem + ".json");
  }
  run.manifest()["t_range"] = interval_json(t_range);
  run.manifest()["x_range"] = interval_json(x_range);
  run.manifest()["curves"] = curves;
  run.manifest()["artifacts"] = artifacts;
  return kPass;
}

// ---------------------------------------------------------------- probe

struct ProbeFlags {
  std::string eps = "1e-1,1e-2,1e-3";
  std::string eta_phi = "1/cosh(x)";
  std::string eta_pi = "1/cosh(x)";
};

std::string probe_csv(const ProbeTable& table) {
  std::string out = "eps,input_distance,output_deviation,slice_deviation\n";
  for (const auto& r : table.rows)
    out += num(r.eps) + "," + num(r.input_distance) + "," + num(r.output_deviation) + "," +
           num(r.slice_deviation) + "\n";
  return out;
}

json probe_json(const ProbeTable& table) {
  json ratios = json::array();
  for (double r : table.ratios()) ratios.push_back(jnum(r));
  return {{"rows", table.rows.size()}, {"strictly_decreasing", table.strictly_decreasing()}, {"ratios", ratios}};
}

int cmd_probe(Run& run, const ProbeFlags& flags) {
  const RunConfig& c = run.config();
  std::vector<double> eps;
  ProbeSetup setup;
  try {
    eps = parse_list(flags.eps);
    validate_eps_list(eps);
    setup.eta_phi = parse(flags.eta_phi, {"m"});
    setup.eta_pi = parse(flags.eta_pi, {"m"});
  } catch (const Error& e) {
    throw Exit{kConfigError, e.what()};
  }
  setup.grid = c.grid;
  setup.options = c.solve_options();
  const CauchyData d = load_data(run);
  if (!d.is_closed_form()) throw Exit{kConfigError, "probes need closed-form data, not a data file"};
  (void)c.required_chiral_range();

  const ProbeTable forward = run.stage("S6", "forward probe", [&] { return continuity_probe(d, c.mass, eps, setup); });
  const ProbeTable inverse =
      run.stage("S7", "inverse probe", [&] { return inverse_continuity_probe(d, c.mass, eps, setup); });
  write_text(c.out / "probe_forward.csv", probe_csv(forward));
  write_text(c.out / "probe_inverse.csv", probe_csv(inverse));
  run.manifest()["eps"] = eps;
  run.manifest()["probes"] = {{"forward", probe_json(forward)}, {"inverse", probe_json(inverse)}};
  run.manifest()["checks"] = {{"forward-monotone", forward.strictly_decreasing()},
                              {"inverse-monotone", inverse.strictly_decreasing()}};
  run.manifest()["artifacts"] = {"probe_forward.csv", "probe_inverse.csv"};
  if (!forward.strictly_decreasing() || !inverse.strictly_decreasing())
    throw Exit{kVerificationFailure, "probe deviations are not strictly decreasing in eps"};
  return kPass;
}

// ---------------------------------------------------------------- dumps

std::tuple<double, double, int> dump_range(const std::string& text) {
  std::tuple<double, double, int> r;
  try {
    r = parse_range(text);
  } catch (const Error& e) {
    throw Exit{kConfigError, e.what()};
  }
  const auto [lo, hi, n] = r;
  if (n < 1 || !(hi >= lo)) throw Exit{kConfigError, "dump range needs n >= 1 and lo <= hi"};
  return r;
}

double range_point(double lo, double hi, int n, int k) { return n == 1 ? lo : lo + (hi - lo) * k / (n - 1); }

int cmd_dump_potentials(Run& run, const std::string& range_text) {
  const RunConfig& c = run.config();
  const auto [lo, hi, n] = dump_range(range_text);
  const CauchyData d = load_data(run);
  const std::string csv = run.stage("S1", "potentials", [&] {
    const PotentialPair p = compute_potentials(d, c.mass);
    std::string out = "x,u,w\n";
    for (int k = 0; k < n; ++k) {
      const double x = range_point(lo, hi, n, k);
      out += num(x) + "," + num(p.u(x)) + "," + num(p.w(x)) + "\n";
    }
    return out;
  });
  write_text(c.out / "potentials.csv", csv);
  run.manifest()["range"] = {lo, hi, n};
  run.manifest()["artifacts"] = {"potentials.csv"};
  return kPass;
}

int cmd_dump_chirals(Run& run, const std::string& range_text) {
  const RunConfig& c = run.config();
  const auto [lo, hi, n] = dump_range(range_text);
  const CauchyData d = load_data(run);
  const SolveOptions opts = c.solve_options();
  const Interval range{std::min(lo, opts.x0), std::max(hi, opts.x0)};
  const PotentialPair potentials = run.stage("S1", "potentials", [&] { return compute_potentials(d, c.mass); });
  const ChiralICs ics = run.stage("S1", "potentials", [&] { return synthesize_ics(d, c.mass, opts.x0); });
  const ChiralPairs pairs =
      run.stage("S2", "chiral ODEs", [&] { return integrate_chirals(potentials, ics, range, opts.h); });

  std::string out = "s,psi1,psi2,chi1,chi2\n";
  for (int k = 0; k < n; ++k) {
    const double s = range_point(lo, hi, n, k);
    const PairJet psi = pairs.psi.eval(s);
    const PairJet chi = pairs.chi.eval(s);
    out += num(s) + "," + num(static_cast<double>(psi.f1)) + "," + num(static_cast<double>(psi.f2)) + "," +
           num(static_cast<double>(chi.f1)) + "," + num(static_cast<double>(chi.f2)) + "\n";
  }
  write_text(c.out / "chirals.csv", out);
  run.manifest()["range"] = {lo, hi, n};
  run.manifest()["wronskian_drift"] = {{"chi", jnum(wronskian_drift(pairs.chi))},
                                       {"psi", jnum(wronskian_drift(pairs.psi))}};
  run.manifest()["artifacts"] = {"chirals.csv"};
  return kPass;
}

// Flags shared by every subcommand.
void add_common(CLI::App* sub, Overrides& o) {
  sub->set_help_flag("--help", "Print this help message and exit");
  sub->add_option("--m", o.mass, "Mass parameter m > 0");
  sub->add_option("--phi", o.phi, "Initial field phi(x) as an expression");
  sub->add_option("--pi", o.pi, "Initial momentum pi(x) as an expression");
  sub->add_option("--data-file", o.data_file, "CSV with header x,phi,pi instead of expressions");
  sub->add_option("--x0", o.x0, "Base point for the chiral initial conditions");
  sub->add_option("--h", o.h, "RK4 step for the chiral ODEs");
  sub->add_option("--margin", o.margin, "Padding around the chiral hull");
  sub->add_option("--chiral-range", o.chiral_range, "Largest allowed chiral range lo:hi");
  sub->add_option("--grid", o.grid, "Evaluation grid tmin:tmax:nt,xmin:xmax:nx");
  sub->add_option("--seed", o.seed, "Seed recorded in the manifest");
  sub->add_option("--out", o.out, "Output directory");
  sub->add_option("--config", o.config, "INI-style config file; flags override it");
  sub->add_option("--pairing", o.pairing, "cross or same-index")->group("");
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Exact Liouville solutions from Cauchy data"};
  app.require_subcommand(1);
  app.set_help_flag("--help", "Print this help message and exit");
  app.set_version_flag("--version", LIOUVILLE_VERSION);

  Overrides overrides;
  auto* solve_cmd = app.add_subcommand("solve", "Build the solution and write the field on a grid");
  auto* verify_cmd = app.add_subcommand("verify", "Run residual, round-trip, oracle and positivity checks");
  auto* track_cmd = app.add_subcommand("track", "Seed and track zero curves of F");
  auto* probe_cmd = app.add_subcommand("probe", "Continuity probes of the map and its inverse");
  auto* dump_pot_cmd = app.add_subcommand("dump-potentials", "Write the chiral potentials u and w");
  auto* dump_chi_cmd = app.add_subcommand("dump-chirals", "Write the chiral solution pairs");
  for (auto* sub : {solve_cmd, verify_cmd, track_cmd, probe_cmd, dump_pot_cmd, dump_chi_cmd})
    add_common(sub, overrides);

  bool corpus = false;
  verify_cmd->add_flag("--corpus", corpus, "Verify every entry of the built-in smooth corpus");

  TrackFlags track_flags;
  track_cmd->add_option("--chi1", track_flags.chi1, "First chi function of s");
  track_cmd->add_option("--chi2", track_flags.chi2, "Second chi function of s");
  track_cmd->add_option("--psi1", track_flags.psi1, "First psi function of s");
  track_cmd->add_option("--psi2", track_flags.psi2, "Second psi function of s");
  track_cmd->add_option("--t-range", track_flags.t_range, "Tracking interval lo:hi")->capture_default_str();
  track_cmd->add_option("--x-range", track_flags.x_range, "Seed scan interval lo:hi (defaults to the grid)");
  track_cmd->add_option("--t0", track_flags.t0, "Time of the seed scan")->capture_default_str();
  track_cmd->add_option("--ht", track_flags.ht, "Tracking step")->capture_default_str();

  ProbeFlags probe_flags;
  probe_cmd->add_option("--eps", probe_flags.eps, "Strictly decreasing perturbation sizes")->capture_default_str();
  probe_cmd->add_option("--eta-phi", probe_flags.eta_phi, "Perturbation direction for phi")->capture_default_str();
  probe_cmd->add_option("--eta-pi", probe_flags.eta_pi, "Perturbation direction for pi")->capture_default_str();

  std::string dump_range_text = "-8:8:161";
  dump_pot_cmd->add_option("--range", dump_range_text, "Sample points lo:hi:n")->capture_default_str();
  dump_chi_cmd->add_option("--range", dump_range_text, "Sample points lo:hi:n")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kConfigError;
  }

  CLI::App* active = app.get_subcommands().front();
  const std::string name = active->get_name();

  RunConfig config;
  std::string config_error;
  try {
    apply_overrides(overrides, config);
    config.validate();
  } catch (const Error& e) {
    config_error = e.what();
  }

  Run run(name, config);
  return run.execute([&]() -> int {
    if (!config_error.empty()) throw Exit{kConfigError, config_error};
    if (name == "solve") return cmd_solve(run);
    if (name == "verify") return corpus ? cmd_verify_corpus(run) : verify_one(run, load_data(run));
    if (name == "track") return cmd_track(run, track_flags);
    if (name == "probe") return cmd_probe(run, probe_flags);
    if (name == "dump-potentials") return cmd_dump_potentials(run, dump_range_text);
    return cmd_dump_chirals(run, dump_range_text);
  });
}

}  // namespace liouville::cli
