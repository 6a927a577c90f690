#include "dicert/pipeline.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <regex>
#include <sstream>
#include <stdexcept>

#include "dicert/certify.hpp"
#include "dicert/json_io.hpp"
#include "dicert/qmodel.hpp"
#include "dicert/stats.hpp"

#ifndef DICERT_SOURCE_DIR
#define DICERT_SOURCE_DIR "."
#endif

namespace dicert::pipeline {
namespace {

using json_io::bell_from_json;
using json_io::correlators_from_json;

double number_or_pi(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return parse_real(j.get<std::string>());
  throw std::invalid_argument("expected a number or a pi-fraction string");
}

std::filesystem::path fixtures_dir(const json& config) {
  if (config.contains("fixtures_dir"))
    return config.at("fixtures_dir").get<std::string>();
  if (const char* env = std::getenv("DICERT_FIXTURES")) return env;
  return std::filesystem::path(DICERT_SOURCE_DIR) / "fixtures";
}

std::string family_name(const qmodel::BellExpression& e) {
  switch (e.family) {
    case qmodel::BellFamily::ModCHSH: return "mod_chsh";
    case qmodel::BellFamily::IDelta: return "i_delta";
    case qmodel::BellFamily::JGamma: return "j_gamma";
    case qmodel::BellFamily::Custom: break;
  }
  return "custom";
}

qmodel::BellExpression bell_from_config(const json& config) {
  if (config.contains("bell")) return bell_from_json(config.at("bell"));
  json j = {{"family", config.at("family")}};
  if (config.contains("parameter")) j["parameter"] = number_or_pi(config.at("parameter"));
  else j["parameter"] = 0.0;
  return bell_from_json(j);
}

// Measurement angles from the bundled experiment fixture, keyed by family
// and parameter. CSV: family,parameter,role,setting,theta_deg.
json default_angles(const json& config, const qmodel::BellExpression& e) {
  auto path = fixtures_dir(config) / "hwp_angles.csv";
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("no angles given and cannot open " + path.string());
  std::string fam = family_name(e);
  std::vector<double> alice(static_cast<std::size_t>(e.nx),
                            std::numeric_limits<double>::quiet_NaN());
  std::vector<double> bob(static_cast<std::size_t>(e.ny),
                          std::numeric_limits<double>::quiet_NaN());
  std::string line;
  bool found = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("family,", 0) == 0) continue;
    std::stringstream ss(line);
    std::string f, p, role, setting, theta;
    std::getline(ss, f, ',');
    std::getline(ss, p, ',');
    std::getline(ss, role, ',');
    std::getline(ss, setting, ',');
    std::getline(ss, theta, ',');
    if (f != fam || std::abs(std::stod(p) - e.parameter) > 1e-6) continue;
    auto idx = static_cast<std::size_t>(std::stoi(setting));
    double t = std::stod(theta);
    found = true;
    if (role == "A" && idx < alice.size()) alice[idx] = t;
    if (role == "B" && idx < bob.size()) bob[idx] = t;
  }
  if (!found)
    throw std::invalid_argument("no bundled angles for " + fam + " at this parameter");
  for (double v : alice)
    if (std::isnan(v)) throw std::runtime_error("angle fixture missing a setting");
  for (double v : bob)
    if (std::isnan(v)) throw std::runtime_error("angle fixture missing a setting");
  return {{"alice", alice}, {"bob", bob}};
}

qmodel::ValueWithError bell_of_summary(const stats::ExperimentSummary& s,
                                       const qmodel::BellExpression& e,
                                       double* run_std_out) {
  auto c = stats::summary_to_correlators(s);
  auto v = qmodel::bell_value(c, e);
  if (run_std_out) {
    double var = 0.0;
    for (const auto& p : s.pairs) {
      auto it = e.coeffs.find({p.x, p.y});
      if (it != e.coeffs.end()) var += it->second * it->second * p.run_std * p.run_std;
    }
    *run_std_out = std::sqrt(var);
  }
  return v;
}

certify::ConstraintSet constraints_from_config(const json& config) {
  auto e = bell_from_config(config);
  const json& c = config.at("constraints");
  certify::ConstraintSet cs;
  if (c.contains("bell_value")) {
    cs = certify::ConstraintSet::from_bell(e, c.at("bell_value").get<double>());
  } else if (c.contains("correlators")) {
    auto corr = correlators_from_json(c.at("correlators"));
    double k = c.value("k_sigma", 0.0);
    cs = certify::ConstraintSet::from_correlators(e, corr, k);
  } else {
    throw std::invalid_argument("constraints need bell_value or correlators");
  }
  if (c.contains("marginals"))
    for (const auto& m : c.at("marginals"))
      cs.marginals.push_back({m.at("party").get<std::string>() == "A",
                              m.at("setting").get<int>(),
                              m.at("value").get<double>()});
  return cs;
}

sdp::SolveOptions solver_options(const json& config) {
  sdp::SolveOptions o;
  if (const char* env = std::getenv("DICERT_GAP_TOL")) o.gap_tol = std::atof(env);
  if (const char* env = std::getenv("DICERT_FEAS_TOL")) o.feas_tol = std::atof(env);
  if (!config.contains("options")) return o;
  const json& j = config.at("options");
  o.max_iter = j.value("max_iter", o.max_iter);
  o.gap_tol = j.value("gap_tol", o.gap_tol);
  o.feas_tol = j.value("feas_tol", o.feas_tol);
  o.verbose = j.value("verbose", o.verbose);
  return o;
}

// Compute the single scalar a reproduce case checks.
double reproduce_value(const json& c) {
  auto mode = c.at("mode").get<std::string>();
  if (mode == "quantum_bound") return qmodel::tsirelson_bound(bell_from_config(c));
  if (mode == "classical_bound") return qmodel::classical_bound(bell_from_config(c));
  if (mode == "ideal_bell" || mode == "scaled_bell") {
    json sim = c;
    sim.erase("mode");
    auto out = simulate(sim);
    return out.at("bell").at("value").get<double>();
  }
  if (mode == "min_entropy") {
    auto cs = constraints_from_config(c);
    certify::NpaOptions o;
    o.level = c.value("level", 2);
    o.solver = solver_options(c);
    auto r = certify::min_entropy(cs, c.value("target_x", 0), c.value("target_y", 0), o);
    if (r.status != sdp::Status::Optimal && r.status != sdp::Status::NearOptimal)
      throw std::runtime_error("solver failed: " + sdp::status_name(r.status));
    return r.h_min_bits;
  }
  if (mode == "von_neumann") {
    auto cs = constraints_from_config(c);
    certify::VNOptions o;
    o.m = c.value("m", 8);
    o.level = c.value("level", 2);
    o.joint = c.value("joint", true);
    o.solver = solver_options(c);
    auto r = certify::von_neumann_bound(cs, c.value("target_x", 0),
                                        c.value("target_y", 0), o);
    if (r.status != sdp::Status::Optimal && r.status != sdp::Status::NearOptimal)
      throw std::runtime_error("solver failed: " + sdp::status_name(r.status));
    return r.bits;
  }
  if (mode == "rate")
    return certify::rate_report(c.at("entropy_bits").get<double>(),
                                c.at("rate_hz").get<double>())
        .bits_per_second;
  throw std::invalid_argument("unknown reproduce mode: " + mode);
}

}  // namespace

double parse_real(const std::string& s) {
  static const std::regex pi_form(
      R"(^\s*(-?)\s*(?:(\d+(?:\.\d+)?)\s*\*\s*)?pi(?:\s*/\s*(\d+(?:\.\d+)?))?\s*$)");
  std::smatch m;
  if (std::regex_match(s, m, pi_form)) {
    double v = std::numbers::pi;
    if (m[2].matched) v *= std::stod(m[2].str());
    if (m[3].matched) v /= std::stod(m[3].str());
    return m[1].length() ? -v : v;
  }
  std::size_t pos = 0;
  double v = std::stod(s, &pos);
  while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  if (pos != s.size()) throw std::invalid_argument("cannot parse number: " + s);
  return v;
}

json simulate(const json& config) {
  auto e = bell_from_config(config);
  json ang = config.contains("angles_deg") ? config.at("angles_deg")
                                           : default_angles(config, e);
  std::vector<qmodel::BinaryObservable> alice, bob;
  for (double a : ang.at("alice").get<std::vector<double>>())
    alice.push_back(qmodel::hwp_observable(qmodel::HwpSetting(a)));
  for (double b : ang.at("bob").get<std::vector<double>>())
    bob.push_back(qmodel::hwp_observable(qmodel::HwpSetting(b)));
  if (static_cast<int>(alice.size()) < e.nx || static_cast<int>(bob.size()) < e.ny)
    throw std::invalid_argument("simulate: fewer angles than Bell settings");

  auto state = qmodel::bell_state_phi_plus();
  double eta = config.value("visibility", 1.0);
  if (eta < 1.0) state = qmodel::mix_with_white_noise(state, eta);
  auto behavior = qmodel::behavior(state, alice, bob);
  auto corr = qmodel::correlators(behavior);
  auto ideal = qmodel::bell_value(corr, e);

  json out;
  out["correlators"] = json_io::correlators_to_json(corr);
  out["bell"] = {{"value", ideal.value},
                 {"tsirelson", qmodel::tsirelson_bound(e)},
                 {"classical", qmodel::classical_bound(e)},
                 {"relative", qmodel::relative_bell_value(ideal.value, e)}};

  if (config.contains("events_per_pair")) {
    auto events = config.at("events_per_pair").get<std::uint64_t>();
    int runs = config.value("runs", 1);
    auto seed = config.value("seed", std::uint64_t{1});
    std::vector<stats::RunDataset> data;
    for (int r = 0; r < runs; ++r) {
      auto run = stats::synthesize_counts(behavior, events,
                                          seed + static_cast<std::uint64_t>(r));
      run.run_id = "run" + std::to_string(r);
      data.push_back(std::move(run));
    }
    if (config.contains("counts_out"))
      stats::save_counts(config.at("counts_out").get<std::string>(), data);
    auto summary = stats::aggregate_runs(data, stats::AggregationMode::PerRunStddev);
    double run_std = 0.0;
    auto bv = bell_of_summary(summary, e, &run_std);
    out["summary"] = json_io::summary_to_json(summary);
    out["sampled_bell"] = {{"value", bv.value},
                           {"stderr", bv.stderr.value_or(0.0)},
                           {"run_std", run_std}};
  }
  return out;
}

json ingest(const json& config) {
  auto runs = stats::load_counts(config.at("counts").get<std::string>());
  if (runs.empty()) throw std::runtime_error("no count records found");
  auto mode = stats::AggregationMode::PerRunStddev;
  if (config.value("aggregation", std::string("per_run")) == "pooled")
    mode = stats::AggregationMode::PooledBinomial;
  auto summary = stats::aggregate_runs(runs, mode);
  json out;
  out["summary"] = json_io::summary_to_json(summary);
  out["correlators"] = json_io::correlators_to_json(stats::summary_to_correlators(summary));
  if (config.contains("family") || config.contains("bell")) {
    auto e = bell_from_config(config);
    double run_std = 0.0;
    auto bv = bell_of_summary(summary, e, &run_std);
    out["bell"] = {{"value", bv.value},
                   {"stderr", bv.stderr.value_or(0.0)},
                   {"run_std", run_std},
                   {"tsirelson", qmodel::tsirelson_bound(e)},
                   {"classical", qmodel::classical_bound(e)},
                   {"relative", qmodel::relative_bell_value(bv.value, e)}};
  }
  return out;
}

json certify(const json& config) {
  auto cs = constraints_from_config(config);
  json out;
  double rate = config.value("rate_hz", 0.0);
  if (config.contains("min_entropy")) {
    certify::NpaOptions o;
    o.level = config.at("min_entropy").value("level", 2);
    o.solver = solver_options(config);
    auto r = certify::min_entropy(cs, config.value("target_x", 0),
                                  config.value("target_y", 0), o);
    out["min_entropy"] = json_io::guessing_to_json(r);
    if (rate > 0.0)
      out["min_entropy"]["bits_per_second"] =
          certify::rate_report(r.h_min_bits, rate).bits_per_second;
  }
  if (config.contains("von_neumann")) {
    certify::VNOptions o;
    o.m = config.at("von_neumann").value("m", 8);
    o.level = config.at("von_neumann").value("level", 2);
    o.joint = config.at("von_neumann").value("joint", true);
    o.solver = solver_options(config);
    auto r = certify::von_neumann_bound(cs, config.value("target_x", 0),
                                        config.value("target_y", 0), o);
    out["von_neumann"] = json_io::vn_to_json(r);
    if (rate > 0.0)
      out["von_neumann"]["bits_per_second"] =
          certify::rate_report(r.bits, rate).bits_per_second;
  }
  if (out.empty())
    throw std::invalid_argument("certify: request min_entropy and/or von_neumann");
  return out;
}

json reproduce(const json& config) {
  json table = config;
  if (config.contains("table")) {
    auto path = fixtures_dir(config) / "tables" /
                (config.at("table").get<std::string>() + ".json");
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("unknown table: " + path.string());
    in >> table;
    if (config.contains("fixtures_dir")) table["fixtures_dir"] = config.at("fixtures_dir");
  }
  json rows = json::array();
  bool all_pass = true;
  for (const auto& c0 : table.at("cases")) {
    json c = c0;
    if (table.contains("fixtures_dir") && !c.contains("fixtures_dir"))
      c["fixtures_dir"] = table.at("fixtures_dir");
    double computed = reproduce_value(c);
    double expect = c.at("expect").get<double>();
    double tol = c.at("tolerance").get<double>();
    double delta = std::abs(computed - expect);
    bool pass = delta <= tol;
    all_pass = all_pass && pass;
    rows.push_back({{"name", c.value("name", c.at("mode").get<std::string>())},
                    {"paper", expect},
                    {"computed", computed},
                    {"delta", delta},
                    {"tolerance", tol},
                    {"pass", pass}});
  }
  return {{"rows", rows}, {"pass", all_pass}};
}

json sdp_solve(const json& config) {
  json pj;
  if (config.contains("problem")) {
    pj = config.at("problem");
  } else if (config.contains("problem_file")) {
    std::ifstream in(config.at("problem_file").get<std::string>());
    if (!in) throw std::runtime_error("cannot open problem file");
    in >> pj;
  } else {
    throw std::invalid_argument("sdp_solve: need problem or problem_file");
  }
  auto prob = json_io::problem_from_json(pj);
  auto sol = sdp::solve(prob, solver_options(config));
  return json_io::solution_to_json(sol);
}

json run(const std::string& command, const json& config) {
  if (command == "simulate") return simulate(config);
  if (command == "ingest") return ingest(config);
  if (command == "certify") return certify(config);
  if (command == "reproduce") return reproduce(config);
  if (command == "sdp_solve") return sdp_solve(config);
  throw std::invalid_argument("unknown command: " + command);
}

}  // namespace dicert::pipeline
