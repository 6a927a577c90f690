// Command-line front end. Talks to the library exclusively through the C
// interface in dicert.h; JSON is only assembled/formatted locally.
//
// Exit codes: 0 success, 1 validation error, 2 solver failure,
// 3 reproduction mismatch.
#include <cctype>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dicert.h"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitSolver = 2;
constexpr int kExitMismatch = 3;

int exit_code(dicert_status s) {
  switch (s) {
    case DICERT_OK: return kExitOk;
    case DICERT_ERR_INVALID_ARGUMENT: return kExitValidation;
    case DICERT_ERR_RUNTIME: return kExitValidation;
    case DICERT_ERR_NUMERICAL: return kExitSolver;
  }
  return kExitValidation;
}

json load_json_file(const std::string& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(std::string("cannot open ") + what + ": " + path);
  json j;
  in >> j;
  return j;
}

std::string canonical_family(std::string f) {
  for (char& c : f) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (f == "i" || f == "i_delta" || f == "idelta") return "i_delta";
  if (f == "j" || f == "j_gamma" || f == "jgamma") return "j_gamma";
  if (f == "modchsh" || f == "mod_chsh" || f == "chsh") return "mod_chsh";
  throw CLI::ValidationError("--family", "expected I, J, or modchsh");
}

void print_summary(const std::string& command, const json& r) {
  if (command == "certify") {
    if (r.contains("min_entropy")) {
      const auto& m = r.at("min_entropy");
      std::printf("min-entropy: %.4f bits  (p_guess %.6f, %s)\n",
                  m.at("h_min_bits").get<double>(), m.at("p_guess").get<double>(),
                  m.at("status").get<std::string>().c_str());
      if (m.contains("bits_per_second"))
        std::printf("min-entropy rate: %.1f bits/s\n",
                    m.at("bits_per_second").get<double>());
    }
    if (r.contains("von_neumann")) {
      const auto& v = r.at("von_neumann");
      std::printf("von Neumann bound: %.4f bits  (%s)\n", v.at("bits").get<double>(),
                  v.at("status").get<std::string>().c_str());
      if (v.contains("bits_per_second"))
        std::printf("von Neumann rate: %.1f bits/s\n",
                    v.at("bits_per_second").get<double>());
    }
    return;
  }
  if (command == "ingest" || command == "simulate") {
    if (r.contains("sampled_bell")) {
      const auto& b = r.at("sampled_bell");
      std::printf("sampled Bell value: %.4f +- %.4f (run std %.4f)\n",
                  b.at("value").get<double>(), b.at("stderr").get<double>(),
                  b.at("run_std").get<double>());
    }
    if (r.contains("bell")) {
      const auto& b = r.at("bell");
      std::printf("Bell value: %.4f", b.at("value").get<double>());
      if (b.contains("stderr")) std::printf(" +- %.4f", b.at("stderr").get<double>());
      std::printf("\n");
      if (b.contains("tsirelson"))
        std::printf("bounds: classical %.4f, quantum %.4f (relative %.4f)\n",
                    b.at("classical").get<double>(), b.at("tsirelson").get<double>(),
                    b.contains("relative") ? b.at("relative").get<double>() : 0.0);
    }
    return;
  }
  if (command == "reproduce") {
    std::printf("%-34s %10s %10s %9s  %s\n", "case", "paper", "computed", "|delta|",
                "result");
    for (const auto& row : r.at("rows"))
      std::printf("%-34s %10.4f %10.4f %9.4f  %s\n",
                  row.at("name").get<std::string>().c_str(),
                  row.at("paper").get<double>(), row.at("computed").get<double>(),
                  row.at("delta").get<double>(),
                  row.at("pass").get<bool>() ? "pass" : "FAIL");
    std::printf("overall: %s\n", r.at("pass").get<bool>() ? "pass" : "FAIL");
    return;
  }
  if (command == "sdp_solve") {
    std::printf("status: %s\nprimal: %.10g\ndual:   %.10g\n",
                r.at("status").get<std::string>().c_str(),
                r.at("primal_objective").get<double>(),
                r.at("dual_objective").get<double>());
    return;
  }
  std::printf("%s\n", r.dump(2).c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Device-independent randomness certification toolkit"};
  app.require_subcommand(1);
  app.fallthrough();  // accept global flags (e.g. --json) after the subcommand

  dicert_ctx* ctx = dicert_ctx_new();
  if (!ctx) {
    std::fprintf(stderr, "error: out of memory\n");
    return kExitValidation;
  }

  bool raw_json = false;
  app.add_flag("--json", raw_json, "print the full JSON result");

  std::string config_path, family, delta, gamma, counts, counts_out;
  std::string aggregation = "per_run", method = "minentropy";
  std::string problem_path, correlators_path, table;
  std::vector<double> alice_angles, bob_angles;
  double eta = 1.0, bell = 0.0, k_sigma = 0.0, rate = 0.0;
  std::uint64_t events = 0, seed = 1;
  int runs = 1, level = 2, nodes = 6, max_iter = 200;
  double gap_tol = 1e-8;
  bool verbose = false;

  auto add_family = [&](CLI::App* cmd, bool required) {
    auto* f = cmd->add_option("--family", family, "Bell family: I, J, or modchsh");
    if (required) f->required();
    cmd->add_option("--delta", delta, "I-family parameter (radians)");
    cmd->add_option("--gamma", gamma,
                    "J-family parameter (radians; pi fractions like pi/24 allowed)");
  };
  auto add_solver = [&](CLI::App* cmd) {
    cmd->add_option("--max-iter", max_iter, "interior-point iteration cap");
    cmd->add_option("--gap-tol", gap_tol, "relative duality-gap tolerance");
    cmd->add_flag("--verbose", verbose, "per-iteration solver output");
  };

  auto* sim = app.add_subcommand("simulate", "two-qubit model of the experiment");
  add_family(sim, true);
  sim->add_option("--alice-angles", alice_angles,
                  "HWP angles (degrees); default: bundled experimental angles")
      ->delimiter(',');
  sim->add_option("--bob-angles", bob_angles, "HWP angles (degrees)")->delimiter(',');
  sim->add_option("--eta", eta, "white-noise visibility in [0,1]");
  sim->add_option("--events", events, "synthesize this many events per setting pair per run");
  sim->add_option("--runs", runs, "number of synthesized runs");
  sim->add_option("--seed", seed, "RNG seed");
  sim->add_option("--counts-out", counts_out, "write synthesized counts CSV here");
  sim->add_option("--config", config_path, "JSON config (flags override)");

  auto* ing = app.add_subcommand("ingest", "aggregate a counts CSV into correlators");
  ing->add_option("--counts", counts, "counts CSV (run,x,y,n00,n01,n10,n11)")->required();
  ing->add_option("--aggregation", aggregation, "per_run or pooled");
  add_family(ing, false);

  auto* cert = app.add_subcommand("certify", "certified randomness from observed statistics");
  add_family(cert, true);
  cert->add_option("--bell", bell, "observed Bell value (lower-bound constraint)");
  cert->add_option("--correlators", correlators_path,
                   "JSON correlator set for per-correlator constraints");
  cert->add_option("--k-sigma", k_sigma, "stderr multiplier for correlator constraints");
  cert->add_option("--method", method, "minentropy or vonneumann");
  cert->add_option("--nodes", nodes, "quadrature nodes for vonneumann");
  cert->add_option("--level", level, "moment-basis level");
  cert->add_option("--rate", rate, "events/s for bits-per-second reporting");
  cert->add_option("--config", config_path, "JSON config (flags override)");
  add_solver(cert);

  auto* rep = app.add_subcommand("reproduce", "recompute a bundled reference table");
  rep->add_option("--table", table, "bundled table name (see fixtures/tables)");
  rep->add_option("--config", config_path, "JSON config with a cases array");

  auto* sdps = app.add_subcommand("sdp-solve", "solve a serialized SDP problem");
  sdps->add_option("--problem", problem_path, "problem JSON file")->required();
  add_solver(sdps);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    dicert_ctx_free(ctx);
    return rc == 0 ? kExitOk : kExitValidation;
  }

  std::string command;
  json cfg;
  try {
    cfg = config_path.empty() ? json::object() : load_json_file(config_path, "config");
    auto set_family = [&](CLI::App* cmd) {
      if (cmd->count("--family")) cfg["family"] = canonical_family(family);
      const std::string& p = !delta.empty() ? delta : gamma;
      if (!p.empty()) {
        double v = 0.0;
        if (dicert_parse_real(ctx, p.c_str(), &v) != DICERT_OK)
          throw std::runtime_error(dicert_last_error(ctx));
        cfg["parameter"] = v;
      }
    };
    if (sim->parsed()) {
      command = "simulate";
      set_family(sim);
      if (!alice_angles.empty() || !bob_angles.empty())
        cfg["angles_deg"] = {{"alice", alice_angles}, {"bob", bob_angles}};
      if (sim->count("--eta")) cfg["visibility"] = eta;
      if (sim->count("--events")) cfg["events_per_pair"] = events;
      if (sim->count("--runs")) cfg["runs"] = runs;
      if (sim->count("--seed")) cfg["seed"] = seed;
      if (!counts_out.empty()) cfg["counts_out"] = counts_out;
    } else if (ing->parsed()) {
      command = "ingest";
      cfg["counts"] = counts;
      cfg["aggregation"] = aggregation;
      set_family(ing);
    } else if (cert->parsed()) {
      command = "certify";
      set_family(cert);
      if (cert->count("--bell")) {
        cfg["constraints"] = {{"bell_value", bell}};
      } else if (!correlators_path.empty()) {
        cfg["constraints"] = {
            {"correlators", load_json_file(correlators_path, "correlators")},
            {"k_sigma", k_sigma}};
      }
      if (method == "minentropy") {
        cfg["min_entropy"] = {{"level", level}};
      } else if (method == "vonneumann") {
        cfg["von_neumann"] = {{"m", nodes}, {"level", level}};
      } else {
        throw std::runtime_error("unknown --method: " + method);
      }
      if (rate > 0.0) cfg["rate_hz"] = rate;
      cfg["options"] = {{"max_iter", max_iter}, {"gap_tol", gap_tol}, {"verbose", verbose}};
    } else if (rep->parsed()) {
      command = "reproduce";
      if (!table.empty()) cfg["table"] = table;
      if (table.empty() && config_path.empty())
        throw std::runtime_error("reproduce needs --table or --config");
    } else if (sdps->parsed()) {
      command = "sdp_solve";
      cfg["problem_file"] = problem_path;
      cfg["options"] = {{"max_iter", max_iter}, {"gap_tol", gap_tol}, {"verbose", verbose}};
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    dicert_ctx_free(ctx);
    return kExitValidation;
  }

  char* result = nullptr;
  dicert_status st = dicert_run_json(ctx, command.c_str(), cfg.dump().c_str(), &result);
  int rc = exit_code(st);
  if (st != DICERT_OK) {
    std::fprintf(stderr, "error: %s\n", dicert_last_error(ctx));
  } else {
    json r = json::parse(result);
    if (raw_json)
      std::printf("%s\n", r.dump(2).c_str());
    else
      print_summary(command, r);
    if (command == "reproduce" && !r.at("pass").get<bool>()) rc = kExitMismatch;
  }
  dicert_string_free(result);
  dicert_ctx_free(ctx);
  return rc;
}
