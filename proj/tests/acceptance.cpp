// Acceptance gate: one pass/fail line per criterion, exit nonzero when any
// criterion fails. Criteria that depend on published values which cannot be
// derived from the other published numbers fail here with an explanation
// rather than a loosened tolerance.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dicert/certify.hpp"
#include "dicert/json_io.hpp"
#include "dicert/pipeline.hpp"
#include "dicert/qmodel.hpp"
#include "dicert/quadrature.hpp"
#include "dicert/stats.hpp"
#include "sdp_oracle.hpp"

using namespace dicert;
using pipeline::json;

namespace {

constexpr double kPi = std::numbers::pi;
int g_failures = 0;

double now_s() {
  using clock = std::chrono::steady_clock;
  static const auto t0 = clock::now();
  return std::chrono::duration<double>(clock::now() - t0).count();
}

void report(int id, const std::string& name, bool pass, double seconds,
            const std::string& detail = "") {
  std::printf("criterion %2d: %-58s %s  (%.1f s)%s%s\n", id, name.c_str(),
              pass ? "PASS" : "FAIL", seconds, detail.empty() ? "" : "\n    ",
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

// Run a bundled reproduce table; collect failing row names into detail.
bool run_table(const std::string& table, std::string* detail) {
  auto out = pipeline::reproduce({{"table", table}});
  std::ostringstream oss;
  for (const auto& row : out.at("rows"))
    if (!row.at("pass").get<bool>())
      oss << row.at("name").get<std::string>() << ": computed "
          << row.at("computed").get<double>() << " vs published "
          << row.at("paper").get<double>() << " (|diff| "
          << row.at("delta").get<double>() << " > tol "
          << row.at("tolerance").get<double>() << "); ";
  *detail += oss.str();
  return out.at("pass").get<bool>();
}

bool solved(sdp::Status s) {
  return s == sdp::Status::Optimal || s == sdp::Status::NearOptimal;
}

void criterion_1() {
  double t0 = now_s();
  std::string detail;
  bool pass = run_table("bounds", &detail);
  double dt = now_s() - t0;
  if (dt >= 1.0) {
    pass = false;
    detail += "runtime budget (1 s) exceeded";
  }
  report(1, "closed-form quantum/classical bounds match the tables", pass, dt, detail);
}

void criterion_2() {
  double t0 = now_s();
  std::string detail;
  bool pass = run_table("angles", &detail);
  double dt = now_s() - t0;
  if (dt >= 1.0) {
    pass = false;
    detail += "runtime budget (1 s) exceeded";
  }
  report(2, "tabulated analyzer angles reach the quantum maxima", pass, dt, detail);
}

void criterion_3() {
  double t0 = now_s();
  std::string detail;
  bool pass = true;
  std::vector<qmodel::BellExpression> exprs = {qmodel::BellExpression::mod_chsh()};
  for (double d : {0.3, 0.4, 0.45, 0.5, 0.52})
    exprs.push_back(qmodel::BellExpression::i_delta(d));
  for (double g : {0.0, kPi / 24, kPi / 12})
    exprs.push_back(qmodel::BellExpression::j_gamma(g));
  for (const auto& e : exprs) {
    auto r = certify::npa_max_bell(e);
    double q = qmodel::tsirelson_bound(e);
    if (!solved(r.status) || std::abs(r.value - q) > 1e-5) {
      pass = false;
      std::ostringstream oss;
      oss << "relaxation value " << r.value << " vs closed form " << q << " ("
          << sdp::status_name(r.status) << "); ";
      detail += oss.str();
    }
  }
  double dt = now_s() - t0;
  if (dt >= 30.0) {
    pass = false;
    detail += "runtime budget (30 s) exceeded";
  }
  report(3, "level-2 relaxation equals the closed-form maxima (1e-5)", pass, dt, detail);
}

void criterion_4() {
  double t0 = now_s();
  std::string detail;
  bool pass = true;
  for (const char* table : {"entropy-I-lowrate", "entropy-J", "entropy-I-highrate"})
    pass = run_table(table, &detail) && pass;
  double dt = now_s() - t0;
  if (dt >= 300.0) {
    pass = false;
    detail += "runtime budget (5 min) exceeded";
  }
  if (!pass)
    detail +=
        "[the failing rows use Bell values published to 2 decimals; the "
        "min-entropy curve has slope ~5 bits per Bell unit there, so the "
        "rounding alone shifts the result beyond the 0.02-bit gate]";
  report(4, "min-entropy columns from the published Bell values (0.02)", pass, dt,
         detail);
}

void criterion_5() {
  double t0 = now_s();
  auto e = qmodel::BellExpression::i_delta(0.52);
  auto cs = certify::ConstraintSet::from_bell(e, qmodel::tsirelson_bound(e));
  auto r = certify::min_entropy(cs);
  std::ostringstream oss;
  oss << "h_min " << r.h_min_bits << " bits (" << sdp::status_name(r.status) << ")";
  bool pass = solved(r.status) && std::abs(r.h_min_bits - 2.0) < 1e-3;
  report(5, "two full bits at the exact quantum maximum (1e-3)", pass, now_s() - t0,
         oss.str());
}

void criterion_6() {
  double t0 = now_s();
  std::string detail;
  bool pass = run_table("vn-bell-6", &detail);
  // Finite-statistics variant: constraint lowered by one per-run deviation.
  struct Row {
    double delta, bell, err, expect;
  };
  for (auto [d, v, err, expect] : std::initializer_list<Row>{
           {0.45, 5.366, 0.007, 1.54}, {0.5, 5.187, 0.006, 1.58}, {0.52, 5.179, 0.006, 1.72}}) {
    auto cs = certify::ConstraintSet::from_bell(
        qmodel::BellExpression::i_delta(d), certify::finite_stat_adjust(v, err, 1.0));
    certify::VNOptions o;
    o.m = 6;
    o.joint = false;  // per-node solves match the joint value here and are fast
    auto r = certify::von_neumann_bound(cs, 0, 0, o);
    if (!solved(r.status) || std::abs(r.bits - expect) > 0.03) {
      pass = false;
      std::ostringstream oss;
      oss << "finite-stat delta=" << d << ": " << r.bits << " vs " << expect << " ("
          << sdp::status_name(r.status) << "); ";
      detail += oss.str();
    }
  }
  report(6, "entropy bound, Bell-only, 6 nodes, incl. finite statistics (0.03)",
         pass, now_s() - t0, detail);
}

void criterion_7() {
  double t0 = now_s();
  std::string detail;
  bool pass = true;
  auto e = qmodel::BellExpression::i_delta(0.52);
  const double bell = 5.179;
  const double eta = bell / qmodel::tsirelson_bound(e);

  // Ideal correlators at the tabulated angles, scaled to the observed
  // relative violation.
  auto sim = pipeline::simulate({{"family", "i_delta"}, {"parameter", 0.52}});
  auto ideal = json_io::correlators_from_json(sim.at("correlators"));
  auto scaled = qmodel::apply_white_noise(ideal, eta);

  certify::VNOptions o6;
  o6.m = 6;
  o6.joint = false;
  auto bell_only =
      certify::von_neumann_bound(certify::ConstraintSet::from_bell(e, bell), 0, 0, o6);
  auto corr_cs = certify::ConstraintSet::from_correlators(e, scaled, 0.0);
  auto corr6 = certify::von_neumann_bound(corr_cs, 0, 0, o6);
  certify::VNOptions o8;
  o8.m = 8;
  o8.joint = false;
  auto corr8 = certify::von_neumann_bound(corr_cs, 0, 0, o8);

  std::ostringstream oss;
  oss << "bell-only(6) " << bell_only.bits << ", correlator(6) " << corr6.bits
      << ", correlator(8) " << corr8.bits;
  detail = oss.str();
  if (!solved(bell_only.status) || !solved(corr6.status) || !solved(corr8.status))
    pass = false;
  if (!(corr6.bits >= bell_only.bits - 0.02)) pass = false;
  if (!(corr8.bits >= corr6.bits - 1e-3)) pass = false;
  report(7, "correlator constraints dominate Bell-only; 8 nodes beat 6", pass,
         now_s() - t0, detail);
}

void criterion_8() {
  double t0 = now_s();
  std::string detail;
  bool pass = run_table("rates", &detail);
  if (!pass)
    detail +=
        "[the two failing figures cannot be derived from any published "
        "entropy row at the stated event rate: they would require 1.667 and "
        "1.321 bits/pair, matching no table entry]";
  report(8, "randomness rates in bits per second (1)", pass, now_s() - t0, detail);
}

void criterion_9() {
  double t0 = now_s();
  std::string detail;
  bool pass = true;
  for (int m = 2; m <= 12; ++m) {
    auto r = quadrature::gauss_radau(m);
    for (int k = 0; k <= 2 * m - 2; ++k) {
      double s = 0.0;
      for (int i = 0; i < m; ++i) s += r.weights[i] * std::pow(r.nodes[i], k);
      if (std::abs(s - 1.0 / (k + 1)) >= 1e-12) {
        pass = false;
        detail += "m=" + std::to_string(m) + " degree " + std::to_string(k) + "; ";
      }
    }
  }
  auto r2 = quadrature::gauss_radau(2);
  if (std::abs(r2.nodes[0] - 1.0 / 3.0) > 1e-14 || r2.nodes[1] != 1.0 ||
      std::abs(r2.weights[0] - 0.75) > 1e-14 || std::abs(r2.weights[1] - 0.25) > 1e-14) {
    pass = false;
    detail += "two-node rule differs from {1/3,1}/{3/4,1/4}; ";
  }
  report(9, "quadrature exact to 1e-12 through degree 2m-2, m=2..12", pass,
         now_s() - t0, detail);
}

void criterion_10() {
  double t0 = now_s();
  std::string detail;
  bool pass = true;
  int checked = 0;

  auto check = [&](const sdp::Problem& p, double reference, const char* what) {
    auto s1 = sdp::solve(p);
    auto s2 = sdp::solve(p);
    ++checked;
    if (!solved(s1.status)) {
      pass = false;
      detail += std::string(what) + ": " + sdp::status_name(s1.status) + "; ";
      return;
    }
    if (std::abs(s1.primal_objective - reference) > 1e-5) {
      pass = false;
      std::ostringstream oss;
      oss << what << ": objective " << s1.primal_objective << " vs oracle "
          << reference << "; ";
      detail += oss.str();
    }
    double slack = (s1.status == sdp::Status::Optimal ? 1e-7 : 1e-4) *
                   (1.0 + std::abs(s1.primal_objective));
    if (s1.dual_objective > s1.primal_objective + slack) {
      pass = false;
      detail += std::string(what) + ": weak duality violated; ";
    }
    bool same = s1.iterations == s2.iterations;
    for (int i = 0; same && i < p.nvars; ++i) same = s1.y(i) == s2.y(i);
    if (!same) {
      pass = false;
      detail += std::string(what) + ": nondeterministic iterates; ";
    }
  };

  // Analytic problems with known optima.
  {
    sdp::Problem p;  // min y s.t. [[y,1],[1,y]] >= 0  ->  1
    p.nvars = 1;
    p.c = Eigen::VectorXd::Ones(1);
    sdp::Block b;
    b.dim = 2;
    b.f0 = {{1, 0, 1.0}};
    b.fvars = {{0, {{0, 0, 1.0}, {1, 1, 1.0}}}};
    p.blocks.push_back(b);
    check(p, 1.0, "arrow");
  }
  {
    sdp::Problem p;  // min y s.t. y I - A >= 0  ->  max eigenvalue
    Eigen::MatrixXd a(3, 3);
    a << 2, 1, 0, 1, 3, 1, 0, 1, 2;
    p.nvars = 1;
    p.c = Eigen::VectorXd::Ones(1);
    sdp::Block b;
    b.dim = 3;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c <= r; ++c)
        if (a(r, c) != 0.0) b.f0.push_back({r, c, -a(r, c)});
    sdp::VarBlockEntries v;
    v.var = 0;
    for (int r = 0; r < 3; ++r) v.entries.push_back({r, r, 1.0});
    b.fvars.push_back(v);
    p.blocks.push_back(b);
    double lmax = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(a).eigenvalues().maxCoeff();
    check(p, lmax, "eigmax");
  }

  // 100 random strictly feasible problems against the barrier oracle.
  std::mt19937_64 rng(20250823);
  for (int trial = 0; trial < 100; ++trial) {
    auto p = dicert::testing::random_box_problem(rng, 3 + trial % 6, 2 + trial % 5);
    auto oracle = dicert::testing::barrier_solve(p, Eigen::VectorXd::Zero(p.nvars));
    check(p, oracle.objective, ("random #" + std::to_string(trial)).c_str());
  }
  report(10, "solver agrees with the independent barrier oracle (1e-5)", pass,
         now_s() - t0,
         detail.empty() ? std::to_string(checked) + " problems checked" : detail);
}

void criterion_11() {
  double t0 = now_s();
  std::string detail;
  bool pass = true;

  struct Row {
    const char* family;
    double param, eta, rate_hz, published_err;
    int runs;
  };
  // 250 s per run; the quoted coincidence rate is shared by the four
  // setting pairs measured within a run.
  const std::vector<Row> rows = {
      {"i_delta", 0.52, 0.997, 675, 0.006, 180},
      {"i_delta", 0.50, 0.994, 675, 0.006, 180},
      {"i_delta", 0.45, 0.994, 675, 0.007, 180},
      {"j_gamma", 0.0, 0.996, 780, 0.007, 160},
      {"j_gamma", kPi / 24, 0.993, 780, 0.005, 160},
      {"j_gamma", kPi / 12, 0.994, 780, 0.003, 160},
      {"i_delta", 0.50, 0.987, 2000, 0.01, 100},
      {"i_delta", 0.40, 0.991, 2000, 0.01, 100},
      {"i_delta", 0.30, 0.991, 2000, 0.01, 100},
  };

  for (const auto& row : rows) {
    auto events = static_cast<std::uint64_t>(row.rate_hz * 250.0 / 4.0);
    double sum = 0.0;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
      json cfg = {{"family", row.family},      {"parameter", row.param},
                  {"visibility", row.eta},     {"events_per_pair", events},
                  {"runs", row.runs},          {"seed", seed * 1000}};
      auto out = pipeline::simulate(cfg);
      sum += out.at("sampled_bell").at("run_std").get<double>();
    }
    double mean_std = sum / 50.0;
    double ratio = mean_std / row.published_err;
    if (ratio > 2.0 || ratio < 0.5) {
      pass = false;
      std::ostringstream oss;
      oss << row.family << "(" << row.param << "): synthesized per-run std "
          << mean_std << " vs published " << row.published_err << " (x" << ratio
          << "); ";
      detail += oss.str();
    }
  }
  if (!pass)
    detail +=
        "[counting statistics alone put the failing row just past the gate; "
        "the published value is rounded to one significant digit and the "
        "exact per-pair event split is not published]";
  report(11, "synthesized counts reproduce the per-run scatter (factor 2)", pass,
         now_s() - t0, detail);
}

}  // namespace

int main() {
  std::printf("acceptance checks\n");
  criterion_1();
  criterion_2();
  criterion_9();
  criterion_3();
  criterion_5();
  criterion_8();
  criterion_10();
  criterion_11();
  criterion_4();
  criterion_6();
  criterion_7();
  std::printf("%d of 11 criteria passed\n", 11 - g_failures);
  return g_failures == 0 ? 0 : 1;
}
