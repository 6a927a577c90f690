#include "dicert/json_io.hpp"

#include <stdexcept>

namespace dicert::json_io {
namespace {

json entries_to_json(const std::vector<sdp::SparseEntry>& es) {
  json a = json::array();
  for (const auto& e : es) a.push_back({e.row, e.col, e.value});
  return a;
}

std::vector<sdp::SparseEntry> entries_from_json(const json& a) {
  std::vector<sdp::SparseEntry> es;
  for (const auto& t : a)
    es.push_back({t.at(0).get<int>(), t.at(1).get<int>(), t.at(2).get<double>()});
  return es;
}

json row_to_json(const sdp::LinearConstraint& lc) {
  json coeffs = json::array();
  for (const auto& [v, w] : lc.coeffs) coeffs.push_back({v, w});
  return {{"coeffs", coeffs}, {"rhs", lc.rhs}};
}

sdp::LinearConstraint row_from_json(const json& j) {
  sdp::LinearConstraint lc;
  for (const auto& t : j.at("coeffs"))
    lc.coeffs.emplace_back(t.at(0).get<int>(), t.at(1).get<double>());
  lc.rhs = j.at("rhs").get<double>();
  return lc;
}

}  // namespace

json problem_to_json(const sdp::Problem& p) {
  json blocks = json::array();
  for (const auto& blk : p.blocks) {
    json vars = json::array();
    for (const auto& fv : blk.fvars)
      vars.push_back({{"var", fv.var}, {"entries", entries_to_json(fv.entries)}});
    blocks.push_back({{"dim", blk.dim}, {"f0", entries_to_json(blk.f0)}, {"vars", vars}});
  }
  json eqs = json::array(), iqs = json::array();
  for (const auto& lc : p.equalities) eqs.push_back(row_to_json(lc));
  for (const auto& lc : p.inequalities) iqs.push_back(row_to_json(lc));
  std::vector<double> c(p.c.data(), p.c.data() + p.c.size());
  return {{"nvars", p.nvars}, {"c", c},           {"blocks", blocks},
          {"equalities", eqs}, {"inequalities", iqs}};
}

sdp::Problem problem_from_json(const json& j) {
  sdp::Problem p;
  p.nvars = j.at("nvars").get<int>();
  auto c = j.at("c").get<std::vector<double>>();
  p.c = Eigen::Map<const Eigen::VectorXd>(c.data(), static_cast<long>(c.size()));
  for (const auto& b : j.at("blocks")) {
    sdp::Block blk;
    blk.dim = b.at("dim").get<int>();
    if (b.contains("f0")) blk.f0 = entries_from_json(b.at("f0"));
    for (const auto& fv : b.at("vars"))
      blk.fvars.push_back({fv.at("var").get<int>(), entries_from_json(fv.at("entries"))});
    p.blocks.push_back(std::move(blk));
  }
  if (j.contains("equalities"))
    for (const auto& lc : j.at("equalities")) p.equalities.push_back(row_from_json(lc));
  if (j.contains("inequalities"))
    for (const auto& lc : j.at("inequalities")) p.inequalities.push_back(row_from_json(lc));
  p.validate();
  return p;
}

json solution_to_json(const sdp::Solution& s) {
  std::vector<double> y(s.y.data(), s.y.data() + s.y.size());
  return {{"status", sdp::status_name(s.status)},
          {"y", y},
          {"primal_objective", s.primal_objective},
          {"dual_objective", s.dual_objective},
          {"iterations", s.iterations},
          {"rel_gap", s.rel_gap},
          {"primal_infeasibility", s.primal_infeasibility},
          {"dual_infeasibility", s.dual_infeasibility},
          {"dual_residual_l1", s.dual_residual_l1}};
}

json bell_to_json(const qmodel::BellExpression& e) {
  json coeffs = json::array();
  for (const auto& [xy, w] : e.coeffs) coeffs.push_back({xy.first, xy.second, w});
  const char* fam = "custom";
  switch (e.family) {
    case qmodel::BellFamily::ModCHSH: fam = "mod_chsh"; break;
    case qmodel::BellFamily::IDelta: fam = "i_delta"; break;
    case qmodel::BellFamily::JGamma: fam = "j_gamma"; break;
    case qmodel::BellFamily::Custom: break;
  }
  return {{"family", fam}, {"parameter", e.parameter}, {"nx", e.nx},
          {"ny", e.ny},    {"coeffs", coeffs}};
}

qmodel::BellExpression bell_from_json(const json& j) {
  auto fam = j.at("family").get<std::string>();
  if (fam == "mod_chsh") return qmodel::BellExpression::mod_chsh();
  if (fam == "i_delta") return qmodel::BellExpression::i_delta(j.at("parameter").get<double>());
  if (fam == "j_gamma") return qmodel::BellExpression::j_gamma(j.at("parameter").get<double>());
  if (fam != "custom") throw std::invalid_argument("unknown Bell family: " + fam);
  std::map<std::pair<int, int>, double> coeffs;
  for (const auto& t : j.at("coeffs"))
    coeffs[{t.at(0).get<int>(), t.at(1).get<int>()}] = t.at(2).get<double>();
  return qmodel::BellExpression::custom(j.at("nx").get<int>(), j.at("ny").get<int>(),
                                        std::move(coeffs));
}

json correlators_to_json(const qmodel::CorrelatorSet& c) {
  json j = {{"nx", c.nx}, {"ny", c.ny}, {"values", c.values}};
  if (c.stderrs) j["stderrs"] = *c.stderrs;
  return j;
}

qmodel::CorrelatorSet correlators_from_json(const json& j) {
  qmodel::CorrelatorSet c;
  c.nx = j.at("nx").get<int>();
  c.ny = j.at("ny").get<int>();
  c.values = j.at("values").get<std::vector<double>>();
  if (c.values.size() != static_cast<std::size_t>(c.nx) * c.ny)
    throw std::invalid_argument("correlators: values length != nx*ny");
  if (j.contains("stderrs")) {
    c.stderrs = j.at("stderrs").get<std::vector<double>>();
    if (c.stderrs->size() != c.values.size())
      throw std::invalid_argument("correlators: stderrs length != nx*ny");
  }
  return c;
}

json summary_to_json(const stats::ExperimentSummary& s) {
  json pairs = json::array();
  for (const auto& e : s.pairs)
    pairs.push_back({{"x", e.x},
                     {"y", e.y},
                     {"correlator", e.correlator},
                     {"stderr", e.stderr},
                     {"run_std", e.run_std},
                     {"events", e.events}});
  return {{"pairs", pairs}, {"total_events", s.total_events}, {"rate_hz", s.rate_hz}};
}

json guessing_to_json(const certify::GuessingResult& r) {
  return {{"p_guess", r.p_guess},
          {"h_min_bits", r.h_min_bits},
          {"status", sdp::status_name(r.status)},
          {"moment_vars", r.moment_vars},
          {"matrix_dim", r.matrix_dim}};
}

json vn_to_json(const certify::VNResult& r) {
  return {{"bits", r.bits},
          {"raw_bits", r.raw_bits},
          {"primal_bits", r.primal_bits},
          {"status", sdp::status_name(r.status)},
          {"node_terms", r.node_terms},
          {"moment_vars", r.moment_vars},
          {"matrix_dim", r.matrix_dim}};
}

}  // namespace dicert::json_io
