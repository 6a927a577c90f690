#include <doctest.h>

#include "dicert/json_io.hpp"

using namespace dicert;
using json_io::json;

TEST_CASE("problem round-trips through JSON") {
  sdp::Problem p;
  p.nvars = 2;
  p.c = Eigen::VectorXd(2);
  p.c << 1.0, -0.5;
  sdp::Block b;
  b.dim = 2;
  b.f0 = {{0, 0, 1.0}, {1, 0, 0.25}};
  b.fvars = {{0, {{0, 0, 1.0}}}, {1, {{1, 1, -2.0}}}};
  p.blocks.push_back(b);
  p.equalities = {{{{0, 1.0}, {1, 1.0}}, 0.5}};
  p.inequalities = {{{{1, 2.0}}, -1.0}};

  auto q = json_io::problem_from_json(json_io::problem_to_json(p));
  CHECK(q.nvars == 2);
  CHECK(q.c(1) == -0.5);
  REQUIRE(q.blocks.size() == 1);
  CHECK(q.blocks[0].dim == 2);
  REQUIRE(q.blocks[0].f0.size() == 2);
  CHECK(q.blocks[0].f0[1].value == 0.25);
  REQUIRE(q.blocks[0].fvars.size() == 2);
  CHECK(q.blocks[0].fvars[1].entries[0].value == -2.0);
  REQUIRE(q.equalities.size() == 1);
  CHECK(q.equalities[0].rhs == 0.5);
  REQUIRE(q.inequalities.size() == 1);
  CHECK(q.inequalities[0].coeffs[0].second == 2.0);
  CHECK_NOTHROW(q.validate());
}

TEST_CASE("solution serializes its status and certificates") {
  sdp::Problem p;
  p.nvars = 1;
  p.c = Eigen::VectorXd::Ones(1);
  sdp::Block b;
  b.dim = 1;
  b.f0 = {{0, 0, -1.0}};
  b.fvars = {{0, {{0, 0, 1.0}}}};
  p.blocks.push_back(b);
  auto sol = sdp::solve(p);
  auto j = json_io::solution_to_json(sol);
  CHECK(j.at("status").get<std::string>() == sdp::status_name(sol.status));
  CHECK(j.at("y").size() == 1);
  CHECK(j.contains("primal_objective"));
  CHECK(j.contains("dual_objective"));
  CHECK(j.contains("dual_residual_l1"));
}

TEST_CASE("bell expressions round-trip, families and custom") {
  auto e = qmodel::BellExpression::i_delta(0.45);
  auto e2 = json_io::bell_from_json(json_io::bell_to_json(e));
  CHECK(e2.family == qmodel::BellFamily::IDelta);
  CHECK(e2.parameter == doctest::Approx(0.45));
  CHECK(e2.coeffs == e.coeffs);

  auto c = qmodel::BellExpression::custom(2, 3, {{{0, 0}, 1.0}, {{1, 2}, -2.0}});
  auto c2 = json_io::bell_from_json(json_io::bell_to_json(c));
  CHECK(c2.family == qmodel::BellFamily::Custom);
  CHECK(c2.nx == 2);
  CHECK(c2.ny == 3);
  CHECK(c2.coeffs == c.coeffs);
}

TEST_CASE("correlator sets round-trip with uncertainties") {
  qmodel::CorrelatorSet c;
  c.nx = 2;
  c.ny = 2;
  c.values = {0.9, -0.1, 0.3, 0.7};
  c.stderrs = std::vector<double>{0.01, 0.02, 0.03, 0.04};
  auto c2 = json_io::correlators_from_json(json_io::correlators_to_json(c));
  CHECK(c2.values == c.values);
  REQUIRE(c2.stderrs.has_value());
  CHECK(*c2.stderrs == *c.stderrs);

  c.stderrs.reset();
  auto c3 = json_io::correlators_from_json(json_io::correlators_to_json(c));
  CHECK_FALSE(c3.stderrs.has_value());
}

TEST_CASE("certification results expose the fields the CLI prints") {
  certify::GuessingResult g;
  g.p_guess = 0.25;
  g.h_min_bits = 2.0;
  g.status = sdp::Status::Optimal;
  auto jg = json_io::guessing_to_json(g);
  CHECK(jg.at("p_guess") == 0.25);
  CHECK(jg.at("h_min_bits") == 2.0);

  certify::VNResult v;
  v.bits = 1.7;
  v.raw_bits = 1.71;
  v.status = sdp::Status::NearOptimal;
  v.node_terms = {0.5, 0.6};
  auto jv = json_io::vn_to_json(v);
  CHECK(jv.at("bits") == 1.7);
  CHECK(jv.at("node_terms").size() == 2);
}
