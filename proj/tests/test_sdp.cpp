#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "dicert/sdp.hpp"
#include "sdp_oracle.hpp"

using namespace dicert::sdp;

namespace {

// min y s.t. [[y, 1], [1, y]] >= 0; optimum y = 1.
Problem arrow_problem() {
  Problem p;
  p.nvars = 1;
  p.c = Eigen::VectorXd::Ones(1);
  Block b;
  b.dim = 2;
  b.f0 = {{1, 0, 1.0}};
  b.fvars = {{0, {{0, 0, 1.0}, {1, 1, 1.0}}}};
  p.blocks.push_back(b);
  return p;
}

// min y s.t. y I - A >= 0; optimum is the largest eigenvalue of A.
Problem eigmax_problem(const Eigen::MatrixXd& a) {
  Problem p;
  p.nvars = 1;
  p.c = Eigen::VectorXd::Ones(1);
  Block b;
  b.dim = static_cast<int>(a.rows());
  for (int r = 0; r < b.dim; ++r)
    for (int c = 0; c <= r; ++c)
      if (a(r, c) != 0.0) b.f0.push_back({r, c, -a(r, c)});
  VarBlockEntries v;
  v.var = 0;
  for (int r = 0; r < b.dim; ++r) v.entries.push_back({r, r, 1.0});
  b.fvars.push_back(v);
  p.blocks.push_back(b);
  return p;
}

}  // namespace

TEST_CASE("validate flags bad problems") {
  auto p = arrow_problem();
  CHECK_NOTHROW(p.validate());
  auto bad = p;
  bad.blocks[0].fvars[0].var = 3;  // out of range
  CHECK_THROWS(bad.validate());
  auto bad2 = p;
  bad2.blocks[0].f0.push_back({0, 1, 1.0});  // upper triangle
  CHECK_THROWS(bad2.validate());
}

TEST_CASE("analytic optimum: 2x2 arrow matrix") {
  auto sol = solve(arrow_problem());
  REQUIRE(sol.status == Status::Optimal);
  CHECK(sol.y(0) == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(sol.primal_objective == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(sol.dual_objective <= sol.primal_objective + 1e-9);
}

TEST_CASE("analytic optimum: largest eigenvalue") {
  Eigen::MatrixXd a(3, 3);
  a << 2, 1, 0, 1, 3, 1, 0, 1, 2;
  auto sol = solve(eigmax_problem(a));
  REQUIRE(sol.status == Status::Optimal);
  double lmax = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(a).eigenvalues().maxCoeff();
  CHECK(sol.y(0) == doctest::Approx(lmax).epsilon(1e-7));
}

TEST_CASE("equality rows are honored") {
  // min y0 + y1 s.t. y0 - y1 = 0.3, y0 >= 0, y1 >= 0  ->  (0.3, 0).
  Problem p;
  p.nvars = 2;
  p.c = Eigen::VectorXd::Ones(2);
  for (int i = 0; i < 2; ++i) {
    Block b;
    b.dim = 1;
    b.fvars = {{i, {{0, 0, 1.0}}}};
    p.blocks.push_back(b);
  }
  p.equalities = {{{{0, 1.0}, {1, -1.0}}, 0.3}};
  auto sol = solve(p);
  REQUIRE(sol.status == Status::Optimal);
  CHECK(sol.y(0) == doctest::Approx(0.3).epsilon(1e-6));
  CHECK(sol.y(1) == doctest::Approx(0.0).scale(1.0).epsilon(1e-6));
  CHECK(sol.primal_objective == doctest::Approx(0.3).epsilon(1e-6));
}

TEST_CASE("inequality rows become active at the optimum") {
  // min y s.t. y >= 2 (row) and y >= 0 (block)  ->  2.
  Problem p;
  p.nvars = 1;
  p.c = Eigen::VectorXd::Ones(1);
  Block b;
  b.dim = 1;
  b.fvars = {{0, {{0, 0, 1.0}}}};
  p.blocks.push_back(b);
  p.inequalities = {{{{0, 1.0}}, 2.0}};
  auto sol = solve(p);
  REQUIRE(sol.status == Status::Optimal);
  CHECK(sol.y(0) == doctest::Approx(2.0).epsilon(1e-7));
}

TEST_CASE("determinism: identical inputs give identical iterates") {
  std::mt19937_64 rng(7);
  auto p = dicert::testing::random_box_problem(rng, 6, 5);
  auto s1 = solve(p);
  auto s2 = solve(p);
  REQUIRE(s1.status == s2.status);
  CHECK(s1.iterations == s2.iterations);
  for (int i = 0; i < p.nvars; ++i) CHECK(s1.y(i) == s2.y(i));  // bitwise
  CHECK(s1.primal_objective == s2.primal_objective);
}

TEST_CASE("agreement with the barrier oracle on random problems") {
  std::mt19937_64 rng(12345);
  for (int trial = 0; trial < 20; ++trial) {
    auto p = dicert::testing::random_box_problem(rng, 4 + trial % 4, 3 + trial % 3);
    auto sol = solve(p);
    CAPTURE(trial);
    REQUIRE((sol.status == Status::Optimal || sol.status == Status::NearOptimal));
    auto oracle = dicert::testing::barrier_solve(p, Eigen::VectorXd::Zero(p.nvars));
    CHECK(std::abs(sol.primal_objective - oracle.objective) < 1e-5);
    // Weak duality up to the solver's own termination tolerance (the duality
    // gap of the returned iterates matches the gap tolerance, not zero).
    double slack = (sol.status == Status::Optimal ? 1e-7 : 1e-4) *
                   (1.0 + std::abs(sol.primal_objective));
    CHECK(sol.dual_objective <= sol.primal_objective + slack);
    // Independent feasibility audit of the returned iterate.
    auto rep = verify(p, sol.y);
    CHECK(rep.min_slack_eigenvalue > -1e-7);
    CHECK(rep.max_equality_violation < 1e-7);
    CHECK(rep.max_inequality_violation < 1e-7);
  }
}

TEST_CASE("verify recomputes residuals from scratch") {
  auto p = arrow_problem();
  Eigen::VectorXd y(1);
  y << 2.0;
  auto rep = verify(p, y);
  CHECK(rep.min_slack_eigenvalue == doctest::Approx(1.0));  // eig of [[2,1],[1,2]]
  CHECK(rep.objective == doctest::Approx(2.0));
  y << 0.5;  // infeasible
  CHECK(verify(p, y).min_slack_eigenvalue < 0.0);
}

TEST_CASE("hermitian embedding doubles the spectrum") {
  Eigen::MatrixXcd m(2, 2);
  m << std::complex<double>(2.0, 0.0), std::complex<double>(0.5, -0.7),
      std::complex<double>(0.5, 0.7), std::complex<double>(1.0, 0.0);
  auto r = realify(m);
  REQUIRE(r.rows() == 4);
  CHECK((r - r.transpose()).norm() < 1e-14);
  auto ev_c = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(m).eigenvalues();
  auto ev_r = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(r).eigenvalues();
  CHECK(ev_r(0) == doctest::Approx(ev_c(0)).epsilon(1e-12));
  CHECK(ev_r(1) == doctest::Approx(ev_c(0)).epsilon(1e-12));
  CHECK(ev_r(2) == doctest::Approx(ev_c(1)).epsilon(1e-12));
  CHECK(ev_r(3) == doctest::Approx(ev_c(1)).epsilon(1e-12));
}

TEST_CASE("complex block realification matches the dense embedding") {
  ComplexBlock cb;
  cb.dim = 2;
  cb.f0 = {{0, 0, {1.0, 0.0}}, {1, 0, {0.25, -0.5}}, {1, 1, {2.0, 0.0}}};
  cb.fvars = {{0, {{1, 0, {0.0, 1.0}}}}};
  auto b = realify_block(cb);
  REQUIRE(b.dim == 4);
  // Rebuild dense F0 and compare against realify of the complex matrix.
  Eigen::MatrixXcd f0 = Eigen::MatrixXcd::Zero(2, 2);
  f0(0, 0) = {1.0, 0.0};
  f0(1, 0) = {0.25, -0.5};
  f0(0, 1) = std::conj(f0(1, 0));
  f0(1, 1) = {2.0, 0.0};
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(4, 4);
  for (const auto& e : b.f0) {
    dense(e.row, e.col) += e.value;
    if (e.row != e.col) dense(e.col, e.row) += e.value;
  }
  CHECK((dense - realify(f0)).norm() < 1e-14);
}

TEST_CASE("diverging problem is reported, not looped") {
  // min -y s.t. y >= 0: unbounded below.
  Problem p;
  p.nvars = 1;
  p.c = -Eigen::VectorXd::Ones(1);
  Block b;
  b.dim = 1;
  b.fvars = {{0, {{0, 0, 1.0}}}};
  p.blocks.push_back(b);
  auto sol = solve(p);
  CHECK((sol.status == Status::Diverged || sol.status == Status::IterationLimit ||
         sol.status == Status::NumericalFailure));
}
