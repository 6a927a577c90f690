// Dense block-diagonal semidefinite programming.
//
// Problems are stated over a free variable vector y:
//
//   minimize    c . y
//   subject to  S_k(y) = F0_k + sum_i y_i F_{k,i}  >= 0   (PSD, per block k)
//               a . y  = rhs                              (equality rows)
//               a . y >= rhs                              (inequality rows)
//
// Solved with a primal-dual interior-point method (HKM search direction,
// Mehrotra predictor-corrector, infeasible start). Deterministic: no
// randomness anywhere, identical inputs give identical iterates.
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <limits>
#include <string>
#include <vector>

namespace dicert::sdp {

// One entry of a symmetric matrix; (row, col) with row >= col, the mirrored
// entry is implied. A diagonal entry contributes once.
struct SparseEntry {
  int row = 0, col = 0;
  double value = 0.0;
};

struct VarBlockEntries {
  int var = 0;  // index into y
  std::vector<SparseEntry> entries;
};

struct Block {
  int dim = 0;
  std::vector<SparseEntry> f0;
  std::vector<VarBlockEntries> fvars;  // strictly increasing var indices
};

struct LinearConstraint {
  std::vector<std::pair<int, double>> coeffs;  // (var, coefficient)
  double rhs = 0.0;
};

struct Problem {
  int nvars = 0;
  Eigen::VectorXd c;
  std::vector<Block> blocks;
  std::vector<LinearConstraint> equalities;
  std::vector<LinearConstraint> inequalities;  // a.y >= rhs

  void validate() const;  // index ranges, dims, sorted fvars
};

enum class Status {
  Optimal,           // gap and feasibility within tolerance
  NearOptimal,       // stopped early but within the loose tolerance
  IterationLimit,
  NumericalFailure,  // KKT factorization broke down
  Diverged,          // iterates blew up; likely infeasible or unbounded
};

std::string status_name(Status s);

struct SolveOptions {
  int max_iter = 200;
  double gap_tol = 1e-8;
  double feas_tol = 1e-8;
  double loose_tol = 1e-5;    // NearOptimal threshold
  double step_fraction = 0.98;
  bool verbose = false;
};

struct Solution {
  Status status = Status::NumericalFailure;
  Eigen::VectorXd y;
  double primal_objective = 0.0;
  double dual_objective = 0.0;  // <= primal at optimum (weak duality)
  std::vector<Eigen::MatrixXd> X;  // dual PSD blocks (incl. inequality slacks)
  Eigen::VectorXd eq_duals;
  int iterations = 0;
  double rel_gap = 0.0;
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  // l1 norm of the unscaled dual residual c - F*X - A^T nu. For problems
  // whose variables are bounded by 1 in absolute value (moment programs),
  // dual_objective - dual_residual_l1 stays a valid bound.
  double dual_residual_l1 = 0.0;
  // Best residual-corrected dual value seen over all iterates:
  // max(dual_objective - dual_residual_l1). Valid as a lower bound on the
  // optimum for |y| <= 1 problems at *any* iterate (X stays PSD throughout),
  // so the certificate does not degrade when the final iterates stall.
  double certified_dual = -std::numeric_limits<double>::infinity();
};

Solution solve(const Problem& p, const SolveOptions& opts = {});

// Independent residual check of a claimed solution: recomputes PSD slack
// eigenvalues, equality/inequality violations, and the duality gap.
struct VerifyReport {
  double min_slack_eigenvalue = 0.0;  // over all PSD blocks at y
  double max_equality_violation = 0.0;
  double max_inequality_violation = 0.0;
  double objective = 0.0;
};
VerifyReport verify(const Problem& p, const Eigen::VectorXd& y);

// Hermitian-to-real embedding: M >= 0 iff [[Re M, -Im M], [Im M, Re M]] >= 0.
Eigen::MatrixXd realify(const Eigen::MatrixXcd& m);

// Apply the embedding to every block of a problem whose matrices are given
// in complex form. Entry (r, c, v) with complex v means F[r][c] = v,
// F[c][r] = conj(v).
struct ComplexSparseEntry {
  int row = 0, col = 0;
  std::complex<double> value{0.0, 0.0};
};
struct ComplexBlock {
  int dim = 0;
  std::vector<ComplexSparseEntry> f0;
  std::vector<std::pair<int, std::vector<ComplexSparseEntry>>> fvars;
};
Block realify_block(const ComplexBlock& b);

}  // namespace dicert::sdp
