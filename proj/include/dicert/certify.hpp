// Device-independent certification programs built on the moment-matrix
// relaxation: quantum Bell bounds, adversarial guessing probability
// (min-entropy), and the variational von Neumann entropy lower bound.
#pragma once

#include <optional>
#include <vector>

#include "dicert/ncalg.hpp"
#include "dicert/qmodel.hpp"
#include "dicert/quadrature.hpp"
#include "dicert/sdp.hpp"

namespace dicert::certify {

struct NpaOptions {
  int level = 2;
  std::vector<ncalg::Monomial> extra_words;
  bool hermitian_moments = true;  // false: complex moments via real embedding
  sdp::SolveOptions solver;
};

struct BoundResult {
  double value = 0.0;            // objective at the returned iterate
  double certified_bound = 0.0;  // one-sided bound from the dual objective
  sdp::Status status = sdp::Status::NumericalFailure;
  int moment_vars = 0;
  int matrix_dim = 0;
};

// Quantum (commuting-operator) upper bound on a Bell expression at the given
// relaxation level. certified_bound is a true upper bound whenever the dual
// residual is small, even if the primal has not fully converged.
BoundResult npa_max_bell(const qmodel::BellExpression& e,
                         const NpaOptions& opts = {});

// One observed-statistics constraint on the unknown quantum behavior.
struct CorrelatorBound {
  int x = 0, y = 0;
  double bound = 0.0;
  bool lower = true;  // true: C(x,y) >= bound, false: C(x,y) <= bound
};

// Equality constraint on a one-party expectation <2P - 1>.
struct MarginalBound {
  bool alice = true;
  int setting = 0;
  double value = 0.0;
};

struct ConstraintSet {
  int nx = 2, ny = 2;
  // Bell value at least v.
  std::optional<std::pair<qmodel::BellExpression, double>> bell_lower;
  std::vector<CorrelatorBound> correlator_bounds;
  std::vector<MarginalBound> marginals;  // off by default everywhere

  static ConstraintSet from_bell(const qmodel::BellExpression& e, double v);
  // One bound per Bell coefficient: positive coefficient -> C >= value - k*stderr,
  // negative -> C <= value + k*stderr (the direction that can only hurt the
  // Bell value, so the constraint set is conservative).
  static ConstraintSet from_correlators(const qmodel::BellExpression& e,
                                        const qmodel::CorrelatorSet& c,
                                        double k_sigma);
};

struct GuessingResult {
  double p_guess = 1.0;    // certified upper bound on the guessing probability
  double h_min_bits = 0.0; // -log2(p_guess)
  sdp::Status status = sdp::Status::NumericalFailure;
  int moment_vars = 0;
  int matrix_dim = 0;
};

// Adversary guesses the outcome pair of settings (target_x, target_y): four
// subnormalized moment blocks, one per guessed outcome pair, sharing the
// observed-statistics constraints on their sum.
GuessingResult min_entropy(const ConstraintSet& cs, int target_x = 0,
                           int target_y = 0, const NpaOptions& opts = {});

struct VNOptions {
  int m = 8;       // quadrature nodes (last one contributes only a constant)
  int level = 2;   // projector-word level of the moment basis
  bool target_products = true;  // include target-projector * Z words
  // true: one program for all nodes with shared state/measurement moments
  // (tighter); false: independent program per node, results summed.
  bool joint = true;
  sdp::SolveOptions solver;
};

struct VNResult {
  double bits = 0.0;            // certified lower bound, clamped to [0, 2]
  double raw_bits = 0.0;        // unclamped dual value
  double primal_bits = 0.0;     // objective at the iterate (diagnostic)
  sdp::Status status = sdp::Status::NumericalFailure;
  std::vector<double> node_terms;  // per-node contribution at the iterate
  int moment_vars = 0;
  int matrix_dim = 0;
};

// Variational lower bound on the von Neumann entropy H(AB|E) of the outcomes
// at (target_x, target_y), via a Gauss-Radau discretization of the integral
// representation of the (negative) logarithm. One noncommutative program per
// run: all nodes solved jointly over a single moment matrix.
VNResult von_neumann_bound(const ConstraintSet& cs, int target_x = 0,
                           int target_y = 0, const VNOptions& opts = {});

// Conservative constraint value for an observed quantity: value - k*stderr.
double finite_stat_adjust(double value, double stderr, double k_sigma);

struct RateReport {
  double entropy_bits_per_pair = 0.0;
  double pair_rate_hz = 0.0;
  double bits_per_second = 0.0;
};
RateReport rate_report(double entropy_bits_per_pair, double pair_rate_hz);

}  // namespace dicert::certify
