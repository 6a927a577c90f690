// Exact two-qubit model of the photonic Bell experiment: states, HWP-derived
// binary observables, behaviors, correlators, Bell expression families with
// their classical and quantum bounds, and white-noise mixing.
#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace dicert::qmodel {

using Mat2 = Eigen::Matrix2cd;
using Mat4 = Eigen::Matrix4cd;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kPsdTol = -1e-10;

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Density operator of a two-qubit system. Hermitian, unit trace, PSD.
struct TwoQubitState {
  Mat4 density;
  static TwoQubitState from_density(const Mat4& rho);  // validates
};

// +-1-valued observable; outcome 0 maps to eigenvalue +1.
struct BinaryObservable {
  Mat2 op;
  static BinaryObservable from_operator(const Mat2& a);  // validates involution
  Mat2 projector(int outcome) const;                     // (1 +- op)/2
};

// Half-wave plate orientation in degrees, normalized to [-180, 180).
struct HwpSetting {
  double theta_deg = 0.0;
  explicit HwpSetting(double degrees);
};

// Polarization analyzer at HWP angle theta: cos(4 theta) sigma_z + sin(4 theta) sigma_x.
BinaryObservable hwp_observable(HwpSetting theta);

// (|HH> + |VV>)/sqrt(2) as a density operator.
TwoQubitState bell_state_phi_plus();

// eta * rho + (1 - eta) * I/4.
TwoQubitState mix_with_white_noise(const TwoQubitState& rho, double eta);

// Conditional probabilities P(a,b|x,y), a,b in {0,1}, with optional
// standard errors carried alongside each entry.
struct BehaviorTable {
  int nx = 0, ny = 0;
  std::vector<double> probs;                  // [((x*ny + y)*2 + a)*2 + b]
  std::optional<std::vector<double>> stderrs;

  double p(int x, int y, int a, int b) const {
    return probs[static_cast<std::size_t>(((x * ny + y) * 2 + a) * 2 + b)];
  }
  double& p(int x, int y, int a, int b) {
    return probs[static_cast<std::size_t>(((x * ny + y) * 2 + a) * 2 + b)];
  }
  void validate() const;  // each P in [0,1], rows normalized to 1e-9
};

struct CorrelatorSet {
  int nx = 0, ny = 0;
  std::vector<double> values;                 // [x*ny + y], in [-1,1]
  std::optional<std::vector<double>> stderrs;

  double at(int x, int y) const { return values[static_cast<std::size_t>(x * ny + y)]; }
  double stderr_at(int x, int y) const {
    return stderrs ? (*stderrs)[static_cast<std::size_t>(x * ny + y)] : 0.0;
  }
};

enum class BellFamily { ModCHSH, IDelta, JGamma, Custom };

struct BellExpression {
  BellFamily family = BellFamily::Custom;
  double parameter = 0.0;  // delta or gamma, radians
  int nx = 2, ny = 2;
  std::map<std::pair<int, int>, double> coeffs;

  static BellExpression mod_chsh();
  static BellExpression i_delta(double delta);  // delta in (0, pi/6]
  static BellExpression j_gamma(double gamma);  // gamma in [0, pi/12]
  static BellExpression custom(int nx, int ny,
                               std::map<std::pair<int, int>, double> coeffs);
};

BellExpression make_bell(BellFamily family, double parameter);

// Born-rule behavior of `state` under projective measurements (1 +- A)/2,
// (1 +- B)/2 for each setting pair.
BehaviorTable behavior(const TwoQubitState& state,
                       const std::vector<BinaryObservable>& alice,
                       const std::vector<BinaryObservable>& bob);

// C(x,y) = P(0,0) + P(1,1) - P(0,1) - P(1,0); stderr propagated when present.
CorrelatorSet correlators(const BehaviorTable& b);

struct ValueWithError {
  double value = 0.0;
  std::optional<double> stderr;
};

// Sum of coeff(x,y) * C(x,y); stderr assumes independent setting pairs.
ValueWithError bell_value(const CorrelatorSet& c, const BellExpression& e);

// Closed-form quantum maximum; throws for Custom (use the NPA relaxation).
double tsirelson_bound(const BellExpression& e);

// Maximum over deterministic +-1 strategies, by enumeration.
double classical_bound(const BellExpression& e);

// Scale every correlator by eta in [0,1] (white noise kills correlations).
CorrelatorSet apply_white_noise(const CorrelatorSet& c, double eta);

double relative_bell_value(double observed, const BellExpression& e);

}  // namespace dicert::qmodel
