#include "dicert/qmodel.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>
#include <numbers>

namespace dicert::qmodel {
namespace {

const Mat2 kSigmaZ = (Mat2() << 1, 0, 0, -1).finished();
const Mat2 kSigmaX = (Mat2() << 0, 1, 1, 0).finished();

double hermiticity_defect(const Eigen::MatrixXcd& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

}  // namespace

TwoQubitState TwoQubitState::from_density(const Mat4& rho) {
  if (!rho.allFinite()) throw ValidationError("state: non-finite entries");
  if (hermiticity_defect(rho) > kHermitianTol)
    throw ValidationError("state: density operator not Hermitian");
  if (std::abs(rho.trace().real() - 1.0) > kHermitianTol || std::abs(rho.trace().imag()) > kHermitianTol)
    throw ValidationError("state: trace != 1");
  Eigen::SelfAdjointEigenSolver<Mat4> es(rho);
  if (es.eigenvalues().minCoeff() < kPsdTol)
    throw ValidationError("state: density operator not positive semidefinite");
  return TwoQubitState{rho};
}

BinaryObservable BinaryObservable::from_operator(const Mat2& a) {
  if (!a.allFinite()) throw ValidationError("observable: non-finite entries");
  if (hermiticity_defect(a) > kHermitianTol)
    throw ValidationError("observable: not Hermitian");
  if ((a * a - Mat2::Identity()).cwiseAbs().maxCoeff() > 1e-12)
    throw ValidationError("observable: does not square to identity");
  return BinaryObservable{a};
}

Mat2 BinaryObservable::projector(int outcome) const {
  if (outcome != 0 && outcome != 1) throw ValidationError("observable: outcome must be 0 or 1");
  double s = outcome == 0 ? 1.0 : -1.0;  // outcome 0 <-> eigenvalue +1
  return 0.5 * (Mat2::Identity() + s * op);
}

HwpSetting::HwpSetting(double degrees) {
  if (!std::isfinite(degrees)) throw ValidationError("hwp: non-finite angle");
  theta_deg = std::fmod(degrees, 360.0);
  if (theta_deg >= 180.0) theta_deg -= 360.0;
  if (theta_deg < -180.0) theta_deg += 360.0;
}

BinaryObservable hwp_observable(HwpSetting theta) {
  double a = 4.0 * theta.theta_deg * std::numbers::pi / 180.0;
  return BinaryObservable::from_operator(std::cos(a) * kSigmaZ + std::sin(a) * kSigmaX);
}

TwoQubitState bell_state_phi_plus() {
  Eigen::Vector4cd psi;
  psi << 1, 0, 0, 1;
  psi /= std::sqrt(2.0);
  return TwoQubitState{psi * psi.adjoint()};
}

TwoQubitState mix_with_white_noise(const TwoQubitState& rho, double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw ValidationError("white noise: eta must be in [0,1]");
  return TwoQubitState{eta * rho.density + (1.0 - eta) * 0.25 * Mat4::Identity()};
}

void BehaviorTable::validate() const {
  for (double v : probs) {
    if (!(v >= -1e-12 && v <= 1.0 + 1e-12)) throw ValidationError("behavior: probability outside [0,1]");
  }
  for (int x = 0; x < nx; ++x)
    for (int y = 0; y < ny; ++y) {
      double s = p(x, y, 0, 0) + p(x, y, 0, 1) + p(x, y, 1, 0) + p(x, y, 1, 1);
      if (std::abs(s - 1.0) > 1e-9) throw ValidationError("behavior: setting pair not normalized");
    }
}

BellExpression BellExpression::mod_chsh() {
  BellExpression e;
  e.family = BellFamily::ModCHSH;
  e.nx = 2;
  e.ny = 3;
  e.coeffs = {{{0, 1}, 1.0}, {{0, 2}, 1.0}, {{1, 0}, 1.0}, {{1, 1}, 1.0}, {{1, 2}, -1.0}};
  return e;
}

BellExpression BellExpression::i_delta(double delta) {
  if (!(delta > 0.0 && delta <= std::numbers::pi / 6.0 + 1e-12))
    throw ValidationError("I_delta: delta must be in (0, pi/6]");
  BellExpression e;
  e.family = BellFamily::IDelta;
  e.parameter = delta;
  double s = 1.0 / std::sin(delta);
  double c = 1.0 / std::cos(2.0 * delta);
  e.coeffs = {{{0, 0}, 1.0}, {{0, 1}, s}, {{1, 0}, s}, {{1, 1}, -c}};
  return e;
}

BellExpression BellExpression::j_gamma(double gamma) {
  if (!(gamma >= 0.0 && gamma <= std::numbers::pi / 12.0 + 1e-12))
    throw ValidationError("J_gamma: gamma must be in [0, pi/12]");
  BellExpression e;
  e.family = BellFamily::JGamma;
  e.parameter = gamma;
  double c = std::cos(gamma + std::numbers::pi / 6.0);
  double k = 4.0 * c * c - 1.0;
  e.coeffs = {{{0, 0}, 1.0}, {{0, 1}, k}, {{1, 0}, k}, {{1, 1}, -k}};
  return e;
}

BellExpression BellExpression::custom(int nx, int ny,
                                      std::map<std::pair<int, int>, double> coeffs) {
  BellExpression e;
  e.family = BellFamily::Custom;
  e.nx = nx;
  e.ny = ny;
  for (const auto& [xy, c] : coeffs) {
    if (!std::isfinite(c)) throw ValidationError("bell: non-finite coefficient");
    if (xy.first < 0 || xy.first >= nx || xy.second < 0 || xy.second >= ny)
      throw ValidationError("bell: coefficient outside the scenario settings");
  }
  e.coeffs = std::move(coeffs);
  return e;
}

BellExpression make_bell(BellFamily family, double parameter) {
  switch (family) {
    case BellFamily::ModCHSH: return BellExpression::mod_chsh();
    case BellFamily::IDelta: return BellExpression::i_delta(parameter);
    case BellFamily::JGamma: return BellExpression::j_gamma(parameter);
    case BellFamily::Custom: break;
  }
  throw ValidationError("make_bell: custom expressions take explicit coefficients");
}

BehaviorTable behavior(const TwoQubitState& state,
                       const std::vector<BinaryObservable>& alice,
                       const std::vector<BinaryObservable>& bob) {
  for (const auto& o : alice) BinaryObservable::from_operator(o.op);
  for (const auto& o : bob) BinaryObservable::from_operator(o.op);
  BehaviorTable t;
  t.nx = static_cast<int>(alice.size());
  t.ny = static_cast<int>(bob.size());
  t.probs.assign(static_cast<std::size_t>(t.nx) * t.ny * 4, 0.0);
  for (int x = 0; x < t.nx; ++x)
    for (int y = 0; y < t.ny; ++y)
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
          Mat4 proj = Eigen::kroneckerProduct(alice[static_cast<std::size_t>(x)].projector(a),
                                              bob[static_cast<std::size_t>(y)].projector(b));
          t.p(x, y, a, b) = (state.density * proj).trace().real();
        }
  t.validate();
  return t;
}

CorrelatorSet correlators(const BehaviorTable& b) {
  CorrelatorSet c;
  c.nx = b.nx;
  c.ny = b.ny;
  c.values.resize(static_cast<std::size_t>(b.nx) * b.ny);
  if (b.stderrs) c.stderrs = std::vector<double>(c.values.size(), 0.0);
  for (int x = 0; x < b.nx; ++x)
    for (int y = 0; y < b.ny; ++y) {
      c.values[static_cast<std::size_t>(x * b.ny + y)] =
          b.p(x, y, 0, 0) + b.p(x, y, 1, 1) - b.p(x, y, 0, 1) - b.p(x, y, 1, 0);
      if (b.stderrs) {
        double s2 = 0.0;
        for (int a = 0; a < 2; ++a)
          for (int bb = 0; bb < 2; ++bb) {
            double se = (*b.stderrs)[static_cast<std::size_t>(((x * b.ny + y) * 2 + a) * 2 + bb)];
            s2 += se * se;
          }
        (*c.stderrs)[static_cast<std::size_t>(x * b.ny + y)] = std::sqrt(s2);
      }
    }
  return c;
}

ValueWithError bell_value(const CorrelatorSet& c, const BellExpression& e) {
  ValueWithError r;
  double var = 0.0;
  bool have_err = c.stderrs.has_value();
  for (const auto& [xy, coef] : e.coeffs) {
    auto [x, y] = xy;
    if (x >= c.nx || y >= c.ny)
      throw ValidationError("bell_value: missing correlator for setting pair");
    r.value += coef * c.at(x, y);
    if (have_err) {
      double se = c.stderr_at(x, y);
      var += coef * coef * se * se;
    }
  }
  if (have_err) r.stderr = std::sqrt(var);
  return r;
}

double tsirelson_bound(const BellExpression& e) {
  switch (e.family) {
    case BellFamily::ModCHSH:
      return 1.0 + 2.0 * std::sqrt(2.0);
    case BellFamily::IDelta: {
      double d = e.parameter;
      return 2.0 * std::pow(std::cos(d), 3) / (std::cos(2.0 * d) * std::sin(d));
    }
    case BellFamily::JGamma:
      return 8.0 * std::pow(std::cos(e.parameter + std::numbers::pi / 6.0), 3);
    case BellFamily::Custom:
      break;
  }
  throw ValidationError("tsirelson_bound: no closed form for custom expressions");
}

double classical_bound(const BellExpression& e) {
  if (e.nx + e.ny > 24) throw ValidationError("classical_bound: too many settings to enumerate");
  double best = -std::numeric_limits<double>::infinity();
  for (unsigned mask = 0; mask < (1u << (e.nx + e.ny)); ++mask) {
    double v = 0.0;
    for (const auto& [xy, coef] : e.coeffs) {
      double ax = (mask >> xy.first) & 1u ? -1.0 : 1.0;
      double by = (mask >> (e.nx + xy.second)) & 1u ? -1.0 : 1.0;
      v += coef * ax * by;
    }
    best = std::max(best, v);
  }
  return best;
}

CorrelatorSet apply_white_noise(const CorrelatorSet& c, double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw ValidationError("white noise: eta must be in [0,1]");
  CorrelatorSet r = c;
  for (double& v : r.values) v *= eta;
  if (r.stderrs)
    for (double& s : *r.stderrs) s *= eta;
  return r;
}

double relative_bell_value(double observed, const BellExpression& e) {
  return observed / tsirelson_bound(e);
}

}  // namespace dicert::qmodel
