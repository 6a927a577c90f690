#include "dicert/quadrature.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace dicert::quadrature {

QuadratureRule gauss_radau(int m) {
  if (m < 2 || m > 64) throw std::invalid_argument("gauss_radau: m must be in [2, 64]");

  // Monic shifted-Legendre recurrence on [0,1]:
  //   alpha_k = 1/2,  beta_k = k^2 / (4 (2k-1)(2k+1)),  mu0 = 1.
  Eigen::VectorXd alpha = Eigen::VectorXd::Constant(m, 0.5);
  Eigen::VectorXd beta(m);
  beta[0] = 1.0;  // mu0
  for (int k = 1; k < m; ++k)
    beta[k] = static_cast<double>(k) * k / (4.0 * (2.0 * k - 1.0) * (2.0 * k + 1.0));

  // Endpoint modification: replace the last diagonal entry so that t = 1
  // becomes a node. alpha_m' = 1 - beta_{m-1} p_{m-2}(1) / p_{m-1}(1) with
  // p_k the monic orthogonal polynomials.
  const double b = 1.0;
  double pm2 = 0.0, pm1 = 1.0;  // p_{-1}, p_0
  for (int k = 0; k < m - 1; ++k) {
    double pk = (b - alpha[k]) * pm1 - (k > 0 ? beta[k] : 0.0) * pm2;
    pm2 = pm1;
    pm1 = pk;
  }
  alpha[m - 1] = b - beta[m - 1] * pm2 / pm1;

  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(m, m);
  for (int k = 0; k < m; ++k) J(k, k) = alpha[k];
  for (int k = 1; k < m; ++k) {
    double s = std::sqrt(beta[k]);
    J(k, k - 1) = J(k - 1, k) = s;
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  if (es.info() != Eigen::Success) throw std::runtime_error("gauss_radau: eigen-decomposition failed");

  QuadratureRule rule;
  rule.m = m;
  rule.nodes.resize(m);
  rule.weights.resize(m);
  rule.coeffs.resize(m);
  for (int i = 0; i < m; ++i) {
    rule.nodes[i] = es.eigenvalues()[i];
    double v0 = es.eigenvectors()(0, i);
    rule.weights[i] = beta[0] * v0 * v0;
    rule.coeffs[i] = rule.weights[i] / (rule.nodes[i] * std::log(2.0));
  }
  // the fixed node computes as 1 up to roundoff; pin it
  rule.nodes[m - 1] = 1.0;
  return rule;
}

}  // namespace dicert::quadrature
