// Gauss-Radau quadrature on [0,1] with the endpoint t=1 fixed, plus the
// entropy coefficients c_i = w_i / (t_i log 2) used by the von Neumann
// certification program.
#pragma once

#include <vector>

namespace dicert::quadrature {

struct QuadratureRule {
  int m = 0;
  std::vector<double> nodes;    // strictly increasing, nodes.back() == 1
  std::vector<double> weights;  // positive, sum to 1
  std::vector<double> coeffs;   // w_i / (t_i * ln 2)
};

// Jacobi-matrix eigen-decomposition with the Golub endpoint modification.
// Exact for polynomials of degree <= 2m-2. Valid m: 2..64.
QuadratureRule gauss_radau(int m);

}  // namespace dicert::quadrature
