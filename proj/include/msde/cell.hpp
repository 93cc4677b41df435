#pragma once

#include <cstddef>
#include <vector>

#include "msde/quadrature.hpp"

namespace msde {

/// 1-periodic fluctuating potential given as a finite cosine series
/// p(y) = sum_k a_k cos(2 pi k y), k = 1..n. Mean-zero by construction and
/// closed under differentiation.
struct CosineSeries {
  std::vector<double> coeffs;  // a_1, a_2, ...

  double value(double y) const;
  double derivative(double y) const;
  bool is_zero() const;

  static CosineSeries single(double a1) { return CosineSeries{{a1}}; }
};

/// Data of the 1-D periodic cell problem: the derivative of the corrector on
/// the grid, the two partition functions and the effective coefficient.
/// The corrector derivative has the closed form
///   dphi(y) = -1 + exp(beta p(y)) / Z_hat_p,
/// and the effective coefficient satisfies K = 1 / (Z_p Z_hat_p).
struct CellSolution {
  CosineSeries p;
  double beta = 1.0;
  QuadratureGrid grid;
  std::vector<double> dphi;
  double Z_p = 1.0;
  double Z_hat_p = 1.0;
  double K = 1.0;           // closed-form route 1 / (Z_p * Z_hat_p)
  double K_gradient = 1.0;  // quadrature of Z_p^-1 int (1 + dphi)^2 exp(-beta p)
};

/// Solves the periodic cell problem on n_nodes trapezoid nodes.
/// n_nodes must be a power of two >= 64.
CellSolution solve_cell_problem(const CosineSeries& p, double beta, std::size_t n_nodes = 512);

}  // namespace msde
