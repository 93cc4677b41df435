#include "msde/cell.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace msde {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

double CosineSeries::value(double y) const {
  double acc = 0.0;
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    acc += coeffs[k] * std::cos(kTwoPi * static_cast<double>(k + 1) * y);
  }
  return acc;
}

double CosineSeries::derivative(double y) const {
  double acc = 0.0;
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    const double omega = kTwoPi * static_cast<double>(k + 1);
    acc -= coeffs[k] * omega * std::sin(omega * y);
  }
  return acc;
}

bool CosineSeries::is_zero() const {
  for (double a : coeffs) {
    if (a != 0.0) return false;
  }
  return true;
}

CellSolution solve_cell_problem(const CosineSeries& p, double beta, std::size_t n_nodes) {
  if (n_nodes < 64 || (n_nodes & (n_nodes - 1)) != 0) {
    throw std::invalid_argument("cell problem needs a power-of-two node count >= 64");
  }
  if (!(beta > 0.0)) throw std::invalid_argument("cell problem needs beta > 0");

  CellSolution sol;
  sol.p = p;
  sol.beta = beta;
  sol.grid = QuadratureGrid::periodic_unit(n_nodes);

  sol.Z_p = sol.grid.integrate([&](double y) { return std::exp(-beta * p.value(y)); });
  sol.Z_hat_p = sol.grid.integrate([&](double y) { return std::exp(beta * p.value(y)); });

  sol.dphi.resize(n_nodes);
  for (std::size_t j = 0; j < n_nodes; ++j) {
    sol.dphi[j] = -1.0 + std::exp(beta * p.value(sol.grid.nodes[j])) / sol.Z_hat_p;
  }

  sol.K = 1.0 / (sol.Z_p * sol.Z_hat_p);
  double acc = 0.0;
  for (std::size_t j = 0; j < n_nodes; ++j) {
    const double y = sol.grid.nodes[j];
    const double g = 1.0 + sol.dphi[j];
    acc += sol.grid.weights[j] * g * g * std::exp(-beta * p.value(y));
  }
  sol.K_gradient = acc / sol.Z_p;
  return sol;
}

}  // namespace msde
