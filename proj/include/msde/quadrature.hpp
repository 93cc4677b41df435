#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace msde {

enum class Domain { PeriodicUnit, TruncatedLine };
enum class QuadratureRule { PeriodicTrapezoid, CompositeSimpson };

/// Fixed quadrature grid over [0,1) (periodic trapezoid) or a truncated
/// interval of the real line (composite Simpson). Weights sum to the domain
/// length. For smooth periodic integrands the trapezoid rule is spectrally
/// accurate, which is what all the cell-problem identities rely on.
struct QuadratureGrid {
  Domain domain = Domain::PeriodicUnit;
  QuadratureRule rule = QuadratureRule::PeriodicTrapezoid;
  std::vector<double> nodes;
  std::vector<double> weights;

  double length() const;

  template <class F>
  double integrate(F&& f) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) acc += weights[i] * f(nodes[i]);
    return acc;
  }

  /// n equispaced nodes j/n on [0,1), weight 1/n each.
  static QuadratureGrid periodic_unit(std::size_t n);

  /// Composite Simpson on [lo, hi]; n must be odd and >= 3.
  static QuadratureGrid truncated_line(double lo, double hi, std::size_t n);
};

/// Normalized Gibbs density rho(y) = exp(-beta U(y)) / Z on a quadrature
/// grid. Z is the grid integral of the unnormalized weight, so the density
/// integrates to one on its own grid by construction.
struct GibbsDensity {
  std::function<double(double)> potential;
  double beta = 1.0;
  QuadratureGrid grid;
  double Z = 0.0;

  static GibbsDensity from_potential(std::function<double(double)> potential, double beta,
                                     QuadratureGrid grid);

  double density(double y) const;

  template <class F>
  double expect(F&& f) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < grid.nodes.size(); ++i) {
      acc += grid.weights[i] * f(grid.nodes[i]) * density(grid.nodes[i]);
    }
    return acc;
  }

  /// Inverse-CDF draw: maps a uniform u in (0,1) to a sample, with linear
  /// interpolation between grid nodes.
  double sample(double u) const;

 private:
  std::vector<double> cdf_;  // node-centered cumulative mass
  double total_mass_ = 0.0;
};

/// Truncation point for integrals of exp(-beta V(x)) over the line: expands
/// the interval around the minimizer until beta (V - Vmin) >= 40 on both
/// sides, i.e. the discarded tail weight is below ~4e-18 of the peak.
std::pair<double, double> gibbs_truncation_interval(const std::function<double(double)>& V,
                                                    double beta);

}  // namespace msde
