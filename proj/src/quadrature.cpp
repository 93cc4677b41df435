#include "msde/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace msde {

double QuadratureGrid::length() const {
  double acc = 0.0;
  for (double w : weights) acc += w;
  return acc;
}

QuadratureGrid QuadratureGrid::periodic_unit(std::size_t n) {
  if (n < 2) throw std::invalid_argument("periodic grid needs at least 2 nodes");
  QuadratureGrid g;
  g.domain = Domain::PeriodicUnit;
  g.rule = QuadratureRule::PeriodicTrapezoid;
  g.nodes.resize(n);
  g.weights.assign(n, 1.0 / static_cast<double>(n));
  for (std::size_t j = 0; j < n; ++j) g.nodes[j] = static_cast<double>(j) / static_cast<double>(n);
  return g;
}

QuadratureGrid QuadratureGrid::truncated_line(double lo, double hi, std::size_t n) {
  if (!(lo < hi)) throw std::invalid_argument("truncated line needs lo < hi");
  if (n < 3 || n % 2 == 0) throw std::invalid_argument("composite Simpson needs an odd node count >= 3");
  QuadratureGrid g;
  g.domain = Domain::TruncatedLine;
  g.rule = QuadratureRule::CompositeSimpson;
  g.nodes.resize(n);
  g.weights.resize(n);
  const double h = (hi - lo) / static_cast<double>(n - 1);
  for (std::size_t j = 0; j < n; ++j) {
    g.nodes[j] = lo + h * static_cast<double>(j);
    double w;
    if (j == 0 || j == n - 1) {
      w = 1.0;
    } else if (j % 2 == 1) {
      w = 4.0;
    } else {
      w = 2.0;
    }
    g.weights[j] = w * h / 3.0;
  }
  // Nudge the weight total onto the exact interval length; Simpson's
  // coefficients already sum to it, this only removes accumulated roundoff.
  const double s = g.length();
  const double target = hi - lo;
  const double scale = target / s;
  for (auto& w : g.weights) w *= scale;
  return g;
}

GibbsDensity GibbsDensity::from_potential(std::function<double(double)> potential, double beta,
                                          QuadratureGrid grid) {
  GibbsDensity d;
  d.potential = std::move(potential);
  d.beta = beta;
  d.grid = std::move(grid);
  d.Z = d.grid.integrate([&](double y) { return std::exp(-d.beta * d.potential(y)); });
  if (!(d.Z > 0.0) || !std::isfinite(d.Z)) {
    throw std::runtime_error("Gibbs normalization is not positive and finite");
  }
  // Node-centered cumulative mass: half of a node's weight is attributed
  // before the node and half after, which keeps the inverse second-order
  // accurate in the grid spacing.
  d.cdf_.resize(d.grid.nodes.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < d.grid.nodes.size(); ++i) {
    const double m = d.grid.weights[i] * d.density(d.grid.nodes[i]);
    d.cdf_[i] = acc + 0.5 * m;
    acc += m;
  }
  d.total_mass_ = acc;
  return d;
}

double GibbsDensity::density(double y) const { return std::exp(-beta * potential(y)) / Z; }

double GibbsDensity::sample(double u) const {
  const double target = u * total_mass_;
  if (target <= cdf_.front()) return grid.nodes.front();
  if (target >= cdf_.back()) return grid.nodes.back();
  // Last node whose centered mass stays below the target.
  std::size_t lo = 0, hi = cdf_.size() - 1;
  while (hi - lo > 1) {
    const std::size_t mid = (lo + hi) / 2;
    if (cdf_[mid] < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double c0 = cdf_[lo], c1 = cdf_[hi];
  if (c1 <= c0) return grid.nodes[hi];
  const double t = (target - c0) / (c1 - c0);
  return grid.nodes[lo] + t * (grid.nodes[hi] - grid.nodes[lo]);
}

std::pair<double, double> gibbs_truncation_interval(const std::function<double(double)>& V,
                                                    double beta) {
  // Locate the minimum on a coarse scan, then push each end out until the
  // Gibbs weight has dropped by a factor e^-40.
  double x_min = 0.0;
  double v_min = V(0.0);
  for (int i = -400; i <= 400; ++i) {
    const double x = 0.1 * static_cast<double>(i);
    const double v = V(x);
    if (v < v_min) {
      v_min = v;
      x_min = x;
    }
  }
  const double drop = 40.0;
  auto expand = [&](double direction) {
    double step = 1.0;
    double x = x_min + direction * step;
    while (beta * (V(x) - v_min) < drop) {
      step *= 2.0;
      x = x_min + direction * step;
      if (step > 1e9) throw std::runtime_error("Gibbs weight does not decay: non-integrable potential");
    }
    return x;
  };
  return {expand(-1.0), expand(+1.0)};
}

}  // namespace msde
