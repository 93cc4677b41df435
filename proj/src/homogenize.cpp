#include "msde/homogenize.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

#include "msde/likelihood.hpp"
#include "msde/optimize.hpp"
#include "msde/simulate.hpp"

namespace msde {

GibbsDensity fast_invariant_density(const MultiscaleModel& model, double x,
                                    std::size_t n_nodes) {
  if (!model.fast_gibbs.has_value()) {
    throw std::runtime_error("non-gradient fast dynamics: invariant density unsupported");
  }
  const FastGibbsSpec& fg = *model.fast_gibbs;
  QuadratureGrid grid;
  if (fg.domain == FastDomain::PeriodicUnit) {
    grid = QuadratureGrid::periodic_unit(n_nodes == 0 ? 1024 : n_nodes);
  } else {
    std::size_t n = n_nodes == 0 ? 2049 : n_nodes;
    if (n % 2 == 0) ++n;
    grid = QuadratureGrid::truncated_line(-fg.line_halfwidth, fg.line_halfwidth, n);
  }
  return GibbsDensity::from_potential([&fg, x](double y) { return fg.potential(x, y); }, fg.beta,
                                      std::move(grid));
}

std::pair<std::vector<double>, std::vector<double>> averaged_coefficients(
    const MultiscaleModel& model, double theta, std::span<const double> x_grid) {
  if (model.regime != Regime::Averaging) {
    throw std::logic_error("averaged coefficients apply to averaging-regime models");
  }
  std::vector<double> F, K;
  F.reserve(x_grid.size());
  K.reserve(x_grid.size());
  for (double x : x_grid) {
    const GibbsDensity rho = fast_invariant_density(model, x);
    F.push_back(rho.expect([&](double y) { return model.f1(x, y, theta); }));
    const double ksq = rho.expect([&](double y) {
      const double a0 = model.alpha0(x, y, theta);
      const double a1 = model.alpha1(x, y, theta);
      return a0 * a0 + a1 * a1;
    });
    K.push_back(std::sqrt(ksq));
  }
  return {std::move(F), std::move(K)};
}

HomogenizedDrift homogenized_coefficients(const CatalogModel& model, double theta) {
  if (model.multiscale.regime != Regime::Homogenization) {
    throw std::logic_error("homogenized coefficients apply to homogenization-regime entries");
  }
  HomogenizedDrift out;
  switch (model.entry) {
    case CatalogEntryName::LangevinHighFriction:
      out.drift = [theta](double x) { return -theta * x; };
      out.effective_diffusivity = 1.0;
      out.diffusion = std::sqrt(2.0 / model.beta);
      break;
    case CatalogEntryName::MultiscalePotential1D: {
      const CellSolution cell = solve_cell_problem(model.p, model.beta);
      out.drift = [theta, K = cell.K](double x) { return -K * theta * x; };
      out.effective_diffusivity = cell.K;
      out.diffusion = std::sqrt(2.0 * cell.K / model.beta);
      break;
    }
    default:
      throw std::logic_error("homogenized coefficients apply to homogenization-regime entries");
  }
  return out;
}

namespace {

// Z_V^-1 int |V'|^2 e^{-beta V} dx on the Gibbs truncation interval.
double gibbs_gradient_moment(const std::function<double(double, double)>& V,
                             const std::function<double(double, double)>& dVdx, double beta,
                             double theta) {
  auto Vt = [&V, theta](double x) { return V(x, theta); };
  // A potential that is constant in x has no integrable Gibbs weight, but its
  // gradient moment is zero regardless of the normalization.
  bool flat = true;
  for (int i = -8; i <= 8 && flat; ++i) {
    if (dVdx(2.5 * static_cast<double>(i), theta) != 0.0) flat = false;
  }
  if (flat) return 0.0;
  const auto [lo, hi] = gibbs_truncation_interval(Vt, beta);
  const QuadratureGrid grid = QuadratureGrid::truncated_line(lo, hi, 4097);
  const double Zv = grid.integrate([&](double x) { return std::exp(-beta * Vt(x)); });
  if (!(Zv > 0.0) || !std::isfinite(Zv)) {
    throw std::runtime_error("potential has no integrable Gibbs weight");
  }
  const double num = grid.integrate([&](double x) {
    const double g = dVdx(x, theta);
    return g * g * std::exp(-beta * Vt(x));
  });
  return num / Zv;
}

}  // namespace

double e_infinity_langevin(const std::function<double(double, double)>& V,
                           const std::function<double(double, double)>& dVdx, double beta,
                           double theta) {
  return -0.5 * beta * gibbs_gradient_moment(V, dVdx, beta, theta);
}

EInfinityReport e_infinity_multiscale(const std::function<double(double, double)>& V,
                                      const std::function<double(double, double)>& dVdx,
                                      const CosineSeries& p, double beta, double theta,
                                      int sign) {
  const CellSolution cell = solve_cell_problem(p, beta);
  const double prefactor = std::abs(1.0 - 1.0 / (cell.Z_p * cell.Z_hat_p));
  EInfinityReport rep;
  rep.magnitude = prefactor * 0.5 * beta * gibbs_gradient_moment(V, dVdx, beta, theta);
  rep.sign = sign;
  return rep;
}

namespace {

// Normalized coarse invariant density at theta0 on its truncation grid,
// shared by the limit functionals.
struct PiGrid {
  QuadratureGrid grid;
  std::vector<double> density;  // normalized values at the nodes

  template <class F>
  double expect(F&& f) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < grid.nodes.size(); ++i) {
      acc += grid.weights[i] * density[i] * f(grid.nodes[i]);
    }
    return acc;
  }
};

std::shared_ptr<PiGrid> make_pi_grid(const CoarseModel& model, double theta0) {
  if (!model.invariant_density.has_value()) {
    throw std::runtime_error("coarse model has no invariant density");
  }
  const auto& pi = *model.invariant_density;
  auto neg_log = [&pi, theta0](double x) { return -std::log(std::max(pi(x, theta0), 1e-300)); };
  const auto [lo, hi] = gibbs_truncation_interval(neg_log, 1.0);
  auto out = std::make_shared<PiGrid>();
  out->grid = QuadratureGrid::truncated_line(lo, hi, 4097);
  double Z = 0.0;
  out->density.resize(out->grid.nodes.size());
  for (std::size_t i = 0; i < out->grid.nodes.size(); ++i) {
    out->density[i] = pi(out->grid.nodes[i], theta0);
    Z += out->grid.weights[i] * out->density[i];
  }
  if (!(Z > 0.0) || !std::isfinite(Z)) throw std::runtime_error("invariant density not integrable");
  for (auto& d : out->density) d /= Z;
  return out;
}

std::function<double(double, double)> quadratic_potential() {
  return [](double x, double theta) { return theta * x * x / 2.0; };
}

std::function<double(double, double)> quadratic_potential_dx() {
  return [](double x, double theta) { return theta * x; };
}

}  // namespace

std::function<double(double)> coarse_limit_function(const CatalogModel& model, double theta0) {
  auto pi = make_pi_grid(model.coarse, theta0);
  // (1/T) limit of the log-likelihood on model data: the (2/T) expression of
  // the completed square, halved. The model is captured by value on purpose.
  return [pi, coarse = model.coarse, theta0](double theta) {
    return pi->expect([&](double x) {
      const double k = coarse.diffusion(x);
      const double F = coarse.drift(x, theta);
      const double F0 = coarse.drift(x, theta0);
      return (F * F0 - 0.5 * F * F) / (k * k);
    });
  };
}

LimitFunctions asymptotic_limits(const CatalogModel& model, double theta0, int e_inf_sign) {
  const CoarseModel& coarse = model.coarse;
  std::function<double(double)> coarse_limit = coarse_limit_function(model, theta0);

  std::function<double(double)> e_inf;
  switch (model.entry) {
    case CatalogEntryName::AvgOuModulated:
      e_inf = [](double) { return 0.0; };
      break;
    case CatalogEntryName::LangevinHighFriction:
      e_inf = [beta = model.beta](double theta) {
        return e_infinity_langevin(quadratic_potential(), quadratic_potential_dx(), beta, theta);
      };
      break;
    case CatalogEntryName::MultiscalePotential1D: {
      if (e_inf_sign != 1 && e_inf_sign != -1) {
        throw std::invalid_argument(
            "e-infinity sign for the multiscale-potential family must come from a calibration "
            "run (+1 or -1)");
      }
      e_inf = [beta = model.beta, p = model.p, e_inf_sign](double theta) {
        return e_infinity_multiscale(quadratic_potential(), quadratic_potential_dx(), p, beta,
                                     theta, e_inf_sign)
            .value();
      };
      break;
    }
    default:
      throw std::logic_error("unknown entry");
  }

  LimitFunctions lf;
  lf.coarse_limit = coarse_limit;
  lf.e_infinity = e_inf;
  lf.full_limit = [coarse_limit, e_inf](double theta) {
    return coarse_limit(theta) + e_inf(theta);
  };

  const ScalarMaximum mc =
      golden_section_maximize(lf.coarse_limit, coarse.theta_lo, coarse.theta_hi, 1e-6);
  lf.argmax_coarse = mc.x;
  lf.coarse_at_boundary = mc.at_lower || mc.at_upper;
  const ScalarMaximum mf =
      golden_section_maximize(lf.full_limit, coarse.theta_lo, coarse.theta_hi, 1e-6);
  lf.argmax_full = mf.x;
  lf.full_at_boundary = mf.at_lower || mf.at_upper;
  return lf;
}

double a_infinity(const CoarseModel& model, double theta0) {
  auto pi = make_pi_grid(model, theta0);
  const double a = pi->expect([&](double x) {
    const double k = model.diffusion(x);
    const double F = model.drift(x, theta0);
    return (F / k) * (F / k);
  });
  if (a < 1e-12) {
    throw std::runtime_error("A_infinity below the invertibility floor: drift unidentifiable");
  }
  return a;
}

double a_infinity(const CatalogModel& model, double theta0) {
  return a_infinity(model.coarse, theta0);
}

SignCalibration calibrate_e_infinity_sign(const CatalogModel& model, double theta_probe,
                                          double epsilon, double T, int replicates,
                                          std::uint64_t base_seed,
                                          const CalibrationOptions& options) {
  if (theta_probe == 0.0) throw std::invalid_argument("theta_probe must be nonzero");
  if (replicates < 2) throw std::invalid_argument("need at least two replicates");

  const CatalogModel m =
      epsilon == model.multiscale.epsilon
          ? model
          : build_model(model.entry, model.theta0, epsilon, model.beta_inv,
                        model.entry == CatalogEntryName::MultiscalePotential1D
                            ? std::optional<CosineSeries>(model.p)
                            : std::nullopt);

  SimOptions lean;
  lean.store_fast = false;

  std::vector<double> diffs;
  diffs.reserve(static_cast<std::size_t>(replicates));
  for (int i = 0; i < replicates; ++i) {
    // Multiscale side.
    Xoshiro256pp rng(derive_replicate_seed(base_seed, static_cast<std::uint64_t>(i)));
    const auto [x0, y0] = draw_stationary_init(m, rng);
    Path path = simulate_multiscale(m.multiscale, T, options.resolution_factor, x0, y0,
                                    rng.next(), lean);
    path = drop_initial_fraction(path, options.burn_in_fraction);
    const double lx = loglik_continuous(path, m.coarse, theta_probe) / path.horizon();

    // Coarse side, independent stream.
    Xoshiro256pp rng_c(
        derive_replicate_seed(base_seed ^ kCoarseStreamSalt, static_cast<std::uint64_t>(i)));
    const double X0 = draw_coarse_stationary_init(m.coarse, m.theta0, rng_c);
    Path cpath = simulate_coarse(m.coarse, m.theta0, T, options.coarse_dt, X0, rng_c.next(), lean);
    cpath = drop_initial_fraction(cpath, options.burn_in_fraction);
    const double lX = loglik_continuous(cpath, m.coarse, theta_probe) / cpath.horizon();

    diffs.push_back(lx - lX);
  }

  double mean = 0.0;
  for (double d : diffs) mean += d;
  mean /= static_cast<double>(diffs.size());
  double var = 0.0;
  for (double d : diffs) var += (d - mean) * (d - mean);
  var /= static_cast<double>(diffs.size() - 1);
  const double se = std::sqrt(var / static_cast<double>(diffs.size()));

  SignCalibration cal;
  cal.e_hat = mean;
  cal.std_error = se;
  cal.sign = mean >= 0.0 ? 1 : -1;
  cal.replicates = replicates;
  cal.T = T;
  cal.epsilon = epsilon;
  cal.theta_probe = theta_probe;

  switch (m.entry) {
    case CatalogEntryName::LangevinHighFriction:
      cal.formula_magnitude = std::abs(
          e_infinity_langevin(quadratic_potential(), quadratic_potential_dx(), m.beta, theta_probe));
      break;
    case CatalogEntryName::MultiscalePotential1D:
      cal.formula_magnitude = e_infinity_multiscale(quadratic_potential(), quadratic_potential_dx(),
                                                    m.p, m.beta, theta_probe)
                                  .magnitude;
      break;
    case CatalogEntryName::AvgOuModulated:
      cal.formula_magnitude = 0.0;  // no bias term in the averaging regime
      break;
  }
  cal.ratio = cal.formula_magnitude > 0.0 ? std::abs(mean) / cal.formula_magnitude : 0.0;
  cal.conclusive = se < std::abs(mean) && cal.formula_magnitude > 0.0;
  return cal;
}

}  // namespace msde
