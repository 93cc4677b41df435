#include "msde/simulate.hpp"

#include <cmath>
#include <future>
#include <thread>

namespace msde {

namespace {

double wrap_unit(double y) { return y - std::floor(y); }

void check_horizon(double T, double dt, std::size_t max_steps) {
  if (!(T > 0.0)) throw std::invalid_argument("horizon T must be positive");
  const double steps = T / dt;
  if (steps > static_cast<double>(max_steps)) {
    throw std::invalid_argument("T/dt exceeds the configured step budget");
  }
}

}  // namespace

Path simulate_multiscale(const MultiscaleModel& model, double T, int resolution_factor, double x0,
                         double y0, std::uint64_t seed, const SimOptions& options) {
  if (resolution_factor < 10) throw std::invalid_argument("resolution_factor must be >= 10");
  const double eps = model.epsilon;
  const bool hom = model.regime == Regime::Homogenization;
  const double dt = (hom ? eps * eps : eps) / static_cast<double>(resolution_factor);
  check_horizon(T, dt, options.max_steps);
  const std::size_t n = static_cast<std::size_t>(std::llround(T / dt));
  if (n < 1) throw std::invalid_argument("horizon shorter than one step");

  Path path;
  path.t0 = 0.0;
  path.dt = dt;
  path.epsilon = eps;
  path.seed = seed;
  path.model_name = model.name;
  path.slow.reserve(n + 1);
  if (options.store_fast) path.fast.reserve(n + 1);

  const bool periodic = model.fast_domain == FastDomain::PeriodicUnit;
  const double theta = model.true_theta;
  const double sqdt = std::sqrt(dt);
  // Drift and noise scalings per regime.
  const double c_f0 = hom ? 1.0 / eps : 0.0;
  const double c_g0 = hom ? 1.0 / (eps * eps) : 1.0 / eps;
  const double c_g1 = hom ? 1.0 / eps : 0.0;
  const double c_beta = hom ? 1.0 / eps : 1.0 / std::sqrt(eps);

  Xoshiro256pp rng(seed);
  double x = x0, y = y0;
  path.slow.push_back(x);
  if (options.store_fast) path.fast.push_back(y);

  for (std::size_t i = 0; i < n; ++i) {
    const double ye = periodic ? wrap_unit(y) : y;
    const double dU = sqdt * rng.normal();
    const double dV = sqdt * rng.normal();
    double drift_x = model.f1(x, ye, theta);
    if (hom) drift_x += c_f0 * model.f0(x, ye, theta);
    double drift_y = c_g0 * model.g0(x, ye, theta);
    if (hom) drift_y += c_g1 * model.g1(x, ye, theta);
    const double xn = x + drift_x * dt + model.alpha0(x, ye, theta) * dU +
                      model.alpha1(x, ye, theta) * dV;
    const double yn = y + drift_y * dt + c_beta * model.beta_noise(x, ye, theta) * dV;
    if (!std::isfinite(xn) || !std::isfinite(yn)) {
      throw SimulationError("non-finite state in multiscale step " + std::to_string(i + 1) +
                                "; reduce dt or check coefficients",
                            i + 1);
    }
    x = xn;
    y = yn;
    path.slow.push_back(x);
    if (options.store_fast) path.fast.push_back(y);
  }
  return path;
}

Path simulate_coarse(const CoarseModel& model, double theta, double T, double dt, double x0,
                     std::uint64_t seed, const SimOptions& options) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (!(T / dt >= 10.0)) throw std::invalid_argument("coarse path needs at least 10 steps");
  check_horizon(T, dt, options.max_steps);
  const std::size_t n = static_cast<std::size_t>(std::llround(T / dt));

  Path path;
  path.t0 = 0.0;
  path.dt = dt;
  path.epsilon = 0.0;
  path.seed = seed;
  path.model_name = model.name;
  path.slow.reserve(n + 1);

  Xoshiro256pp rng(seed);
  const double sqdt = std::sqrt(dt);
  double x = x0;
  path.slow.push_back(x);
  for (std::size_t i = 0; i < n; ++i) {
    const double xn = x + model.drift(x, theta) * dt + model.diffusion(x) * sqdt * rng.normal();
    if (!std::isfinite(xn)) {
      throw SimulationError("non-finite state in coarse step " + std::to_string(i + 1), i + 1);
    }
    x = xn;
    path.slow.push_back(x);
  }
  return path;
}

double draw_coarse_stationary_init(const CoarseModel& model, double theta, Xoshiro256pp& rng) {
  if (!model.invariant_density.has_value()) {
    throw std::runtime_error("coarse model has no invariant density to sample from");
  }
  const auto& pi = *model.invariant_density;
  auto neg_log = [&pi, theta](double x) { return -std::log(std::max(pi(x, theta), 1e-300)); };
  const auto [lo, hi] = gibbs_truncation_interval(neg_log, 1.0);
  GibbsDensity d = GibbsDensity::from_potential(neg_log, 1.0,
                                                QuadratureGrid::truncated_line(lo, hi, 4097));
  return d.sample(rng.uniform01());
}

std::pair<double, double> draw_stationary_init(const CatalogModel& model, Xoshiro256pp& rng) {
  const double x0 = draw_coarse_stationary_init(model.coarse, model.theta0, rng);
  const MultiscaleModel& ms = model.multiscale;
  if (!ms.fast_gibbs.has_value()) {
    throw std::runtime_error("catalog model has no fast Gibbs density");
  }
  const FastGibbsSpec& fg = *ms.fast_gibbs;
  QuadratureGrid grid =
      fg.domain == FastDomain::PeriodicUnit
          ? QuadratureGrid::periodic_unit(1024)
          : QuadratureGrid::truncated_line(-fg.line_halfwidth, fg.line_halfwidth, 2049);
  GibbsDensity rho = GibbsDensity::from_potential(
      [&fg, x0](double y) { return fg.potential(x0, y); }, fg.beta, std::move(grid));
  const double y0 = rho.sample(rng.uniform01());
  return {x0, y0};
}

std::vector<double> run_replicates(const ReplicateSpec& spec,
                                   const std::function<double(std::uint64_t, int)>& job) {
  if (spec.n_replicates < 1) throw std::invalid_argument("need at least one replicate");
  const int n = spec.n_replicates;
  std::vector<double> results(static_cast<std::size_t>(n));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const int workers = static_cast<int>(std::min<unsigned>(hw, static_cast<unsigned>(n)));

  auto run_range = [&](int first) {
    for (int i = first; i < n; i += workers) {
      try {
        results[static_cast<std::size_t>(i)] = job(spec.seed_for(i), i);
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  };

  if (workers == 1) {
    run_range(0);
  } else {
    std::vector<std::future<void>> futures;
    futures.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      futures.push_back(std::async(std::launch::async, run_range, w));
    }
    for (auto& f : futures) f.get();
  }

  for (int i = 0; i < n; ++i) {
    if (errors[static_cast<std::size_t>(i)]) {
      try {
        std::rethrow_exception(errors[static_cast<std::size_t>(i)]);
      } catch (const std::exception& e) {
        throw std::runtime_error("replicate " + std::to_string(i) + ": " + e.what());
      }
    }
  }
  return results;
}

namespace {

double msq_rate(const std::vector<double>& v, double step) {
  if (v.size() < 2) throw std::invalid_argument("series too short");
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    const double d = v[i + 1] - v[i];
    acc += d * d;
  }
  return acc / (static_cast<double>(v.size() - 1) * step);
}

}  // namespace

double mean_square_increment_rate(const SampleSeries& series) {
  return msq_rate(series.values, series.delta);
}

double mean_square_increment_rate(const Path& path) { return msq_rate(path.slow, path.dt); }

}  // namespace msde
