#include "msde/likelihood.hpp"

#include <cmath>
#include <stdexcept>

#include "msde/optimize.hpp"

namespace msde {

namespace {

constexpr double kDegenerateFloor = 1e-12;

double checked_ksq(const CoarseModel& model, double x) {
  const double k = model.diffusion(x);
  if (!(k >= model.k_min)) {
    throw std::runtime_error("diffusion coefficient below positivity floor");
  }
  return k * k;
}

// Left-point Ito sums; fixed left-to-right order for reproducibility.
double loglik_sums(const std::vector<double>& z, double step, const CoarseModel& model,
                   double theta) {
  if (z.size() < 2) throw std::invalid_argument("need at least two data points");
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < z.size(); ++i) {
    const double ksq = checked_ksq(model, z[i]);
    const double F = model.drift(z[i], theta);
    acc += F * (z[i + 1] - z[i]) / ksq - 0.5 * F * F * step / ksq;
  }
  return acc;
}

EstimationResult linear_estimate(const std::vector<double>& z, double step,
                                 const CoarseModel& model, EstimationMethod method) {
  if (!model.drift_is_linear_in_theta || !model.drift_basis) {
    throw std::invalid_argument("closed-form estimator needs a drift linear in theta");
  }
  if (z.size() < 2) throw std::invalid_argument("need at least two data points");
  const double T = step * static_cast<double>(z.size() - 1);
  double A = 0.0, B = 0.0;
  for (std::size_t i = 0; i + 1 < z.size(); ++i) {
    const double ksq = checked_ksq(model, z[i]);
    const double h = model.drift_basis(z[i]);
    A += h * h * step / ksq;
    B += h * (z[i + 1] - z[i]) / ksq;
  }
  A /= T;
  B /= T;
  EstimationResult r;
  r.method = method;
  r.A_sum = A;
  r.B_sum = B;
  r.meta.delta = step;
  r.meta.n = z.size();
  r.meta.T = T;
  if (std::abs(A) < kDegenerateFloor) {
    r.degenerate = true;
    r.theta_hat = 0.0;
  } else {
    r.theta_hat = B / A;
  }
  return r;
}

double fd_potential_dxx(const CoarseModel& model, double x, double theta) {
  const auto& V = *model.potential;
  const double h = 1e-5 * (1.0 + std::abs(x));
  return (V(x + h, theta) - 2.0 * V(x, theta) + V(x - h, theta)) / (h * h);
}

}  // namespace

double loglik_continuous(const Path& path, const CoarseModel& model, double theta) {
  return loglik_sums(path.slow, path.dt, model, theta);
}

double loglik_discrete(const SampleSeries& samples, const CoarseModel& model, double theta) {
  return loglik_sums(samples.values, samples.delta, model, theta);
}

double loglik_modified(const SampleSeries& samples, const CoarseModel& model, double theta) {
  if (!model.potential.has_value()) {
    throw std::invalid_argument("modified likelihood needs a model potential");
  }
  if (samples.values.size() < 2) throw std::invalid_argument("need at least two data points");
  double acc = 0.0;
  for (const double z : samples.values) {
    const double ksq = checked_ksq(model, z);
    const double F = model.drift(z, theta);
    const double vxx = model.potential_dxx.has_value() ? (*model.potential_dxx)(z, theta)
                                                       : fd_potential_dxx(model, z, theta);
    acc += -0.5 * (F * F / ksq + ksq * vxx) * samples.delta;
  }
  return acc;
}

EstimationResult mle_linear(const Path& path, const CoarseModel& model) {
  EstimationResult r = linear_estimate(path.slow, path.dt, model, EstimationMethod::ContinuousLinear);
  r.meta.epsilon = path.epsilon;
  r.meta.seed = path.seed;
  if (!r.degenerate) r.loglik_at_max = loglik_continuous(path, model, r.theta_hat);
  return r;
}

EstimationResult mle_linear(const SampleSeries& samples, const CoarseModel& model) {
  EstimationResult r =
      linear_estimate(samples.values, samples.delta, model, EstimationMethod::DiscreteLinear);
  r.meta.epsilon = samples.epsilon;
  if (!r.degenerate) r.loglik_at_max = loglik_discrete(samples, model, r.theta_hat);
  return r;
}

namespace {

EstimationResult scan_impl(const std::function<double(double)>& loglik, const CoarseModel& model,
                           EstimationMethod method) {
  const ScalarMaximum m = golden_section_maximize(loglik, model.theta_lo, model.theta_hi, 1e-6);
  EstimationResult r;
  r.method = method;
  r.theta_hat = m.x;
  r.loglik_at_max = m.value;
  r.at_boundary = m.at_lower || m.at_upper;
  return r;
}

}  // namespace

EstimationResult mle_scan(const Path& path, const CoarseModel& model, LikelihoodKind kind) {
  if (kind != LikelihoodKind::Continuous) {
    throw std::invalid_argument("full-resolution data supports the continuous likelihood only");
  }
  EstimationResult r = scan_impl(
      [&](double theta) { return loglik_continuous(path, model, theta); }, model,
      EstimationMethod::ContinuousScan);
  r.meta.epsilon = path.epsilon;
  r.meta.delta = path.dt;
  r.meta.n = path.slow.size();
  r.meta.T = path.horizon();
  r.meta.seed = path.seed;
  return r;
}

EstimationResult mle_scan(const SampleSeries& samples, const CoarseModel& model,
                          LikelihoodKind kind) {
  std::function<double(double)> loglik;
  EstimationMethod method;
  switch (kind) {
    case LikelihoodKind::Discrete:
      loglik = [&](double theta) { return loglik_discrete(samples, model, theta); };
      method = EstimationMethod::DiscreteScan;
      break;
    case LikelihoodKind::Modified:
      loglik = [&](double theta) { return loglik_modified(samples, model, theta); };
      method = EstimationMethod::ModifiedScan;
      break;
    case LikelihoodKind::Continuous:
      throw std::invalid_argument("subsampled data supports discrete or modified likelihoods");
    default:
      throw std::invalid_argument("unknown likelihood kind");
  }
  EstimationResult r = scan_impl(loglik, model, method);
  r.meta.epsilon = samples.epsilon;
  r.meta.delta = samples.delta;
  r.meta.n = samples.n_count;
  r.meta.T = samples.delta * static_cast<double>(samples.n_count - 1);
  return r;
}

std::vector<std::pair<double, double>> horizon_time_averages(
    const Path& path, const std::function<double(double)>& observable) {
  const std::size_t n_steps = path.slow.size() - 1;
  if (n_steps < 8) throw std::invalid_argument("path too short for four dyadic horizons");
  std::vector<std::pair<double, double>> out;
  for (int k = 0; k < 4; ++k) {
    const std::size_t m = n_steps >> k;
    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i) acc += observable(path.slow[i]);
    out.emplace_back(static_cast<double>(m) * path.dt, acc / static_cast<double>(m));
  }
  return out;
}

ErgodicDiagnostic ergodic_rate_diagnostic(const std::vector<Path>& paths,
                                          const std::function<double(double)>& observable) {
  if (paths.size() < 2) throw std::invalid_argument("need at least two replicate paths");
  const std::size_t len = paths.front().slow.size();
  for (const auto& p : paths) {
    if (p.slow.size() != len) throw std::invalid_argument("replicate paths differ in length");
  }
  std::vector<std::vector<double>> averages(4);
  double full_mean = 0.0;
  for (const auto& p : paths) {
    const auto table = horizon_time_averages(p, observable);
    for (std::size_t k = 0; k < 4; ++k) averages[k].push_back(table[k].second);
    full_mean += table[0].second;
  }
  full_mean /= static_cast<double>(paths.size());

  ErgodicDiagnostic diag;
  diag.mean = full_mean;
  const auto horizons = horizon_time_averages(paths.front(), observable);
  for (std::size_t k = 0; k < 4; ++k) {
    double m = 0.0;
    for (double a : averages[k]) m += a;
    m /= static_cast<double>(averages[k].size());
    double v = 0.0;
    for (double a : averages[k]) v += (a - m) * (a - m);
    v /= static_cast<double>(averages[k].size() - 1);
    diag.variance_vs_T.emplace_back(horizons[k].first, v);
  }

  // Least-squares slope of log variance against log horizon.
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int cnt = 0;
  for (const auto& [h, v] : diag.variance_vs_T) {
    if (v <= 0.0) continue;
    const double lx = std::log(h), ly = std::log(v);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++cnt;
  }
  if (cnt < 2) {
    diag.degenerate_variance = true;
    diag.slope = 0.0;
  } else {
    const double d = static_cast<double>(cnt) * sxx - sx * sx;
    diag.slope = (static_cast<double>(cnt) * sxy - sx * sy) / d;
  }
  return diag;
}

}  // namespace msde
