#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "msde/models.hpp"
#include "msde/path.hpp"

namespace msde {

enum class EstimationMethod {
  ContinuousLinear,
  ContinuousScan,
  DiscreteLinear,
  DiscreteScan,
  ModifiedScan,
};

enum class LikelihoodKind { Continuous, Discrete, Modified };

struct DataMeta {
  double epsilon = 0.0;
  double delta = 0.0;  // sampling interval of the data the estimate used
  std::size_t n = 0;
  double T = 0.0;  // effective horizon (N-1) * delta
  std::uint64_t seed = 0;
};

struct EstimationResult {
  double theta_hat = 0.0;
  EstimationMethod method = EstimationMethod::ContinuousLinear;
  double loglik_at_max = 0.0;
  double A_sum = 0.0;
  double B_sum = 0.0;
  DataMeta meta;
  bool degenerate = false;    // |A| below the invertibility floor; theta_hat forced to 0
  bool at_boundary = false;   // scan maximizer pinned to an end of the parameter interval
};

/// Ito log-likelihood of the coarse model on the path's native grid:
/// left-point sums of F dz / K^2 minus half of F^2 dt / K^2.
double loglik_continuous(const Path& path, const CoarseModel& model, double theta);

/// Same sums over a delta-subsampled series. Increment terms run over the
/// largest complete index set (n = 0 .. N-2).
double loglik_discrete(const SampleSeries& samples, const CoarseModel& model, double theta);

/// Martingale-free likelihood -1/2 sum (F^2/K^2 + G) delta with
/// G = K^2 V''; requires the model potential. V'' is analytic when the model
/// supplies it, otherwise a central finite difference with step
/// 1e-5 (1 + |x|).
double loglik_modified(const SampleSeries& samples, const CoarseModel& model, double theta);

/// Closed-form estimator for drifts linear in theta: theta_hat = B / A with
/// A = (1/T) sum (h/K)^2 dt and B = (1/T) sum h dz / K^2. A below 1e-12
/// flags the result degenerate and sets theta_hat = 0.
EstimationResult mle_linear(const Path& path, const CoarseModel& model);
EstimationResult mle_linear(const SampleSeries& samples, const CoarseModel& model);

/// Golden-section maximization of the chosen likelihood over the model's
/// parameter interval (tolerance 1e-6). Maxima at the interval ends are
/// flagged, not silently accepted.
EstimationResult mle_scan(const Path& path, const CoarseModel& model, LikelihoodKind kind);
EstimationResult mle_scan(const SampleSeries& samples, const CoarseModel& model,
                          LikelihoodKind kind);

/// Time averages of an observable over nested dyadic horizons
/// T, T/2, T/4, T/8 of one path, longest first. The path must be long enough
/// for four halvings.
std::vector<std::pair<double, double>> horizon_time_averages(
    const Path& path, const std::function<double(double)>& observable);

struct ErgodicDiagnostic {
  double mean = 0.0;  // time average over the full horizon, averaged over paths
  std::vector<std::pair<double, double>> variance_vs_T;  // (horizon, replicate variance)
  double slope = 0.0;  // least-squares slope of log variance vs log horizon
  bool degenerate_variance = false;  // all variances at roundoff zero
};

/// Replicate-level convergence-rate diagnostic: variance of the horizon time
/// averages across paths and its log-log decay slope (about -1 for an
/// ergodic diffusion).
ErgodicDiagnostic ergodic_rate_diagnostic(const std::vector<Path>& paths,
                                          const std::function<double(double)>& observable);

}  // namespace msde
