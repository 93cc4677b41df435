#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "msde/models.hpp"
#include "msde/path.hpp"
#include "msde/rng.hpp"

namespace msde {

/// Raised when an Euler-Maruyama step leaves the finite range; carries the
/// index of the first bad step.
class SimulationError : public std::runtime_error {
 public:
  SimulationError(const std::string& what, std::size_t step)
      : std::runtime_error(what), step_(step) {}
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

struct SimOptions {
  bool store_fast = true;  // drop the fast component to halve memory on long runs
  std::size_t max_steps = 500'000'000;
};

/// Euler-Maruyama path of the fast/slow system at full resolution,
/// dt = eps^2 / resolution_factor (homogenization) or eps / resolution_factor
/// (averaging). Ito convention: coefficients evaluated at the left point.
/// Periodic fast variables are stored unwrapped; wrapping happens only at
/// coefficient evaluation.
Path simulate_multiscale(const MultiscaleModel& model, double T, int resolution_factor, double x0,
                         double y0, std::uint64_t seed, const SimOptions& options = {});

/// Euler-Maruyama path of the coarse model at parameter theta; no fast
/// component, epsilon tag 0.
Path simulate_coarse(const CoarseModel& model, double theta, double T, double dt, double x0,
                     std::uint64_t seed, const SimOptions& options = {});

/// Draws x0 from the coarse invariant density at theta (inverse CDF on a
/// Simpson grid over the Gibbs truncation interval).
double draw_coarse_stationary_init(const CoarseModel& model, double theta, Xoshiro256pp& rng);

/// Draws (x0, y0) from pi(x) rho(y; x) for a catalog model.
std::pair<double, double> draw_stationary_init(const CatalogModel& model, Xoshiro256pp& rng);

struct ReplicateSpec {
  std::uint64_t base_seed = 0;
  int n_replicates = 1;
  double burn_in_fraction = 0.1;

  std::uint64_t seed_for(int i) const {
    return derive_replicate_seed(base_seed, static_cast<std::uint64_t>(i));
  }
};

/// Runs `job` once per replicate with the derived seed; results are ordered
/// by replicate index regardless of execution order. The first failing
/// replicate's error is rethrown with its index attached.
std::vector<double> run_replicates(const ReplicateSpec& spec,
                                   const std::function<double(std::uint64_t, int)>& job);

/// Mean-square increment per unit sampling interval, the small-scale
/// diffusivity probe: sum (x_{n+1}-x_n)^2 / ((N-1) delta).
double mean_square_increment_rate(const SampleSeries& series);

/// Same probe at the path's native resolution (delta = dt), without copying.
double mean_square_increment_rate(const Path& path);

}  // namespace msde
