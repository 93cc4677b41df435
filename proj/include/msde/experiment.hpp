#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "msde/models.hpp"

namespace msde {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Flat key = value experiment description; one file per experiment.
/// Unknown keys are rejected.
struct ExperimentConfig {
  std::string entry = "multiscale_potential_1d";
  double theta0 = 1.0;
  double epsilon = 0.1;
  double beta_inv = 1.0;
  std::vector<double> p_coeffs;
  bool p_given = false;

  double T = 100.0;
  int resolution_factor = 100;
  double burn_in_fraction = 0.1;
  std::vector<double> subsample_alphas = {0.3, 0.5, 0.7};
  int replicates = 8;
  std::uint64_t base_seed = 12345;
  double theta_lo = 0.05;
  double theta_hi = 10.0;
  std::string output_dir = ".";

  std::vector<double> theta_grid = {0.5, 1.0, 2.0};
  double coarse_dt = 1e-3;
  double calibration_T = 200.0;
  int calibration_replicates = 8;
  std::size_t write_stride = 1;
  double alpha = 0.0;  // estimate command: 0 -> native resolution
};

ExperimentConfig load_config(const std::string& file);
ExperimentConfig parse_config_text(const std::string& text);

/// Instantiates the configured catalog entry (epsilon, theta0, beta_inv,
/// periodic potential, parameter interval).
CatalogModel make_model(const ExperimentConfig& config);

/// Writes manifest.txt into the output directory: a config echo that can be
/// fed back through --config, plus run metadata as comment lines (command,
/// library version, replicate seeds). Reruns from a manifest reproduce all
/// CSV outputs byte for byte.
void save_manifest(const ExperimentConfig& config, const std::string& command,
                   const std::vector<std::string>& extra_comments);

// Exit codes: 0 success, 2 config error, 3 numerical failure,
// 4 inconclusive calibration.
int cmd_simulate(const ExperimentConfig& config);
int cmd_estimate(const ExperimentConfig& config);
int cmd_sweep(const ExperimentConfig& config);
int cmd_bias(const ExperimentConfig& config);
int cmd_limits(const ExperimentConfig& config);

}  // namespace msde
