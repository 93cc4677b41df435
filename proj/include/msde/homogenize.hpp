#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "msde/cell.hpp"
#include "msde/models.hpp"
#include "msde/quadrature.hpp"

namespace msde {

/// Invariant density rho(y; x) of the frozen fast process. Supported for
/// reversible fast dynamics only (gradient drift, constant diffusion), i.e.
/// the catalog families. n_nodes of 0 picks a per-domain default.
GibbsDensity fast_invariant_density(const MultiscaleModel& model, double x,
                                    std::size_t n_nodes = 0);

/// Pointwise quadrature of the averaged drift and diffusion,
/// F(x) = int f1 rho dy and K(x)^2 = int (a0^2 + a1^2) rho dy, on a grid of
/// slow states. Averaging-regime models only.
std::pair<std::vector<double>, std::vector<double>> averaged_coefficients(
    const MultiscaleModel& model, double theta, std::span<const double> x_grid);

struct HomogenizedDrift {
  std::function<double(double)> drift;  // F(.; theta) of the homogenized equation
  double effective_diffusivity = 1.0;   // cell-problem K (1 when no cell problem enters)
  double diffusion = 1.0;               // constant coarse K of the fitted equation
};

/// Closed-form homogenized coefficients of a homogenization-regime catalog
/// entry at parameter theta.
HomogenizedDrift homogenized_coefficients(const CatalogModel& model, double theta);

/// Likelihood bias of the high-friction Langevin family:
///   -(beta/2) Z_V^-1 int |V'(x;theta)|^2 exp(-beta V(x;theta)) dx.
/// Always non-positive. V must have an integrable Gibbs weight.
double e_infinity_langevin(const std::function<double(double, double)>& V,
                           const std::function<double(double, double)>& dVdx, double beta,
                           double theta);

/// Magnitude-plus-sign report for the multiscale-potential family. The
/// magnitude is |1 - 1/(Z_p Z_hat_p)| (beta/2) Z_V^-1 int |V'|^2 e^{-beta V};
/// the sign is NOT fixed by this routine - it must come from the simulated
/// limit difference (calibrate_e_infinity_sign). sign == 0 means uncalibrated.
struct EInfinityReport {
  double magnitude = 0.0;
  int sign = 0;
  double value() const { return static_cast<double>(sign) * magnitude; }
};

EInfinityReport e_infinity_multiscale(const std::function<double(double, double)>& V,
                                      const std::function<double(double, double)>& dVdx,
                                      const CosineSeries& p, double beta, double theta,
                                      int sign = 0);

/// The large-T likelihood limits per unit time, as functions of theta:
/// coarse_limit from data generated by the statistical model itself,
/// full_limit = coarse_limit + e_infinity from multiscale data.
struct LimitFunctions {
  std::function<double(double)> coarse_limit;
  std::function<double(double)> e_infinity;
  std::function<double(double)> full_limit;
  double argmax_coarse = 0.0;
  double argmax_full = 0.0;
  bool coarse_at_boundary = false;
  bool full_at_boundary = false;
};

/// Builds the limit functions of a catalog entry by quadrature against the
/// coarse invariant density at theta0. For the multiscale-potential family
/// the e-infinity sign must be supplied from a calibration run (+1 or -1);
/// passing 0 there throws.
LimitFunctions asymptotic_limits(const CatalogModel& model, double theta0, int e_inf_sign = 0);

/// The coarse-data likelihood limit alone (no bias term); does not need a
/// calibrated sign.
std::function<double(double)> coarse_limit_function(const CatalogModel& model, double theta0);

/// Scalar A_infinity = int (F(x;theta0)/K(x))^2 pi(x) dx. Throws when the
/// value is below the invertibility floor 1e-12 (unidentifiable drift).
double a_infinity(const CoarseModel& model, double theta0);
double a_infinity(const CatalogModel& model, double theta0);

struct CalibrationOptions {
  int resolution_factor = 100;
  double coarse_dt = 1e-3;
  double burn_in_fraction = 0.1;
};

/// Salt applied to the base seed for the coarse-path stream of paired
/// multiscale/coarse simulations, so the two sides never share increments.
inline constexpr std::uint64_t kCoarseStreamSalt = 0xA5A5A5A5DEADBEEFULL;

/// Report of the simulated limit difference
///   E_hat = mean over replicates of (1/T) L(theta; multiscale path)
///                                 - (1/T) L(theta; coarse path).
/// This is the ground-truth probe for the sign of the likelihood bias.
struct SignCalibration {
  int sign = 0;
  double e_hat = 0.0;
  double std_error = 0.0;
  double formula_magnitude = 0.0;
  double ratio = 0.0;  // |e_hat| / formula magnitude (0 when the formula gives 0)
  bool conclusive = false;
  int replicates = 0;
  double T = 0.0;
  double epsilon = 0.0;
  double theta_probe = 0.0;
};

/// Estimates the limit difference at theta_probe from `replicates` paired
/// simulations at scale `epsilon` and horizon T. Inconclusive (standard
/// error at or above |E_hat|) is reported, never guessed away.
SignCalibration calibrate_e_infinity_sign(const CatalogModel& model, double theta_probe,
                                          double epsilon, double T, int replicates,
                                          std::uint64_t base_seed,
                                          const CalibrationOptions& options = {});

}  // namespace msde
