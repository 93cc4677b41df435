#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>

#include "msde/cell.hpp"
#include "msde/quadrature.hpp"

namespace msde {

enum class Regime { Averaging, Homogenization };
enum class FastDomain { PeriodicUnit, RealLine };
enum class CatalogEntryName { AvgOuModulated, LangevinHighFriction, MultiscalePotential1D };

CatalogEntryName parse_entry_name(const std::string& name);
std::string entry_name_string(CatalogEntryName name);

/// One coefficient of a fast/slow system: a total, deterministic map
/// (x, y, theta) -> value.
struct CoefficientField {
  std::function<double(double, double, double)> eval;
  bool depends_on_theta = false;
  bool smoothness_assumed = true;

  double operator()(double x, double y, double theta) const { return eval(x, y, theta); }

  static CoefficientField zero();
  static CoefficientField constant(double c);
};

/// Description of reversible fast dynamics (gradient drift, constant
/// diffusion): the fast invariant density is the Gibbs density of
/// `potential` at inverse temperature `beta`.
struct FastGibbsSpec {
  std::function<double(double, double)> potential;  // (x, y) -> potential in y
  double beta = 1.0;
  FastDomain domain = FastDomain::RealLine;
  double line_halfwidth = 10.0;  // truncation for RealLine densities
};

/// A fast/slow system. In the Averaging regime f0 and g1 are identically
/// zero. Noise dimensions are one per driver (U for the slow equation,
/// V shared between slow and fast).
struct MultiscaleModel {
  Regime regime = Regime::Homogenization;
  CoefficientField f0, f1, g0, g1, alpha0, alpha1, beta_noise;
  double epsilon = 0.1;
  FastDomain fast_domain = FastDomain::RealLine;
  double true_theta = 1.0;
  std::optional<FastGibbsSpec> fast_gibbs;
  std::string name;
};

/// The single-scale statistical model fitted to data: drift F(x;theta),
/// known diffusion K(x), and optionally a potential V with
/// K(x)^2 V'(x;theta) = F(x;theta), which enables the martingale-free
/// likelihood. `invariant_density` is the unnormalized stationary density
/// as a function of (x, theta).
struct CoarseModel {
  std::function<double(double, double)> drift;  // (x, theta) -> F
  bool drift_is_linear_in_theta = false;
  std::function<double(double)> drift_basis;  // h with F = theta * h, set when linear
  std::function<double(double)> diffusion;    // K(x), uniformly positive
  double k_min = 1e-8;
  std::optional<std::function<double(double, double)>> potential;
  std::optional<std::function<double(double, double)>> potential_dxx;  // analytic d2V/dx2
  double theta_lo = 0.05;
  double theta_hi = 10.0;
  std::optional<std::function<double(double, double)>> invariant_density;
  std::string name;
};

/// A catalog entry instantiated at concrete parameters: the fast/slow system
/// together with its averaged/homogenized statistical model and the inputs it
/// was built from (kept so operations can rebuild at a different epsilon).
struct CatalogModel {
  CatalogEntryName entry = CatalogEntryName::AvgOuModulated;
  MultiscaleModel multiscale;
  CoarseModel coarse;
  double beta = 1.0;                   // inverse temperature (1 for the averaging entry)
  CosineSeries p;                      // fluctuating potential (multiscale-potential entry)
  double effective_diffusivity = 1.0;  // cell-problem K; 1 when no cell problem enters
  double theta0 = 1.0;
  double beta_inv = 1.0;
};

/// Builds a catalog entry. p_spec is required for MultiscalePotential1D
/// (an engaged CosineSeries with no coefficients means p == 0) and ignored
/// otherwise. Throws std::invalid_argument on a bad epsilon or missing p.
/// theta0 must lie inside the compact parameter interval [theta_lo, theta_hi].
CatalogModel build_model(CatalogEntryName entry, double theta0, double epsilon, double beta_inv,
                         const std::optional<CosineSeries>& p_spec = std::nullopt,
                         double theta_lo = 0.05, double theta_hi = 10.0);

/// True iff the O(1/eps) drift integrates to zero against the fast invariant
/// density, |int rho(y;x) f0(x,y) dy| <= tol, at every grid x. Throws
/// std::logic_error when called on an Averaging model, where the condition
/// is vacuous.
bool check_centering(const MultiscaleModel& model, std::span<const double> x_grid, double tol);

}  // namespace msde
