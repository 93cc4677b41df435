#include "msde/models.hpp"

#include <cmath>
#include <stdexcept>

namespace msde {

CoefficientField CoefficientField::zero() {
  CoefficientField f;
  f.eval = [](double, double, double) { return 0.0; };
  return f;
}

CoefficientField CoefficientField::constant(double c) {
  CoefficientField f;
  f.eval = [c](double, double, double) { return c; };
  return f;
}

CatalogEntryName parse_entry_name(const std::string& name) {
  if (name == "avg_ou_modulated") return CatalogEntryName::AvgOuModulated;
  if (name == "langevin_high_friction") return CatalogEntryName::LangevinHighFriction;
  if (name == "multiscale_potential_1d") return CatalogEntryName::MultiscalePotential1D;
  throw std::invalid_argument("unknown catalog entry: " + name);
}

std::string entry_name_string(CatalogEntryName name) {
  switch (name) {
    case CatalogEntryName::AvgOuModulated:
      return "avg_ou_modulated";
    case CatalogEntryName::LangevinHighFriction:
      return "langevin_high_friction";
    case CatalogEntryName::MultiscalePotential1D:
      return "multiscale_potential_1d";
  }
  throw std::logic_error("unreachable");
}

namespace {

// Quadratic confining potential V(x;theta) = theta x^2 / 2 shared by all
// catalog entries; theta enters the drift linearly through it.
CoarseModel make_linear_coarse(double drift_gain, double diffusion, double beta,
                               const std::string& name) {
  // drift F(x;theta) = -drift_gain * theta * x, diffusion K constant.
  CoarseModel m;
  m.drift = [drift_gain](double x, double theta) { return -drift_gain * theta * x; };
  m.drift_is_linear_in_theta = true;
  m.drift_basis = [drift_gain](double x) { return -drift_gain * x; };
  m.diffusion = [diffusion](double) { return diffusion; };
  const double ksq = diffusion * diffusion;
  // V with K^2 V' = F.
  m.potential = [drift_gain, ksq](double x, double theta) {
    return -drift_gain * theta * x * x / (2.0 * ksq);
  };
  m.potential_dxx = [drift_gain, ksq](double, double theta) { return -drift_gain * theta / ksq; };
  m.invariant_density = [beta](double x, double theta) {
    return std::exp(-beta * theta * x * x / 2.0);
  };
  m.name = name;
  return m;
}

}  // namespace

CatalogModel build_model(CatalogEntryName entry, double theta0, double epsilon, double beta_inv,
                         const std::optional<CosineSeries>& p_spec, double theta_lo,
                         double theta_hi) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw std::invalid_argument("epsilon must lie in (0, 1)");
  }
  if (!(beta_inv > 0.0)) throw std::invalid_argument("beta_inv must be positive");
  if (!(theta_lo < theta_hi)) throw std::invalid_argument("parameter interval is empty");

  CatalogModel cat;
  cat.entry = entry;
  cat.theta0 = theta0;
  cat.beta_inv = beta_inv;

  MultiscaleModel& ms = cat.multiscale;
  ms.epsilon = epsilon;
  ms.true_theta = theta0;
  ms.name = entry_name_string(entry);

  switch (entry) {
    case CatalogEntryName::AvgOuModulated: {
      // dx = (-theta x + y) dt + sqrt(2) dU
      // dy = -(1/eps) y dt + sqrt(2/eps) dV
      // The fast OU has the standard Gaussian as invariant density, so the
      // averaged drift is -theta x and K = sqrt(2). beta_inv is accepted for
      // interface uniformity; the entry is pinned at unit temperature.
      cat.beta = 1.0;
      ms.regime = Regime::Averaging;
      ms.fast_domain = FastDomain::RealLine;
      ms.f0 = CoefficientField::zero();
      ms.f1 = {.eval = [](double x, double y, double theta) { return -theta * x + y; },
               .depends_on_theta = true};
      ms.g0 = {.eval = [](double, double y, double) { return -y; }};
      ms.g1 = CoefficientField::zero();
      ms.alpha0 = CoefficientField::constant(std::sqrt(2.0));
      ms.alpha1 = CoefficientField::zero();
      ms.beta_noise = CoefficientField::constant(std::sqrt(2.0));
      ms.fast_gibbs = FastGibbsSpec{
          .potential = [](double, double y) { return y * y / 2.0; },
          .beta = 1.0,
          .domain = FastDomain::RealLine,
          .line_halfwidth = 10.0,
      };
      cat.coarse = make_linear_coarse(1.0, std::sqrt(2.0), cat.beta, ms.name);
      cat.effective_diffusivity = 1.0;
      break;
    }
    case CatalogEntryName::LangevinHighFriction: {
      // Position/momentum system for the small-mass Langevin equation with
      // V(q;theta) = theta q^2 / 2:
      //   dq = (1/eps) p dt
      //   dp = -(1/eps^2) p dt - (1/eps) theta q dt + (1/eps) sqrt(2/beta) dV
      cat.beta = 1.0 / beta_inv;
      const double beta = cat.beta;
      ms.regime = Regime::Homogenization;
      ms.fast_domain = FastDomain::RealLine;
      ms.f0 = {.eval = [](double, double y, double) { return y; }};
      ms.f1 = CoefficientField::zero();
      ms.g0 = {.eval = [](double, double y, double) { return -y; }};
      ms.g1 = {.eval = [](double x, double, double theta) { return -theta * x; },
               .depends_on_theta = true};
      ms.alpha0 = CoefficientField::zero();
      ms.alpha1 = CoefficientField::zero();
      ms.beta_noise = CoefficientField::constant(std::sqrt(2.0 * beta_inv));
      ms.fast_gibbs = FastGibbsSpec{
          .potential = [](double, double y) { return y * y / 2.0; },
          .beta = beta,
          .domain = FastDomain::RealLine,
          .line_halfwidth = std::sqrt(80.0 * beta_inv) + 2.0,
      };
      cat.coarse = make_linear_coarse(1.0, std::sqrt(2.0 * beta_inv), beta, ms.name);
      cat.effective_diffusivity = 1.0;
      break;
    }
    case CatalogEntryName::MultiscalePotential1D: {
      if (!p_spec.has_value()) {
        throw std::invalid_argument("multiscale_potential_1d requires a periodic potential spec");
      }
      cat.p = *p_spec;
      cat.beta = 1.0 / beta_inv;
      const double beta = cat.beta;
      const CosineSeries p = cat.p;
      // Gradient flow in V(x;theta) + p(x/eps) with additive noise; y = x/eps:
      //   dx = (-theta x - (1/eps) p'(y)) dt + sqrt(2/beta) dW
      //   dy = (1/eps) dx
      // Slow and fast equations share the driver V (alpha1 == beta_noise).
      ms.regime = Regime::Homogenization;
      ms.fast_domain = FastDomain::PeriodicUnit;
      ms.f0 = {.eval = [p](double, double y, double) { return -p.derivative(y); }};
      ms.f1 = {.eval = [](double x, double, double theta) { return -theta * x; },
               .depends_on_theta = true};
      ms.g0 = {.eval = [p](double, double y, double) { return -p.derivative(y); }};
      ms.g1 = {.eval = [](double x, double, double theta) { return -theta * x; },
               .depends_on_theta = true};
      ms.alpha0 = CoefficientField::zero();
      ms.alpha1 = CoefficientField::constant(std::sqrt(2.0 * beta_inv));
      ms.beta_noise = CoefficientField::constant(std::sqrt(2.0 * beta_inv));
      ms.fast_gibbs = FastGibbsSpec{
          .potential = [p](double, double y) { return p.value(y); },
          .beta = beta,
          .domain = FastDomain::PeriodicUnit,
      };
      const CellSolution cell = solve_cell_problem(p, beta);
      cat.effective_diffusivity = cell.K;
      cat.coarse =
          make_linear_coarse(cell.K, std::sqrt(2.0 * beta_inv * cell.K), beta, ms.name);
      break;
    }
  }
  cat.coarse.theta_lo = theta_lo;
  cat.coarse.theta_hi = theta_hi;
  if (!(theta0 > cat.coarse.theta_lo && theta0 < cat.coarse.theta_hi)) {
    throw std::invalid_argument("theta0 must lie inside the parameter interval");
  }
  return cat;
}

bool check_centering(const MultiscaleModel& model, std::span<const double> x_grid, double tol) {
  if (model.regime != Regime::Homogenization) {
    throw std::logic_error("centering condition applies to homogenization models only");
  }
  if (!model.fast_gibbs.has_value()) {
    throw std::runtime_error("centering check needs reversible fast dynamics");
  }
  const FastGibbsSpec& fg = *model.fast_gibbs;
  for (double x : x_grid) {
    QuadratureGrid grid =
        fg.domain == FastDomain::PeriodicUnit
            ? QuadratureGrid::periodic_unit(512)
            : QuadratureGrid::truncated_line(-fg.line_halfwidth, fg.line_halfwidth, 2049);
    GibbsDensity rho = GibbsDensity::from_potential(
        [&fg, x](double y) { return fg.potential(x, y); }, fg.beta, std::move(grid));
    const double integral =
        rho.expect([&](double y) { return model.f0(x, y, model.true_theta); });
    if (std::abs(integral) > tol) return false;
  }
  return true;
}

}  // namespace msde
