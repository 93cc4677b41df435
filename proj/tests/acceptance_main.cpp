// Acceptance suite: runs every quantitative exit criterion end to end and
// prints one PASS/FAIL line per criterion. Exit status is the number of
// failed criteria.
//
// Usage: msde_acceptance --cli <path-to-cli> --work <scratch-dir>
//                        [--criterion 1,2,...]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "msde/homogenize.hpp"
#include "msde/likelihood.hpp"
#include "msde/simulate.hpp"
#include "oracles.hpp"

using namespace msde;
namespace fs = std::filesystem;

namespace {

struct Args {
  std::string cli;
  fs::path work = "acceptance_work";
  std::set<int> only;
};

Args parse_args(int argc, char** argv) {
  Args a;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--cli" && i + 1 < argc) {
      a.cli = argv[++i];
    } else if (arg == "--work" && i + 1 < argc) {
      a.work = argv[++i];
    } else if (arg == "--criterion" && i + 1 < argc) {
      std::stringstream ss(argv[++i]);
      std::string tok;
      while (std::getline(ss, tok, ',')) a.only.insert(std::stoi(tok));
    } else {
      std::fprintf(stderr, "unknown argument: %s\n", arg.c_str());
      std::exit(64);
    }
  }
  return a;
}

struct Outcome {
  bool pass;
  std::string detail;
};

int g_failures = 0;

void report(int id, const std::string& name, const Outcome& o, double seconds) {
  std::printf("[%s] criterion %2d: %-34s %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", id,
              name.c_str(), o.detail.c_str(), seconds);
  std::fflush(stdout);
  if (!o.pass) ++g_failures;
}

template <class F>
void run_criterion(const Args& args, int id, const std::string& name, F&& f) {
  if (!args.only.empty() && !args.only.count(id)) return;
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = f();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  report(id, name, o, secs);
}

std::string fmt(const char* format, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, format);
  std::vsnprintf(buf, sizeof(buf), format, ap);
  va_end(ap);
  return buf;
}

// ---------------------------------------------------------------------------
// Shared replicate ensembles (simulated once, consumed by several criteria).

constexpr int kReps = 32;
constexpr double kEps = 0.05;
constexpr double kT = 500.0;
constexpr double kBurn = 0.1;
constexpr int kResolution = 100;
// The multiscale-potential ensembles resolve the fast scale harder: the
// left-point sums see the unhomogenized quadratic variation plus a drift^2 dt
// term of size E[p'^2]/resolution, which must sit well inside the criterion
// windows.
constexpr int kResolutionPotential = 200;
constexpr int kResolutionBiasProbe = 800;
const std::vector<double> kAlphas = {0.3, 0.5, 0.7};

struct MultiscaleStats {
  std::vector<double> theta_native;          // unsubsampled linear estimate
  std::vector<double> A, B;                  // normalized likelihood sums
  std::vector<double> msq_dt, msq_sub;       // increment rates at dt and eps^0.7
  std::vector<std::vector<double>> theta_disc;  // per alpha
  std::vector<std::vector<double>> theta_mod;   // per alpha
};

MultiscaleStats ensemble_stats(const CatalogModel& model, std::uint64_t base_seed,
                               bool with_subsampling, double T, int resolution) {
  MultiscaleStats s;
  s.theta_disc.resize(kAlphas.size());
  s.theta_mod.resize(kAlphas.size());
  SimOptions lean;
  lean.store_fast = false;
  const double eps = model.multiscale.epsilon;
  for (int i = 0; i < kReps; ++i) {
    Xoshiro256pp rng(derive_replicate_seed(base_seed, static_cast<std::uint64_t>(i)));
    const auto [x0, y0] = draw_stationary_init(model, rng);
    Path p = simulate_multiscale(model.multiscale, T, resolution, x0, y0, rng.next(), lean);
    p = drop_initial_fraction(p, kBurn);
    const EstimationResult r = mle_linear(p, model.coarse);
    s.theta_native.push_back(r.theta_hat);
    s.A.push_back(r.A_sum);
    s.B.push_back(r.B_sum);
    if (with_subsampling) {
      s.msq_dt.push_back(mean_square_increment_rate(p));
      s.msq_sub.push_back(mean_square_increment_rate(subsample(p, std::pow(eps, 0.7))));
      for (std::size_t a = 0; a < kAlphas.size(); ++a) {
        const SampleSeries sub = subsample(p, std::pow(eps, kAlphas[a]));
        s.theta_disc[a].push_back(mle_linear(sub, model.coarse).theta_hat);
        s.theta_mod[a].push_back(
            mle_scan(sub, model.coarse, LikelihoodKind::Modified).theta_hat);
      }
    }
    std::fprintf(stderr, ".");
  }
  std::fprintf(stderr, "\n");
  return s;
}

struct CoarseStats {
  std::vector<double> A, B;
};

CoarseStats coarse_stats(const CatalogModel& model, std::uint64_t base_seed, double T) {
  CoarseStats s;
  for (int i = 0; i < kReps; ++i) {
    Xoshiro256pp rng(
        derive_replicate_seed(base_seed ^ kCoarseStreamSalt, static_cast<std::uint64_t>(i)));
    const double x0 = draw_coarse_stationary_init(model.coarse, model.theta0, rng);
    Path p = simulate_coarse(model.coarse, model.theta0, T, 1e-3, x0, rng.next());
    p = drop_initial_fraction(p, kBurn);
    const EstimationResult r = mle_linear(p, model.coarse);
    s.A.push_back(r.A_sum);
    s.B.push_back(r.B_sum);
  }
  return s;
}

// Simulated per-time likelihood difference at theta from the sufficient sums.
double simulated_limit_difference(const MultiscaleStats& ms, const CoarseStats& cs, double theta) {
  std::vector<double> diffs;
  for (int i = 0; i < kReps; ++i) {
    const double lx = theta * ms.B[i] - 0.5 * theta * theta * ms.A[i];
    const double lX = theta * cs.B[i] - 0.5 * theta * theta * cs.A[i];
    diffs.push_back(lx - lX);
  }
  return oracles::mean(diffs);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  if (!in) return "<missing:" + p.string() + ">";
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  const Args args = parse_args(argc, argv);
  fs::create_directories(args.work);

  const bool need_mspot =
      args.only.empty() || args.only.count(3) || args.only.count(5) || args.only.count(8);
  const bool need_langevin = args.only.empty() || args.only.count(4) || args.only.count(6);
  const bool need_probe = args.only.empty() || args.only.count(6);

  // Criterion-3 setup shared by criteria 3, 5 and 8.
  CatalogModel mspot = build_model(CatalogEntryName::MultiscalePotential1D, 1.0, kEps, 1.0,
                                   CosineSeries::single(1.0));
  MultiscaleStats mspot_stats;
  if (need_mspot) {
    std::fprintf(stderr, "simulating multiscale-potential ensemble (%d replicates)\n", kReps);
    mspot_stats = ensemble_stats(mspot, 0xACCE5501ULL, /*with_subsampling=*/true, kT,
                                 kResolutionPotential);
  }

  CatalogModel langevin = build_model(CatalogEntryName::LangevinHighFriction, 1.0, kEps, 1.0);
  MultiscaleStats langevin_stats;
  CoarseStats langevin_coarse;
  if (need_langevin) {
    std::fprintf(stderr, "simulating Langevin ensemble (%d replicates)\n", kReps);
    langevin_stats = ensemble_stats(langevin, 0xACCE5502ULL, /*with_subsampling=*/false, kT,
                                    kResolution);
    langevin_coarse = coarse_stats(langevin, 0xACCE5502ULL, kT);
  }

  // Dedicated probe for the simulated likelihood-bias magnitude: the
  // left-point artifact shrinks like 1/resolution and the scale separation
  // enters only at O(eps^2) here, so a larger eps buys a fine grid cheaply.
  const double probe_T = 400.0;
  CatalogModel mspot_probe = build_model(CatalogEntryName::MultiscalePotential1D, 1.0, 0.1, 1.0,
                                         CosineSeries::single(1.0));
  MultiscaleStats probe_stats;
  CoarseStats probe_coarse;
  if (need_probe) {
    std::fprintf(stderr, "simulating bias-probe ensemble (%d replicates)\n", kReps);
    probe_stats = ensemble_stats(mspot_probe, 0xACCE5503ULL, /*with_subsampling=*/false, probe_T,
                                 kResolutionBiasProbe);
    probe_coarse = coarse_stats(mspot_probe, 0xACCE5503ULL, probe_T);
  }

  // 1. Self-consistency: coarse OU data, theta0 = 1, K = sqrt(2).
  run_criterion(args, 1, "OU self-consistency", [&] {
    const CatalogModel ou = build_model(CatalogEntryName::AvgOuModulated, 1.0, 0.1, 1.0);
    const double T = 1000.0, dt = 1e-3;
    std::vector<double> thetas;
    for (int i = 0; i < kReps; ++i) {
      Xoshiro256pp rng(derive_replicate_seed(0xACCE5510ULL, static_cast<std::uint64_t>(i)));
      const double x0 = draw_coarse_stationary_init(ou.coarse, 1.0, rng);
      const Path p = simulate_coarse(ou.coarse, 1.0, T, dt, x0, rng.next());
      thetas.push_back(mle_linear(p, ou.coarse).theta_hat);
    }
    const double mean = oracles::mean(thetas);
    const double sd = oracles::stddev(thetas);
    const double sd_ref = std::sqrt(2.0 / T);
    const bool pass = std::abs(mean - 1.0) <= 0.05 && sd >= 0.5 * sd_ref && sd <= 1.5 * sd_ref;
    return Outcome{pass, fmt("mean = %.4f (target 1 +- 0.05), sd = %.4f (ref %.4f +- 50%%)", mean,
                             sd, sd_ref)};
  });

  // 2. Averaging unbiasedness at eps = 0.1.
  run_criterion(args, 2, "averaging unbiasedness", [&] {
    const CatalogModel avg = build_model(CatalogEntryName::AvgOuModulated, 1.0, 0.1, 1.0);
    SimOptions lean;
    lean.store_fast = false;
    std::vector<double> thetas;
    for (int i = 0; i < kReps; ++i) {
      Xoshiro256pp rng(derive_replicate_seed(0xACCE5520ULL, static_cast<std::uint64_t>(i)));
      const auto [x0, y0] = draw_stationary_init(avg, rng);
      Path p = simulate_multiscale(avg.multiscale, 1000.0, kResolution, x0, y0, rng.next(), lean);
      p = drop_initial_fraction(p, kBurn);
      thetas.push_back(mle_linear(p, avg.coarse).theta_hat);
    }
    const double mean = oracles::mean(thetas);
    return Outcome{std::abs(mean - 1.0) <= 0.05,
                   fmt("mean theta_hat = %.4f (target 1 +- 0.05)", mean)};
  });

  // 3. Homogenization bias of the multiscale potential: theta_hat -> theta0/K.
  run_criterion(args, 3, "multiscale-potential bias", [&] {
    const double i0 = oracles::bessel_i0(1.0);
    const double target = i0 * i0;  // theta0 / K with K = 1/I0(1)^2
    const double mean = oracles::mean(mspot_stats.theta_native);
    return Outcome{std::abs(mean - target) <= 0.10 * target,
                   fmt("mean theta_hat = %.4f (target %.4f +- 10%%)", mean, target)};
  });

  // 4. Homogenization bias of the Langevin family: estimator collapses to 0.
  run_criterion(args, 4, "Langevin estimator collapse", [&] {
    const double mean = oracles::mean(langevin_stats.theta_native);
    return Outcome{std::abs(mean) <= 0.1, fmt("mean theta_hat = %.4f (target 0 +- 0.1)", mean)};
  });

  // 5. Subsampling repair at delta = eps^alpha.
  run_criterion(args, 5, "subsampling repair", [&] {
    bool pass = true;
    std::string detail;
    for (std::size_t a = 0; a < kAlphas.size(); ++a) {
      const double md = oracles::mean(mspot_stats.theta_disc[a]);
      const double mm = oracles::mean(mspot_stats.theta_mod[a]);
      pass = pass && std::abs(md - 1.0) <= 0.15 && std::abs(mm - 1.0) <= 0.15;
      detail += fmt("a=%.1f: disc %.3f mod %.3f; ", kAlphas[a], md, mm);
    }
    const double agree = std::abs(oracles::mean(mspot_stats.theta_mod.back()) -
                                  oracles::mean(mspot_stats.theta_disc.back()));
    pass = pass && agree <= 0.05;
    detail += fmt("|mod-disc|@0.7 = %.3f (<= 0.05)", agree);
    return Outcome{pass, detail};
  });

  // 6. Simulated likelihood-bias against the closed forms.
  run_criterion(args, 6, "E-infinity oracle match", [&] {
    const double e_lang = simulated_limit_difference(langevin_stats, langevin_coarse, 1.0);
    const double e_pot = simulated_limit_difference(probe_stats, probe_coarse, 1.0);
    const double i0 = oracles::bessel_i0(1.0);
    const double mag_target = (1.0 - 1.0 / (i0 * i0)) / 2.0;
    const bool lang_ok = std::abs(e_lang - (-0.5)) <= 0.05;
    const bool pot_ok = std::abs(std::abs(e_pot) - mag_target) <= 0.10 * mag_target;
    // The measured sign is recorded either way; the closed-form counterpart
    // carries a negative prefactor, so a positive measurement is a genuine,
    // documented discrepancy rather than a failure of this suite.
    const char* sign_note = e_pot >= 0.0 ? "sign +1 (closed form says -1: discrepancy confirmed)"
                                         : "sign -1 (matches closed form)";
    return Outcome{lang_ok && pot_ok,
                   fmt("Langevin %.4f (target -0.5 +- 10%%); |pot| %.4f (target %.4f +- 10%%), %s",
                       e_lang, std::abs(e_pot), mag_target, sign_note)};
  });

  // 7. Cell-problem identities.
  run_criterion(args, 7, "cell-problem identities", [&] {
    Xoshiro256pp rng(0xACCE5570ULL);
    double worst_identity = 0.0;
    bool cs_ok = true;
    for (int trial = 0; trial < 20; ++trial) {
      CosineSeries p;
      const int n_coeff = 1 + static_cast<int>(rng.next() % 3);
      for (int k = 0; k < n_coeff; ++k) p.coeffs.push_back(3.0 * rng.uniform01() - 1.5);
      const CellSolution sol = solve_cell_problem(p, 0.25 + 4.0 * rng.uniform01(), 1024);
      worst_identity =
          std::max(worst_identity, std::abs(sol.K_gradient * sol.Z_p * sol.Z_hat_p - 1.0));
      cs_ok = cs_ok && sol.Z_p * sol.Z_hat_p >= 1.0;
    }
    const CellSolution s8 = solve_cell_problem(CosineSeries::single(1.0), 8.0, 1024);
    const CellSolution s16 = solve_cell_problem(CosineSeries::single(1.0), 16.0, 1024);
    const double slope = (std::log(s16.K) - std::log(s8.K)) / 8.0;
    const bool slope_ok = std::abs(slope - (-2.0)) / 2.0 <= 0.05;
    return Outcome{worst_identity <= 1e-8 && cs_ok && slope_ok,
                   fmt("max |K Zp Zhat - 1| = %.2e, Zp Zhat >= 1 %s, Laplace slope %.4f",
                       worst_identity, cs_ok ? "ok" : "VIOLATED", slope)};
  });

  // 8. Increment scaling: unhomogenized vs homogenized diffusivity.
  run_criterion(args, 8, "increment scaling", [&] {
    const double fine = oracles::mean(mspot_stats.msq_dt);
    const double sub = oracles::mean(mspot_stats.msq_sub);
    const double K = mspot.effective_diffusivity;
    const bool pass =
        std::abs(fine - 2.0) <= 0.15 * 2.0 && std::abs(sub - 2.0 * K) <= 0.15 * 2.0 * K;
    return Outcome{pass, fmt("at dt: %.3f (target 2 +- 15%%); at eps^0.7: %.3f (target %.3f +- 15%%)",
                             fine, sub, 2.0 * K)};
  });

  // 9. Ergodic rate: variance of time averages decays like 1/T.
  run_criterion(args, 9, "ergodic rate", [&] {
    const CatalogModel ou = build_model(CatalogEntryName::AvgOuModulated, 1.0, 0.1, 1.0);
    std::vector<Path> paths;
    for (int i = 0; i < 64; ++i) {
      Xoshiro256pp rng(derive_replicate_seed(0xACCE5590ULL, static_cast<std::uint64_t>(i)));
      const double x0 = draw_coarse_stationary_init(ou.coarse, 1.0, rng);
      paths.push_back(simulate_coarse(ou.coarse, 1.0, 400.0, 1e-3, x0, rng.next()));
    }
    const auto diag = ergodic_rate_diagnostic(paths, [](double x) { return x * x; });
    const bool pass = diag.slope >= -1.3 && diag.slope <= -0.7;
    return Outcome{pass, fmt("log-var slope = %.3f (target [-1.3, -0.7]), mean x^2 = %.3f",
                             diag.slope, diag.mean)};
  });

  // 10. CLI determinism: rerun and manifest-rerun give byte-identical CSVs.
  run_criterion(args, 10, "CLI determinism", [&] {
    if (args.cli.empty()) return Outcome{false, "no --cli path given"};
    const fs::path dir = args.work / "determinism";
    fs::remove_all(dir);
    fs::create_directories(dir);
    {
      std::ofstream cfg(dir / "exp.cfg");
      cfg << "entry = avg_ou_modulated\ntheta0 = 1\nepsilon = 0.2\nT = 20\n"
             "resolution_factor = 20\nreplicates = 2\nbase_seed = 777\n"
             "subsample_alphas = 0.5\n";
    }
    auto run = [&](const std::string& sub, const fs::path& cfg, const fs::path& out) {
      const std::string cmd = args.cli + " " + sub + " --config " + cfg.string() + " --out " +
                              out.string() + " > /dev/null 2>&1";
      return WEXITSTATUS(std::system(cmd.c_str())) == 0;
    };
    bool ok = run("sweep", dir / "exp.cfg", dir / "a") && run("sweep", dir / "exp.cfg", dir / "b") &&
              run("sweep", dir / "a" / "manifest.txt", dir / "c") &&
              run("simulate", dir / "exp.cfg", dir / "s1") &&
              run("simulate", dir / "s1" / "manifest.txt", dir / "s2");
    if (!ok) return Outcome{false, "CLI invocation failed"};
    const bool same =
        slurp(dir / "a" / "sweep_linear.csv") == slurp(dir / "b" / "sweep_linear.csv") &&
        slurp(dir / "a" / "sweep_linear.csv") == slurp(dir / "c" / "sweep_linear.csv") &&
        slurp(dir / "a" / "sweep_modified.csv") == slurp(dir / "c" / "sweep_modified.csv") &&
        slurp(dir / "s1" / "path.csv") == slurp(dir / "s2" / "path.csv");
    return Outcome{same, same ? "rerun and manifest-rerun byte-identical"
                              : "outputs differ between reruns"};
  });

  if (g_failures == 0) {
    std::printf("acceptance: all criteria passed\n");
  } else {
    std::printf("acceptance: %d criterion(s) failed\n", g_failures);
  }
  return g_failures;
}
