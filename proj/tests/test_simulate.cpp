#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "msde/simulate.hpp"
#include "oracles.hpp"

using namespace msde;

TEST_CASE("step size ties to the fastest scale") {
  const CatalogModel m = build_model(CatalogEntryName::MultiscalePotential1D, 1.0, 0.1, 1.0,
                                     CosineSeries::single(1.0));
  const Path p = simulate_multiscale(m.multiscale, 0.5, 100, 0.0, 0.0, 1);
  CHECK(p.dt == doctest::Approx(1e-4).epsilon(1e-12));

  const CatalogModel avg = build_model(CatalogEntryName::AvgOuModulated, 1.0, 0.1, 1.0);
  const Path q = simulate_multiscale(avg.multiscale, 0.5, 100, 0.0, 0.0, 1);
  CHECK(q.dt == doctest::Approx(1e-3).epsilon(1e-12));

  CHECK_THROWS_AS(simulate_multiscale(m.multiscale, 0.5, 5, 0, 0, 1), std::invalid_argument);
}

TEST_CASE("degenerate dynamics give a constant path") {
  CatalogModel m = build_model(CatalogEntryName::AvgOuModulated, 1.0, 0.1, 1.0);
  m.multiscale.f1 = CoefficientField::zero();
  m.multiscale.alpha0 = CoefficientField::zero();
  m.multiscale.beta_noise = CoefficientField::zero();
  m.multiscale.g0 = CoefficientField::zero();
  const Path p = simulate_multiscale(m.multiscale, 1.0, 100, 0.7, 0.2, 5);
  for (double x : p.slow) CHECK(x == 0.7);
  for (double y : p.fast) CHECK(y == 0.2);
}

TEST_CASE("identical inputs give bit-identical paths") {
  const CatalogModel m = build_model(CatalogEntryName::MultiscalePotential1D, 1.0, 0.1, 1.0,
                                     CosineSeries::single(1.0));
  const Path a = simulate_multiscale(m.multiscale, 2.0, 50, 0.1, 0.0, 123);
  const Path b = simulate_multiscale(m.multiscale, 2.0, 50, 0.1, 0.0, 123);
  REQUIRE(a.slow.size() == b.slow.size());
  for (std::size_t i = 0; i < a.slow.size(); ++i) {
    CHECK(a.slow[i] == b.slow[i]);
    CHECK(a.fast[i] == b.fast[i]);
  }
}

TEST_CASE("blow-up aborts with the failing step index") {
  CatalogModel m = build_model(CatalogEntryName::AvgOuModulated, 1.0, 0.1, 1.0);
  m.multiscale.f1 = {.eval = [](double x, double, double) { return x * x * x; }};
  try {
    simulate_multiscale(m.multiscale, 50.0, 10, 3.0, 0.0, 7);
    FAIL("expected a blow-up");
  } catch (const SimulationError& e) {
    CHECK(e.step() > 0);
  }
}

TEST_CASE("coarse OU path: noise-free decay and quadratic variation") {
  CoarseModel ou;
  ou.drift = [](double x, double theta) { return -theta * x; };
  ou.diffusion = [](double) { return std::sqrt(2.0); };
  ou.name = "ou";

  // K == 0: deterministic exponential decay within O(dt).
  CoarseModel det = ou;
  det.diffusion = [](double) { return 0.0; };
  const Path d = simulate_coarse(det, 1.0, 1.0, 1e-4, 1.0, 3);
  CHECK(d.slow.back() == doctest::Approx(std::exp(-1.0)).epsilon(1e-3));

  // Quadratic variation per unit time approaches K^2.
  const Path p = simulate_coarse(ou, 1.0, 200.0, 1e-3, 0.0, 11);
  double qv = 0.0;
  for (std::size_t i = 0; i + 1 < p.slow.size(); ++i) {
    const double dx = p.slow[i + 1] - p.slow[i];
    qv += dx * dx;
  }
  CHECK(qv / p.horizon() == doctest::Approx(2.0).epsilon(0.05));

  // theta = 0: pure diffusion, mean displacement near zero.
  const Path z = simulate_coarse(ou, 0.0, 50.0, 1e-3, 0.0, 13);
  CHECK(std::abs(z.slow.back()) < 3.0 * std::sqrt(2.0 * 50.0));
}

TEST_CASE("subsampling snaps the interval to a step multiple") {
  Path p;
  p.dt = 1e-4;
  p.slow.assign(100001, 0.0);
  for (std::size_t i = 0; i < p.slow.size(); ++i) p.slow[i] = static_cast<double>(i);
  const SampleSeries s = subsample(p, 0.1);
  CHECK(s.delta == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(s.values[1] - s.values[0] == doctest::Approx(1000.0));

  Path q;
  q.dt = 3e-4;
  q.slow.assign(10000, 1.0);
  const SampleSeries t = subsample(q, 0.1);
  CHECK(t.delta == doctest::Approx(0.0999).epsilon(1e-12));

  const SampleSeries ident = subsample(q, q.dt);
  CHECK(ident.n_count == q.slow.size());

  CHECK_THROWS_AS(subsample(q, 1e-5), std::invalid_argument);
  Path tiny;
  tiny.dt = 0.1;
  tiny.slow = {0.0, 1.0, 2.0};
  CHECK_THROWS_AS(subsample(tiny, 0.3), std::invalid_argument);
}

TEST_CASE("replicate harness is deterministic and propagates errors by index") {
  ReplicateSpec spec{.base_seed = 77, .n_replicates = 8};
  auto job = [](std::uint64_t seed, int) {
    Xoshiro256pp rng(seed);
    return rng.uniform01();
  };
  const auto a = run_replicates(spec, job);
  const auto b = run_replicates(spec, job);
  CHECK(a == b);
  CHECK(a.size() == 8);

  ReplicateSpec one{.base_seed = 5, .n_replicates = 1};
  const auto single = run_replicates(one, job);
  CHECK(single[0] == job(one.seed_for(0), 0));

  auto bad = [](std::uint64_t, int i) -> double {
    if (i >= 3) throw std::runtime_error("boom");
    return 0.0;
  };
  CHECK_THROWS_WITH_AS(run_replicates(spec, bad), "replicate 3: boom", std::runtime_error);
}

TEST_CASE("multiscale potential path has the coarse stationary variance") {
  const CatalogModel m = build_model(CatalogEntryName::MultiscalePotential1D, 1.0, 0.05, 1.0,
                                     CosineSeries::single(1.0));
  Xoshiro256pp rng(2);
  const auto [x0, y0] = draw_stationary_init(m, rng);
  SimOptions lean;
  lean.store_fast = false;
  const Path p = simulate_multiscale(m.multiscale, 200.0, 100, x0, y0, rng.next(), lean);
  std::vector<double> xs(p.slow.begin(), p.slow.end());
  CHECK(oracles::variance(xs) == doctest::Approx(1.0).epsilon(0.15));
}

TEST_CASE("averaged moments approach the coarse model as epsilon shrinks") {
  // Empirical stationary variance of the slow variable vs the coarse value 1;
  // the gap must decrease in epsilon (one Monte Carlo inversion allowed).
  const int reps = 64;
  std::vector<double> gap;
  for (double eps : {0.2, 0.1, 0.05}) {
    const CatalogModel m = build_model(CatalogEntryName::AvgOuModulated, 1.0, eps, 1.0);
    ReplicateSpec spec{.base_seed = 900, .n_replicates = reps};
    const auto vars = run_replicates(spec, [&](std::uint64_t seed, int) {
      Xoshiro256pp rng(seed);
      const auto [x0, y0] = draw_stationary_init(m, rng);
      SimOptions lean;
      lean.store_fast = false;
      const Path p = simulate_multiscale(m.multiscale, 200.0, 50, x0, y0, rng.next(), lean);
      double s = 0.0, s2 = 0.0;
      for (double x : p.slow) {
        s += x;
        s2 += x * x;
      }
      const double n = static_cast<double>(p.slow.size());
      return s2 / n - (s / n) * (s / n);
    });
    gap.push_back(std::abs(oracles::mean(vars) - 1.0));
  }
  int inversions = 0;
  for (std::size_t i = 1; i < gap.size(); ++i) {
    if (gap[i] >= gap[i - 1]) ++inversions;
  }
  CHECK(inversions <= 1);
  CHECK(gap.back() < gap.front());
}

TEST_CASE("mean-square increments show both diffusivities") {
  const double eps = 0.05;
  const CatalogModel m = build_model(CatalogEntryName::MultiscalePotential1D, 1.0, eps, 1.0,
                                     CosineSeries::single(1.0));
  ReplicateSpec spec{.base_seed = 41, .n_replicates = 4};
  std::vector<double> fine, coarse;
  for (int i = 0; i < spec.n_replicates; ++i) {
    Xoshiro256pp rng(spec.seed_for(i));
    const auto [x0, y0] = draw_stationary_init(m, rng);
    SimOptions lean;
    lean.store_fast = false;
    const Path p = simulate_multiscale(m.multiscale, 150.0, 100, x0, y0, rng.next(), lean);
    fine.push_back(mean_square_increment_rate(subsample(p, p.dt)));
    coarse.push_back(mean_square_increment_rate(subsample(p, std::pow(eps, 0.7))));
  }
  const double K = m.effective_diffusivity;
  CHECK(oracles::mean(fine) == doctest::Approx(2.0).epsilon(0.15));
  CHECK(oracles::mean(coarse) == doctest::Approx(2.0 * K).epsilon(0.15));
}
