#include <cmath>
#include <cstddef>
#include <vector>

#include "doctest.h"
#include "scenrisk/errors.hpp"
#include "scenrisk/preventable.hpp"
#include "scenrisk/rng.hpp"

using namespace scenrisk;

namespace {

KdeModel stub_density() {
  Rng rng(246810);
  std::vector<std::vector<double>> pts;
  pts.reserve(500);
  for (int i = 0; i < 500; ++i) pts.push_back({5.0 + 2.0 * rng.normal()});
  KdeFitOptions opts;
  opts.bandwidth = 0.3;
  return KdeModel::fit(pts, {TransformKind::identity}, {}, opts);
}

// Collision happens exactly when theta exceeds q, so the collision
// probability under the density is known in closed form from its cdf.
RunFn threshold_run(double q) {
  return [q](const std::vector<double>& theta, Rng&) -> RunOutcome {
    RunOutcome out;
    out.collision = theta[0] > q;
    out.min_ttc = q - theta[0];  // most critical = farthest beyond q
    out.min_gap = out.min_ttc;
    return out;
  };
}

}  // namespace

TEST_CASE("binomial cdf matches a log-gamma oracle") {
  auto oracle = [](std::size_t k, std::size_t n, double p) {
    double cdf = 0.0;
    for (std::size_t j = 0; j <= k && j <= n; ++j) {
      const double lg = std::lgamma(double(n + 1)) - std::lgamma(double(j + 1)) -
                        std::lgamma(double(n - j + 1));
      cdf += std::exp(lg + double(j) * std::log(p) +
                      double(n - j) * std::log1p(-p));
    }
    return std::min(1.0, cdf);
  };
  const std::vector<std::tuple<std::size_t, std::size_t, double>> cases = {
      {0, 7, 0.5}, {3, 10, 0.3}, {5, 20, 0.1}, {19, 20, 0.95},
      {50, 100, 0.5}, {1, 40, 0.02}};
  for (const auto& [k, n, p] : cases) {
    CHECK(binomial_cdf(k, n, p) == doctest::Approx(oracle(k, n, p)).epsilon(1e-12));
  }
  CHECK(binomial_cdf(0, 7, 0.5) == doctest::Approx(0.0078125).epsilon(1e-15));
  CHECK(binomial_cdf(9, 9, 0.3) == 1.0);
  CHECK(binomial_cdf(12, 9, 0.3) == 1.0);
  CHECK(binomial_cdf(3, 9, 0.0) == 1.0);
  CHECK(binomial_cdf(3, 9, 1.0) == 0.0);
  CHECK_THROWS_AS((void)binomial_cdf(3, 9, 1.5), ValidationError);
}

TEST_CASE("sequential test decides never-collide at the seventh run") {
  const auto res = sequential_probability_test([](std::size_t) { return false; }, {});
  CHECK(res.verdict == Verdict::below);
  CHECK(res.runs == 7);
  CHECK(res.collisions == 0);
}

TEST_CASE("sequential test decides always-collide at the seventh run") {
  const auto res = sequential_probability_test([](std::size_t) { return true; }, {});
  CHECK(res.verdict == Verdict::above);
  CHECK(res.runs == 7);
  CHECK(res.collisions == 7);
}

TEST_CASE("sequential test stays undecided near the tested probability") {
  SequentialOptions opts;
  opts.max_runs = 20;
  const auto res =
      sequential_probability_test([](std::size_t i) { return i % 2 == 0; }, opts);
  CHECK(res.verdict == Verdict::undecided);
  CHECK(res.runs == 20);
  CHECK(res.collisions == 10);
}

TEST_CASE("sequential test resolves a two-thirds collision rate as above") {
  const auto res = sequential_probability_test(
      [](std::size_t i) { return i % 3 != 2; }, {});
  CHECK(res.verdict == Verdict::above);
  CHECK(res.runs < 100);
}

TEST_CASE("sequential test validation") {
  const auto noop = [](std::size_t) { return false; };
  CHECK_THROWS_AS((void)sequential_probability_test(noop, {0.0, 0.01, 10}),
                  ValidationError);
  CHECK_THROWS_AS((void)sequential_probability_test(noop, {1.0, 0.01, 10}),
                  ValidationError);
  CHECK_THROWS_AS((void)sequential_probability_test(noop, {0.5, 0.6, 10}),
                  ValidationError);
  CHECK_THROWS_AS((void)sequential_probability_test(noop, {0.5, 0.01, 0}),
                  ValidationError);
}

TEST_CASE("crude estimator recovers a known probability") {
  const auto density = stub_density();
  const double q = 9.65;
  const double p_true = 1.0 - density.cdf({q});
  REQUIRE(p_true > 0.001);
  REQUIRE(p_true < 0.05);

  McOptions opts;
  opts.n = 20000;
  opts.seed = 42;
  const auto est = run_crude(density, threshold_run(q), opts);
  CHECK(est.n == opts.n);
  CHECK(est.mean == double(est.collisions) / double(est.n));
  const double se_true = std::sqrt(p_true * (1.0 - p_true) / double(opts.n));
  CHECK(std::abs(est.mean - p_true) < 4.0 * se_true);
  // For 0/1 outcomes the reported error reduces to the binomial formula.
  CHECK(est.se ==
        doctest::Approx(std::sqrt(est.mean * (1.0 - est.mean) / double(est.n)))
            .epsilon(1e-12));
}

TEST_CASE("crude estimator is deterministic and thread-count invariant") {
  const auto density = stub_density();
  McOptions a;
  a.n = 2000;
  a.seed = 7;
  a.threads = 1;
  McOptions b = a;
  b.threads = 4;
  const auto ra = run_crude(density, threshold_run(8.0), a);
  const auto rb = run_crude(density, threshold_run(8.0), b);
  CHECK(ra.mean == rb.mean);
  CHECK(ra.se == rb.se);
  CHECK(ra.collisions == rb.collisions);

  const auto again = run_crude(density, threshold_run(8.0), a);
  CHECK(again.mean == ra.mean);

  // Impossible events come back as exactly zero.
  const auto zero = run_crude(density, threshold_run(1e9), a);
  CHECK(zero.mean == 0.0);
  CHECK(zero.se == 0.0);
  CHECK(zero.collisions == 0);

  CHECK_THROWS_AS((void)run_crude(density, threshold_run(8.0), {0, 1, 1}),
                  ValidationError);
}

TEST_CASE("importance sampling concentrates on the critical region") {
  const auto density = stub_density();
  const double q = 9.65;
  const double p_true = 1.0 - density.cdf({q});

  IsOptions opts;
  opts.n_pilot = 3000;
  opts.n = 5000;
  opts.critical_fraction = 0.1;
  opts.min_critical = 20;
  opts.seed = 2718;
  const auto is = run_importance(density, threshold_run(q), opts);
  CHECK(is.n_critical == 300);
  CHECK(is.estimate.n == opts.n);
  CHECK(is.estimate.collisions > 0);
  CHECK(is.max_weight > 0.0);
  CHECK(std::abs(is.estimate.mean - p_true) < 5.0 * is.estimate.se);

  McOptions mc;
  mc.n = opts.n;
  mc.seed = opts.seed;
  const auto crude = run_crude(density, threshold_run(q), mc);
  CHECK(is.estimate.se < crude.se);
}

TEST_CASE("importance sampling is unbiased over repeated estimates") {
  // Single realizations can sit several reported sigmas off when the rare
  // heavy weights are missed, so unbiasedness is asserted on the pooled
  // mean of independent estimates.
  const auto density = stub_density();
  const double q = 9.65;
  const double p_true = 1.0 - density.cdf({q});

  const int trials = 12;
  int covered = 0;
  double sum = 0.0, sum_sq = 0.0;
  for (int t = 0; t < trials; ++t) {
    IsOptions opts;
    opts.n_pilot = 2000;
    opts.n = 3000;
    opts.critical_fraction = 0.1;
    opts.seed = derive_seed(424242, static_cast<std::uint64_t>(t));
    const auto r = run_importance(density, threshold_run(q), opts);
    sum += r.estimate.mean;
    sum_sq += r.estimate.mean * r.estimate.mean;
    if (std::abs(r.estimate.mean - p_true) <= 5.0 * r.estimate.se) ++covered;
  }
  const double mean = sum / trials;
  const double sd = std::sqrt((sum_sq - trials * mean * mean) / (trials - 1));
  CHECK(std::abs(mean - p_true) < 4.0 * sd / std::sqrt(static_cast<double>(trials)));
  CHECK(covered >= trials - 2);
}

TEST_CASE("importance sampling is thread-count invariant") {
  const auto density = stub_density();
  IsOptions a;
  a.n_pilot = 500;
  a.n = 800;
  a.min_critical = 30;
  a.seed = 99;
  a.threads = 1;
  IsOptions b = a;
  b.threads = 3;
  const auto ra = run_importance(density, threshold_run(8.5), a);
  const auto rb = run_importance(density, threshold_run(8.5), b);
  CHECK(ra.estimate.mean == rb.estimate.mean);
  CHECK(ra.estimate.se == rb.estimate.se);
  CHECK(ra.max_weight == rb.max_weight);
}

TEST_CASE("importance sampling honors the minimum critical count") {
  const auto density = stub_density();
  IsOptions opts;
  opts.n_pilot = 200;
  opts.n = 300;
  opts.critical_fraction = 1e-9;
  opts.min_critical = 25;
  opts.seed = 5;
  const auto is = run_importance(density, threshold_run(8.0), opts);
  CHECK(is.n_critical == 25);

  IsOptions bad = opts;
  bad.n_pilot = 2;
  bad.min_critical = 2;
  CHECK_THROWS_AS((void)run_importance(density, threshold_run(8.0), bad),
                  ValidationError);
  bad = opts;
  bad.critical_fraction = 0.0;
  CHECK_THROWS_AS((void)run_importance(density, threshold_run(8.0), bad),
                  ValidationError);
  bad = opts;
  bad.n = 0;
  CHECK_THROWS_AS((void)run_importance(density, threshold_run(8.0), bad),
                  ValidationError);
}

TEST_CASE("grid cells enumerate the cartesian product with the last axis fastest") {
  const std::vector<std::vector<double>> axes = {{20.0, 30.0}, {0.0}, {1.0, 2.0, 3.0}};
  const auto cells =
      preventable_grid(Family::lvd, axes, {}, {}, {}, {}, 11, 1);
  REQUIRE(cells.size() == 6);
  CHECK(cells[0].theta == std::vector<double>{20.0, 0.0, 1.0});
  CHECK(cells[1].theta == std::vector<double>{20.0, 0.0, 2.0});
  CHECK(cells[2].theta == std::vector<double>{20.0, 0.0, 3.0});
  CHECK(cells[3].theta == std::vector<double>{30.0, 0.0, 1.0});
  CHECK(cells[5].theta == std::vector<double>{30.0, 0.0, 3.0});
  // A leader that never brakes never collides, whatever the delay draw.
  for (const auto& c : cells) {
    CHECK(c.verdict == Verdict::below);
    CHECK(c.runs == 7);
    CHECK(c.collisions == 0);
  }
}

TEST_CASE("grid verdicts do not depend on the thread count") {
  const std::vector<std::vector<double>> axes = {{25.0, 30.0}, {0.9, 1.0}, {7.0, 8.0}};
  const auto one = preventable_grid(Family::lvd, axes, {}, {}, {}, {}, 2718, 1);
  const auto many = preventable_grid(Family::lvd, axes, {}, {}, {}, {}, 2718, 3);
  REQUIRE(one.size() == many.size());
  for (std::size_t i = 0; i < one.size(); ++i) {
    CHECK(one[i].verdict == many[i].verdict);
    CHECK(one[i].runs == many[i].runs);
    CHECK(one[i].collisions == many[i].collisions);
    CHECK(one[i].theta == many[i].theta);
  }

  CHECK_THROWS_AS(
      (void)preventable_grid(Family::lvd, {{25.0}, {0.5}}, {}, {}, {}, {}, 1, 1),
      ValidationError);
  CHECK_THROWS_AS(
      (void)preventable_grid(Family::lvd, {{25.0}, {0.5}, {}}, {}, {}, {}, {}, 1, 1),
      ValidationError);
}

TEST_CASE("family runs draw the delay from the provided stream") {
  const auto run = make_family_run(Family::lvd, {}, {}, {});
  Rng r1(77), r2(77);
  const auto a = run({25.0, 0.6, 3.5}, r1);
  const auto b = run({25.0, 0.6, 3.5}, r2);
  CHECK(a.collision == b.collision);
  CHECK(a.min_ttc == b.min_ttc);
  CHECK(a.min_gap == b.min_gap);

  // A benign scenario stays collision-free.
  Rng r3(5);
  const auto c = run({20.0, 0.0, 1.0}, r3);
  CHECK_FALSE(c.collision);
  CHECK(c.min_ttc == std::numeric_limits<double>::infinity());
}
