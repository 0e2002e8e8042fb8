// Acceptance suite: one line per criterion, nonzero exit when any fails.
// Tolerances are fixed here, not tuned to runs.

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "scenrisk/driver_sim.hpp"
#include "scenrisk/evt.hpp"
#include "scenrisk/family.hpp"
#include "scenrisk/foreseeable.hpp"
#include "scenrisk/kde.hpp"
#include "scenrisk/preventable.hpp"
#include "scenrisk/rng.hpp"
#include "scenrisk/util.hpp"

using namespace scenrisk;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int g_failures = 0;

std::string strf(const char* fmt, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, fmt);
  std::vsnprintf(buf, sizeof(buf), fmt, ap);
  va_end(ap);
  return buf;
}

void report(int idx, bool pass, const std::string& detail) {
  std::printf("criterion %d: %s  [%s]\n", idx, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

double phi(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

bool same_double(double a, double b) {
  return (a == b) || (std::isnan(a) && std::isnan(b));
}

// 1. Exposure rates display at three significant digits.
void criterion1() {
  const std::string a = format_significant(1300.0 / 63.0, 3);
  const std::string b = format_significant(297.0 / 63.0, 3);
  const std::string c = format_significant(291.0 / 63.0, 3);
  const bool ok = a == "20.6" && b == "4.71" && c == "4.62";
  report(1, ok, strf("rates per hour: %s, %s, %s", a.c_str(), b.c_str(), c.c_str()));
}

// 2. Admissible-rate targets round to the expected probabilities.
void criterion2() {
  auto f5 = [](double p) {
    char b[32];
    std::snprintf(b, sizeof(b), "%.5f", p);
    return std::string(b);
  };
  const std::string a = f5(target_probability(1300.0 / 63.0, 0.1));
  const std::string b = f5(target_probability(297.0 / 63.0, 0.1));
  const std::string c = f5(target_probability(1300.0 / 63.0, 0.01));
  const bool ok = a == "0.99515" && b == "0.97879" && c == "0.99952";
  report(2, ok, strf("targets: %s, %s, %s", a.c_str(), b.c_str(), c.c_str()));
}

// 3. Tail-fit bounds land in the expected windows for a pinned fit.
void criterion3() {
  GpdFit fit;
  fit.side = TailSide::upper;
  fit.u = 1.18;
  fit.xi = 0.051;
  fit.sigma = 0.36;
  fit.n_exceed = 100;
  fit.n_total = 1000;
  fit.exceed_prob = 0.1;
  const EvtRange r1 = solve_range_evt(fit, 20.635, 0.1);
  const EvtRange r2 = solve_range_evt(fit, 20.635, 0.01);
  const bool ok = !r1.used_empirical && !r2.used_empirical &&
                  std::fabs(r1.bound - 2.36) <= 0.05 &&
                  std::fabs(r2.bound - 3.38) <= 0.05;
  report(3, ok, strf("bounds: %.4f (want 2.36+-0.05), %.4f (want 3.38+-0.05)",
                     r1.bound, r2.bound));
}

// 4. The sequential test halts at the minimal decisive run count.
void criterion4() {
  const SequentialOptions so;  // p_t 0.5, delta 0.01, budget 100
  const auto never = sequential_probability_test([](std::size_t) { return false; }, so);
  const auto always = sequential_probability_test([](std::size_t) { return true; }, so);
  const bool ok = never.verdict == Verdict::below && never.runs == 7 &&
                  never.collisions == 0 && always.verdict == Verdict::above &&
                  always.runs == 7 && always.collisions == 7;
  report(4, ok, strf("never-collide: %zu runs, always-collide: %zu runs (want 7 and 7)",
                     never.runs, always.runs));
}

// 5. Tail MLE recovers known parameters within asymptotic error bars.
void criterion5() {
  const double xis[] = {-0.2, 0.0, 0.051, 0.3, 0.62};
  const double sigmas[] = {0.36, 1.0};
  const std::size_t n = 4000, reps = 30;
  int checks = 0, within = 0, fit_errors = 0;
  std::uint64_t stream = 0;
  for (double xi : xis) {
    for (double sigma : sigmas) {
      const double se_xi = (1.0 + xi) / std::sqrt(static_cast<double>(n));
      const double se_sigma =
          sigma * std::sqrt(2.0 * (1.0 + xi)) / std::sqrt(static_cast<double>(n));
      for (std::size_t rep = 0; rep < reps; ++rep) {
        Rng rng(derive_seed(50001, stream++));
        std::vector<double> xs(n);
        for (auto& x : xs) x = gpd_quantile(rng.uniform01_open(), xi, sigma);
        checks += 2;
        try {
          const GpdParams p = fit_gpd_mle(xs);
          if (std::fabs(p.xi - xi) <= 4.0 * se_xi) ++within;
          if (std::fabs(p.sigma - sigma) <= 4.0 * se_sigma) ++within;
        } catch (...) {
          ++fit_errors;
        }
      }
    }
  }
  const double frac = static_cast<double>(within) / static_cast<double>(checks);
  const bool ok = frac >= 0.95 && fit_errors == 0;
  report(5, ok, strf("%d/%d parameter recoveries within 4 SE (%.1f%%), %d fit errors",
                     within, checks, 100.0 * frac, fit_errors));
}

// 6. Density values match a direct evaluation, the cdf is monotone, and
// sampling agrees with the cdf (Kolmogorov-Smirnov).
void criterion6() {
  Rng rng(60606);
  const Domain dom{0.5, 20.0};
  std::vector<std::vector<double>> pts;
  pts.reserve(300);
  while (pts.size() < 300) {
    const double x = std::exp(1.0 + 0.5 * rng.normal());
    if (x > dom.lower * (1 + 1e-9) && x < dom.upper * (1 - 1e-9)) pts.push_back({x});
  }
  const auto model = KdeModel::fit(pts, {TransformKind::log_pos}, {dom});
  const double h = model.bandwidth();

  // Direct evaluation from the raw points and the fitted bandwidth alone.
  const std::size_t n = pts.size();
  double m = 0.0;
  for (const auto& p : pts) m += std::log(p[0]);
  m /= static_cast<double>(n);
  double s2 = 0.0;
  for (const auto& p : pts) s2 += (std::log(p[0]) - m) * (std::log(p[0]) - m);
  const double s = std::sqrt(s2 / static_cast<double>(n - 1));
  std::vector<double> z(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = (std::log(pts[i][0]) - m) / s;
  const double zlo = (std::log(dom.lower) - m) / s, zhi = (std::log(dom.upper) - m) / s;
  double trunc = 0.0;
  for (double zi : z) trunc += phi((zhi - zi) / h) - phi((zlo - zi) / h);
  trunc /= static_cast<double>(n);
  auto direct_pdf = [&](double x) {
    if (x <= dom.lower || x >= dom.upper) return 0.0;
    const double zx = (std::log(x) - m) / s;
    double k = 0.0;
    for (double zi : z) k += std::exp(-0.5 * (zx - zi) * (zx - zi) / (h * h));
    k /= static_cast<double>(n) * h * std::sqrt(2.0 * M_PI);
    return k / (s * x) / trunc;
  };

  double worst_rel = 0.0;
  for (double x : {0.8, 1.5, 2.7, 4.0, 7.0, 15.0}) {
    const double got = model.pdf({x}), want = direct_pdf(x);
    worst_rel = std::max(worst_rel, std::fabs(got - want) / want);
  }
  const bool pdf_ok = worst_rel < 1e-12;

  bool monotone = true;
  double prev = -1.0;
  for (int i = 0; i <= 60; ++i) {
    const double x = 0.4 * std::pow(25.0 / 0.4, i / 60.0);
    const double c = model.cdf({x});
    if (c < prev - 1e-12) monotone = false;
    prev = c;
  }

  const std::size_t ns = 100000;
  std::vector<double> samples(ns);
  Rng srng(61617);
  for (auto& x : samples) x = model.sample(srng)[0];
  std::sort(samples.begin(), samples.end());
  double ks = 0.0;
  for (std::size_t i = 0; i < ns; ++i) {
    const double c = model.cdf({samples[i]});
    const double hi = static_cast<double>(i + 1) / static_cast<double>(ns);
    const double lo = static_cast<double>(i) / static_cast<double>(ns);
    ks = std::max(ks, std::max(std::fabs(c - hi), std::fabs(c - lo)));
  }
  const bool ks_ok = ks < 0.01;

  report(6, pdf_ok && monotone && ks_ok,
         strf("pdf rel err %.2e (<1e-12), cdf monotone %s, KS %.4f (<0.01)", worst_rel,
              monotone ? "yes" : "no", ks));
}

// 7. Both estimators are unbiased over 100 repeated estimates, report
// standard errors that match the empirical spread within a factor of 1.5,
// and importance sampling is tighter than crude Monte Carlo at equal n.
void criterion7() {
  Rng gen(70707);
  std::vector<std::vector<double>> fpts;
  fpts.reserve(400);
  for (int i = 0; i < 400; ++i) fpts.push_back({5.0 + 2.0 * gen.normal()});
  KdeFitOptions fopts;
  fopts.bandwidth = 0.3;
  const auto f = KdeModel::fit(fpts, {TransformKind::identity}, {}, fopts);

  const double q = 9.8;
  const double p_true = f.rect_probability({q}, {kInf});
  const RunFn run = [q](const std::vector<double>& th, Rng&) {
    RunOutcome o;
    o.collision = th[0] > q;
    o.min_ttc = q - th[0];
    o.min_gap = o.min_ttc;
    return o;
  };

  const int trials = 100;
  std::vector<double> mean_is, mean_crude, se_is, se_crude;
  for (int t = 0; t < trials; ++t) {
    McOptions mo;
    mo.n = 10000;
    mo.seed = derive_seed(7100, static_cast<std::uint64_t>(t));
    const McEstimate crude = run_crude(f, run, mo);
    mean_crude.push_back(crude.mean);
    se_crude.push_back(crude.se);

    IsOptions io;  // defaults: pilot 10^4, critical fraction 0.1
    io.n = 10000;
    io.seed = mo.seed;
    const IsEstimate is = run_importance(f, run, io);
    mean_is.push_back(is.estimate.mean);
    se_is.push_back(is.estimate.se);
  }
  auto mean_of = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  auto sd_of = [&](const std::vector<double>& v) {
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
  };
  auto median = [](std::vector<double> v) {
    std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
    return v[v.size() / 2];
  };
  const double root_t = std::sqrt(static_cast<double>(trials));
  const double z_is = (mean_of(mean_is) - p_true) / (sd_of(mean_is) / root_t);
  const double z_crude = (mean_of(mean_crude) - p_true) / (sd_of(mean_crude) / root_t);
  const double cal_is = sd_of(mean_is) / median(se_is);
  const double cal_crude = sd_of(mean_crude) / median(se_crude);
  const double med_is = median(se_is), med_crude = median(se_crude);
  const bool ok = p_true > 0.001 && p_true < 0.05 && std::fabs(z_is) < 4.0 &&
                  std::fabs(z_crude) < 4.0 && cal_is > 1.0 / 1.5 && cal_is < 1.5 &&
                  cal_crude > 1.0 / 1.5 && cal_crude < 1.5 && med_is < med_crude;
  report(7, ok,
         strf("p=%.5f, bias z: is %+.2f crude %+.2f (|z|<4), se calibration: is %.2f "
              "crude %.2f (within 1.5x), median se %.2e vs %.2e",
              p_true, z_is, z_crude, cal_is, cal_crude, med_is, med_crude));
}

// 8. Simulation is deterministic, collision-free with no delay and no
// braking cap, and stable under time-step refinement.
void criterion8() {
  // Determinism of a single run and of a threaded estimate.
  const ScenarioSpec spec{Family::lvd, {25.0, 0.6, 3.5}};
  const SimResult r1 = simulate(spec, 0.7), r2 = simulate(spec, 0.7);
  bool det = r1.collision == r2.collision &&
             same_double(r1.collision_time, r2.collision_time) &&
             same_double(r1.min_ttc, r2.min_ttc) &&
             same_double(r1.min_gap, r2.min_gap) &&
             same_double(r1.final_gap, r2.final_gap);

  Rng prng(80801);
  std::vector<std::vector<double>> cpts;
  for (int i = 0; i < 60; ++i)
    cpts.push_back({18.0 + 4.0 * prng.uniform01(), 0.6 + 0.3 * prng.uniform01(),
                    20.0 + 30.0 * prng.uniform01()});
  const auto& info = family_info(Family::cutin);
  KdeFitOptions copts;
  copts.bandwidth = 0.3;
  const auto cdens = KdeModel::fit(cpts, info.transforms, info.domains, copts);
  const RunFn frun = make_family_run(Family::cutin, IdmParams{}, DelayModel{}, SimOptions{});
  McOptions m1, m4;
  m1.n = m4.n = 300;
  m1.seed = m4.seed = 8801;
  m1.threads = 1;
  m4.threads = 4;
  const McEstimate e1 = run_crude(cdens, frun, m1);
  const McEstimate e4 = run_crude(cdens, frun, m4);
  det = det && e1.mean == e4.mean && e1.se == e4.se && e1.collisions == e4.collisions;

  // No reaction delay and no braking limit: never a collision.
  IdmParams uncapped;
  uncapped.brake_cap = kInf;
  Rng rng(80808);
  int collisions = 0;
  for (int i = 0; i < 1000; ++i) {
    ScenarioSpec s;
    const double v0 = 5.0 + 45.0 * rng.uniform01();
    const double ratio = 0.02 + 0.96 * rng.uniform01();
    switch (i % 3) {
      case 0:
        s = {Family::lvd, {v0, ratio, 0.5 + 5.5 * rng.uniform01()}};
        break;
      case 1:
        s = {Family::cutin, {v0, ratio, 2.0 + 78.0 * rng.uniform01()}};
        break;
      default:
        s = {Family::asv, {v0, 0.98 * rng.uniform01()}};
        break;
    }
    if (simulate(s, 0.0, uncapped).collision) ++collisions;
  }

  // Halving the step changes collision times and minimum TTC by at most 2%
  // (plus a small absolute slack for the detection grid itself).
  struct Case {
    ScenarioSpec spec;
    double delay;
  };
  const std::vector<Case> cases = {
      {{Family::lvd, {25.0, 0.6, 3.5}}, 0.9},  {{Family::lvd, {30.0, 1.0, 8.0}}, 1.5},
      {{Family::cutin, {20.0, 0.5, 25.0}}, 0.9}, {{Family::cutin, {20.0, 0.5, 4.0}}, 0.0},
      {{Family::asv, {25.0, 0.2}}, 0.8},
  };
  SimOptions fine;
  fine.dt = 0.005;
  bool refine_ok = true;
  double worst = 0.0;
  for (const auto& c : cases) {
    const SimResult a = simulate(c.spec, c.delay);
    const SimResult b = simulate(c.spec, c.delay, IdmParams{}, fine);
    if (a.collision != b.collision) {
      refine_ok = false;
      continue;
    }
    const double x = a.collision ? a.collision_time : a.min_ttc;
    const double y = b.collision ? b.collision_time : b.min_ttc;
    if (std::isinf(x) && std::isinf(y)) continue;
    const double diff = std::fabs(x - y);
    const double allowed = 0.02 * std::max(std::fabs(x), std::fabs(y)) + 0.02;
    worst = std::max(worst, diff - allowed);
    if (diff > allowed) refine_ok = false;
  }

  report(8, det && collisions == 0 && refine_ok,
         strf("deterministic %s, %d/1000 uncapped zero-delay collisions, refinement %s "
              "(worst excess %.3f)",
              det ? "yes" : "no", collisions, refine_ok ? "ok" : "off", std::max(0.0, worst)));
}

// 9. End to end against known generators: the residual rate outside the
// solved region matches the admissible rate for both solvers.
void criterion9() {
  // Gaussian generator, density-route region.
  Rng g(90909);
  std::vector<std::vector<double>> draws;
  draws.reserve(20000);
  for (int i = 0; i < 20000; ++i) draws.push_back({5.0 + 2.0 * g.normal()});
  KdeFitOptions ko;
  ko.bandwidth = 0.15;  // standardized units: 0.3 in raw units for this data
  const auto gm = KdeModel::fit(draws, {TransformKind::identity}, {}, ko);
  const double exposure = 100.0, lambda_kde = 20.0;
  const ForeseeableRange rr = solve_range_kde(gm, {}, exposure, lambda_kde);
  const double outside =
      phi((rr.lower[0] - 5.0) / 2.0) + 1.0 - phi((rr.upper[0] - 5.0) / 2.0);
  const double resid_kde = exposure * outside;
  const bool kde_ok = rr.achieved_prob >= rr.target_prob &&
                      rr.achieved_prob <= rr.target_prob + 1e-6 &&
                      std::fabs(resid_kde - lambda_kde) <= 0.10 * lambda_kde;

  // Exponential generator, tail-route bound.
  Rng ge(91919);
  std::vector<double> xs(20000);
  for (auto& x : xs) x = -std::log(ge.uniform01_open());
  const GpdFit fit = fit_pot(xs, TailSide::upper, 0.1);
  const double lambda_evt = 2.0;
  const EvtRange er = solve_range_evt(fit, exposure, lambda_evt);
  const double resid_evt = exposure * std::exp(-er.bound);
  const bool evt_ok =
      !er.used_empirical && std::fabs(resid_evt - lambda_evt) <= 0.15 * lambda_evt;

  report(9, kde_ok && evt_ok,
         strf("density route residual %.2f/h (want 20.0 +-10%%), tail route %.3f/h "
              "(want 2.0 +-15%%)",
              resid_kde, resid_evt));
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  if (g_failures == 0) {
    std::printf("all criteria passed\n");
    return 0;
  }
  std::printf("%d criteria failed\n", g_failures);
  return 1;
}
