#include "scenrisk/preventable.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "scenrisk/errors.hpp"
#include "scenrisk/util.hpp"

namespace scenrisk {
namespace {

// Distinct stream for the pilot phase so it never overlaps the estimation
// draws.
constexpr std::uint64_t kPilotTag = 0x70696c6f74ULL;

McEstimate summarize(const std::vector<double>& y, std::size_t collisions) {
  McEstimate e;
  e.n = y.size();
  e.collisions = collisions;
  double sum = 0.0;
  for (double v : y) sum += v;
  e.mean = sum / static_cast<double>(e.n);
  double ss = 0.0;
  for (double v : y) ss += (v - e.mean) * (v - e.mean);
  e.se = std::sqrt(ss) / static_cast<double>(e.n);
  return e;
}

}  // namespace

RunFn make_family_run(Family family, const IdmParams& idm, const DelayModel& delay,
                      const SimOptions& opts) {
  return [family, idm, delay, opts](const std::vector<double>& theta,
                                    Rng& rng) -> RunOutcome {
    const double tau = sample_reaction_delay(delay, rng);
    const SimResult r = simulate({family, theta}, tau, idm, opts);
    return {r.collision, r.min_ttc, r.min_gap};
  };
}

McEstimate run_crude(const KdeModel& density, const RunFn& run, const McOptions& opts) {
  if (opts.n == 0) throw ValidationError("estimator needs at least one run");
  std::vector<double> y(opts.n, 0.0);
  parallel_for(opts.n, opts.threads, [&](std::size_t i) {
    Rng rng(derive_seed(opts.seed, i));
    const auto theta = density.sample(rng);
    y[i] = run(theta, rng).collision ? 1.0 : 0.0;
  });
  const auto hits = static_cast<std::size_t>(
      std::accumulate(y.begin(), y.end(), 0.0) + 0.5);
  return summarize(y, hits);
}

IsEstimate run_importance(const KdeModel& density, const RunFn& run,
                          const IsOptions& opts) {
  if (opts.n == 0 || opts.n_pilot == 0)
    throw ValidationError("estimator needs at least one run");
  if (!(opts.critical_fraction > 0.0 && opts.critical_fraction <= 1.0))
    throw ValidationError("critical fraction must lie in (0, 1]");

  // Pilot pass under the scenario density.
  std::vector<std::vector<double>> thetas(opts.n_pilot);
  std::vector<RunOutcome> outcomes(opts.n_pilot);
  parallel_for(opts.n_pilot, opts.threads, [&](std::size_t i) {
    Rng rng(derive_seed(mix64(opts.seed ^ kPilotTag), i));
    thetas[i] = density.sample(rng);
    outcomes[i] = run(thetas[i], rng);
  });

  // Most critical first: lowest time-to-collision, ties by smallest gap,
  // then by index for a total order.
  std::vector<std::size_t> order(opts.n_pilot);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (outcomes[a].min_ttc != outcomes[b].min_ttc)
      return outcomes[a].min_ttc < outcomes[b].min_ttc;
    if (outcomes[a].min_gap != outcomes[b].min_gap)
      return outcomes[a].min_gap < outcomes[b].min_gap;
    return a < b;
  });

  std::size_t n_crit = static_cast<std::size_t>(
      std::llround(opts.critical_fraction * static_cast<double>(opts.n_pilot)));
  n_crit = std::max(n_crit, opts.min_critical);
  n_crit = std::min(n_crit, opts.n_pilot);
  if (n_crit < 3)
    throw ValidationError("too few critical pilot runs to fit a proposal");

  std::vector<std::vector<double>> critical;
  critical.reserve(n_crit);
  for (std::size_t i = 0; i < n_crit; ++i) critical.push_back(thetas[order[i]]);

  const KdeModel proposal = KdeModel::fit(critical, density.transforms(),
                                          density.domains(), opts.proposal_fit);

  std::vector<double> y(opts.n, 0.0);
  std::vector<double> wmax(opts.n, 0.0);
  parallel_for(opts.n, opts.threads, [&](std::size_t i) {
    Rng rng(derive_seed(opts.seed, i));
    const auto theta = proposal.sample(rng);
    const RunOutcome out = run(theta, rng);
    if (out.collision) {
      // Weight only where the integrand is nonzero; elsewhere the term is 0
      // regardless of the weight.
      const double w = std::exp(density.log_pdf(theta) - proposal.log_pdf(theta));
      y[i] = w;
      wmax[i] = w;
    }
  });

  std::size_t hits = 0;
  double max_w = 0.0;
  for (std::size_t i = 0; i < opts.n; ++i) {
    if (y[i] > 0.0) ++hits;
    max_w = std::max(max_w, wmax[i]);
  }
  IsEstimate est;
  est.estimate = summarize(y, hits);
  est.n_critical = n_crit;
  est.max_weight = max_w;
  return est;
}

double binomial_cdf(std::size_t k, std::size_t n, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("probability outside [0, 1]");
  if (k >= n) return 1.0;
  if (p == 0.0) return 1.0;
  if (p == 1.0) return 0.0;  // k < n here
  // Running pmf recurrence; n stays small (sequential testing caps it).
  double pmf = std::pow(1.0 - p, static_cast<double>(n));
  double cdf = pmf;
  for (std::size_t j = 0; j < k; ++j) {
    pmf *= static_cast<double>(n - j) / static_cast<double>(j + 1) * p / (1.0 - p);
    cdf += pmf;
  }
  return std::min(1.0, cdf);
}

SequentialResult sequential_probability_test(
    const std::function<bool(std::size_t)>& collision_on_run,
    const SequentialOptions& opts) {
  if (!(opts.p_t > 0.0 && opts.p_t < 1.0))
    throw ValidationError("tested probability must lie in (0, 1)");
  if (!(opts.delta > 0.0 && opts.delta < 0.5))
    throw ValidationError("decision error budget must lie in (0, 0.5)");
  if (opts.max_runs == 0) throw ValidationError("sequential test needs a run budget");

  SequentialResult res;
  for (std::size_t i = 0; i < opts.max_runs; ++i) {
    if (collision_on_run(i)) ++res.collisions;
    res.runs = i + 1;
    const std::size_t k = res.collisions;
    // P(X <= k) small: k collisions are fewer than p_t explains -> below.
    if (binomial_cdf(k, res.runs, opts.p_t) < opts.delta) {
      res.verdict = Verdict::below;
      return res;
    }
    // P(X >= k) small -> above. k >= 1 here since the lower tail did not fire.
    const double upper =
        k == 0 ? 1.0 : 1.0 - binomial_cdf(k - 1, res.runs, opts.p_t);
    if (upper < opts.delta) {
      res.verdict = Verdict::above;
      return res;
    }
  }
  res.verdict = Verdict::undecided;
  return res;
}

std::vector<GridCell> preventable_grid(Family family,
                                       const std::vector<std::vector<double>>& axes,
                                       const IdmParams& idm, const DelayModel& delay,
                                       const SimOptions& sim_opts,
                                       const SequentialOptions& seq_opts,
                                       std::uint64_t seed, int threads) {
  const auto& info = family_info(family);
  if (axes.size() != info.param_names.size())
    throw ValidationError(info.name + " grid needs " +
                          std::to_string(info.param_names.size()) + " axes");
  std::size_t total = 1;
  for (const auto& axis : axes) {
    if (axis.empty()) throw ValidationError("grid axis has no values");
    total *= axis.size();
  }

  std::vector<GridCell> cells(total);
  parallel_for(total, threads, [&](std::size_t idx) {
    std::vector<double> theta(axes.size());
    std::size_t rem = idx;
    for (std::size_t j = axes.size(); j-- > 0;) {
      theta[j] = axes[j][rem % axes[j].size()];
      rem /= axes[j].size();
    }
    Rng rng(derive_seed(seed, idx));
    const auto outcome = [&](std::size_t) {
      const double tau = sample_reaction_delay(delay, rng);
      return simulate({family, theta}, tau, idm, sim_opts).collision;
    };
    const SequentialResult r = sequential_probability_test(outcome, seq_opts);
    cells[idx] = {std::move(theta), r.verdict, r.runs, r.collisions};
  });
  return cells;
}

}  // namespace scenrisk
