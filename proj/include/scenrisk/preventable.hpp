#ifndef SCENRISK_PREVENTABLE_HPP
#define SCENRISK_PREVENTABLE_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "scenrisk/driver_sim.hpp"
#include "scenrisk/kde.hpp"

namespace scenrisk {

// One randomized evaluation of a scenario: whether the ego collided and how
// critical the run was. The Rng carries all run-level randomness (e.g. the
// reaction delay draw).
struct RunOutcome {
  bool collision = false;
  double min_ttc = std::numeric_limits<double>::infinity();
  double min_gap = std::numeric_limits<double>::infinity();
};

using RunFn = std::function<RunOutcome(const std::vector<double>& theta, Rng& rng)>;

// Simulator-backed RunFn for a family: draws the reaction delay, runs the
// scenario.
RunFn make_family_run(Family family, const IdmParams& idm, const DelayModel& delay,
                      const SimOptions& opts);

struct McOptions {
  std::size_t n = 10000;
  std::uint64_t seed = 1;
  int threads = 1;
};

struct McEstimate {
  double mean = 0.0;
  double se = 0.0;  // (1/n) * sqrt(sum (y_i - mean)^2)
  std::size_t n = 0;
  std::size_t collisions = 0;
};

// Crude Monte Carlo: theta ~ density, outcome in {0, 1}. Run i draws from a
// stream seeded with derive_seed(seed, i), so results do not depend on the
// thread count.
McEstimate run_crude(const KdeModel& density, const RunFn& run, const McOptions& opts);

struct IsOptions {
  std::size_t n_pilot = 10000;
  std::size_t n = 10000;
  double critical_fraction = 0.1;  // pilot share kept as proposal support
  std::size_t min_critical = 20;
  std::uint64_t seed = 1;
  int threads = 1;
  KdeFitOptions proposal_fit;
};

struct IsEstimate {
  McEstimate estimate;
  std::size_t n_critical = 0;
  double max_weight = 0.0;
};

// Nonparametric importance sampling: a pilot pass under the scenario
// density ranks runs by criticality (lowest time-to-collision first, ties
// by gap); the proposal is a density of the same shape fitted to the most
// critical pilot scenarios. Weighted outcomes f/q are averaged under the
// same per-run seed scheme as run_crude.
IsEstimate run_importance(const KdeModel& density, const RunFn& run,
                          const IsOptions& opts);

// P(X <= k) for X ~ Binomial(n, p).
double binomial_cdf(std::size_t k, std::size_t n, double p);

enum class Verdict { below, above, undecided };

struct SequentialOptions {
  double p_t = 0.5;       // tested collision probability
  double delta = 0.01;    // error budget per side
  std::size_t max_runs = 100;
};

struct SequentialResult {
  Verdict verdict = Verdict::undecided;
  std::size_t runs = 0;
  std::size_t collisions = 0;
};

// Repeats randomized runs of one scenario until the binomial tail under
// p_t drops below delta on either side, or the run budget is exhausted.
SequentialResult sequential_probability_test(
    const std::function<bool(std::size_t)>& collision_on_run,
    const SequentialOptions& opts);

struct GridCell {
  std::vector<double> theta;
  Verdict verdict = Verdict::undecided;
  std::size_t runs = 0;
  std::size_t collisions = 0;
};

// Sequential verdicts over the cartesian product of per-parameter axis
// values (last axis fastest). Cell i uses derive_seed(seed, i).
std::vector<GridCell> preventable_grid(Family family,
                                       const std::vector<std::vector<double>>& axes,
                                       const IdmParams& idm, const DelayModel& delay,
                                       const SimOptions& sim_opts,
                                       const SequentialOptions& seq_opts,
                                       std::uint64_t seed, int threads);

}  // namespace scenrisk

#endif  // SCENRISK_PREVENTABLE_HPP
