#ifndef SCENRISK_FORESEEABLE_HPP
#define SCENRISK_FORESEEABLE_HPP

#include <cstddef>
#include <limits>
#include <vector>

#include "scenrisk/evt.hpp"
#include "scenrisk/kde.hpp"

namespace scenrisk {

// Probability mass a foreseeable region must hold so that scenarios outside
// it occur at most lambda_fs times per hour: 1 - lambda_fs / exposure_rate.
double target_probability(double exposure_rate, double lambda_fs);

// How one parameter's interval grows while the region expands.
enum class ExpansionPolicy {
  expand_both,   // both endpoints move outward from the median
  expand_lower,  // upper endpoint unbounded, lower moves outward
  expand_upper,  // lower endpoint unbounded, upper moves outward
  fixed_lower,   // lower endpoint pinned to an anchor, upper moves outward
  fixed_upper,   // upper endpoint pinned to an anchor, lower moves outward
};

struct DimPolicy {
  ExpansionPolicy policy = ExpansionPolicy::expand_both;
  double anchor = std::numeric_limits<double>::quiet_NaN();  // raw units, fixed_* only
};

struct ForeseeableRange {
  std::vector<double> lower, upper;  // raw units, clipped to the support
  double target_prob = 0.0;
  double achieved_prob = 0.0;
  double residual_rate = 0.0;  // exposure_rate * (1 - achieved_prob)
  // Endpoints that lie beyond the observed data and rest on the tail
  // extension of the empirical quantile curve.
  std::vector<bool> extrapolated_lower, extrapolated_upper;
};

// Grows a rectangle along per-dimension quantile trajectories until it
// holds the target mass. Policies may be empty (expand_both everywhere) or
// give one entry per dimension.
ForeseeableRange solve_range_kde(const KdeModel& model,
                                 const std::vector<DimPolicy>& policies,
                                 double exposure_rate, double lambda_fs);

struct EvtRange {
  double bound = 0.0;           // natural units
  double bound_oriented = 0.0;  // negated for lower-tail fits
  double target_prob = 0.0;
  bool used_empirical = false;  // bound fell below the threshold
};

// One-dimensional bound such that scenarios beyond it occur at rate
// lambda_fs: exposure * P(theta beyond bound) = lambda_fs. Above the
// threshold the fitted tail is inverted in closed form; below it the
// empirical distribution of the stored sample takes over.
EvtRange solve_range_evt(const GpdFit& fit, double exposure_rate, double lambda_fs);

}  // namespace scenrisk

#endif  // SCENRISK_FORESEEABLE_HPP
