#ifndef SCENRISK_EVT_HPP
#define SCENRISK_EVT_HPP

#include <cstddef>
#include <limits>
#include <vector>

namespace scenrisk {

// Generalized Pareto distribution of threshold excesses y >= 0. The shape
// switches to the exponential limit when |xi| drops below 1e-9.
double gpd_cdf(double y, double xi, double sigma);
double gpd_pdf(double y, double xi, double sigma);
double gpd_quantile(double p, double xi, double sigma);
double gpd_log_likelihood(const std::vector<double>& excesses, double xi, double sigma);

struct GpdParams {
  double xi = 0.0;
  double sigma = 1.0;
};

// Maximum likelihood on (xi, log sigma) via Nelder-Mead from a
// moment-matching start. Requires at least 5 positive excesses.
GpdParams fit_gpd_mle(const std::vector<double>& excesses);

// Which tail of the parameter the fit describes. Lower-tail fits operate on
// the negated sample, so thresholds and bounds are stored in negated
// ("oriented") units there.
enum class TailSide { upper, lower };

// A peaks-over-threshold fit. All stored quantities live in oriented units:
// the raw parameter for upper-tail fits, its negation for lower-tail fits.
struct GpdFit {
  TailSide side = TailSide::upper;
  double u = 0.0;          // threshold
  double xi = 0.0;
  double sigma = 1.0;
  std::size_t n_exceed = 0;
  std::size_t n_total = 0;
  double exceed_prob = 0.0;  // P(oriented sample > u)
  // Excesses cannot exceed y_max when the parameter's support ends there;
  // the excess distribution is renormalized by C = F(y_max).
  double y_max = std::numeric_limits<double>::infinity();
  // Full oriented sample, ascending. Used to solve below the threshold;
  // empty after deserialization.
  std::vector<double> sample;

  double trunc_c() const;                 // F(y_max), 1 when untruncated
  double excess_cdf(double y) const;      // truncated F(y)/C on [0, y_max]
  double excess_quantile(double p) const; // inverse of excess_cdf
  bool has_sample() const { return !sample.empty(); }
};

// Fits the requested tail: orient the sample, take the top
// `exceed_fraction` of it as excesses over the implied threshold, fit by
// MLE. `support_end` (raw units) truncates the excess distribution where
// the parameter's support ends; pass an infinity when unrestricted.
GpdFit fit_pot(const std::vector<double>& sample_raw, TailSide side,
               double exceed_fraction,
               double support_end = std::numeric_limits<double>::infinity());

// As above with an explicit threshold in raw units.
GpdFit fit_pot_threshold(const std::vector<double>& sample_raw, TailSide side,
                         double threshold_raw,
                         double support_end = std::numeric_limits<double>::infinity());

}  // namespace scenrisk

#endif  // SCENRISK_EVT_HPP
