#include "scenrisk/foreseeable.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "scenrisk/errors.hpp"

namespace scenrisk {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Empirical quantile of one standardized coordinate with k/(n+1) plotting
// positions, linear between them, and a hyperbolic tail extension of scale
// `h` that diverges as q -> 0 or 1. Monotone and continuous on (0, 1).
class QuantileCurve {
 public:
  QuantileCurve(std::vector<double> sorted, double h)
      : z_(std::move(sorted)), h_(h), n_(static_cast<double>(z_.size())) {}

  double operator()(double q) const {
    if (q <= 0.0) return -kInf;
    if (q >= 1.0) return kInf;
    const double q_min = 1.0 / (n_ + 1.0);
    const double q_max = n_ / (n_ + 1.0);
    if (q < q_min) return z_.front() - h_ * (q_min - q) / q;
    if (q > q_max) return z_.back() + h_ * (q - q_max) / (1.0 - q);
    const double pos = q * (n_ + 1.0);  // in [1, n]
    const std::size_t k = std::min(static_cast<std::size_t>(pos), z_.size() - 1);
    const double frac = pos - static_cast<double>(k);
    if (k == 0) return z_.front();
    if (k >= z_.size()) return z_.back();
    return z_[k - 1] + frac * (z_[k] - z_[k - 1]);
  }

  double data_min() const { return z_.front(); }
  double data_max() const { return z_.back(); }

 private:
  std::vector<double> z_;
  double h_;
  double n_;
};

}  // namespace

double target_probability(double exposure_rate, double lambda_fs) {
  if (!(exposure_rate > 0.0) || !std::isfinite(exposure_rate))
    throw ValidationError("exposure rate must be positive");
  if (!(lambda_fs > 0.0) || !std::isfinite(lambda_fs))
    throw ValidationError("foreseeable rate threshold must be positive");
  if (!(lambda_fs < exposure_rate))
    throw ValidationError(
        "foreseeable rate threshold is not below the exposure rate; every "
        "region satisfies it");
  return 1.0 - lambda_fs / exposure_rate;
}

ForeseeableRange solve_range_kde(const KdeModel& model,
                                 const std::vector<DimPolicy>& policies,
                                 double exposure_rate, double lambda_fs) {
  const std::size_t d = model.dim();
  std::vector<DimPolicy> pol = policies;
  if (pol.empty()) pol.assign(d, DimPolicy{});
  if (pol.size() != d)
    throw ValidationError("expected one expansion policy per dimension");

  const double p_target = target_probability(exposure_rate, lambda_fs);

  std::vector<QuantileCurve> curves;
  curves.reserve(d);
  {
    std::vector<double> col(model.size());
    for (std::size_t j = 0; j < d; ++j) {
      for (std::size_t i = 0; i < model.size(); ++i)
        col[i] = model.points_standardized()[i][j];
      std::sort(col.begin(), col.end());
      curves.emplace_back(col, model.bandwidth());
    }
  }

  std::vector<double> anchor_z(d, 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    const auto p = pol[j].policy;
    if (p == ExpansionPolicy::fixed_lower || p == ExpansionPolicy::fixed_upper) {
      if (std::isnan(pol[j].anchor))
        throw ValidationError("pinned policy on dimension " + std::to_string(j) +
                              " needs an anchor value");
      anchor_z[j] = model.standardized_from_raw(j, pol[j].anchor);
    }
  }

  std::vector<double> lo(d), hi(d);
  auto rect_at = [&](double t) {
    for (std::size_t j = 0; j < d; ++j) {
      const double q_lo = 0.5 - 0.5 * t, q_hi = 0.5 + 0.5 * t;
      switch (pol[j].policy) {
        case ExpansionPolicy::expand_both:
          lo[j] = curves[j](q_lo);
          hi[j] = curves[j](q_hi);
          break;
        case ExpansionPolicy::expand_lower:
          lo[j] = curves[j](q_lo);
          hi[j] = kInf;
          break;
        case ExpansionPolicy::expand_upper:
          lo[j] = -kInf;
          hi[j] = curves[j](q_hi);
          break;
        case ExpansionPolicy::fixed_lower:
          lo[j] = anchor_z[j];
          hi[j] = curves[j](q_hi);
          break;
        case ExpansionPolicy::fixed_upper:
          lo[j] = curves[j](q_lo);
          hi[j] = anchor_z[j];
          break;
      }
    }
  };
  auto prob_at = [&](double t) {
    rect_at(t);
    return model.rect_probability_std(lo, hi);
  };

  const double p_full = prob_at(1.0);
  if (p_full + 1e-12 < p_target)
    throw NumericError("target probability " + std::to_string(p_target) +
                       " is unreachable under the pinned bounds (maximum " +
                       std::to_string(p_full) + ")");

  double t_lo = 0.0, t_hi = 1.0;
  for (int iter = 0; iter < 100 && t_hi - t_lo > 1e-13; ++iter) {
    const double mid = 0.5 * (t_lo + t_hi);
    if (prob_at(mid) >= p_target)
      t_hi = mid;
    else
      t_lo = mid;
  }

  ForeseeableRange out;
  out.target_prob = p_target;
  out.achieved_prob = prob_at(t_hi);  // also leaves lo/hi at the solution
  out.residual_rate = exposure_rate * (1.0 - out.achieved_prob);
  out.lower.resize(d);
  out.upper.resize(d);
  out.extrapolated_lower.assign(d, false);
  out.extrapolated_upper.assign(d, false);
  for (std::size_t j = 0; j < d; ++j) {
    const double lo_z = std::max(lo[j], model.support_lower_std()[j]);
    const double hi_z = std::min(hi[j], model.support_upper_std()[j]);
    out.lower[j] = model.raw_from_standardized(j, lo_z);
    out.upper[j] = model.raw_from_standardized(j, hi_z);
    // Only endpoints driven by the quantile curves can extrapolate; pinned
    // and deliberately unbounded sides do not.
    const auto p = pol[j].policy;
    const bool lower_from_curve = p == ExpansionPolicy::expand_both ||
                                  p == ExpansionPolicy::expand_lower ||
                                  p == ExpansionPolicy::fixed_upper;
    const bool upper_from_curve = p == ExpansionPolicy::expand_both ||
                                  p == ExpansionPolicy::expand_upper ||
                                  p == ExpansionPolicy::fixed_lower;
    out.extrapolated_lower[j] = lower_from_curve && lo_z < curves[j].data_min();
    out.extrapolated_upper[j] = upper_from_curve && hi_z > curves[j].data_max();
  }
  return out;
}

EvtRange solve_range_evt(const GpdFit& fit, double exposure_rate, double lambda_fs) {
  const double p_target = target_probability(exposure_rate, lambda_fs);
  if (!(fit.exceed_prob > 0.0 && fit.exceed_prob <= 1.0))
    throw ValidationError("fit has an invalid exceedance probability");

  EvtRange out;
  out.target_prob = p_target;
  const double rate_at_threshold = exposure_rate * fit.exceed_prob;
  if (lambda_fs < rate_at_threshold) {
    // Bound above the threshold: invert the fitted excess distribution.
    const double p_excess = 1.0 - lambda_fs / rate_at_threshold;
    const double y = fit.excess_quantile(p_excess);
    out.bound_oriented = fit.u + y;
    out.used_empirical = false;
  } else {
    // The admissible rate is reached before the tail begins; use the
    // empirical distribution of the full sample.
    if (!fit.has_sample())
      throw ValidationError(
          "bound falls below the threshold and the fit carries no sample; "
          "refit from the original observations");
    const auto& s = fit.sample;  // ascending
    const double n = static_cast<double>(s.size());
    const double pos = p_target * (n + 1.0);
    if (pos <= 1.0) {
      out.bound_oriented = s.front();
    } else if (pos >= n) {
      out.bound_oriented = s.back();
    } else {
      const std::size_t k = static_cast<std::size_t>(pos);
      const double frac = pos - static_cast<double>(k);
      out.bound_oriented = s[k - 1] + frac * (s[k] - s[k - 1]);
    }
    out.used_empirical = true;
  }
  out.bound = fit.side == TailSide::upper ? out.bound_oriented : -out.bound_oriented;
  return out;
}

}  // namespace scenrisk
