#ifndef SCENRISK_KDE_HPP
#define SCENRISK_KDE_HPP

#include <cstddef>
#include <limits>
#include <vector>

#include "scenrisk/rng.hpp"
#include "scenrisk/transforms.hpp"

namespace scenrisk {

// Raw-space support bounds for one parameter. Density outside is zero and
// the remaining mass is renormalized in closed form.
struct Domain {
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
};

struct KdeFitOptions {
  double bandwidth = 0.0;  // > 0 fixes the bandwidth, otherwise leave-one-out CV
  double span = 100.0;     // search window [h0/span, h0*span] around the rule-of-thumb start
  double tol = 1e-4;       // golden-section tolerance on log h
};

// Gaussian-kernel density over transformed, standardized scenario
// parameters, with a single scalar bandwidth. Queries and samples are in
// raw parameter units; the transform Jacobians and the support truncation
// are applied internally.
class KdeModel {
 public:
  KdeModel() = default;

  // Fits transforms -> standardization -> bandwidth on raw-space points.
  // Points must lie strictly inside the transform domains and the declared
  // support. Requires at least 3 points.
  static KdeModel fit(const std::vector<std::vector<double>>& points_raw,
                      std::vector<TransformKind> transforms,
                      std::vector<Domain> domains = {},
                      const KdeFitOptions& opts = {});

  // Reassembles a model from stored state (deserialization path).
  static KdeModel from_parts(std::vector<std::vector<double>> points_transformed,
                             std::vector<TransformKind> transforms,
                             std::vector<Domain> domains, std::vector<double> mean,
                             std::vector<double> stddev, double bandwidth);

  std::size_t dim() const { return transforms_.size(); }
  std::size_t size() const { return points_t_.size(); }
  double bandwidth() const { return h_; }
  const std::vector<TransformKind>& transforms() const { return transforms_; }
  const std::vector<Domain>& domains() const { return domains_; }
  const std::vector<double>& mean() const { return mean_; }
  const std::vector<double>& stddev() const { return std_; }
  const std::vector<std::vector<double>>& points_transformed() const { return points_t_; }
  const std::vector<std::vector<double>>& points_standardized() const { return z_; }
  double truncation_constant() const { return trunc_c_; }
  const std::vector<double>& support_lower_std() const { return valid_lo_z_; }
  const std::vector<double>& support_upper_std() const { return valid_hi_z_; }

  // Density at a raw-space point; zero outside the support.
  double pdf(const std::vector<double>& x_raw) const;
  double log_pdf(const std::vector<double>& x_raw) const;

  // P(theta <= x componentwise) under the truncated density.
  double cdf(const std::vector<double>& x_raw) const;

  // P(lower <= theta <= upper) under the truncated density. Bounds may be
  // infinite; bounds outside a transform's domain saturate to the domain
  // edge.
  double rect_probability(const std::vector<double>& lower_raw,
                          const std::vector<double>& upper_raw) const;

  // Same rectangle probability with bounds given in standardized space.
  double rect_probability_std(const std::vector<double>& lower_z,
                              const std::vector<double>& upper_z) const;

  // One draw in raw units: uniform kernel choice, Gaussian perturbation of
  // scale h, rejection against the support.
  std::vector<double> sample(Rng& rng) const;

  // Coordinate maps between raw and standardized space for one dimension.
  double standardized_from_raw(std::size_t j, double x) const;
  double raw_from_standardized(std::size_t j, double z) const;

 private:
  void finalize();             // derives z_ and the support in standardized space
  void compute_truncation();   // needs the bandwidth; runs last in both builders

  double rect_prob_unnormalized(const std::vector<double>& lo_z,
                                const std::vector<double>& hi_z) const;
  bool in_support(const std::vector<double>& x_raw) const;

  std::vector<TransformKind> transforms_;
  std::vector<Domain> domains_;                 // empty when unrestricted
  std::vector<std::vector<double>> points_t_;   // transformed, unstandardized
  std::vector<std::vector<double>> z_;          // standardized
  std::vector<double> mean_, std_;
  std::vector<double> valid_lo_z_, valid_hi_z_;  // support in standardized space
  double h_ = 0.0;
  double trunc_c_ = 1.0;
};

// Leave-one-out cross-validated bandwidth over standardized points,
// exposed separately so the selection can be tested on its own.
double select_bandwidth_loo(const std::vector<std::vector<double>>& z, double span,
                            double tol);

// Mean LOO log-density of standardized points at bandwidth h (the CV
// objective maximized by select_bandwidth_loo).
double loo_log_likelihood(const std::vector<std::vector<double>>& z, double h);

}  // namespace scenrisk

#endif  // SCENRISK_KDE_HPP
