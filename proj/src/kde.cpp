#include "scenrisk/kde.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "scenrisk/errors.hpp"

namespace scenrisk {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLog2Pi = 1.8378770664093454836;

double normal_cdf(double t) {
  if (std::isinf(t)) return t > 0.0 ? 1.0 : 0.0;
  return 0.5 * std::erfc(-t * 0.7071067811865475244);
}

// Rule-of-thumb start for unit-variance data.
double silverman_h(std::size_t n, std::size_t d) {
  const double dd = static_cast<double>(d);
  return std::pow(4.0 / (dd + 2.0), 1.0 / (dd + 4.0)) *
         std::pow(static_cast<double>(n), -1.0 / (dd + 4.0));
}

double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double t = a[j] - b[j];
    s += t * t;
  }
  return s;
}

}  // namespace

double loo_log_likelihood(const std::vector<std::vector<double>>& z, double h) {
  const std::size_t n = z.size();
  const std::size_t d = z.front().size();
  const double inv2h2 = 1.0 / (2.0 * h * h);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double m = kInf;  // min squared distance to any other point
    for (std::size_t k = 0; k < n; ++k) {
      if (k == i) continue;
      m = std::min(m, sq_dist(z[i], z[k]));
    }
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      if (k == i) continue;
      s += std::exp(-(sq_dist(z[i], z[k]) - m) * inv2h2);
    }
    total += std::log(s) - m * inv2h2;
  }
  const double dd = static_cast<double>(d);
  total -= static_cast<double>(n) *
           (std::log(static_cast<double>(n - 1)) + dd * std::log(h) + 0.5 * dd * kLog2Pi);
  return total / static_cast<double>(n);
}

double select_bandwidth_loo(const std::vector<std::vector<double>>& z, double span,
                            double tol) {
  const std::size_t n = z.size();
  if (n < 3) throw ValidationError("bandwidth selection requires at least 3 points");
  const std::size_t d = z.front().size();

  // Pairwise squared distances, flattened upper triangle; kept only when the
  // quadratic storage is affordable.
  const bool cache = n <= 2048;
  std::vector<double> d2;
  if (cache) {
    d2.resize(n * (n - 1) / 2);
    std::size_t idx = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = i + 1; k < n; ++k) d2[idx++] = sq_dist(z[i], z[k]);
  }
  auto pair_d2 = [&](std::size_t i, std::size_t k) {
    if (i > k) std::swap(i, k);
    return d2[i * (2 * n - i - 1) / 2 + (k - i - 1)];
  };
  std::vector<double> min_d2(n, kInf);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      if (k == i) continue;
      min_d2[i] = std::min(min_d2[i], cache ? pair_d2(i, k) : sq_dist(z[i], z[k]));
    }

  const double dd = static_cast<double>(d);
  auto objective = [&](double log_h) {
    const double h = std::exp(log_h);
    const double inv2h2 = 1.0 / (2.0 * h * h);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        if (k == i) continue;
        const double dist2 = cache ? pair_d2(i, k) : sq_dist(z[i], z[k]);
        s += std::exp(-(dist2 - min_d2[i]) * inv2h2);
      }
      total += std::log(s) - min_d2[i] * inv2h2;
    }
    total -= static_cast<double>(n) *
             (std::log(static_cast<double>(n - 1)) + dd * log_h + 0.5 * dd * kLog2Pi);
    return total;
  };

  const double h0 = silverman_h(n, d);
  double a = std::log(h0 / span), b = std::log(h0 * span);
  const double gr = 0.6180339887498949;  // 1/phi
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = objective(x1), f2 = objective(x2);
  while (b - a > tol) {
    if (f1 < f2) {  // maximum is in [x1, b]
      a = x1;
      x1 = x2; f1 = f2;
      x2 = a + gr * (b - a);
      f2 = objective(x2);
    } else {
      b = x2;
      x2 = x1; f2 = f1;
      x1 = b - gr * (b - a);
      f1 = objective(x1);
    }
  }
  const double h = std::exp(0.5 * (a + b));
  if (!(h > 0.0) || !std::isfinite(h))
    throw NumericError("bandwidth selection failed");
  return h;
}

KdeModel KdeModel::fit(const std::vector<std::vector<double>>& points_raw,
                       std::vector<TransformKind> transforms,
                       std::vector<Domain> domains, const KdeFitOptions& opts) {
  const std::size_t d = transforms.size();
  if (d == 0) throw ValidationError("density needs at least one dimension");
  if (points_raw.size() < 3) throw ValidationError("density fit requires at least 3 points");
  if (!domains.empty() && domains.size() != d)
    throw ValidationError("domain count does not match dimension count");

  KdeModel m;
  m.transforms_ = std::move(transforms);
  m.domains_ = std::move(domains);
  m.points_t_.reserve(points_raw.size());
  for (std::size_t i = 0; i < points_raw.size(); ++i) {
    const auto& row = points_raw[i];
    if (row.size() != d)
      throw ValidationError("point " + std::to_string(i) + " has wrong dimension");
    std::vector<double> y(d);
    for (std::size_t j = 0; j < d; ++j) {
      if (!m.domains_.empty() &&
          (row[j] < m.domains_[j].lower || row[j] > m.domains_[j].upper))
        throw ValidationError("point " + std::to_string(i) +
                              " lies outside the declared support");
      y[j] = transform_forward(m.transforms_[j], row[j]);
    }
    m.points_t_.push_back(std::move(y));
  }

  const std::size_t n = m.points_t_.size();
  m.mean_.assign(d, 0.0);
  m.std_.assign(d, 0.0);
  for (const auto& y : m.points_t_)
    for (std::size_t j = 0; j < d; ++j) m.mean_[j] += y[j];
  for (std::size_t j = 0; j < d; ++j) m.mean_[j] /= static_cast<double>(n);
  for (const auto& y : m.points_t_)
    for (std::size_t j = 0; j < d; ++j) {
      const double t = y[j] - m.mean_[j];
      m.std_[j] += t * t;
    }
  for (std::size_t j = 0; j < d; ++j) {
    m.std_[j] = std::sqrt(m.std_[j] / static_cast<double>(n - 1));
    if (!(m.std_[j] > 0.0))
      throw ValidationError("parameter " + std::to_string(j) +
                            " is constant; cannot standardize");
  }

  m.finalize();
  if (opts.bandwidth > 0.0) {
    m.h_ = opts.bandwidth;
  } else {
    m.h_ = select_bandwidth_loo(m.z_, opts.span, opts.tol);
  }
  m.compute_truncation();
  return m;
}

KdeModel KdeModel::from_parts(std::vector<std::vector<double>> points_transformed,
                              std::vector<TransformKind> transforms,
                              std::vector<Domain> domains, std::vector<double> mean,
                              std::vector<double> stddev, double bandwidth) {
  const std::size_t d = transforms.size();
  if (d == 0) throw ValidationError("density needs at least one dimension");
  if (points_transformed.empty()) throw ValidationError("density has no points");
  if (!domains.empty() && domains.size() != d)
    throw ValidationError("domain count does not match dimension count");
  if (mean.size() != d || stddev.size() != d)
    throw ValidationError("standardization size does not match dimension count");
  for (double s : stddev)
    if (!(s > 0.0) || !std::isfinite(s))
      throw ValidationError("standardization scale must be positive");
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth))
    throw ValidationError("bandwidth must be positive");
  for (const auto& y : points_transformed)
    if (y.size() != d) throw ValidationError("point has wrong dimension");

  KdeModel m;
  m.points_t_ = std::move(points_transformed);
  m.transforms_ = std::move(transforms);
  m.domains_ = std::move(domains);
  m.mean_ = std::move(mean);
  m.std_ = std::move(stddev);
  m.h_ = bandwidth;
  m.finalize();
  m.compute_truncation();
  return m;
}

void KdeModel::finalize() {
  const std::size_t d = dim();
  const std::size_t n = points_t_.size();
  z_.assign(n, std::vector<double>(d));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j)
      z_[i][j] = (points_t_[i][j] - mean_[j]) / std_[j];

  valid_lo_z_.assign(d, -kInf);
  valid_hi_z_.assign(d, kInf);
  if (!domains_.empty()) {
    for (std::size_t j = 0; j < d; ++j) {
      valid_lo_z_[j] = standardized_from_raw(j, domains_[j].lower);
      valid_hi_z_[j] = standardized_from_raw(j, domains_[j].upper);
    }
  }
  trunc_c_ = 1.0;
}

void KdeModel::compute_truncation() {
  trunc_c_ = 1.0;
  if (domains_.empty()) return;
  const double c = rect_prob_unnormalized(valid_lo_z_, valid_hi_z_);
  if (!(c > 0.0))
    throw NumericError("support truncation removes all probability mass");
  trunc_c_ = std::min(1.0, c);
}

double KdeModel::standardized_from_raw(std::size_t j, double x) const {
  const double y = transform_forward_extended(transforms_[j], x);
  if (std::isinf(y)) return y;
  return (y - mean_[j]) / std_[j];
}

double KdeModel::raw_from_standardized(std::size_t j, double z) const {
  if (std::isinf(z)) {
    // Saturate to the transform's raw-space edge.
    return transform_inverse(transforms_[j], z);
  }
  return transform_inverse(transforms_[j], mean_[j] + std_[j] * z);
}

double KdeModel::rect_prob_unnormalized(const std::vector<double>& lo_z,
                                        const std::vector<double>& hi_z) const {
  const std::size_t d = dim();
  const double inv_h = 1.0 / h_;
  double acc = 0.0;
  for (const auto& zi : z_) {
    double prod = 1.0;
    for (std::size_t j = 0; j < d && prod > 0.0; ++j) {
      const double hi = normal_cdf((hi_z[j] - zi[j]) * inv_h);
      const double lo = normal_cdf((lo_z[j] - zi[j]) * inv_h);
      prod *= std::max(0.0, hi - lo);
    }
    acc += prod;
  }
  return acc / static_cast<double>(z_.size());
}

bool KdeModel::in_support(const std::vector<double>& x_raw) const {
  for (std::size_t j = 0; j < dim(); ++j) {
    switch (transforms_[j]) {
      case TransformKind::identity: break;
      case TransformKind::log_pos:
        if (!(x_raw[j] > 0.0)) return false;
        break;
      case TransformKind::negated_logit:
        if (!(x_raw[j] > 0.0 && x_raw[j] < 1.0)) return false;
        break;
    }
    if (!domains_.empty() &&
        (x_raw[j] < domains_[j].lower || x_raw[j] > domains_[j].upper))
      return false;
  }
  return true;
}

double KdeModel::log_pdf(const std::vector<double>& x_raw) const {
  if (x_raw.size() != dim()) throw ValidationError("query point has wrong dimension");
  if (!in_support(x_raw)) return -kInf;
  const std::size_t d = dim();
  std::vector<double> zq(d);
  double log_jac = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    zq[j] = standardized_from_raw(j, x_raw[j]);
    log_jac += transform_log_jacobian(transforms_[j], x_raw[j]) - std::log(std_[j]);
  }
  const double inv2h2 = 1.0 / (2.0 * h_ * h_);
  double m = kInf;
  for (const auto& zi : z_) m = std::min(m, sq_dist(zq, zi));
  double s = 0.0;
  for (const auto& zi : z_) s += std::exp(-(sq_dist(zq, zi) - m) * inv2h2);
  const double dd = static_cast<double>(d);
  const double log_fz = std::log(s) - m * inv2h2 -
                        std::log(static_cast<double>(z_.size())) - dd * std::log(h_) -
                        0.5 * dd * kLog2Pi;
  return log_fz + log_jac - std::log(truncation_constant());
}

double KdeModel::pdf(const std::vector<double>& x_raw) const {
  const double lp = log_pdf(x_raw);
  return std::isinf(lp) && lp < 0.0 ? 0.0 : std::exp(lp);
}

double KdeModel::rect_probability_std(const std::vector<double>& lower_z,
                                      const std::vector<double>& upper_z) const {
  if (lower_z.size() != dim() || upper_z.size() != dim())
    throw ValidationError("rectangle has wrong dimension");
  std::vector<double> lo(dim()), hi(dim());
  for (std::size_t j = 0; j < dim(); ++j) {
    lo[j] = std::max(lower_z[j], valid_lo_z_[j]);
    hi[j] = std::min(upper_z[j], valid_hi_z_[j]);
    if (!(lo[j] <= hi[j])) return 0.0;
  }
  const double p = rect_prob_unnormalized(lo, hi) / truncation_constant();
  return std::min(1.0, std::max(0.0, p));
}

double KdeModel::rect_probability(const std::vector<double>& lower_raw,
                                  const std::vector<double>& upper_raw) const {
  if (lower_raw.size() != dim() || upper_raw.size() != dim())
    throw ValidationError("rectangle has wrong dimension");
  std::vector<double> lo(dim()), hi(dim());
  for (std::size_t j = 0; j < dim(); ++j) {
    lo[j] = standardized_from_raw(j, lower_raw[j]);
    hi[j] = standardized_from_raw(j, upper_raw[j]);
  }
  return rect_probability_std(lo, hi);
}

double KdeModel::cdf(const std::vector<double>& x_raw) const {
  std::vector<double> lo(dim(), -kInf);
  return rect_probability(lo, x_raw);
}

std::vector<double> KdeModel::sample(Rng& rng) const {
  const std::size_t d = dim();
  std::vector<double> x(d);
  for (int attempt = 0; attempt < 1000000; ++attempt) {
    const std::size_t i = static_cast<std::size_t>(rng.uniform_below(z_.size()));
    bool ok = true;
    for (std::size_t j = 0; j < d; ++j) {
      const double zj = z_[i][j] + h_ * rng.normal();
      x[j] = transform_inverse(transforms_[j], mean_[j] + std_[j] * zj);
      if (!domains_.empty() &&
          (x[j] < domains_[j].lower || x[j] > domains_[j].upper)) {
        ok = false;
        break;
      }
    }
    if (ok) return x;
  }
  throw NumericError("sampling failed: support rejects every draw");
}

}  // namespace scenrisk
