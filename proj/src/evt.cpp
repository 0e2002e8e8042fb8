#include "scenrisk/evt.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "scenrisk/errors.hpp"

namespace scenrisk {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kXiZero = 1e-9;  // below this the exponential limit applies

struct Simplex2 {
  double x[3][2];
  double f[3];
};

}  // namespace

double gpd_cdf(double y, double xi, double sigma) {
  if (!(sigma > 0.0)) throw ValidationError("gpd scale must be positive");
  if (y <= 0.0) return 0.0;
  if (std::abs(xi) < kXiZero) return -std::expm1(-y / sigma);
  const double arg = 1.0 + xi * y / sigma;
  if (arg <= 0.0) return 1.0;  // beyond the upper endpoint (xi < 0)
  return 1.0 - std::pow(arg, -1.0 / xi);
}

double gpd_pdf(double y, double xi, double sigma) {
  if (!(sigma > 0.0)) throw ValidationError("gpd scale must be positive");
  if (y < 0.0) return 0.0;
  if (std::abs(xi) < kXiZero) return std::exp(-y / sigma) / sigma;
  const double arg = 1.0 + xi * y / sigma;
  if (arg <= 0.0) return 0.0;
  return std::pow(arg, -1.0 / xi - 1.0) / sigma;
}

double gpd_quantile(double p, double xi, double sigma) {
  if (!(sigma > 0.0)) throw ValidationError("gpd scale must be positive");
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("quantile level outside [0, 1]");
  if (p == 0.0) return 0.0;
  if (p == 1.0) return xi < -kXiZero ? -sigma / xi : kInf;
  if (std::abs(xi) < kXiZero) return -sigma * std::log1p(-p);
  return sigma / xi * (std::pow(1.0 - p, -xi) - 1.0);
}

double gpd_log_likelihood(const std::vector<double>& excesses, double xi, double sigma) {
  if (!(sigma > 0.0)) return -kInf;
  const double n = static_cast<double>(excesses.size());
  if (std::abs(xi) < kXiZero) {
    double s = 0.0;
    for (double y : excesses) {
      if (y < 0.0) return -kInf;
      s += y;
    }
    return -n * std::log(sigma) - s / sigma;
  }
  double s = 0.0;
  for (double y : excesses) {
    const double arg = 1.0 + xi * y / sigma;
    if (y < 0.0 || arg <= 0.0) return -kInf;
    s += std::log1p(xi * y / sigma);
  }
  return -n * std::log(sigma) - (1.0 + 1.0 / xi) * s;
}

GpdParams fit_gpd_mle(const std::vector<double>& excesses) {
  const std::size_t n = excesses.size();
  if (n < 5) throw ValidationError("gpd fit requires at least 5 excesses");
  double y_max = 0.0, mean = 0.0;
  for (double y : excesses) {
    if (!(y >= 0.0) || !std::isfinite(y))
      throw ValidationError("gpd excesses must be finite and non-negative");
    mean += y;
    y_max = std::max(y_max, y);
  }
  mean /= static_cast<double>(n);
  if (!(mean > 0.0)) throw ValidationError("gpd excesses are all zero");
  double var = 0.0;
  for (double y : excesses) var += (y - mean) * (y - mean);
  var /= static_cast<double>(n - 1);

  // Moment-matching start; fall back to a mildly heavy tail when the start
  // is outside its own support constraint.
  double xi0 = 0.1, sigma0 = mean;
  if (var > 0.0) {
    const double r = mean * mean / var;
    xi0 = 0.5 * (1.0 - r);
    sigma0 = 0.5 * mean * (r + 1.0);
    if (xi0 < 0.0 && y_max * (-xi0) >= sigma0) {
      xi0 = 0.1;
      sigma0 = mean;
    }
  }

  // Negative log-likelihood over (xi, log sigma); a finite ramp outside the
  // support keeps the simplex from stalling on an infinite wall.
  auto nll = [&](double xi, double t) {
    const double sigma = std::exp(t);
    if (xi < -kXiZero) {
      const double v = y_max * (-xi) / sigma;
      if (v >= 1.0 - 1e-12) return 1e12 * (1.0 + v);
    }
    const double ll = gpd_log_likelihood(excesses, xi, sigma);
    if (!std::isfinite(ll)) return 1e12;
    return -ll;
  };

  Simplex2 s;
  s.x[0][0] = xi0;        s.x[0][1] = std::log(sigma0);
  s.x[1][0] = xi0 + 0.1;  s.x[1][1] = std::log(sigma0);
  s.x[2][0] = xi0;        s.x[2][1] = std::log(sigma0) + 0.1;
  for (int i = 0; i < 3; ++i) s.f[i] = nll(s.x[i][0], s.x[i][1]);

  bool converged = false;
  for (int iter = 0; iter < 2000; ++iter) {
    int order[3] = {0, 1, 2};
    std::sort(order, order + 3, [&](int a, int b) { return s.f[a] < s.f[b]; });
    const int lo = order[0], mid = order[1], hi = order[2];

    const double spread = std::max(
        std::abs(s.x[hi][0] - s.x[lo][0]) + std::abs(s.x[hi][1] - s.x[lo][1]),
        std::abs(s.x[mid][0] - s.x[lo][0]) + std::abs(s.x[mid][1] - s.x[lo][1]));
    if (std::abs(s.f[hi] - s.f[lo]) < 1e-10 * (1.0 + std::abs(s.f[lo])) &&
        spread < 1e-8) {
      converged = true;
      break;
    }

    const double cx = 0.5 * (s.x[lo][0] + s.x[mid][0]);
    const double cy = 0.5 * (s.x[lo][1] + s.x[mid][1]);
    const double rx = cx + (cx - s.x[hi][0]);
    const double ry = cy + (cy - s.x[hi][1]);
    const double fr = nll(rx, ry);
    if (fr < s.f[lo]) {
      const double ex = cx + 2.0 * (cx - s.x[hi][0]);
      const double ey = cy + 2.0 * (cy - s.x[hi][1]);
      const double fe = nll(ex, ey);
      if (fe < fr) {
        s.x[hi][0] = ex; s.x[hi][1] = ey; s.f[hi] = fe;
      } else {
        s.x[hi][0] = rx; s.x[hi][1] = ry; s.f[hi] = fr;
      }
    } else if (fr < s.f[mid]) {
      s.x[hi][0] = rx; s.x[hi][1] = ry; s.f[hi] = fr;
    } else {
      const double kx = cx + 0.5 * (s.x[hi][0] - cx);
      const double ky = cy + 0.5 * (s.x[hi][1] - cy);
      const double fk = nll(kx, ky);
      if (fk < s.f[hi]) {
        s.x[hi][0] = kx; s.x[hi][1] = ky; s.f[hi] = fk;
      } else {
        for (int i = 0; i < 3; ++i) {
          if (i == lo) continue;
          s.x[i][0] = s.x[lo][0] + 0.5 * (s.x[i][0] - s.x[lo][0]);
          s.x[i][1] = s.x[lo][1] + 0.5 * (s.x[i][1] - s.x[lo][1]);
          s.f[i] = nll(s.x[i][0], s.x[i][1]);
        }
      }
    }
  }
  if (!converged) throw NumericError("gpd likelihood maximization did not converge");

  int best = 0;
  for (int i = 1; i < 3; ++i)
    if (s.f[i] < s.f[best]) best = i;
  if (s.f[best] >= 1e12)
    throw NumericError("gpd likelihood maximization found no feasible point");
  return {s.x[best][0], std::exp(s.x[best][1])};
}

double GpdFit::trunc_c() const {
  if (std::isinf(y_max)) return 1.0;
  const double c = gpd_cdf(y_max, xi, sigma);
  if (!(c > 0.0)) throw NumericError("gpd truncation removes all probability mass");
  return c;
}

double GpdFit::excess_cdf(double y) const {
  if (y <= 0.0) return 0.0;
  if (y >= y_max) return 1.0;
  return std::min(1.0, gpd_cdf(y, xi, sigma) / trunc_c());
}

double GpdFit::excess_quantile(double p) const {
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("quantile level outside [0, 1]");
  const double y = gpd_quantile(p * trunc_c(), xi, sigma);
  return std::min(y, y_max);
}

namespace {

GpdFit fit_oriented(std::vector<double> oriented, TailSide side, double u,
                    double support_end_oriented) {
  const std::size_t n = oriented.size();
  // Strict exceedances; ties at the threshold order statistic shrink the
  // count, and the realized count is what enters the rate.
  std::vector<double> excesses;
  for (double v : oriented)
    if (v > u) excesses.push_back(v - u);
  if (excesses.size() < 5)
    throw ValidationError("threshold leaves fewer than 5 exceedances");

  double y_max = kInf;
  if (std::isfinite(support_end_oriented)) {
    y_max = support_end_oriented - u;
    if (!(y_max > 0.0))
      throw ValidationError("threshold lies at or beyond the support end");
    for (double y : excesses)
      if (y > y_max)
        throw ValidationError("sample exceeds the declared support end");
  }

  const GpdParams p = fit_gpd_mle(excesses);
  GpdFit fit;
  fit.side = side;
  fit.u = u;
  fit.xi = p.xi;
  fit.sigma = p.sigma;
  fit.n_exceed = excesses.size();
  fit.n_total = n;
  fit.exceed_prob = static_cast<double>(excesses.size()) / static_cast<double>(n);
  fit.y_max = y_max;
  fit.sample = std::move(oriented);
  return fit;
}

}  // namespace

GpdFit fit_pot(const std::vector<double>& sample_raw, TailSide side,
               double exceed_fraction, double support_end) {
  if (!(exceed_fraction > 0.0 && exceed_fraction < 1.0))
    throw ValidationError("exceedance fraction must lie in (0, 1)");
  const std::size_t n = sample_raw.size();
  if (n < 10) throw ValidationError("pot fit requires at least 10 observations");

  std::vector<double> oriented(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(sample_raw[i])) throw ValidationError("sample contains non-finite values");
    oriented[i] = side == TailSide::upper ? sample_raw[i] : -sample_raw[i];
  }
  std::sort(oriented.begin(), oriented.end());

  const std::size_t k = static_cast<std::size_t>(
      std::floor(exceed_fraction * static_cast<double>(n)));
  if (k < 5) throw ValidationError("exceedance fraction leaves fewer than 5 exceedances");
  const double u = oriented[n - k - 1];
  const double end_oriented =
      side == TailSide::upper ? support_end
                              : (std::isinf(support_end) ? kInf : -support_end);
  return fit_oriented(std::move(oriented), side, u, end_oriented);
}

GpdFit fit_pot_threshold(const std::vector<double>& sample_raw, TailSide side,
                         double threshold_raw, double support_end) {
  const std::size_t n = sample_raw.size();
  if (n < 10) throw ValidationError("pot fit requires at least 10 observations");
  std::vector<double> oriented(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(sample_raw[i])) throw ValidationError("sample contains non-finite values");
    oriented[i] = side == TailSide::upper ? sample_raw[i] : -sample_raw[i];
  }
  std::sort(oriented.begin(), oriented.end());
  const double u = side == TailSide::upper ? threshold_raw : -threshold_raw;
  const double end_oriented =
      side == TailSide::upper ? support_end
                              : (std::isinf(support_end) ? kInf : -support_end);
  return fit_oriented(std::move(oriented), side, u, end_oriented);
}

}  // namespace scenrisk
