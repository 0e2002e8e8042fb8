#ifndef SCENRISK_TRANSFORMS_HPP
#define SCENRISK_TRANSFORMS_HPP

#include <cmath>
#include <limits>
#include <string>

#include "scenrisk/errors.hpp"

namespace scenrisk {

// Per-dimension map applied before standardization so that bounded
// parameters become unbounded. `negated_logit` maps (0, 1) to the real
// line: y = -log(1/x - 1).
enum class TransformKind { identity, log_pos, negated_logit };

inline std::string transform_name(TransformKind k) {
  switch (k) {
    case TransformKind::identity: return "identity";
    case TransformKind::log_pos: return "log";
    case TransformKind::negated_logit: return "negated_logit";
  }
  return "identity";
}

inline TransformKind transform_from_name(const std::string& name) {
  if (name == "identity") return TransformKind::identity;
  if (name == "log") return TransformKind::log_pos;
  if (name == "negated_logit") return TransformKind::negated_logit;
  throw ValidationError("unknown transform: " + name);
}

// Strict forward map; throws if x is outside the transform's domain.
inline double transform_forward(TransformKind k, double x) {
  switch (k) {
    case TransformKind::identity:
      return x;
    case TransformKind::log_pos:
      if (!(x > 0.0)) throw ValidationError("log transform requires x > 0");
      return std::log(x);
    case TransformKind::negated_logit:
      if (!(x > 0.0 && x < 1.0))
        throw ValidationError("negated_logit transform requires 0 < x < 1");
      return -std::log(1.0 / x - 1.0);
  }
  return x;
}

// Forward map for interval endpoints: values at or beyond the domain edge
// saturate to the corresponding infinity instead of throwing.
inline double transform_forward_extended(TransformKind k, double x) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  switch (k) {
    case TransformKind::identity:
      return x;
    case TransformKind::log_pos:
      if (x <= 0.0) return -inf;
      return std::isinf(x) ? inf : std::log(x);
    case TransformKind::negated_logit:
      if (x <= 0.0) return -inf;
      if (x >= 1.0) return inf;
      return -std::log(1.0 / x - 1.0);
  }
  return x;
}

inline double transform_inverse(TransformKind k, double y) {
  switch (k) {
    case TransformKind::identity:
      return y;
    case TransformKind::log_pos:
      return std::exp(y);
    case TransformKind::negated_logit:
      if (std::isinf(y)) return y > 0.0 ? 1.0 : 0.0;
      return 1.0 / (1.0 + std::exp(-y));
  }
  return y;
}

// log |dy/dx| of the forward map at x; this is the density correction when
// pulling a transformed-space density back to raw coordinates.
inline double transform_log_jacobian(TransformKind k, double x) {
  switch (k) {
    case TransformKind::identity:
      return 0.0;
    case TransformKind::log_pos:
      if (!(x > 0.0)) throw ValidationError("log transform requires x > 0");
      return -std::log(x);
    case TransformKind::negated_logit:
      if (!(x > 0.0 && x < 1.0))
        throw ValidationError("negated_logit transform requires 0 < x < 1");
      return -std::log(x) - std::log1p(-x);
  }
  return 0.0;
}

}  // namespace scenrisk

#endif  // SCENRISK_TRANSFORMS_HPP
