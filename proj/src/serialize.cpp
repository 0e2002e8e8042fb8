#include "scenrisk/serialize.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include "scenrisk/errors.hpp"

namespace scenrisk {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using nlohmann::json;

// Infinite endpoints are stored as null; JSON has no infinity literal.
json finite_or_null(double v) {
  if (std::isinf(v)) return nullptr;
  return v;
}

double number_or(const json& j, double when_null) {
  if (j.is_null()) return when_null;
  if (!j.is_number()) throw ValidationError("expected a number or null");
  return j.get<double>();
}

const json& require(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw ValidationError(std::string("missing field: ") + key);
  return *it;
}

}  // namespace

json kde_to_json(const KdeModel& model) {
  json j;
  j["type"] = "kde";
  j["bandwidth"] = model.bandwidth();
  json transforms = json::array();
  for (auto k : model.transforms()) transforms.push_back(transform_name(k));
  j["transforms"] = std::move(transforms);
  j["standardization"] = {{"mean", model.mean()}, {"std", model.stddev()}};
  j["points"] = model.points_transformed();
  json regions = json::array();
  const auto& domains = model.domains();
  for (std::size_t d = 0; d < domains.size(); ++d) {
    if (std::isinf(domains[d].lower) && std::isinf(domains[d].upper)) continue;
    regions.push_back({{"dim", d},
                       {"lower", finite_or_null(domains[d].lower)},
                       {"upper", finite_or_null(domains[d].upper)}});
  }
  j["zero_regions"] = std::move(regions);
  return j;
}

KdeModel kde_from_json(const json& j) {
  if (!j.is_object() || require(j, "type") != "kde")
    throw ValidationError("not a serialized density");
  std::vector<TransformKind> transforms;
  for (const auto& name : require(j, "transforms"))
    transforms.push_back(transform_from_name(name.get<std::string>()));
  const std::size_t d = transforms.size();

  const json& st = require(j, "standardization");
  auto mean = require(st, "mean").get<std::vector<double>>();
  auto stddev = require(st, "std").get<std::vector<double>>();

  auto points = require(j, "points").get<std::vector<std::vector<double>>>();

  std::vector<Domain> domains;
  const json& regions = require(j, "zero_regions");
  if (!regions.empty()) {
    domains.assign(d, Domain{});
    for (const auto& r : regions) {
      const auto dim = require(r, "dim").get<std::size_t>();
      if (dim >= d) throw ValidationError("zero region names a dimension out of range");
      domains[dim].lower = number_or(require(r, "lower"), -kInf);
      domains[dim].upper = number_or(require(r, "upper"), kInf);
      if (!(domains[dim].lower < domains[dim].upper))
        throw ValidationError("zero region bounds are not ordered");
    }
  }
  return KdeModel::from_parts(std::move(points), std::move(transforms),
                              std::move(domains), std::move(mean), std::move(stddev),
                              require(j, "bandwidth").get<double>());
}

json gpd_to_json(const GpdFit& fit) {
  json j;
  j["type"] = "gpd";
  j["tail"] = fit.side == TailSide::upper ? "upper" : "lower";
  j["threshold"] = fit.u;
  j["xi"] = fit.xi;
  j["sigma"] = fit.sigma;
  j["n_exceed"] = fit.n_exceed;
  j["n_total"] = fit.n_total;
  j["exceed_prob"] = fit.exceed_prob;
  j["truncation"] = finite_or_null(fit.y_max);
  return j;
}

GpdFit gpd_from_json(const json& j) {
  if (!j.is_object() || require(j, "type") != "gpd")
    throw ValidationError("not a serialized tail fit");
  GpdFit fit;
  const auto tail = require(j, "tail").get<std::string>();
  if (tail == "upper")
    fit.side = TailSide::upper;
  else if (tail == "lower")
    fit.side = TailSide::lower;
  else
    throw ValidationError("tail must be 'upper' or 'lower'");
  fit.u = require(j, "threshold").get<double>();
  fit.xi = require(j, "xi").get<double>();
  fit.sigma = require(j, "sigma").get<double>();
  fit.n_exceed = require(j, "n_exceed").get<std::size_t>();
  fit.n_total = require(j, "n_total").get<std::size_t>();
  fit.exceed_prob = require(j, "exceed_prob").get<double>();
  fit.y_max = number_or(require(j, "truncation"), kInf);
  if (!(fit.sigma > 0.0)) throw ValidationError("scale must be positive");
  if (!(fit.exceed_prob > 0.0 && fit.exceed_prob <= 1.0))
    throw ValidationError("exceedance probability outside (0, 1]");
  return fit;
}

json load_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ValidationError(path + ": " + e.what());
  }
  return j;
}

void save_json_file(const json& j, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write file: " + path);
  out << j.dump(2) << '\n';
  if (!out) throw ValidationError("write failed: " + path);
}

}  // namespace scenrisk
