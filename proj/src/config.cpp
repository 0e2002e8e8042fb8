#include "scenrisk/config.hpp"

#include <cmath>
#include <set>

#include <json.hpp>

#include "scenrisk/errors.hpp"
#include "scenrisk/serialize.hpp"
#include "scenrisk/util.hpp"

namespace scenrisk {
namespace {

using nlohmann::json;

// Pulls section[key] into `out` if present, tracking consumed keys.
void take(const json& section, std::set<std::string>& seen, const char* key,
          double& out) {
  auto it = section.find(key);
  if (it == section.end()) return;
  seen.insert(key);
  if (it->is_null()) {
    out = std::numeric_limits<double>::infinity();  // null lifts a cap
    return;
  }
  if (!it->is_number()) throw ValidationError(std::string(key) + " must be a number");
  out = it->get<double>();
}

void take(const json& section, std::set<std::string>& seen, const char* key,
          std::size_t& out) {
  auto it = section.find(key);
  if (it == section.end()) return;
  seen.insert(key);
  if (!it->is_number_unsigned())
    throw ValidationError(std::string(key) + " must be a non-negative integer");
  out = it->get<std::size_t>();
}

void reject_unknown(const json& section, const std::set<std::string>& seen,
                    const std::string& where) {
  for (auto it = section.begin(); it != section.end(); ++it)
    if (!seen.count(it.key()))
      throw ValidationError("unknown config key: " + where + "." + it.key());
}

void check_positive(double v, const char* what) {
  if (!(v > 0.0)) throw ValidationError(std::string(what) + " must be positive");
}

}  // namespace

ToolkitConfig load_config(const std::string& path) {
  ToolkitConfig cfg;
  const json root = load_json_file(path);
  if (!root.is_object()) throw ValidationError(path + ": config must be a JSON object");

  std::set<std::string> sections;
  if (auto it = root.find("idm"); it != root.end()) {
    sections.insert("idm");
    std::set<std::string> seen;
    take(*it, seen, "a_max", cfg.idm.a_max);
    take(*it, seen, "b_comf", cfg.idm.b_comf);
    take(*it, seen, "delta", cfg.idm.delta);
    take(*it, seen, "s0", cfg.idm.s0);
    take(*it, seen, "headway", cfg.idm.headway);
    take(*it, seen, "brake_cap", cfg.idm.brake_cap);
    take(*it, seen, "perception_range", cfg.idm.perception_range);
    reject_unknown(*it, seen, "idm");
  }
  if (auto it = root.find("delay"); it != root.end()) {
    sections.insert("delay");
    std::set<std::string> seen;
    take(*it, seen, "mean", cfg.delay.mean);
    take(*it, seen, "stddev", cfg.delay.stddev);
    reject_unknown(*it, seen, "delay");
  }
  if (auto it = root.find("sim"); it != root.end()) {
    sections.insert("sim");
    std::set<std::string> seen;
    take(*it, seen, "dt", cfg.sim.dt);
    take(*it, seen, "horizon", cfg.sim.horizon);
    reject_unknown(*it, seen, "sim");
  }
  if (auto it = root.find("kde"); it != root.end()) {
    sections.insert("kde");
    std::set<std::string> seen;
    take(*it, seen, "bandwidth", cfg.kde.bandwidth);
    take(*it, seen, "span", cfg.kde.span);
    take(*it, seen, "tol", cfg.kde.tol);
    reject_unknown(*it, seen, "kde");
  }
  if (auto it = root.find("evt"); it != root.end()) {
    sections.insert("evt");
    std::set<std::string> seen;
    take(*it, seen, "exceed_fraction", cfg.evt_exceed_fraction);
    reject_unknown(*it, seen, "evt");
  }
  if (auto it = root.find("sequential"); it != root.end()) {
    sections.insert("sequential");
    std::set<std::string> seen;
    take(*it, seen, "p_t", cfg.sequential.p_t);
    take(*it, seen, "delta", cfg.sequential.delta);
    take(*it, seen, "max_runs", cfg.sequential.max_runs);
    reject_unknown(*it, seen, "sequential");
  }
  for (auto it = root.begin(); it != root.end(); ++it)
    if (!sections.count(it.key()))
      throw ValidationError("unknown config section: " + it.key());

  check_positive(cfg.idm.a_max, "idm.a_max");
  check_positive(cfg.idm.b_comf, "idm.b_comf");
  check_positive(cfg.idm.delta, "idm.delta");
  check_positive(cfg.idm.s0, "idm.s0");
  if (!(cfg.idm.headway >= 0.0)) throw ValidationError("idm.headway must be >= 0");
  check_positive(cfg.idm.brake_cap, "idm.brake_cap");
  check_positive(cfg.idm.perception_range, "idm.perception_range");
  check_positive(cfg.delay.mean, "delay.mean");
  if (!(cfg.delay.stddev >= 0.0)) throw ValidationError("delay.stddev must be >= 0");
  check_positive(cfg.sim.dt, "sim.dt");
  if (!(cfg.sim.horizon > cfg.sim.dt))
    throw ValidationError("sim.horizon must exceed sim.dt");
  if (cfg.kde.bandwidth != 0.0) check_positive(cfg.kde.bandwidth, "kde.bandwidth");
  if (!(cfg.kde.span > 1.0)) throw ValidationError("kde.span must exceed 1");
  check_positive(cfg.kde.tol, "kde.tol");
  if (!(cfg.evt_exceed_fraction > 0.0 && cfg.evt_exceed_fraction < 1.0))
    throw ValidationError("evt.exceed_fraction must lie in (0, 1)");
  if (!(cfg.sequential.p_t > 0.0 && cfg.sequential.p_t < 1.0))
    throw ValidationError("sequential.p_t must lie in (0, 1)");
  if (!(cfg.sequential.delta > 0.0 && cfg.sequential.delta < 0.5))
    throw ValidationError("sequential.delta must lie in (0, 0.5)");
  if (cfg.sequential.max_runs == 0)
    throw ValidationError("sequential.max_runs must be positive");
  return cfg;
}

std::string config_canonical(const ToolkitConfig& cfg) {
  auto num = [](double v) -> json {
    if (std::isinf(v)) return nullptr;
    return v;
  };
  json j;
  j["idm"] = {{"a_max", cfg.idm.a_max},
              {"b_comf", cfg.idm.b_comf},
              {"delta", cfg.idm.delta},
              {"s0", cfg.idm.s0},
              {"headway", cfg.idm.headway},
              {"brake_cap", num(cfg.idm.brake_cap)},
              {"perception_range", cfg.idm.perception_range}};
  j["delay"] = {{"mean", cfg.delay.mean}, {"stddev", cfg.delay.stddev}};
  j["sim"] = {{"dt", cfg.sim.dt}, {"horizon", cfg.sim.horizon}};
  j["kde"] = {{"bandwidth", cfg.kde.bandwidth},
              {"span", cfg.kde.span},
              {"tol", cfg.kde.tol}};
  j["evt"] = {{"exceed_fraction", cfg.evt_exceed_fraction}};
  j["sequential"] = {{"p_t", cfg.sequential.p_t},
                     {"delta", cfg.sequential.delta},
                     {"max_runs", cfg.sequential.max_runs}};
  return j.dump();
}

std::string config_digest(const ToolkitConfig& cfg) {
  return hex64(fnv1a64(config_canonical(cfg)));
}

}  // namespace scenrisk
