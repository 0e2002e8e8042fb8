#ifndef SCENRISK_CONFIG_HPP
#define SCENRISK_CONFIG_HPP

#include <cstdint>
#include <string>

#include "scenrisk/driver_sim.hpp"
#include "scenrisk/kde.hpp"
#include "scenrisk/preventable.hpp"

namespace scenrisk {

// Resolved toolkit configuration: defaults overridden by an optional JSON
// file. The canonical form of the resolved values is digested into every
// report so results can be traced to the exact configuration.
struct ToolkitConfig {
  IdmParams idm;
  DelayModel delay;
  SimOptions sim;
  KdeFitOptions kde;
  double evt_exceed_fraction = 0.1;
  SequentialOptions sequential;
};

// Loads and validates a JSON config file over the defaults. Unknown keys
// are rejected.
ToolkitConfig load_config(const std::string& path);

// Canonical JSON of the resolved configuration (sorted keys, stable number
// formatting).
std::string config_canonical(const ToolkitConfig& cfg);

// FNV-1a digest of the canonical form, as 16 hex digits.
std::string config_digest(const ToolkitConfig& cfg);

}  // namespace scenrisk

#endif  // SCENRISK_CONFIG_HPP
