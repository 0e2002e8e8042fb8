#ifndef SCENRISK_FAMILY_HPP
#define SCENRISK_FAMILY_HPP

#include <string>
#include <vector>

#include "scenrisk/kde.hpp"
#include "scenrisk/scenario.hpp"
#include "scenrisk/transforms.hpp"

namespace scenrisk {

// Built-in scenario families. Parameters:
//   lvd:   v0 [m/s], dv_ratio = speed drop / v0 in (0,1), decel [m/s^2]
//   cutin: v0 [m/s], speed_ratio = cut-in speed / v0, gap [m]
//   asv:   v0 [m/s], speed_ratio = lead speed / v0 in [0,1)
enum class Family { lvd, cutin, asv };

struct FamilyInfo {
  Family family;
  std::string name;
  std::vector<std::string> param_names;
  std::vector<TransformKind> transforms;
  std::vector<Domain> domains;
  MiningQuery default_query;
};

const FamilyInfo& family_info(Family f);
Family family_from_name(const std::string& name);
const std::vector<Family>& all_families();

}  // namespace scenrisk

#endif  // SCENRISK_FAMILY_HPP
