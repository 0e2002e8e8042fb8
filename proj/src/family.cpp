#include "scenrisk/family.hpp"

#include <limits>

#include "scenrisk/errors.hpp"

namespace scenrisk {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

const std::vector<FamilyInfo>& registry() {
  static const std::vector<FamilyInfo> infos = {
      {Family::lvd,
       "lvd",
       {"v0", "dv_ratio", "decel"},
       {TransformKind::identity, TransformKind::negated_logit, TransformKind::log_pos},
       {{0.0, kInf}, {0.0, 1.0}, {0.0, kInf}},
       {{{"leading vehicle", "decelerating"}}, 0.5}},
      {Family::cutin,
       "cutin",
       {"v0", "speed_ratio", "gap"},
       {TransformKind::identity, TransformKind::identity, TransformKind::log_pos},
       {{0.0, kInf}, {0.0, kInf}, {0.0, kInf}},
       {{{"changing lane", "no leading vehicle"}, {"changing lane", "leading vehicle"}},
        0.5}},
      {Family::asv,
       "asv",
       {"v0", "speed_ratio"},
       {TransformKind::identity, TransformKind::identity},
       {{0.0, kInf}, {0.0, 1.0}},
       {{{"leading vehicle", "driving slower"}}, 0.5}},
  };
  return infos;
}

}  // namespace

const FamilyInfo& family_info(Family f) {
  for (const auto& info : registry())
    if (info.family == f) return info;
  throw ValidationError("unknown scenario family");
}

Family family_from_name(const std::string& name) {
  for (const auto& info : registry())
    if (info.name == name) return info.family;
  throw ValidationError("unknown scenario family: " + name);
}

const std::vector<Family>& all_families() {
  static const std::vector<Family> fams = {Family::lvd, Family::cutin, Family::asv};
  return fams;
}

}  // namespace scenrisk
