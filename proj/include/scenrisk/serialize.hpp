#ifndef SCENRISK_SERIALIZE_HPP
#define SCENRISK_SERIALIZE_HPP

#include <string>

#include <json.hpp>

#include "scenrisk/evt.hpp"
#include "scenrisk/kde.hpp"

namespace scenrisk {

// Density serialization: points are stored after the transforms but before
// standardization; the standardization and bandwidth are stored alongside,
// so a reloaded model evaluates identically.
nlohmann::json kde_to_json(const KdeModel& model);
KdeModel kde_from_json(const nlohmann::json& j);

// Tail fit serialization. The underlying sample is deliberately not
// stored; a reloaded fit can only solve above its threshold.
nlohmann::json gpd_to_json(const GpdFit& fit);
GpdFit gpd_from_json(const nlohmann::json& j);

nlohmann::json load_json_file(const std::string& path);
void save_json_file(const nlohmann::json& j, const std::string& path);

}  // namespace scenrisk

#endif  // SCENRISK_SERIALIZE_HPP
