#ifndef SCENRISK_SCENARIO_HPP
#define SCENRISK_SCENARIO_HPP

#include <cstddef>
#include <string>
#include <vector>

namespace scenrisk {

// A set of mined scenarios: one row per scenario, one named column per
// parameter. Rows are kept in file order.
struct ScenarioSet {
  std::vector<std::string> names;
  std::vector<std::vector<double>> rows;

  std::size_t dim() const { return names.size(); }
  std::size_t size() const { return rows.size(); }

  // Index of a named parameter; throws ValidationError if absent.
  std::size_t column(const std::string& name) const;
};

// CSV with a header row of parameter names and one numeric row per scenario.
ScenarioSet parse_scenarios_csv(const std::string& content, const std::string& origin);
ScenarioSet load_scenarios_csv(const std::string& path);
void save_scenarios_csv(const ScenarioSet& set, const std::string& path);

// One annotated interval of an object track: `tag` holds on [start, end].
struct TagEvent {
  std::string object_id;
  std::string tag;
  double start = 0.0;
  double end = 0.0;
};

// CSV with header object_id,tag,start,end.
std::vector<TagEvent> parse_tag_tracks_csv(const std::string& content,
                                           const std::string& origin);
std::vector<TagEvent> load_tag_tracks_csv(const std::string& path);

// An ordered sequence of tag conjunctions. A scenario is an object track
// segment where each conjunction holds in turn; the next phase must begin
// no later than `slack` seconds after the previous phase ends.
struct MiningQuery {
  std::vector<std::vector<std::string>> phases;
  double slack = 0.5;
};

struct ScenarioSpan {
  std::string object_id;
  double start = 0.0;
  double end = 0.0;
};

// Maximal non-contained spans matching the query, sorted by object then
// start time.
std::vector<ScenarioSpan> mine_scenarios(const std::vector<TagEvent>& events,
                                         const MiningQuery& query);

// Occurrence rate of a scenario category over a recorded driving period.
struct ExposureEstimate {
  std::size_t count = 0;
  double hours = 0.0;
  double rate = 0.0;  // occurrences per hour
};

ExposureEstimate exposure(std::size_t count, double hours);

}  // namespace scenrisk

#endif  // SCENRISK_SCENARIO_HPP
