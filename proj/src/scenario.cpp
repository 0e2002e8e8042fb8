#include "scenrisk/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "scenrisk/errors.hpp"

namespace scenrisk {
namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  for (;;) {
    std::size_t comma = line.find(',', pos);
    if (comma == std::string::npos) {
      out.push_back(trim(line.substr(pos)));
      break;
    }
    out.push_back(trim(line.substr(pos, comma - pos)));
    pos = comma + 1;
  }
  return out;
}

double parse_double(const std::string& field, const std::string& origin,
                    std::size_t lineno) {
  double value = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw ValidationError(origin + ":" + std::to_string(lineno) +
                          ": not a number: '" + field + "'");
  }
  return value;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Interval {
  double start, end;
};

// Merge overlapping or touching intervals in place.
void normalize(std::vector<Interval>& v) {
  std::sort(v.begin(), v.end(),
            [](const Interval& a, const Interval& b) { return a.start < b.start; });
  std::vector<Interval> merged;
  for (const auto& iv : v) {
    if (!merged.empty() && iv.start <= merged.back().end) {
      merged.back().end = std::max(merged.back().end, iv.end);
    } else {
      merged.push_back(iv);
    }
  }
  v = std::move(merged);
}

std::vector<Interval> intersect(const std::vector<Interval>& a,
                                const std::vector<Interval>& b) {
  std::vector<Interval> out;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const double lo = std::max(a[i].start, b[j].start);
    const double hi = std::min(a[i].end, b[j].end);
    if (lo <= hi) out.push_back({lo, hi});
    if (a[i].end < b[j].end) ++i; else ++j;
  }
  return out;
}

}  // namespace

std::size_t ScenarioSet::column(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return i;
  throw ValidationError("no such parameter: " + name);
}

ScenarioSet parse_scenarios_csv(const std::string& content, const std::string& origin) {
  ScenarioSet set;
  std::istringstream in(content);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto fields = split_fields(line);
    if (set.names.empty()) {
      for (const auto& f : fields) {
        if (f.empty())
          throw ValidationError(origin + ":" + std::to_string(lineno) +
                                ": empty parameter name in header");
      }
      set.names = fields;
      continue;
    }
    if (fields.size() != set.names.size()) {
      throw ValidationError(origin + ":" + std::to_string(lineno) + ": expected " +
                            std::to_string(set.names.size()) + " fields, got " +
                            std::to_string(fields.size()));
    }
    std::vector<double> row(fields.size());
    for (std::size_t i = 0; i < fields.size(); ++i) {
      row[i] = parse_double(fields[i], origin, lineno);
      if (!std::isfinite(row[i]))
        throw ValidationError(origin + ":" + std::to_string(lineno) +
                              ": non-finite value");
    }
    set.rows.push_back(std::move(row));
  }
  if (set.names.empty()) throw ValidationError(origin + ": missing header row");
  return set;
}

ScenarioSet load_scenarios_csv(const std::string& path) {
  return parse_scenarios_csv(read_file(path), path);
}

void save_scenarios_csv(const ScenarioSet& set, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write file: " + path);
  for (std::size_t i = 0; i < set.names.size(); ++i) {
    if (i) out << ',';
    out << set.names[i];
  }
  out << '\n';
  out.precision(17);
  for (const auto& row : set.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << row[i];
    }
    out << '\n';
  }
  if (!out) throw ValidationError("write failed: " + path);
}

std::vector<TagEvent> parse_tag_tracks_csv(const std::string& content,
                                           const std::string& origin) {
  std::istringstream in(content);
  std::string line;
  std::size_t lineno = 0;
  bool saw_header = false;
  std::vector<TagEvent> events;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto fields = split_fields(line);
    if (!saw_header) {
      if (fields.size() != 4 || fields[0] != "object_id" || fields[1] != "tag" ||
          fields[2] != "start" || fields[3] != "end") {
        throw ValidationError(origin + ":" + std::to_string(lineno) +
                              ": expected header object_id,tag,start,end");
      }
      saw_header = true;
      continue;
    }
    if (fields.size() != 4)
      throw ValidationError(origin + ":" + std::to_string(lineno) +
                            ": expected 4 fields, got " + std::to_string(fields.size()));
    TagEvent ev;
    ev.object_id = fields[0];
    ev.tag = fields[1];
    ev.start = parse_double(fields[2], origin, lineno);
    ev.end = parse_double(fields[3], origin, lineno);
    if (ev.object_id.empty() || ev.tag.empty())
      throw ValidationError(origin + ":" + std::to_string(lineno) +
                            ": empty object_id or tag");
    if (!(ev.end >= ev.start))
      throw ValidationError(origin + ":" + std::to_string(lineno) +
                            ": interval end before start");
    events.push_back(std::move(ev));
  }
  if (!saw_header) throw ValidationError(origin + ": missing header row");
  return events;
}

std::vector<TagEvent> load_tag_tracks_csv(const std::string& path) {
  return parse_tag_tracks_csv(read_file(path), path);
}

std::vector<ScenarioSpan> mine_scenarios(const std::vector<TagEvent>& events,
                                         const MiningQuery& query) {
  if (query.phases.empty()) throw ValidationError("mining query has no phases");
  for (const auto& phase : query.phases)
    if (phase.empty()) throw ValidationError("mining query has an empty conjunction");
  if (!(query.slack >= 0.0)) throw ValidationError("mining slack must be >= 0");

  std::map<std::string, std::map<std::string, std::vector<Interval>>> by_object;
  for (const auto& ev : events)
    by_object[ev.object_id][ev.tag].push_back({ev.start, ev.end});

  std::vector<ScenarioSpan> spans;
  for (auto& [object_id, tags] : by_object) {
    for (auto& [tag, ivs] : tags) normalize(ivs);

    // Maximal intervals per phase where every tag of the conjunction holds.
    std::vector<std::vector<Interval>> phase_ivs;
    phase_ivs.reserve(query.phases.size());
    bool feasible = true;
    for (const auto& phase : query.phases) {
      auto it = tags.find(phase[0]);
      if (it == tags.end()) { feasible = false; break; }
      std::vector<Interval> cur = it->second;
      for (std::size_t t = 1; t < phase.size() && !cur.empty(); ++t) {
        auto jt = tags.find(phase[t]);
        if (jt == tags.end()) { cur.clear(); break; }
        cur = intersect(cur, jt->second);
      }
      if (cur.empty()) { feasible = false; break; }
      phase_ivs.push_back(std::move(cur));
    }
    if (!feasible) continue;

    // Chain phases: the next interval must start inside the previous one or
    // within `slack` after it. Track the earliest chain start reaching each
    // interval.
    constexpr double unreached = std::numeric_limits<double>::infinity();
    std::vector<double> best(phase_ivs[0].size());
    for (std::size_t i = 0; i < phase_ivs[0].size(); ++i)
      best[i] = phase_ivs[0][i].start;
    for (std::size_t m = 1; m < phase_ivs.size(); ++m) {
      std::vector<double> next(phase_ivs[m].size(), unreached);
      for (std::size_t j = 0; j < phase_ivs[m].size(); ++j) {
        const double s = phase_ivs[m][j].start;
        for (std::size_t i = 0; i < phase_ivs[m - 1].size(); ++i) {
          if (best[i] == unreached) continue;
          const Interval& prev = phase_ivs[m - 1][i];
          if (s >= prev.start && s <= prev.end + query.slack)
            next[j] = std::min(next[j], best[i]);
        }
      }
      best = std::move(next);
    }
    for (std::size_t j = 0; j < best.size(); ++j) {
      if (best[j] == unreached) continue;
      spans.push_back({object_id, best[j], phase_ivs.back()[j].end});
    }
  }

  // Drop spans contained in a longer span of the same object.
  std::sort(spans.begin(), spans.end(), [](const ScenarioSpan& a, const ScenarioSpan& b) {
    if (a.object_id != b.object_id) return a.object_id < b.object_id;
    if (a.start != b.start) return a.start < b.start;
    return a.end > b.end;
  });
  std::vector<ScenarioSpan> kept;
  for (const auto& s : spans) {
    bool contained = false;
    for (const auto& k : kept) {
      if (k.object_id == s.object_id && k.start <= s.start && s.end <= k.end) {
        contained = true;
        break;
      }
    }
    if (!contained) kept.push_back(s);
  }
  return kept;
}

ExposureEstimate exposure(std::size_t count, double hours) {
  if (!(hours > 0.0) || !std::isfinite(hours))
    throw ValidationError("exposure requires hours > 0");
  return {count, hours, static_cast<double>(count) / hours};
}

}  // namespace scenrisk
