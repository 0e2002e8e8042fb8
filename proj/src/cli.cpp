#include "scenrisk/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "scenrisk/config.hpp"
#include "scenrisk/errors.hpp"
#include "scenrisk/family.hpp"
#include "scenrisk/foreseeable.hpp"
#include "scenrisk/preventable.hpp"
#include "scenrisk/scenario.hpp"
#include "scenrisk/serialize.hpp"
#include "scenrisk/util.hpp"

namespace scenrisk {
namespace {

using nlohmann::json;

struct Context {
  ToolkitConfig cfg;
  std::uint64_t seed = 1;
  std::string out_dir = ".";
  int threads = 1;
};

json finite_or_null(double v) {
  if (std::isinf(v) || std::isnan(v)) return nullptr;
  return v;
}

std::string out_path(const Context& ctx, const std::string& name) {
  std::filesystem::create_directories(ctx.out_dir);
  return (std::filesystem::path(ctx.out_dir) / name).string();
}

json report_envelope(const Context& ctx, const std::string& command) {
  json j;
  j["tool"] = "scenrisk";
  j["version"] = kToolkitVersion;
  j["command"] = command;
  j["config_digest"] = config_digest(ctx.cfg);
  j["seed"] = ctx.seed;
  return j;
}

// "a+b+c" -> conjunction of tags a, b, c.
std::vector<std::string> parse_conjunction(const std::string& phase) {
  std::vector<std::string> tags;
  std::size_t pos = 0;
  for (;;) {
    const std::size_t plus = phase.find('+', pos);
    const std::string tag =
        phase.substr(pos, plus == std::string::npos ? std::string::npos : plus - pos);
    if (tag.empty()) throw ValidationError("empty tag in phase: '" + phase + "'");
    tags.push_back(tag);
    if (plus == std::string::npos) break;
    pos = plus + 1;
  }
  return tags;
}

std::vector<double> parse_number_list(const std::string& text, const char* what) {
  std::vector<double> values;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = text.find(',', pos);
    const std::string field =
        text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    try {
      std::size_t used = 0;
      values.push_back(std::stod(field, &used));
      if (used != field.size()) throw std::invalid_argument(field);
    } catch (const std::exception&) {
      throw ValidationError(std::string(what) + ": not a number: '" + field + "'");
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return values;
}

// "name=lo:hi:count" (inclusive linspace) or "name=v1,v2,...".
std::pair<std::string, std::vector<double>> parse_axis(const std::string& text) {
  const std::size_t eq = text.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ValidationError("axis must look like name=lo:hi:count or name=v1,v2,...: '" +
                          text + "'");
  const std::string name = text.substr(0, eq);
  const std::string rhs = text.substr(eq + 1);
  if (rhs.find(':') != std::string::npos) {
    const std::size_t c1 = rhs.find(':');
    const std::size_t c2 = rhs.find(':', c1 + 1);
    if (c2 == std::string::npos)
      throw ValidationError("axis range needs lo:hi:count: '" + text + "'");
    const double lo = parse_number_list(rhs.substr(0, c1), "axis").front();
    const double hi = parse_number_list(rhs.substr(c1 + 1, c2 - c1 - 1), "axis").front();
    const double count_d = parse_number_list(rhs.substr(c2 + 1), "axis").front();
    const auto count = static_cast<std::size_t>(count_d);
    if (count_d != static_cast<double>(count) || count == 0)
      throw ValidationError("axis count must be a positive integer: '" + text + "'");
    std::vector<double> values(count);
    if (count == 1) {
      values[0] = lo;
    } else {
      for (std::size_t i = 0; i < count; ++i)
        values[i] = lo + (hi - lo) * static_cast<double>(i) /
                             static_cast<double>(count - 1);
    }
    return {name, values};
  }
  return {name, parse_number_list(rhs, "axis")};
}

DimPolicy parse_policy(const std::string& text) {
  const std::size_t colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  DimPolicy p;
  if (kind == "expand_both")
    p.policy = ExpansionPolicy::expand_both;
  else if (kind == "expand_lower")
    p.policy = ExpansionPolicy::expand_lower;
  else if (kind == "expand_upper")
    p.policy = ExpansionPolicy::expand_upper;
  else if (kind == "fixed_lower")
    p.policy = ExpansionPolicy::fixed_lower;
  else if (kind == "fixed_upper")
    p.policy = ExpansionPolicy::fixed_upper;
  else
    throw ValidationError("unknown expansion policy: '" + kind + "'");
  if (p.policy == ExpansionPolicy::fixed_lower ||
      p.policy == ExpansionPolicy::fixed_upper) {
    if (colon == std::string::npos)
      throw ValidationError("policy '" + kind + "' needs an anchor: " + kind +
                            ":VALUE");
    p.anchor = parse_number_list(text.substr(colon + 1), "policy anchor").front();
  } else if (colon != std::string::npos) {
    throw ValidationError("policy '" + kind + "' takes no anchor");
  }
  return p;
}

// Scenario rows reordered to the family's parameter order.
std::vector<std::vector<double>> rows_for_family(const ScenarioSet& set,
                                                 const FamilyInfo& info) {
  std::vector<std::size_t> cols;
  cols.reserve(info.param_names.size());
  for (const auto& name : info.param_names) cols.push_back(set.column(name));
  std::vector<std::vector<double>> rows;
  rows.reserve(set.size());
  for (const auto& row : set.rows) {
    std::vector<double> r(cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j) r[j] = row[cols[j]];
    rows.push_back(std::move(r));
  }
  return rows;
}

double resolve_exposure_rate(double rate, std::size_t count, double hours) {
  const bool has_rate = rate > 0.0;
  const bool has_counts = hours > 0.0;
  if (has_rate == has_counts)
    throw ValidationError(
        "give either --exposure-rate or both --count and --hours");
  if (has_rate) return rate;
  return exposure(count, hours).rate;
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::below: return "below";
    case Verdict::above: return "above";
    case Verdict::undecided: return "undecided";
  }
  return "undecided";
}

// ---- subcommand handlers ----

int cmd_mine(const Context& ctx, const std::string& tracks_path,
             const std::vector<std::string>& phases, const std::string& family_name,
             double slack, std::size_t count_override, double hours) {
  const auto events = load_tag_tracks_csv(tracks_path);
  MiningQuery query;
  if (!phases.empty()) {
    for (const auto& p : phases) query.phases.push_back(parse_conjunction(p));
  } else if (!family_name.empty()) {
    query = family_info(family_from_name(family_name)).default_query;
  } else {
    throw ValidationError("give at least one --phase or a --family");
  }
  query.slack = slack;
  const auto spans = mine_scenarios(events, query);

  const std::string spans_path = out_path(ctx, "mine_spans.csv");
  {
    std::ofstream out(spans_path, std::ios::binary);
    if (!out) throw ValidationError("cannot write file: " + spans_path);
    out << "object_id,start,end\n";
    out.precision(17);
    for (const auto& s : spans)
      out << s.object_id << ',' << s.start << ',' << s.end << '\n';
  }

  json report = report_envelope(ctx, "mine");
  report["inputs"] = {{"tracks", tracks_path}};
  json jq = json::array();
  for (const auto& phase : query.phases) jq.push_back(phase);
  report["query"] = {{"phases", jq}, {"slack", query.slack}};
  report["spans"] = spans.size();
  report["files"] = {{"spans", spans_path}};
  if (hours > 0.0) {
    const std::size_t n = count_override > 0 ? count_override : spans.size();
    const auto exp = exposure(n, hours);
    report["exposure"] = {{"count", exp.count},
                          {"hours", exp.hours},
                          {"rate_per_hour", exp.rate},
                          {"rate_display", format_significant(exp.rate, 3)}};
  } else {
    report["exposure"] = nullptr;
  }
  save_json_file(report, out_path(ctx, "mine_report.json"));
  std::cout << "mined " << spans.size() << " scenario spans\n";
  return 0;
}

int cmd_foreseeable_kde(const Context& ctx, const std::string& scenarios_path,
                        const std::string& family_name,
                        const std::vector<std::string>& policy_texts,
                        double exposure_rate, std::size_t count, double hours,
                        double lambda, double bandwidth_override) {
  const auto& info = family_info(family_from_name(family_name));
  const auto set = load_scenarios_csv(scenarios_path);
  const auto rows = rows_for_family(set, info);

  KdeFitOptions fit_opts = ctx.cfg.kde;
  if (bandwidth_override > 0.0) fit_opts.bandwidth = bandwidth_override;
  const KdeModel model = KdeModel::fit(rows, info.transforms, info.domains, fit_opts);

  std::vector<DimPolicy> policies;
  for (const auto& text : policy_texts) policies.push_back(parse_policy(text));

  const double rate = resolve_exposure_rate(exposure_rate, count, hours);
  const ForeseeableRange range = solve_range_kde(model, policies, rate, lambda);

  const std::string model_path = out_path(ctx, "foreseeable_kde_model.json");
  save_json_file(kde_to_json(model), model_path);

  json report = report_envelope(ctx, "foreseeable-kde");
  report["inputs"] = {{"scenarios", scenarios_path}, {"family", info.name}};
  report["exposure_rate_per_hour"] = rate;
  report["lambda_per_hour"] = lambda;
  report["target_prob"] = range.target_prob;
  report["achieved_prob"] = range.achieved_prob;
  report["residual_rate_per_hour"] = range.residual_rate;
  report["bandwidth"] = model.bandwidth();
  report["n_points"] = model.size();
  json jr = json::array();
  for (std::size_t j = 0; j < model.dim(); ++j) {
    jr.push_back({{"name", info.param_names[j]},
                  {"lower", finite_or_null(range.lower[j])},
                  {"upper", finite_or_null(range.upper[j])},
                  {"extrapolated_lower", static_cast<bool>(range.extrapolated_lower[j])},
                  {"extrapolated_upper", static_cast<bool>(range.extrapolated_upper[j])}});
  }
  report["range"] = std::move(jr);
  report["files"] = {{"model", model_path}};
  save_json_file(report, out_path(ctx, "foreseeable_kde_report.json"));

  for (std::size_t j = 0; j < model.dim(); ++j) {
    std::cout << info.param_names[j] << ": [" << range.lower[j] << ", "
              << range.upper[j] << "]";
    if (range.extrapolated_lower[j] || range.extrapolated_upper[j])
      std::cout << "  (beyond observed data)";
    std::cout << "\n";
  }
  return 0;
}

int cmd_foreseeable_evt(const Context& ctx, const std::string& fit_path,
                        const std::string& scenarios_path, const std::string& param,
                        const std::string& tail, double threshold, bool has_threshold,
                        double support_end, bool has_support_end,
                        double exceed_fraction_override, double exposure_rate,
                        std::size_t count, double hours, double lambda) {
  GpdFit fit;
  std::string fit_file;
  if (!fit_path.empty()) {
    if (!scenarios_path.empty())
      throw ValidationError("give either --fit or --scenarios, not both");
    fit = gpd_from_json(load_json_file(fit_path));
  } else {
    if (scenarios_path.empty())
      throw ValidationError("give either --fit or --scenarios");
    if (param.empty()) throw ValidationError("--scenarios needs --param");
    const auto set = load_scenarios_csv(scenarios_path);
    const std::size_t col = set.column(param);
    std::vector<double> sample(set.size());
    for (std::size_t i = 0; i < set.size(); ++i) sample[i] = set.rows[i][col];
    TailSide side;
    if (tail == "upper")
      side = TailSide::upper;
    else if (tail == "lower")
      side = TailSide::lower;
    else
      throw ValidationError("--tail must be 'upper' or 'lower'");
    const double end = has_support_end ? support_end
                                       : std::numeric_limits<double>::infinity();
    const double fraction = exceed_fraction_override > 0.0
                                ? exceed_fraction_override
                                : ctx.cfg.evt_exceed_fraction;
    fit = has_threshold ? fit_pot_threshold(sample, side, threshold, end)
                        : fit_pot(sample, side, fraction, end);
    fit_file = out_path(ctx, "foreseeable_evt_fit.json");
    save_json_file(gpd_to_json(fit), fit_file);
  }

  const double rate = resolve_exposure_rate(exposure_rate, count, hours);
  const EvtRange range = solve_range_evt(fit, rate, lambda);

  json report = report_envelope(ctx, "foreseeable-evt");
  json inputs;
  if (!fit_path.empty()) inputs["fit"] = fit_path;
  if (!scenarios_path.empty()) {
    inputs["scenarios"] = scenarios_path;
    inputs["param"] = param;
  }
  report["inputs"] = std::move(inputs);
  report["fit"] = gpd_to_json(fit);
  report["exposure_rate_per_hour"] = rate;
  report["lambda_per_hour"] = lambda;
  report["target_prob"] = range.target_prob;
  report["bound"] = range.bound;
  report["bound_oriented"] = range.bound_oriented;
  report["used_empirical"] = range.used_empirical;
  if (!fit_file.empty()) report["files"] = {{"fit", fit_file}};
  save_json_file(report, out_path(ctx, "foreseeable_evt_report.json"));

  std::cout << "bound: " << range.bound
            << (range.used_empirical ? " (empirical, below threshold)" : "") << "\n";
  return 0;
}

int cmd_preventable_category(const Context& ctx, const std::string& scenarios_path,
                             const std::string& family_name, const std::string& method,
                             std::size_t n, std::size_t n_pilot,
                             double critical_fraction) {
  const Family family = family_from_name(family_name);
  const auto& info = family_info(family);
  const auto set = load_scenarios_csv(scenarios_path);
  const auto rows = rows_for_family(set, info);
  const KdeModel model = KdeModel::fit(rows, info.transforms, info.domains, ctx.cfg.kde);
  const RunFn run = make_family_run(family, ctx.cfg.idm, ctx.cfg.delay, ctx.cfg.sim);

  json report = report_envelope(ctx, "preventable-category");
  report["inputs"] = {{"scenarios", scenarios_path}, {"family", info.name}};
  report["method"] = method;

  if (method == "crude") {
    McOptions opts;
    opts.n = n;
    opts.seed = ctx.seed;
    opts.threads = ctx.threads;
    const McEstimate est = run_crude(model, run, opts);
    report["estimate"] = {{"mean", est.mean},
                          {"se", est.se},
                          {"n", est.n},
                          {"collisions", est.collisions}};
    std::cout << "collision probability: " << est.mean << " (se " << est.se << ")\n";
  } else if (method == "is") {
    IsOptions opts;
    opts.n = n;
    opts.n_pilot = n_pilot;
    opts.critical_fraction = critical_fraction;
    opts.seed = ctx.seed;
    opts.threads = ctx.threads;
    opts.proposal_fit = ctx.cfg.kde;
    const IsEstimate est = run_importance(model, run, opts);
    report["estimate"] = {{"mean", est.estimate.mean},
                          {"se", est.estimate.se},
                          {"n", est.estimate.n},
                          {"collisions", est.estimate.collisions}};
    report["n_pilot"] = opts.n_pilot;
    report["n_critical"] = est.n_critical;
    report["max_weight"] = est.max_weight;
    std::cout << "collision probability: " << est.estimate.mean << " (se "
              << est.estimate.se << ")\n";
  } else {
    throw ValidationError("--method must be 'crude' or 'is'");
  }
  save_json_file(report, out_path(ctx, "preventable_category_report.json"));
  return 0;
}

int cmd_preventable_grid(const Context& ctx, const std::string& family_name,
                         const std::vector<std::string>& axis_texts, double p_t,
                         double delta, std::size_t max_runs) {
  const Family family = family_from_name(family_name);
  const auto& info = family_info(family);
  if (axis_texts.size() != info.param_names.size())
    throw ValidationError(info.name + " grid needs one --axis per parameter (" +
                          std::to_string(info.param_names.size()) + ")");
  std::vector<std::vector<double>> axes(info.param_names.size());
  std::vector<bool> covered(info.param_names.size(), false);
  for (const auto& text : axis_texts) {
    auto [name, values] = parse_axis(text);
    bool found = false;
    for (std::size_t j = 0; j < info.param_names.size(); ++j) {
      if (info.param_names[j] == name) {
        if (covered[j]) throw ValidationError("axis given twice: " + name);
        axes[j] = std::move(values);
        covered[j] = true;
        found = true;
        break;
      }
    }
    if (!found)
      throw ValidationError("family " + info.name + " has no parameter '" + name + "'");
  }

  SequentialOptions seq = ctx.cfg.sequential;
  if (p_t > 0.0) seq.p_t = p_t;
  if (delta > 0.0) seq.delta = delta;
  if (max_runs > 0) seq.max_runs = max_runs;

  const auto cells = preventable_grid(family, axes, ctx.cfg.idm, ctx.cfg.delay,
                                      ctx.cfg.sim, seq, ctx.seed, ctx.threads);

  const std::string grid_path = out_path(ctx, "preventable_grid.csv");
  {
    std::ofstream out(grid_path, std::ios::binary);
    if (!out) throw ValidationError("cannot write file: " + grid_path);
    for (const auto& name : info.param_names) out << name << ',';
    out << "verdict,runs,collisions\n";
    out.precision(17);
    for (const auto& cell : cells) {
      for (double v : cell.theta) out << v << ',';
      out << verdict_name(cell.verdict) << ',' << cell.runs << ',' << cell.collisions
          << '\n';
    }
  }

  std::size_t below = 0, above = 0, undecided = 0;
  for (const auto& cell : cells) {
    if (cell.verdict == Verdict::below) ++below;
    else if (cell.verdict == Verdict::above) ++above;
    else ++undecided;
  }

  json report = report_envelope(ctx, "preventable-grid");
  report["family"] = info.name;
  report["sequential"] = {{"p_t", seq.p_t}, {"delta", seq.delta},
                          {"max_runs", seq.max_runs}};
  report["cells"] = cells.size();
  report["below"] = below;
  report["above"] = above;
  report["undecided"] = undecided;
  report["files"] = {{"grid", grid_path}};
  save_json_file(report, out_path(ctx, "preventable_grid_report.json"));

  std::cout << cells.size() << " cells: " << below << " below, " << above
            << " above, " << undecided << " undecided\n";
  return 0;
}

int cmd_simulate(const Context& ctx, const std::string& family_name,
                 const std::string& theta_text, double delay, bool has_delay,
                 const std::string& trace_path) {
  const Family family = family_from_name(family_name);
  const ScenarioSpec spec{family, parse_number_list(theta_text, "--theta")};

  double tau = delay;
  if (!has_delay) {
    Rng rng(derive_seed(ctx.seed, 0));
    tau = sample_reaction_delay(ctx.cfg.delay, rng);
  }

  std::vector<TraceRow> trace;
  const SimResult res = simulate(spec, tau, ctx.cfg.idm, ctx.cfg.sim,
                                 trace_path.empty() ? nullptr : &trace);

  if (!trace_path.empty()) {
    std::ofstream out(trace_path, std::ios::binary);
    if (!out) throw ValidationError("cannot write file: " + trace_path);
    out << "t,ego_pos,ego_speed,lead_pos,lead_speed,gap\n";
    out.precision(17);
    for (const auto& r : trace)
      out << r.t << ',' << r.ego_pos << ',' << r.ego_speed << ',' << r.lead_pos << ','
          << r.lead_speed << ',' << r.gap << '\n';
  }

  json report = report_envelope(ctx, "simulate");
  report["family"] = family_info(family).name;
  report["theta"] = spec.theta;
  report["reaction_delay"] = tau;
  report["collision"] = res.collision;
  report["collision_time"] = finite_or_null(res.collision_time);
  report["min_ttc"] = finite_or_null(res.min_ttc);
  report["min_gap"] = finite_or_null(res.min_gap);
  report["final_gap"] = finite_or_null(res.final_gap);
  if (!trace_path.empty()) report["files"] = {{"trace", trace_path}};
  save_json_file(report, out_path(ctx, "simulate_report.json"));

  std::cout << (res.collision ? "collision" : "no collision");
  if (res.collision)
    std::cout << " at t=" << res.collision_time;
  else
    std::cout << ", min ttc " << res.min_ttc;
  std::cout << "\n";
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"statistical risk quantification for driving scenario categories"};
  app.set_version_flag("--version", std::string(kToolkitVersion));
  app.require_subcommand(1);
  // Global options (--out, --seed, ...) may appear after the subcommand.
  app.fallthrough();

  std::string config_path, out_dir = ".";
  std::uint64_t seed = 1;
  int threads = 1;
  bool json_errors = false;
  app.add_option("--config", config_path, "JSON configuration file")
      ->envname("SCENRISK_CONFIG");
  app.add_option("--seed", seed, "base seed for all randomized work");
  app.add_option("--out", out_dir, "directory for reports and output files");
  app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--json-errors", json_errors, "emit errors as JSON on stderr");

  // mine
  auto* mine = app.add_subcommand("mine", "mine tagged tracks for scenario spans");
  std::string mine_tracks, mine_family;
  std::vector<std::string> mine_phases;
  double mine_slack = 0.5, mine_hours = 0.0;
  std::size_t mine_count = 0;
  mine->add_option("--tracks", mine_tracks, "tag tracks CSV")->required();
  mine->add_option("--phase", mine_phases,
                   "tag conjunction, tags joined by '+'; repeat per phase");
  mine->add_option("--family", mine_family, "use a built-in family's query");
  mine->add_option("--slack", mine_slack, "max gap between phases [s]");
  mine->add_option("--hours", mine_hours, "recorded hours, enables exposure");
  mine->add_option("--count", mine_count,
                   "exposure count override (default: mined spans)");

  // foreseeable-kde
  auto* fkde = app.add_subcommand("foreseeable-kde",
                                  "solve a foreseeable parameter range from a density");
  std::string fkde_scenarios, fkde_family;
  std::vector<std::string> fkde_policies;
  double fkde_rate = 0.0, fkde_hours = 0.0, fkde_lambda = 0.0, fkde_bw = 0.0;
  std::size_t fkde_count = 0;
  fkde->add_option("--scenarios", fkde_scenarios, "scenario parameters CSV")->required();
  fkde->add_option("--family", fkde_family, "scenario family")->required();
  fkde->add_option("--policy", fkde_policies,
                   "per-dimension expansion policy (expand_both, expand_lower, "
                   "expand_upper, fixed_lower:V, fixed_upper:V)");
  fkde->add_option("--exposure-rate", fkde_rate, "occurrences per hour");
  fkde->add_option("--count", fkde_count, "occurrence count (with --hours)");
  fkde->add_option("--hours", fkde_hours, "recorded hours (with --count)");
  fkde->add_option("--lambda", fkde_lambda, "admissible residual rate per hour")
      ->required();
  fkde->add_option("--bandwidth", fkde_bw, "fixed bandwidth (skip selection)");

  // foreseeable-evt
  auto* fevt = app.add_subcommand("foreseeable-evt",
                                  "solve a one-parameter bound from a tail fit");
  std::string fevt_fit, fevt_scenarios, fevt_param, fevt_tail = "upper";
  double fevt_threshold = 0.0, fevt_support_end = 0.0, fevt_fraction = 0.0;
  double fevt_rate = 0.0, fevt_hours = 0.0, fevt_lambda = 0.0;
  std::size_t fevt_count = 0;
  fevt->add_option("--fit", fevt_fit, "serialized tail fit JSON");
  fevt->add_option("--scenarios", fevt_scenarios, "scenario parameters CSV");
  fevt->add_option("--param", fevt_param, "parameter column to fit");
  fevt->add_option("--tail", fevt_tail, "which tail: upper or lower");
  auto* thr_opt = fevt->add_option("--threshold", fevt_threshold,
                                   "explicit threshold (raw units)");
  auto* end_opt = fevt->add_option("--support-end", fevt_support_end,
                                   "support boundary truncating the tail (raw units)");
  fevt->add_option("--exceed-fraction", fevt_fraction,
                   "exceedance fraction for threshold choice");
  fevt->add_option("--exposure-rate", fevt_rate, "occurrences per hour");
  fevt->add_option("--count", fevt_count, "occurrence count (with --hours)");
  fevt->add_option("--hours", fevt_hours, "recorded hours (with --count)");
  fevt->add_option("--lambda", fevt_lambda, "admissible residual rate per hour")
      ->required();

  // preventable-category
  auto* pcat = app.add_subcommand("preventable-category",
                                  "estimate the collision probability of a category");
  std::string pcat_scenarios, pcat_family, pcat_method = "crude";
  std::size_t pcat_n = 10000, pcat_pilot = 10000;
  double pcat_fraction = 0.1;
  pcat->add_option("--scenarios", pcat_scenarios, "scenario parameters CSV")->required();
  pcat->add_option("--family", pcat_family, "scenario family")->required();
  pcat->add_option("--method", pcat_method, "crude or is");
  pcat->add_option("--n", pcat_n, "estimation runs");
  pcat->add_option("--n-pilot", pcat_pilot, "pilot runs (is only)");
  pcat->add_option("--critical-fraction", pcat_fraction,
                   "pilot share used for the proposal (is only)");

  // preventable-grid
  auto* pgrid = app.add_subcommand("preventable-grid",
                                   "sequential verdicts over a parameter grid");
  std::string pgrid_family;
  std::vector<std::string> pgrid_axes;
  double pgrid_pt = 0.0, pgrid_delta = 0.0;
  std::size_t pgrid_max_runs = 0;
  pgrid->add_option("--family", pgrid_family, "scenario family")->required();
  pgrid->add_option("--axis", pgrid_axes,
                    "axis per parameter: name=lo:hi:count or name=v1,v2,...")
      ->required();
  pgrid->add_option("--p-t", pgrid_pt, "tested collision probability");
  pgrid->add_option("--delta", pgrid_delta, "decision error budget per side");
  pgrid->add_option("--max-runs", pgrid_max_runs, "run budget per cell");

  // simulate
  auto* sim = app.add_subcommand("simulate", "run one scenario");
  std::string sim_family, sim_theta, sim_trace;
  double sim_delay = 0.0;
  sim->add_option("--family", sim_family, "scenario family")->required();
  sim->add_option("--theta", sim_theta, "comma-separated parameters")->required();
  auto* delay_opt = sim->add_option("--delay", sim_delay,
                                    "fixed reaction delay [s] (default: sampled)");
  sim->add_option("--trace", sim_trace, "write a trajectory CSV to this path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    std::cout << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    std::cout << kToolkitVersion << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    if (json_errors) {
      json err = {{"error", {{"type", "validation"}, {"message", e.what()}}}};
      std::cerr << err.dump() << "\n";
    } else {
      std::cerr << "error: " << e.what() << "\n";
    }
    return 2;
  }

  auto emit_error = [&](const char* type, const std::string& message) {
    if (json_errors) {
      json err = {{"error", {{"type", type}, {"message", message}}}};
      std::cerr << err.dump() << "\n";
    } else {
      std::cerr << "error: " << message << "\n";
    }
  };

  try {
    Context ctx;
    if (!config_path.empty()) ctx.cfg = load_config(config_path);
    ctx.seed = seed;
    ctx.out_dir = out_dir;
    ctx.threads = threads;

    if (app.got_subcommand(mine))
      return cmd_mine(ctx, mine_tracks, mine_phases, mine_family, mine_slack,
                      mine_count, mine_hours);
    if (app.got_subcommand(fkde))
      return cmd_foreseeable_kde(ctx, fkde_scenarios, fkde_family, fkde_policies,
                                 fkde_rate, fkde_count, fkde_hours, fkde_lambda,
                                 fkde_bw);
    if (app.got_subcommand(fevt))
      return cmd_foreseeable_evt(ctx, fevt_fit, fevt_scenarios, fevt_param, fevt_tail,
                                 fevt_threshold, thr_opt->count() > 0, fevt_support_end,
                                 end_opt->count() > 0, fevt_fraction, fevt_rate,
                                 fevt_count, fevt_hours, fevt_lambda);
    if (app.got_subcommand(pcat))
      return cmd_preventable_category(ctx, pcat_scenarios, pcat_family, pcat_method,
                                      pcat_n, pcat_pilot, pcat_fraction);
    if (app.got_subcommand(pgrid))
      return cmd_preventable_grid(ctx, pgrid_family, pgrid_axes, pgrid_pt, pgrid_delta,
                                  pgrid_max_runs);
    if (app.got_subcommand(sim))
      return cmd_simulate(ctx, sim_family, sim_theta, sim_delay,
                          delay_opt->count() > 0, sim_trace);
    throw ValidationError("no subcommand given");
  } catch (const ValidationError& e) {
    emit_error("validation", e.what());
    return 2;
  } catch (const NumericError& e) {
    emit_error("numeric", e.what());
    return 3;
  } catch (const std::exception& e) {
    emit_error("internal", e.what());
    return 1;
  }
}

}  // namespace scenrisk
