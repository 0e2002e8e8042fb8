#include "scenrisk/driver_sim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "scenrisk/errors.hpp"

namespace scenrisk {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Leader kinematics, exact in t. Negative t extrapolates backward at the
// initial speed, which is what a delayed perception of the scenario start
// sees.
struct LeadProfile {
  double v0 = 0.0;      // initial lead speed
  double v_end = 0.0;   // speed after the braking phase
  double decel = 0.0;   // 0 disables the braking phase
  double t_brake = 0.0; // duration of the braking phase

  double speed(double t) const {
    if (t <= 0.0 || decel <= 0.0) return v0;
    if (t >= t_brake) return v_end;
    return v0 - decel * t;
  }
  double position(double t) const {
    if (t <= 0.0 || decel <= 0.0) return v0 * t;
    if (t < t_brake) return v0 * t - 0.5 * decel * t * t;
    return v0 * t_brake - 0.5 * decel * t_brake * t_brake + v_end * (t - t_brake);
  }
};

struct Setup {
  LeadProfile lead;
  double gap0 = 0.0;
  double v_ego = 0.0;
};

Setup make_setup(const ScenarioSpec& spec, const IdmParams& idm) {
  const auto& info = family_info(spec.family);
  if (spec.theta.size() != info.param_names.size())
    throw ValidationError(info.name + " takes " +
                          std::to_string(info.param_names.size()) + " parameters, got " +
                          std::to_string(spec.theta.size()));
  for (double v : spec.theta)
    if (!std::isfinite(v)) throw ValidationError("scenario parameters must be finite");

  Setup s;
  switch (spec.family) {
    case Family::lvd: {
      const double v0 = spec.theta[0], ratio = spec.theta[1], decel = spec.theta[2];
      if (!(v0 > 0.0)) throw ValidationError("lvd: v0 must be positive");
      if (!(ratio >= 0.0 && ratio <= 1.0))
        throw ValidationError("lvd: dv_ratio must lie in [0, 1]");
      if (ratio > 0.0 && !(decel > 0.0))
        throw ValidationError("lvd: decel must be positive");
      s.lead.v0 = v0;
      s.lead.v_end = v0 * (1.0 - ratio);
      s.lead.decel = ratio > 0.0 ? decel : 0.0;
      s.lead.t_brake = ratio > 0.0 ? v0 * ratio / decel : 0.0;
      s.gap0 = equilibrium_gap(v0, idm);
      s.v_ego = v0;
      break;
    }
    case Family::cutin: {
      const double v0 = spec.theta[0], ratio = spec.theta[1], gap = spec.theta[2];
      if (!(v0 > 0.0)) throw ValidationError("cutin: v0 must be positive");
      if (!(ratio >= 0.0)) throw ValidationError("cutin: speed_ratio must be >= 0");
      if (!(gap > 0.0)) throw ValidationError("cutin: gap must be positive");
      s.lead.v0 = s.lead.v_end = ratio * v0;
      s.gap0 = gap;
      s.v_ego = v0;
      break;
    }
    case Family::asv: {
      const double v0 = spec.theta[0], ratio = spec.theta[1];
      if (!(v0 > 0.0)) throw ValidationError("asv: v0 must be positive");
      if (!(ratio >= 0.0 && ratio <= 1.0))
        throw ValidationError("asv: speed_ratio must lie in [0, 1]");
      s.lead.v0 = s.lead.v_end = ratio * v0;
      s.gap0 = idm.perception_range;
      s.v_ego = v0;
      break;
    }
  }
  return s;
}

void validate_idm(const IdmParams& idm) {
  if (!(idm.a_max > 0.0) || !(idm.b_comf > 0.0) || !(idm.s0 > 0.0) ||
      !(idm.headway >= 0.0) || !(idm.delta > 0.0))
    throw ValidationError("driver model parameters must be positive");
  if (!(idm.brake_cap > 0.0)) throw ValidationError("brake cap must be positive");
  if (!(idm.perception_range > 0.0))
    throw ValidationError("perception range must be positive");
}

}  // namespace

double sample_reaction_delay(const DelayModel& model, Rng& rng) {
  if (!(model.mean > 0.0) || !(model.stddev >= 0.0))
    throw ValidationError("delay model needs mean > 0 and stddev >= 0");
  return rng.lognormal_from_moments(model.mean, model.stddev);
}

double idm_acceleration(double v, double v_des, double gap, double dv,
                        const IdmParams& idm) {
  const double free_term = 1.0 - std::pow(v / v_des, idm.delta);
  const double s_star =
      idm.s0 +
      std::max(0.0, v * idm.headway + v * dv / (2.0 * std::sqrt(idm.a_max * idm.b_comf)));
  const double ratio = s_star / gap;
  const double interaction = 1.0 - ratio * ratio;
  return idm.a_max * std::min(free_term, interaction);
}

double equilibrium_gap(double v, const IdmParams& idm) {
  return idm.s0 + v * idm.headway;
}

SimResult simulate(const ScenarioSpec& spec, double reaction_delay,
                   const IdmParams& idm, const SimOptions& opts,
                   std::vector<TraceRow>* trace) {
  validate_idm(idm);
  if (!(reaction_delay >= 0.0) || !std::isfinite(reaction_delay))
    throw ValidationError("reaction delay must be finite and >= 0");
  if (!(opts.dt > 0.0) || !(opts.horizon > opts.dt))
    throw ValidationError("simulation needs dt > 0 and horizon > dt");

  const Setup setup = make_setup(spec, idm);
  const double v_des = setup.v_ego;
  const long steps = std::lround(opts.horizon / opts.dt);

  double x_ego = 0.0, v_ego = setup.v_ego;
  SimResult res;
  double gap = setup.gap0;

  // Delay buffer: the driver responds to the situation as it was
  // `reaction_delay` seconds ago, own state included.
  std::vector<double> hist_x, hist_v;
  hist_x.reserve(static_cast<std::size_t>(steps) + 1);
  hist_v.reserve(static_cast<std::size_t>(steps) + 1);

  for (long step = 0; step <= steps; ++step) {
    const double t = static_cast<double>(step) * opts.dt;
    const double lead_pos = setup.gap0 + setup.lead.position(t);
    const double lead_v = setup.lead.speed(t);
    gap = lead_pos - x_ego;

    if (trace) trace->push_back({t, x_ego, v_ego, lead_pos, lead_v, gap});

    res.min_gap = std::min(res.min_gap, gap);
    if (gap <= 0.0) {
      res.collision = true;
      res.collision_time = t;
      break;
    }
    const double closing = v_ego - lead_v;
    if (closing > 0.0) res.min_ttc = std::min(res.min_ttc, gap / closing);

    if (step == steps) break;

    hist_x.push_back(x_ego);
    hist_v.push_back(v_ego);

    const double td = t - reaction_delay;
    double a;
    if (td < 0.0) {
      // Before the scenario started. A decelerating leader was being
      // followed steadily, so the perceived state is the equilibrium start;
      // a cut-in or slower vehicle ahead was not yet a leader at all.
      if (spec.family == Family::lvd) {
        a = idm_acceleration(setup.v_ego, v_des, setup.gap0, 0.0, idm);
      } else {
        a = idm.a_max * (1.0 - std::pow(setup.v_ego / v_des, idm.delta));
      }
    } else {
      // Own state at td, linearly interpolated between stored steps.
      const double pos = td / opts.dt;
      long i0 = static_cast<long>(std::floor(pos));
      i0 = std::min(i0, step);
      const long i1 = std::min(i0 + 1, step);
      const double frac = std::min(1.0, std::max(0.0, pos - static_cast<double>(i0)));
      const double x_d = hist_x[i0] + frac * (hist_x[i1] - hist_x[i0]);
      const double v_d = hist_v[i0] + frac * (hist_v[i1] - hist_v[i0]);
      const double p_gap = setup.gap0 + setup.lead.position(td) - x_d;
      const double p_lead_v = setup.lead.speed(td);

      if (p_gap > idm.perception_range) {
        a = idm.a_max * (1.0 - std::pow(v_d / v_des, idm.delta));
      } else if (p_gap <= 0.0) {
        a = -idm.brake_cap;
      } else {
        a = idm_acceleration(v_d, v_des, p_gap, v_d - p_lead_v, idm);
      }
    }
    a = std::clamp(a, -idm.brake_cap, idm.a_max);

    x_ego += v_ego * opts.dt;
    v_ego = std::max(0.0, v_ego + a * opts.dt);
  }

  res.final_gap = std::max(gap, 0.0);
  return res;
}

}  // namespace scenrisk
