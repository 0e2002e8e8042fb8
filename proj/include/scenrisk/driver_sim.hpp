#ifndef SCENRISK_DRIVER_SIM_HPP
#define SCENRISK_DRIVER_SIM_HPP

#include <limits>
#include <vector>

#include "scenrisk/family.hpp"
#include "scenrisk/rng.hpp"

namespace scenrisk {

// Car-following response of the challenged vehicle. The interaction term is
// squared, so the response stays attraction-free near the equilibrium gap
// and braking grows quadratically as the gap closes.
struct IdmParams {
  double a_max = 0.73;   // maximum acceleration [m/s^2]
  double b_comf = 1.67;  // comfortable deceleration [m/s^2]
  double delta = 4.0;    // free-road exponent
  double s0 = 2.0;       // standstill distance [m]
  double headway = 1.2;  // desired time headway [s]
  // Physical braking limit; accelerations are clamped to [-brake_cap, a_max].
  double brake_cap = 6.0;
  // Leaders farther than this are treated as absent.
  double perception_range = 150.0;
};

// Log-normal reaction delay, parameterized by the moments of the delay
// itself.
struct DelayModel {
  double mean = 0.92;    // [s]
  double stddev = 0.28;  // [s]
};

double sample_reaction_delay(const DelayModel& model, Rng& rng);

struct SimOptions {
  double dt = 0.01;      // forward Euler step [s]
  double horizon = 60.0; // [s]
};

struct ScenarioSpec {
  Family family = Family::lvd;
  std::vector<double> theta;
};

struct SimResult {
  bool collision = false;
  double collision_time = std::numeric_limits<double>::quiet_NaN();
  double min_ttc = std::numeric_limits<double>::infinity();
  double min_gap = std::numeric_limits<double>::infinity();
  double final_gap = std::numeric_limits<double>::infinity();
};

struct TraceRow {
  double t, ego_pos, ego_speed, lead_pos, lead_speed, gap;
};

// Unclamped acceleration demand; dv = ego speed - perceived lead speed.
double idm_acceleration(double v, double v_des, double gap, double dv,
                        const IdmParams& idm);

// Gap at which the response is exactly zero when driving at the desired
// speed: s0 + v * headway.
double equilibrium_gap(double v, const IdmParams& idm);

// Simulates the ego response to the scenario with a constant reaction
// delay: the controller sees the situation (gap, own speed, closing speed)
// as it was `reaction_delay` seconds ago. Before the scenario start the
// perceived situation is the family's steady pre-start state, so the ego
// cruises until the delay elapses. Collisions and time-to-collision are
// judged on true, undelayed states.
SimResult simulate(const ScenarioSpec& spec, double reaction_delay,
                   const IdmParams& idm = {}, const SimOptions& opts = {},
                   std::vector<TraceRow>* trace = nullptr);

}  // namespace scenrisk

#endif  // SCENRISK_DRIVER_SIM_HPP
