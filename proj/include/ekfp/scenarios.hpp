#pragma once

#include <array>
#include <span>
#include <utility>
#include <vector>

#include "ekfp/game.hpp"
#include "ekfp/rng.hpp"

namespace ekfp {

// --- symmetric coordination games ---

// Identical-interest game with payoff 1 on the diagonal, 0 elsewhere.
// n = 2 gives the U/D x L/R game; n = 3 the Weak/Fair/Strong game.
Game build_symmetric_game(int num_actions);

// --- warehouse patrol ---

enum class ThreatSensor { fire, chemical, geiger, vision };
enum class Battery { short_life, fair, long_life };
enum class SensorQuality { low, medium, high };

// Detection efficiency by (quality, battery).
double sensing_efficiency(SensorQuality q, Battery b);

struct WarehouseSpec {
  int num_robots = 0;
  int num_areas = 0;
  std::vector<std::array<double, 2>> robot_pos;
  std::vector<std::array<double, 2>> area_pos;
  std::vector<std::vector<ThreatSensor>> robot_sensors;  // up to 3 per robot
  std::vector<Battery> battery;
  std::vector<SensorQuality> quality;
  // Threat categories per area (up to 2) and their values V_nk > 0. Threats
  // are named by the sensor type that detects them.
  std::vector<std::vector<ThreatSensor>> area_threats;
  std::vector<std::vector<double>> threat_values;
  std::array<double, 3> speeds{1.0, 2.0, 3.0};  // slow, medium, fast
  double c1 = 1.0;
  double c2 = 1.0 / 6.0;

  void validate() const;
  // E_ink: zero when the robot lacks the matching sensor.
  double efficiency(int robot, int area, int threat_index) const;
  // -sum of movement costs + sum of expected detection values.
  double global_reward(std::span<const int> joint) const;
  // r_max: every threat detected with probability 1, movement cost excluded.
  double detection_ceiling() const;
};

// Robot actions are (area, velocity) pairs: action = area * 3 + velocity.
inline constexpr int kVelocityCount = 3;
inline int warehouse_action(int area, int velocity) {
  return area * kVelocityCount + velocity;
}
inline int warehouse_area(int action) { return action / kVelocityCount; }
inline int warehouse_velocity(int action) { return action % kVelocityCount; }

// Seeded random instance: positions uniform on [0, arena)^2, sensors/battery/
// quality uniform, 1-2 threats per area with values uniform in
// [value_min, value_max); sensor assignments are redrawn until every present
// threat category has at least one capable robot.
struct WarehouseGenParams {
  int robots = 5;
  int areas = 5;
  double arena = 10.0;
  double value_min = 20.0;
  double value_max = 60.0;
};
WarehouseSpec make_warehouse_spec(const WarehouseGenParams& params, Rng& rng);

Game build_warehouse_game(const WarehouseSpec& spec);

// F = 100 * r_g(joint) / r_max.
double warehouse_score(std::span<const int> final_joint,
                       const WarehouseSpec& spec);

// --- corridor transport ---

struct CorridorCheckpoint {
  // Feasible joint actions over the 5 moves (0-based action indices).
  std::vector<std::pair<int, int>> feasible;
};

struct CorridorSpec {
  std::vector<CorridorCheckpoint> checkpoints;
  double step_length_m = 5.0;  // z
  double success_reward = 1.0;  // c

  void validate() const;  // every checkpoint needs a coordinated feasible pair
};

// The 27-checkpoint course: three right-turn choice points (checkpoints 4, 17
// and 21 offer moves 2/3), one left-turn choice point (checkpoint 12 offers
// moves 4/5), straight segments elsewhere.
CorridorSpec default_corridor();

// 2-player, 5-action identical-interest game: success_reward iff the joint
// action is feasible and both robots pick the same move.
Game build_corridor_checkpoint_game(const CorridorSpec& spec, int checkpoint);

// --- ad-hoc sensor network ---

struct SensorEvent {
  std::array<double, 2> pos;
  double start_hour = 0.0;
  double duration_hours = 0.0;
  double value = 0.0;
};

struct SensorNetSpec {
  int num_sensors = 40;
  int time_slots = 4;
  double day_hours = 24.0;
  double comm_range = 0.6;
  double sense_range = 0.3;
  std::vector<std::array<double, 2>> sensor_pos;  // unit square
  std::vector<SensorEvent> events;

  void validate() const;
  // Event runs [start, start + duration) wrapped modulo the day; active in a
  // slot when the intervals overlap.
  bool slot_active(const SensorEvent& event, int slot) const;
  // min(1, 1/d); zero outside sense_range.
  double detect_prob(int sensor, const SensorEvent& event) const;
  double global_reward(std::span<const int> slots) const;
  // Utility over events in the sensor's sensing range, counting only sensors
  // within its communication range.
  double local_reward(int sensor, std::span<const int> slots) const;
  // Reward with every sensor sensing in all slots; used for normalization.
  double max_global_reward() const;
};

struct SensorGenParams {
  int sensors = 40;
  int slots = 4;
  int events = 20;
  double comm_range = 0.6;
  double sense_range = 0.3;
};
SensorNetSpec make_sensor_spec(const SensorGenParams& params, Rng& rng);

Game build_sensor_game(const SensorNetSpec& spec);

// --- opponent-tracking scenarios ---

enum class TrackingKind { sinusoid, abrupt };

struct TrackingSpec {
  TrackingKind kind = TrackingKind::sinusoid;
  int horizon = 5000;
  int period = 100;      // n
  int switch_low = 1250;
  int switch_high = 3750;

  void validate() const;
};

// True opponent strategy at iteration t (1-based, t <= horizon).
MixedStrategy tracking_strategy(const TrackingSpec& spec, int t);

}  // namespace ekfp
