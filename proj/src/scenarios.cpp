#include "ekfp/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

#include "ekfp/errors.hpp"

namespace ekfp {

namespace {

double dist2d(const std::array<double, 2>& a, const std::array<double, 2>& b) {
  return std::hypot(a[0] - b[0], a[1] - b[1]);
}

}  // namespace

// --- symmetric games ---

Game build_symmetric_game(int num_actions) {
  if (num_actions < 2)
    throw ConfigError("build_symmetric_game: needs at least 2 actions");
  Game g = identical_interest_game(
      std::vector<int>(2, num_actions), [](std::span<const int> joint) {
        return joint[0] == joint[1] ? 1.0 : 0.0;
      });
  if (num_actions == 2) {
    g.action_labels = {{"U", "D"}, {"L", "R"}};
  } else if (num_actions == 3) {
    g.action_labels = {{"Weak", "Fair", "Strong"}, {"Weak", "Fair", "Strong"}};
  }
  return g;
}

// --- warehouse ---

double sensing_efficiency(SensorQuality q, Battery b) {
  static constexpr double table[3][3] = {
      {0.2, 0.3, 0.5},  // low quality
      {0.3, 0.5, 0.7},  // medium
      {0.5, 0.7, 0.9},  // high
  };
  return table[static_cast<int>(q)][static_cast<int>(b)];
}

void WarehouseSpec::validate() const {
  if (num_robots < 1 || num_areas < 1)
    throw ConfigError("WarehouseSpec: needs robots and areas");
  if (static_cast<int>(robot_pos.size()) != num_robots ||
      static_cast<int>(robot_sensors.size()) != num_robots ||
      static_cast<int>(battery.size()) != num_robots ||
      static_cast<int>(quality.size()) != num_robots)
    throw ConfigError("WarehouseSpec: per-robot field size mismatch");
  if (static_cast<int>(area_pos.size()) != num_areas ||
      static_cast<int>(area_threats.size()) != num_areas ||
      static_cast<int>(threat_values.size()) != num_areas)
    throw ConfigError("WarehouseSpec: per-area field size mismatch");
  for (const auto& sensors : robot_sensors)
    if (sensors.size() > 3)
      throw ConfigError("WarehouseSpec: robots carry at most 3 sensors");
  for (int n = 0; n < num_areas; ++n) {
    if (area_threats[n].size() > 2)
      throw ConfigError("WarehouseSpec: at most 2 threat categories per area");
    if (area_threats[n].size() != threat_values[n].size())
      throw ConfigError("WarehouseSpec: threat values do not match categories");
    for (double v : threat_values[n])
      if (!(v > 0.0)) throw ConfigError("WarehouseSpec: threat values must be > 0");
    // flammable, chemical and radioactive material must not share a room
    const auto& cats = area_threats[n];
    auto has = [&](ThreatSensor t) {
      return std::find(cats.begin(), cats.end(), t) != cats.end();
    };
    if (has(ThreatSensor::fire) && has(ThreatSensor::chemical) &&
        has(ThreatSensor::geiger))
      throw ConfigError("WarehouseSpec: incompatible threat categories co-located");
  }
  for (double s : speeds)
    if (!(s > 0.0)) throw ConfigError("WarehouseSpec: speeds must be positive");
}

double WarehouseSpec::efficiency(int robot, int area, int threat_index) const {
  const ThreatSensor needed = area_threats[area][threat_index];
  const auto& carried = robot_sensors[robot];
  if (std::find(carried.begin(), carried.end(), needed) == carried.end())
    return 0.0;
  return sensing_efficiency(quality[robot], battery[robot]);
}

double WarehouseSpec::global_reward(std::span<const int> joint) const {
  double cost = 0.0;
  for (int i = 0; i < num_robots; ++i) {
    const int area = warehouse_area(joint[i]);
    const double speed = speeds[warehouse_velocity(joint[i])];
    cost += c1 * dist2d(robot_pos[i], area_pos[area]) / speed + c2 * speed;
  }
  double detect = 0.0;
  for (int n = 0; n < num_areas; ++n) {
    for (std::size_t k = 0; k < area_threats[n].size(); ++k) {
      double miss = 1.0;
      for (int i = 0; i < num_robots; ++i)
        if (warehouse_area(joint[i]) == n)
          miss *= 1.0 - efficiency(i, n, static_cast<int>(k));
      detect += threat_values[n][k] * (1.0 - miss);
    }
  }
  return detect - cost;
}

double WarehouseSpec::detection_ceiling() const {
  double total = 0.0;
  for (const auto& values : threat_values)
    for (double v : values) total += v;
  return total;
}

WarehouseSpec make_warehouse_spec(const WarehouseGenParams& params, Rng& rng) {
  if (params.robots < 1 || params.areas < 1)
    throw ConfigError("make_warehouse_spec: needs robots and areas");
  if (!(params.value_max >= params.value_min) || !(params.value_min > 0.0))
    throw ConfigError("make_warehouse_spec: bad threat value range");
  WarehouseSpec spec;
  spec.num_robots = params.robots;
  spec.num_areas = params.areas;
  for (int i = 0; i < params.robots; ++i)
    spec.robot_pos.push_back(
        {rng.uniform() * params.arena, rng.uniform() * params.arena});
  for (int n = 0; n < params.areas; ++n)
    spec.area_pos.push_back(
        {rng.uniform() * params.arena, rng.uniform() * params.arena});
  for (int n = 0; n < params.areas; ++n) {
    const int count = 1 + rng.uniform_int(2);
    std::vector<ThreatSensor> cats;
    while (static_cast<int>(cats.size()) < count) {
      const auto c = static_cast<ThreatSensor>(rng.uniform_int(4));
      if (std::find(cats.begin(), cats.end(), c) == cats.end())
        cats.push_back(c);
    }
    std::vector<double> values;
    for (std::size_t k = 0; k < cats.size(); ++k)
      values.push_back(params.value_min +
                       rng.uniform() * (params.value_max - params.value_min));
    spec.area_threats.push_back(std::move(cats));
    spec.threat_values.push_back(std::move(values));
  }

  std::vector<ThreatSensor> present;
  for (const auto& cats : spec.area_threats)
    for (ThreatSensor c : cats)
      if (std::find(present.begin(), present.end(), c) == present.end())
        present.push_back(c);

  // redraw crew capabilities until every present threat has a capable robot
  const int max_tries = 1000;
  for (int attempt = 0; attempt < max_tries; ++attempt) {
    spec.robot_sensors.clear();
    spec.battery.clear();
    spec.quality.clear();
    for (int i = 0; i < params.robots; ++i) {
      const int count = 1 + rng.uniform_int(3);
      std::vector<ThreatSensor> carried;
      while (static_cast<int>(carried.size()) < count) {
        const auto c = static_cast<ThreatSensor>(rng.uniform_int(4));
        if (std::find(carried.begin(), carried.end(), c) == carried.end())
          carried.push_back(c);
      }
      spec.robot_sensors.push_back(std::move(carried));
      spec.battery.push_back(static_cast<Battery>(rng.uniform_int(3)));
      spec.quality.push_back(static_cast<SensorQuality>(rng.uniform_int(3)));
    }
    bool covered = true;
    for (ThreatSensor c : present) {
      bool found = false;
      for (const auto& carried : spec.robot_sensors)
        if (std::find(carried.begin(), carried.end(), c) != carried.end()) {
          found = true;
          break;
        }
      if (!found) {
        covered = false;
        break;
      }
    }
    if (covered) {
      spec.validate();
      return spec;
    }
  }
  throw ConfigError("make_warehouse_spec: could not cover all threat categories");
}

Game build_warehouse_game(const WarehouseSpec& spec) {
  spec.validate();
  auto shared = std::make_shared<const WarehouseSpec>(spec);
  Game g = identical_interest_game(
      std::vector<int>(spec.num_robots, spec.num_areas * kVelocityCount),
      [shared](std::span<const int> joint) {
        return shared->global_reward(joint);
      });

  // Expected global reward against a product profile. Movement costs are
  // linear in each robot's marginal; detection factors multiply across robots
  // because strategies are independent, so this equals the exact enumeration.
  auto batch = [shared](int player, const JointMixedProfile& profile) {
    const WarehouseSpec& w = *shared;
    const int actions = w.num_areas * kVelocityCount;

    double opp_cost = 0.0;                     // expected cost of the others
    std::vector<double> area_prob;             // P_i(area), per robot
    area_prob.assign(w.num_robots * w.num_areas, 0.0);
    for (int i = 0; i < w.num_robots; ++i) {
      const auto& probs = profile.strategies[i].probs;
      for (int a = 0; a < actions; ++a) {
        if (probs[a] == 0.0) continue;
        const int area = warehouse_area(a);
        const double speed = w.speeds[warehouse_velocity(a)];
        area_prob[i * w.num_areas + area] += probs[a];
        if (i != player)
          opp_cost += probs[a] * (w.c1 * dist2d(w.robot_pos[i], w.area_pos[area]) / speed +
                                  w.c2 * speed);
      }
    }

    // miss probability per (area, threat) over everyone but `player`
    std::vector<std::vector<double>> opp_miss(w.num_areas);
    for (int n = 0; n < w.num_areas; ++n) {
      opp_miss[n].assign(w.area_threats[n].size(), 1.0);
      for (std::size_t k = 0; k < w.area_threats[n].size(); ++k)
        for (int i = 0; i < w.num_robots; ++i) {
          if (i == player) continue;
          opp_miss[n][k] *=
              1.0 - area_prob[i * w.num_areas + n] *
                        w.efficiency(i, n, static_cast<int>(k));
        }
    }

    std::vector<double> values(actions, 0.0);
    for (int a = 0; a < actions; ++a) {
      const int my_area = warehouse_area(a);
      const double speed = w.speeds[warehouse_velocity(a)];
      const double my_cost =
          w.c1 * dist2d(w.robot_pos[player], w.area_pos[my_area]) / speed +
          w.c2 * speed;
      double detect = 0.0;
      for (int n = 0; n < w.num_areas; ++n)
        for (std::size_t k = 0; k < w.area_threats[n].size(); ++k) {
          double miss = opp_miss[n][k];
          if (n == my_area)
            miss *= 1.0 - w.efficiency(player, n, static_cast<int>(k));
          detect += w.threat_values[n][k] * (1.0 - miss);
        }
      values[a] = detect - my_cost - opp_cost;
    }
    return values;
  };
  g.expected_rewards_batch = batch;
  g.expected_reward_override = [batch](int player, int action,
                                       const JointMixedProfile& profile) {
    return batch(player, profile)[action];
  };
  return g;
}

double warehouse_score(std::span<const int> final_joint,
                       const WarehouseSpec& spec) {
  const double ceiling = spec.detection_ceiling();
  if (!(ceiling > 0.0))
    throw ConfigError("warehouse_score: detection ceiling must be positive");
  return 100.0 * spec.global_reward(final_joint) / ceiling;
}

// --- corridor ---

void CorridorSpec::validate() const {
  if (checkpoints.empty()) throw ConfigError("CorridorSpec: no checkpoints");
  if (!(success_reward > 0.0))
    throw ConfigError("CorridorSpec: success reward must be positive");
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    bool coordinated = false;
    for (const auto& [a, b] : checkpoints[i].feasible) {
      if (a < 0 || a >= 5 || b < 0 || b >= 5)
        throw ConfigError("CorridorSpec: action index out of range");
      if (a == b) coordinated = true;
    }
    if (!coordinated)
      throw ConfigError("CorridorSpec: checkpoint " + std::to_string(i + 1) +
                        " has no coordinated feasible joint action");
  }
}

CorridorSpec default_corridor() {
  CorridorSpec spec;
  spec.checkpoints.assign(27, CorridorCheckpoint{{{0, 0}}});
  spec.checkpoints[3].feasible = {{1, 1}, {2, 2}};    // checkpoint 4
  spec.checkpoints[11].feasible = {{3, 3}, {4, 4}};   // checkpoint 12
  spec.checkpoints[16].feasible = {{1, 1}, {2, 2}};   // checkpoint 17
  spec.checkpoints[20].feasible = {{1, 1}, {2, 2}};   // checkpoint 21
  return spec;
}

Game build_corridor_checkpoint_game(const CorridorSpec& spec, int checkpoint) {
  spec.validate();
  if (checkpoint < 0 || checkpoint >= static_cast<int>(spec.checkpoints.size()))
    throw ConfigError("build_corridor_checkpoint_game: checkpoint out of range");
  const auto feasible = spec.checkpoints[checkpoint].feasible;
  const double reward = spec.success_reward;
  Game g = identical_interest_game(
      {5, 5}, [feasible, reward](std::span<const int> joint) {
        if (joint[0] != joint[1]) return 0.0;
        for (const auto& [a, b] : feasible)
          if (a == joint[0] && b == joint[1]) return reward;
        return 0.0;
      });
  g.action_labels = {
      {"Action1", "Action2", "Action3", "Action4", "Action5"},
      {"Action1", "Action2", "Action3", "Action4", "Action5"}};
  return g;
}

// --- sensor network ---

void SensorNetSpec::validate() const {
  if (num_sensors < 1) throw ConfigError("SensorNetSpec: needs sensors");
  if (time_slots < 1) throw ConfigError("SensorNetSpec: needs time slots");
  if (!(day_hours > 0.0)) throw ConfigError("SensorNetSpec: day must be positive");
  if (!(comm_range > 0.0) || !(sense_range > 0.0))
    throw ConfigError("SensorNetSpec: ranges must be positive");
  if (static_cast<int>(sensor_pos.size()) != num_sensors)
    throw ConfigError("SensorNetSpec: sensor position count mismatch");
  for (const auto& e : events) {
    if (!(e.duration_hours > 0.0) || e.duration_hours > day_hours)
      throw ConfigError("SensorNetSpec: event duration out of range");
    if (!(e.value > 0.0)) throw ConfigError("SensorNetSpec: event value must be > 0");
    if (e.start_hour < 0.0 || e.start_hour >= day_hours)
      throw ConfigError("SensorNetSpec: event start out of range");
  }
}

bool SensorNetSpec::slot_active(const SensorEvent& event, int slot) const {
  const double slot_len = day_hours / time_slots;
  const double lo = slot * slot_len;
  const double hi = lo + slot_len;
  const double start = event.start_hour;
  const double end = start + event.duration_hours;
  if (end <= day_hours) return start < hi && end > lo;
  // wraps past midnight
  return start < hi || (end - day_hours) > lo;
}

double SensorNetSpec::detect_prob(int sensor, const SensorEvent& event) const {
  const double d = dist2d(sensor_pos[sensor], event.pos);
  if (d > sense_range) return 0.0;
  return d < 1.0 ? 1.0 : 1.0 / d;
}

double SensorNetSpec::global_reward(std::span<const int> slots) const {
  double total = 0.0;
  for (const auto& event : events) {
    double miss = 1.0;
    for (int i = 0; i < num_sensors; ++i) {
      if (!slot_active(event, slots[i])) continue;
      miss *= 1.0 - detect_prob(i, event);
    }
    total += event.value * (1.0 - miss);
  }
  return total;
}

double SensorNetSpec::local_reward(int sensor, std::span<const int> slots) const {
  double total = 0.0;
  for (const auto& event : events) {
    if (dist2d(sensor_pos[sensor], event.pos) > sense_range) continue;
    double miss = 1.0;
    for (int i = 0; i < num_sensors; ++i) {
      if (i != sensor && dist2d(sensor_pos[sensor], sensor_pos[i]) > comm_range)
        continue;
      if (!slot_active(event, slots[i])) continue;
      miss *= 1.0 - detect_prob(i, event);
    }
    total += event.value * (1.0 - miss);
  }
  return total;
}

double SensorNetSpec::max_global_reward() const {
  double total = 0.0;
  for (const auto& event : events) {
    double miss = 1.0;
    for (int i = 0; i < num_sensors; ++i) miss *= 1.0 - detect_prob(i, event);
    total += event.value * (1.0 - miss);
  }
  return total;
}

SensorNetSpec make_sensor_spec(const SensorGenParams& params, Rng& rng) {
  SensorNetSpec spec;
  spec.num_sensors = params.sensors;
  spec.time_slots = params.slots;
  spec.comm_range = params.comm_range;
  spec.sense_range = params.sense_range;
  for (int i = 0; i < params.sensors; ++i)
    spec.sensor_pos.push_back({rng.uniform(), rng.uniform()});
  for (int e = 0; e < params.events; ++e) {
    SensorEvent event;
    event.pos = {rng.uniform(), rng.uniform()};
    event.start_hour = rng.uniform() * spec.day_hours;
    event.duration_hours = 6.0 * (1.0 - rng.uniform());  // (0, 6]
    event.value = 1.0 - rng.uniform();                   // (0, 1]
    spec.events.push_back(event);
  }
  spec.validate();
  return spec;
}

Game build_sensor_game(const SensorNetSpec& spec) {
  spec.validate();
  auto shared = std::make_shared<const SensorNetSpec>(spec);
  Game g;
  g.num_players = spec.num_sensors;
  g.action_counts.assign(spec.num_sensors, spec.time_slots);
  g.reward = [shared](std::span<const int> joint, std::span<double> out) {
    for (int i = 0; i < shared->num_sensors; ++i)
      out[i] = shared->local_reward(i, joint);
  };
  g.potential = [shared](std::span<const int> joint) {
    return shared->global_reward(joint);
  };

  // comm-range neighbours are the only opponents a sensor's utility can see
  g.relevant_opponents.resize(spec.num_sensors);
  for (int i = 0; i < spec.num_sensors; ++i)
    for (int j = 0; j < spec.num_sensors; ++j)
      if (i != j && dist2d(spec.sensor_pos[i], spec.sensor_pos[j]) <= spec.comm_range)
        g.relevant_opponents[i].push_back(j);

  // Expected local utility under independent neighbour strategies: each
  // relevant sensor contributes a factor 1 - p * P(active slot), so the
  // product form equals the exact enumeration.
  auto batch = [shared](int player, const JointMixedProfile& profile) {
    const SensorNetSpec& s = *shared;
    std::vector<double> values(s.time_slots, 0.0);
    for (const auto& event : s.events) {
      if (dist2d(s.sensor_pos[player], event.pos) > s.sense_range) continue;
      double opp_miss = 1.0;
      for (int i = 0; i < s.num_sensors; ++i) {
        if (i == player) continue;
        if (dist2d(s.sensor_pos[player], s.sensor_pos[i]) > s.comm_range)
          continue;
        const double p = s.detect_prob(i, event);
        if (p == 0.0) continue;
        double active_prob = 0.0;
        for (int j = 0; j < s.time_slots; ++j)
          if (s.slot_active(event, j)) active_prob += profile.strategies[i].probs[j];
        opp_miss *= 1.0 - p * active_prob;
      }
      const double own_p = s.detect_prob(player, event);
      for (int j = 0; j < s.time_slots; ++j) {
        const double own_miss =
            s.slot_active(event, j) ? 1.0 - own_p : 1.0;
        values[j] += event.value * (1.0 - own_miss * opp_miss);
      }
    }
    return values;
  };
  g.expected_rewards_batch = batch;
  g.expected_reward_override = [batch](int player, int action,
                                       const JointMixedProfile& profile) {
    return batch(player, profile)[action];
  };
  return g;
}

// --- tracking ---

void TrackingSpec::validate() const {
  if (horizon < 1) throw ConfigError("TrackingSpec: horizon must be >= 1");
  if (period < 1) throw ConfigError("TrackingSpec: period must be >= 1");
  if (switch_low < 0 || switch_high < switch_low || switch_high > horizon)
    throw ConfigError("TrackingSpec: bad switch points");
}

MixedStrategy tracking_strategy(const TrackingSpec& spec, int t) {
  if (t < 1 || t > spec.horizon)
    throw ConfigError("tracking_strategy: iteration out of range");
  double p1 = 0.0;
  if (spec.kind == TrackingKind::sinusoid) {
    p1 = (std::cos(2.0 * std::numbers::pi * t / spec.period) + 1.0) / 2.0;
  } else {
    p1 = (t <= spec.switch_low || t > spec.switch_high) ? 1.0 : 0.0;
  }
  MixedStrategy s;
  s.probs = {p1, 1.0 - p1};
  return s;
}

}  // namespace ekfp
