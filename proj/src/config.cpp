#include "ekfp/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ekfp/errors.hpp"

namespace ekfp {

namespace {

using nlohmann::json;

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config file not found: " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config parse error in " + path + ": " + e.what());
  }
}

json parse_json_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
}

void require_object(const json& j, const std::string& ctx) {
  if (!j.is_object()) throw ConfigError(ctx + ": expected an object");
}

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& ctx) {
  for (const auto& item : obj.items())
    if (!allowed.count(item.key()))
      throw ConfigError("unknown key '" + item.key() + "' in " + ctx);
}

void check_schema_version(const json& obj, const std::string& ctx) {
  if (!obj.contains("schema_version"))
    throw ConfigError(ctx + ": missing schema_version");
  if (!obj["schema_version"].is_number_integer() ||
      obj["schema_version"].get<int>() != 1)
    throw ConfigError(ctx + ": unsupported schema_version (expected 1)");
}

double get_number(const json& obj, const std::string& key, double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number())
    throw ConfigError("field '" + key + "' must be a number");
  return obj[key].get<double>();
}

int get_int(const json& obj, const std::string& key, int fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number_integer())
    throw ConfigError("field '" + key + "' must be an integer");
  return obj[key].get<int>();
}

bool get_bool(const json& obj, const std::string& key, bool fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_boolean())
    throw ConfigError("field '" + key + "' must be a boolean");
  return obj[key].get<bool>();
}

std::string get_string(const json& obj, const std::string& key,
                       const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_string())
    throw ConfigError("field '" + key + "' must be a string");
  return obj[key].get<std::string>();
}

ZetaSchedule parse_zeta(const json& value) {
  if (value.is_string()) {
    if (value.get<std::string>() == "1/t") return ZetaSchedule::inverse_t();
    throw ConfigError("zeta: expected a positive number or \"1/t\"");
  }
  if (value.is_number()) return ZetaSchedule::fixed(value.get<double>());
  throw ConfigError("zeta: expected a positive number or \"1/t\"");
}

ScenarioSpec parse_scenario(const json& obj) {
  require_object(obj, "scenario");
  const std::string kind = get_string(obj, "kind", "");
  if (kind == "symmetric2" || kind == "symmetric3") {
    reject_unknown_keys(obj, {"kind"}, "scenario");
    SymmetricScenario s;
    s.actions = kind == "symmetric2" ? 2 : 3;
    return s;
  }
  if (kind == "warehouse") {
    reject_unknown_keys(
        obj, {"kind", "robots", "areas", "arena", "value_min", "value_max"},
        "scenario");
    WarehouseScenario s;
    s.gen.robots = get_int(obj, "robots", s.gen.robots);
    s.gen.areas = get_int(obj, "areas", s.gen.areas);
    s.gen.arena = get_number(obj, "arena", s.gen.arena);
    s.gen.value_min = get_number(obj, "value_min", s.gen.value_min);
    s.gen.value_max = get_number(obj, "value_max", s.gen.value_max);
    return s;
  }
  if (kind == "corridor") {
    reject_unknown_keys(obj, {"kind", "checkpoints", "success_reward"},
                        "scenario");
    CorridorScenario s;
    if (obj.contains("checkpoints")) {
      if (!obj["checkpoints"].is_array())
        throw ConfigError("corridor checkpoints: expected an array");
      s.spec.checkpoints.clear();
      for (const auto& cp : obj["checkpoints"]) {
        if (!cp.is_array())
          throw ConfigError("corridor checkpoint: expected an array of pairs");
        CorridorCheckpoint checkpoint;
        for (const auto& pair : cp) {
          if (!pair.is_array() || pair.size() != 2 ||
              !pair[0].is_number_integer() || !pair[1].is_number_integer())
            throw ConfigError(
                "corridor checkpoint entry: expected [move, move] with moves 1-5");
          // config uses the 1-based move numbers
          checkpoint.feasible.push_back(
              {pair[0].get<int>() - 1, pair[1].get<int>() - 1});
        }
        s.spec.checkpoints.push_back(std::move(checkpoint));
      }
    }
    s.spec.success_reward =
        get_number(obj, "success_reward", s.spec.success_reward);
    s.spec.validate();
    return s;
  }
  if (kind == "sensor") {
    reject_unknown_keys(
        obj, {"kind", "sensors", "slots", "events", "comm_range", "sense_range"},
        "scenario");
    SensorScenario s;
    s.gen.sensors = get_int(obj, "sensors", s.gen.sensors);
    s.gen.slots = get_int(obj, "slots", s.gen.slots);
    s.gen.events = get_int(obj, "events", s.gen.events);
    s.gen.comm_range = get_number(obj, "comm_range", s.gen.comm_range);
    s.gen.sense_range = get_number(obj, "sense_range", s.gen.sense_range);
    return s;
  }
  throw ConfigError("scenario: unknown kind '" + kind + "'");
}

LearnerParams parse_learner_params(const json& obj) {
  LearnerParams params;
  params.noise.xi_tilde = get_number(obj, "xi_tilde", params.noise.xi_tilde);
  params.noise.psi = get_number(obj, "psi", params.noise.psi);
  params.noise.tau = get_number(obj, "tau", params.noise.tau);
  if (obj.contains("zeta")) params.noise.zeta = parse_zeta(obj["zeta"]);
  params.particles = get_int(obj, "particles", params.particles);
  params.resample_threshold =
      get_number(obj, "resample_threshold", params.resample_threshold);
  params.deterministic_init =
      get_bool(obj, "deterministic_init", params.deterministic_init);
  const std::string rule = get_string(obj, "decision_rule", "best_response");
  if (rule == "best_response") {
    params.decision_rule = LearnerParams::DecisionRule::best_response;
  } else if (rule == "smooth") {
    params.decision_rule = LearnerParams::DecisionRule::smooth;
  } else {
    throw ConfigError("decision_rule: expected best_response or smooth");
  }
  params.smooth_temperature =
      get_number(obj, "smooth_temperature", params.smooth_temperature);
  const std::string tie = get_string(obj, "tie_break", "stay");
  if (tie == "stay") {
    params.tie_break = TieBreak::stay;
  } else if (tie == "lowest_index") {
    params.tie_break = TieBreak::lowest_index;
  } else {
    throw ConfigError("tie_break: expected stay or lowest_index");
  }
  params.validate();
  return params;
}

RunConfig parse_run_config(const json& root) {
  require_object(root, "run config");
  check_schema_version(root, "run config");
  reject_unknown_keys(root,
                      {"schema_version", "scenario", "learner", "iterations",
                       "replications", "seed", "initial_joint_action",
                       "record_strategies", "metrics", "jobs"},
                      "run config");
  if (!root.contains("scenario"))
    throw ConfigError("run config: missing scenario");
  if (!root.contains("learner"))
    throw ConfigError("run config: missing learner");
  RunConfig config;
  config.scenario = parse_scenario(root["scenario"]);
  const json& learner = root["learner"];
  require_object(learner, "learner");
  reject_unknown_keys(
      learner,
      {"kind", "xi_tilde", "psi", "tau", "zeta", "particles",
       "resample_threshold", "deterministic_init", "decision_rule",
       "smooth_temperature", "tie_break"},
      "learner");
  config.learner_kind = parse_learner_kind(get_string(learner, "kind", ""));
  config.learner_params = parse_learner_params(learner);
  config.iterations = get_int(root, "iterations", config.iterations);
  config.replications = get_int(root, "replications", config.replications);
  config.master_seed =
      static_cast<std::uint64_t>(get_number(root, "seed", 1.0));
  if (root.contains("initial_joint_action")) {
    if (!root["initial_joint_action"].is_array())
      throw ConfigError("initial_joint_action: expected an array");
    JointAction joint;
    for (const auto& a : root["initial_joint_action"]) {
      if (!a.is_number_integer())
        throw ConfigError("initial_joint_action: entries must be integers");
      joint.push_back(a.get<int>());
    }
    config.initial_joint_action = std::move(joint);
  }
  config.record_strategies =
      get_bool(root, "record_strategies", config.record_strategies);
  if (root.contains("metrics")) {
    if (!root["metrics"].is_array())
      throw ConfigError("metrics: expected an array of group names");
    for (const auto& m : root["metrics"]) {
      if (!m.is_string()) throw ConfigError("metrics: entries must be strings");
      config.metrics.push_back(m.get<std::string>());
    }
  }
  config.jobs = get_int(root, "jobs", config.jobs);
  config.validate();
  return config;
}

SweepConfig parse_sweep_config(const json& root) {
  require_object(root, "sweep config");
  check_schema_version(root, "sweep config");
  reject_unknown_keys(root, {"schema_version", "sweep"}, "sweep config");
  if (!root.contains("sweep")) throw ConfigError("sweep config: missing sweep");
  const json& sweep = root["sweep"];
  require_object(sweep, "sweep");
  reject_unknown_keys(
      sweep, {"xi", "zeta", "iterations", "seeds", "scenarios", "period"},
      "sweep");
  SweepConfig config;
  if (!sweep.contains("xi") || !sweep["xi"].is_array())
    throw ConfigError("sweep: xi must be an array of positive numbers");
  for (const auto& v : sweep["xi"]) {
    if (!v.is_number()) throw ConfigError("sweep: xi entries must be numbers");
    config.grid.xi_values.push_back(v.get<double>());
  }
  if (!sweep.contains("zeta") || !sweep["zeta"].is_array())
    throw ConfigError("sweep: zeta must be an array of numbers or \"1/t\"");
  for (const auto& v : sweep["zeta"])
    config.grid.zeta_values.push_back(parse_zeta(v));
  config.grid.iterations = get_int(sweep, "iterations", config.grid.iterations);
  if (sweep.contains("seeds")) {
    config.grid.seeds.clear();
    if (sweep["seeds"].is_number_integer()) {
      const int count = sweep["seeds"].get<int>();
      if (count < 1) throw ConfigError("sweep: seeds count must be >= 1");
      for (int i = 0; i < count; ++i)
        config.grid.seeds.push_back(static_cast<std::uint64_t>(i + 1));
    } else if (sweep["seeds"].is_array()) {
      for (const auto& s : sweep["seeds"]) {
        if (!s.is_number_integer())
          throw ConfigError("sweep: seed entries must be integers");
        config.grid.seeds.push_back(s.get<std::uint64_t>());
      }
    } else {
      throw ConfigError("sweep: seeds must be a count or an array");
    }
  }
  const int period = get_int(sweep, "period", 100);
  if (sweep.contains("scenarios")) {
    if (!sweep["scenarios"].is_array())
      throw ConfigError("sweep: scenarios must be an array");
    for (const auto& s : sweep["scenarios"]) {
      TrackingSpec spec;
      spec.horizon = config.grid.iterations;
      spec.period = period;
      const std::string name = s.is_string() ? s.get<std::string>() : "";
      if (name == "sinusoid") {
        spec.kind = TrackingKind::sinusoid;
      } else if (name == "abrupt") {
        spec.kind = TrackingKind::abrupt;
      } else {
        throw ConfigError("sweep: scenarios entries must be sinusoid or abrupt");
      }
      config.grid.specs.push_back(spec);
    }
  }
  config.grid.validate();
  return config;
}

ScenarioOnlyConfig parse_scenario_only(const json& root) {
  require_object(root, "config");
  check_schema_version(root, "config");
  reject_unknown_keys(root, {"schema_version", "scenario", "cap", "seed"},
                      "config");
  if (!root.contains("scenario")) throw ConfigError("config: missing scenario");
  ScenarioOnlyConfig config;
  config.scenario = parse_scenario(root["scenario"]);
  const double cap = get_number(root, "cap", 1e6);
  if (!(cap >= 1.0)) throw ConfigError("cap: must be >= 1");
  config.nash_cap = static_cast<std::uint64_t>(cap);
  config.seed = static_cast<std::uint64_t>(get_number(root, "seed", 1.0));
  return config;
}

}  // namespace

RunConfig load_run_config(const std::string& path) {
  return parse_run_config(load_json_file(path));
}

SweepConfig load_sweep_config(const std::string& path) {
  return parse_sweep_config(load_json_file(path));
}

ScenarioOnlyConfig load_scenario_config(const std::string& path) {
  return parse_scenario_only(load_json_file(path));
}

RunConfig parse_run_config_text(const std::string& text) {
  return parse_run_config(parse_json_text(text));
}

SweepConfig parse_sweep_config_text(const std::string& text) {
  return parse_sweep_config(parse_json_text(text));
}

ScenarioOnlyConfig parse_scenario_config_text(const std::string& text) {
  return parse_scenario_only(parse_json_text(text));
}

}  // namespace ekfp
