#include "ekfp/harness.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <mutex>
#include <thread>

#include "ekfp/errors.hpp"
#include "ekfp/rng.hpp"

namespace ekfp {

std::string scenario_name(const ScenarioSpec& spec) {
  return std::visit(
      [](const auto& s) -> std::string {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, SymmetricScenario>)
          return "symmetric" + std::to_string(s.actions);
        else if constexpr (std::is_same_v<T, WarehouseScenario>)
          return "warehouse";
        else if constexpr (std::is_same_v<T, CorridorScenario>)
          return "corridor";
        else
          return "sensor";
      },
      spec);
}

std::vector<ScenarioInstance> build_scenario_instances(
    const ScenarioSpec& spec, std::uint64_t master_seed, int replication) {
  Rng rng(derive_seed(master_seed, static_cast<std::uint64_t>(replication),
                      kScenarioStream));
  std::vector<ScenarioInstance> instances;
  if (const auto* sym = std::get_if<SymmetricScenario>(&spec)) {
    ScenarioInstance inst;
    inst.game = build_symmetric_game(sym->actions);
    inst.global_reward = *inst.game.potential;
    inst.final_score = inst.global_reward;
    instances.push_back(std::move(inst));
  } else if (const auto* wh = std::get_if<WarehouseScenario>(&spec)) {
    const WarehouseSpec w = make_warehouse_spec(wh->gen, rng);
    ScenarioInstance inst;
    inst.game = build_warehouse_game(w);
    inst.global_reward = *inst.game.potential;
    inst.final_score = [w](std::span<const int> joint) {
      return warehouse_score(joint, w);
    };
    instances.push_back(std::move(inst));
  } else if (const auto* cor = std::get_if<CorridorScenario>(&spec)) {
    for (int cp = 0; cp < static_cast<int>(cor->spec.checkpoints.size()); ++cp) {
      ScenarioInstance inst;
      inst.game = build_corridor_checkpoint_game(cor->spec, cp);
      inst.global_reward = *inst.game.potential;
      inst.final_score = inst.global_reward;
      instances.push_back(std::move(inst));
    }
  } else if (const auto* sn = std::get_if<SensorScenario>(&spec)) {
    const SensorNetSpec s = make_sensor_spec(sn->gen, rng);
    ScenarioInstance inst;
    inst.game = build_sensor_game(s);
    inst.global_reward = *inst.game.potential;
    const double ceiling = s.max_global_reward();
    inst.final_score = [s, ceiling](std::span<const int> joint) {
      return ceiling > 0.0 ? s.global_reward(joint) / ceiling : 0.0;
    };
    instances.push_back(std::move(inst));
  }
  return instances;
}

void RunConfig::validate() const {
  if (iterations < 1) throw ConfigError("RunConfig: iterations must be >= 1");
  if (replications < 1) throw ConfigError("RunConfig: replications must be >= 1");
  if (jobs < 1) throw ConfigError("RunConfig: jobs must be >= 1");
  learner_params.validate();
  if (initial_joint_action && std::holds_alternative<CorridorScenario>(scenario))
    throw ConfigError("RunConfig: initial_joint_action not supported for corridor");
  static const std::vector<std::string> known = {
      "convergence", "reward", "score", "checkpoints", "timing"};
  for (const auto& m : metrics)
    if (std::find(known.begin(), known.end(), m) == known.end())
      throw ConfigError("RunConfig: unknown metric group '" + m + "'");
}

namespace {

int consensus_iteration_of(const std::vector<IterationRecord>& iters,
                           std::size_t begin, std::size_t end) {
  // first 1-based iteration after which the joint action never changes
  int k = static_cast<int>(end - begin);
  for (std::size_t i = end - 1; i > begin; --i) {
    if (iters[i].joint != iters[i - 1].joint) break;
    --k;
  }
  return std::max(k, 1);
}

}  // namespace

ReplicationTrace run_replication(const RunConfig& config, int replication) {
  ReplicationTrace trace;
  trace.replication = replication;
  const bool corridor = std::holds_alternative<CorridorScenario>(config.scenario);
  try {
    const std::vector<ScenarioInstance> instances =
        build_scenario_instances(config.scenario, config.master_seed, replication);
    const int num_players = instances.front().game.num_players;
    if (config.initial_joint_action) {
      const auto& forced = *config.initial_joint_action;
      if (static_cast<int>(forced.size()) != num_players)
        throw ConfigError("initial_joint_action: wrong number of players");
      for (int p = 0; p < num_players; ++p)
        if (forced[p] < 0 || forced[p] >= instances.front().game.action_counts[p])
          throw ConfigError("initial_joint_action: action out of bounds");
    }

    std::vector<Rng> agent_rng;
    agent_rng.reserve(num_players);
    for (int p = 0; p < num_players; ++p)
      agent_rng.emplace_back(derive_seed(
          config.master_seed, static_cast<std::uint64_t>(replication),
          static_cast<std::uint64_t>(p)));
    trace.agent_step_seconds.assign(num_players, 0.0);

    for (const ScenarioInstance& inst : instances) {
      inst.game.validate_shape();
      std::vector<std::unique_ptr<Learner>> learners;
      learners.reserve(num_players);
      for (int p = 0; p < num_players; ++p)
        learners.push_back(make_learner(config.learner_kind, inst.game, p,
                                        config.learner_params, agent_rng[p]));
      const std::size_t begin = trace.iterations.size();
      JointAction prev;
      for (int iter = 1; iter <= config.iterations; ++iter) {
        JointAction joint(num_players, 0);
        const bool forced = iter == 1 && config.initial_joint_action.has_value();
        for (int p = 0; p < num_players; ++p) {
          if (forced) {
            joint[p] = (*config.initial_joint_action)[p];
            learners[p]->force_last_action(joint[p]);
            continue;
          }
          const auto t0 = std::chrono::steady_clock::now();
          joint[p] = learners[p]->step(prev, agent_rng[p]);
          const auto t1 = std::chrono::steady_clock::now();
          trace.agent_step_seconds[p] +=
              std::chrono::duration<double>(t1 - t0).count();
        }
        IterationRecord rec;
        rec.joint = joint;
        rec.global_reward = inst.global_reward(joint);
        trace.iterations.push_back(std::move(rec));
        if (config.record_strategies) {
          std::vector<std::vector<MixedStrategy>> snapshot(num_players);
          for (int p = 0; p < num_players; ++p)
            for (int q = 0; q < num_players; ++q)
              snapshot[p].push_back(learners[p]->opponent_estimate(q));
          trace.strategy_snapshots.push_back(std::move(snapshot));
        }
        prev = trace.iterations.back().joint;
      }
      const std::size_t end = trace.iterations.size();
      const int consensus = consensus_iteration_of(trace.iterations, begin, end);
      const JointAction& final_joint = trace.iterations.back().joint;
      if (corridor) {
        trace.checkpoint_consensus.push_back(consensus);
        const bool success = inst.global_reward(final_joint) > 0.0;
        trace.checkpoint_success.push_back(success);
        trace.completed = trace.completed && success;
      } else {
        trace.consensus_iteration = consensus;
      }
      if (&inst == &instances.back()) {
        trace.final_is_nash = is_pure_nash(inst.game, final_joint);
        if (inst.final_score)
          trace.final_score = inst.final_score(final_joint);
      }
    }
    if (corridor && trace.final_score) {
      trace.final_score = trace.completed ? 1.0 : 0.0;
    }
  } catch (const NumericError& e) {
    trace.failed = true;
    trace.failure_cause = e.what();
  }
  return trace;
}

std::vector<ReplicationTrace> run_all(const RunConfig& config) {
  config.validate();
  std::vector<ReplicationTrace> traces(config.replications);
  const int jobs = std::min(config.jobs, config.replications);
  if (jobs <= 1) {
    for (int r = 0; r < config.replications; ++r)
      traces[r] = run_replication(config, r);
    return traces;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    while (true) {
      const int r = next.fetch_add(1);
      if (r >= config.replications) return;
      try {
        traces[r] = run_replication(config, r);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(jobs);
  for (int i = 0; i < jobs; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return traces;
}

ConvergenceStats convergence_stats(const std::vector<ReplicationTrace>& traces) {
  ConvergenceStats stats;
  std::size_t curve_len = 0;
  for (const auto& t : traces) {
    if (t.failed) {
      ++stats.failed_count;
      continue;
    }
    ++stats.counted;
    curve_len = std::max(curve_len, t.iterations.size());
  }
  if (stats.counted == 0) return stats;
  stats.mean_reward_curve.assign(curve_len, 0.0);
  int converged = 0;
  double consensus_sum = 0.0;
  for (const auto& t : traces) {
    if (t.failed) continue;
    if (t.final_is_nash) ++converged;
    consensus_sum += t.consensus_iteration;
    for (std::size_t i = 0; i < t.iterations.size(); ++i)
      stats.mean_reward_curve[i] += t.iterations[i].global_reward;
  }
  stats.percent_converged = 100.0 * converged / stats.counted;
  stats.mean_iterations_to_consensus = consensus_sum / stats.counted;
  for (double& v : stats.mean_reward_curve) v /= stats.counted;
  return stats;
}

TimingReport timing_report(const std::vector<ReplicationTrace>& traces) {
  int counted = 0;
  TimingReport report;
  for (const auto& t : traces) {
    if (t.failed) continue;
    if (report.per_agent_mean_seconds.empty())
      report.per_agent_mean_seconds.assign(t.agent_step_seconds.size(), 0.0);
    for (std::size_t p = 0; p < t.agent_step_seconds.size(); ++p)
      report.per_agent_mean_seconds[p] += t.agent_step_seconds[p];
    ++counted;
  }
  if (counted == 0)
    throw ConfigError("timing_report: no successful traces");
  double total = 0.0;
  for (double& v : report.per_agent_mean_seconds) {
    v /= counted;
    total += v;
  }
  report.overall_mean_seconds = total / report.per_agent_mean_seconds.size();
  return report;
}

std::vector<MetricRow> standard_metrics(
    const RunConfig& config, const std::vector<ReplicationTrace>& traces) {
  const std::string scenario = scenario_name(config.scenario);
  const std::string learner = learner_kind_name(config.learner_kind);
  const bool corridor = std::holds_alternative<CorridorScenario>(config.scenario);
  auto wants = [&](const std::string& group) {
    if (config.metrics.empty()) return group != "timing";
    return std::find(config.metrics.begin(), config.metrics.end(), group) !=
           config.metrics.end();
  };
  std::vector<MetricRow> rows;
  auto push = [&](const std::string& name, double value) {
    rows.push_back({name, scenario, learner, value});
  };

  const ConvergenceStats stats = convergence_stats(traces);
  push("replications", static_cast<double>(traces.size()));
  push("failed_replications", static_cast<double>(stats.failed_count));
  if (wants("convergence") && !corridor) {
    push("percent_converged", stats.percent_converged);
    push("mean_iterations_to_consensus", stats.mean_iterations_to_consensus);
  }
  if (wants("reward") && !stats.mean_reward_curve.empty())
    push("mean_final_reward", stats.mean_reward_curve.back());
  if (wants("score")) {
    double sum = 0.0;
    int n = 0;
    for (const auto& t : traces)
      if (!t.failed && t.final_score) {
        sum += *t.final_score;
        ++n;
      }
    if (n > 0) push("mean_final_score", sum / n);
  }
  if (wants("checkpoints") && corridor) {
    int completed = 0, counted = 0;
    std::vector<double> consensus_sum;
    for (const auto& t : traces) {
      if (t.failed) continue;
      ++counted;
      if (t.completed) ++completed;
      if (consensus_sum.empty())
        consensus_sum.assign(t.checkpoint_consensus.size(), 0.0);
      for (std::size_t cp = 0; cp < t.checkpoint_consensus.size(); ++cp)
        consensus_sum[cp] += t.checkpoint_consensus[cp];
    }
    if (counted > 0) {
      push("percent_completed", 100.0 * completed / counted);
      for (std::size_t cp = 0; cp < consensus_sum.size(); ++cp)
        push("checkpoint" + std::to_string(cp + 1) + "_mean_iterations",
             consensus_sum[cp] / counted);
    }
  }
  if (wants("timing")) {
    const TimingReport report = timing_report(traces);
    push("mean_agent_step_seconds", report.overall_mean_seconds);
  }
  return rows;
}

// --- tracking ---

double tracking_mse_core(
    const TrackingSpec& spec, std::uint64_t seed,
    const std::function<MixedStrategy(int, std::optional<int>)>& estimator) {
  spec.validate();
  Rng opponent_rng(derive_seed(seed, 0, 1));
  double total = 0.0;
  std::optional<int> prev;
  for (int t = 1; t <= spec.horizon; ++t) {
    const MixedStrategy truth = tracking_strategy(spec, t);
    const MixedStrategy estimate = estimator(t, prev);
    double err = 0.0;
    for (std::size_t k = 0; k < truth.probs.size(); ++k) {
      const double d = estimate.probs[k] - truth.probs[k];
      err += d * d;
    }
    total += err / truth.probs.size();
    prev = opponent_rng.sample(truth.probs);
  }
  return total / spec.horizon;
}

double tracking_mse(LearnerKind kind, const LearnerParams& params,
                    const TrackingSpec& spec, std::uint64_t seed) {
  // Probe game: the learner has a single action, the opponent two; only the
  // estimation machinery matters here.
  Game probe = identical_interest_game({1, 2}, [](std::span<const int>) {
    return 0.0;
  });
  Rng learner_rng(derive_seed(seed, 0, 0));
  std::unique_ptr<Learner> learner =
      make_learner(kind, probe, 0, params, learner_rng);
  return tracking_mse_core(
      spec, seed, [&](int, std::optional<int> prev) {
        std::vector<int> prev_joint;
        if (prev) prev_joint = {0, *prev};
        learner->step(prev_joint, learner_rng);
        return learner->opponent_estimate(1);
      });
}

// --- parameter sweep ---

void SweepGrid::validate() const {
  if (xi_values.empty() || zeta_values.empty())
    throw ConfigError("SweepGrid: grid must not be empty");
  for (double xi : xi_values)
    if (!(xi > 0.0)) throw ConfigError("SweepGrid: xi values must be positive");
  for (const auto& z : zeta_values) z.validate();
  if (iterations < 1) throw ConfigError("SweepGrid: iterations must be >= 1");
  if (seeds.empty()) throw ConfigError("SweepGrid: needs at least one seed");
}

std::pair<int, int> SweepResult::argmin() const {
  std::pair<int, int> best{0, 0};
  for (int r = 0; r < mse.rows(); ++r)
    for (int c = 0; c < mse.cols(); ++c)
      if (mse(r, c) < mse(best.first, best.second)) best = {r, c};
  return best;
}

SweepResult parameter_sweep(const SweepGrid& grid) {
  grid.validate();
  SweepResult result;
  result.grid = grid;
  std::vector<TrackingSpec> specs = grid.specs;
  if (specs.empty()) {
    TrackingSpec sinus;
    sinus.kind = TrackingKind::sinusoid;
    sinus.horizon = grid.iterations;
    TrackingSpec abrupt;
    abrupt.kind = TrackingKind::abrupt;
    abrupt.horizon = grid.iterations;
    specs = {sinus, abrupt};
  }
  result.grid.specs = specs;
  result.mse = Matrix(static_cast<int>(grid.xi_values.size()),
                      static_cast<int>(grid.zeta_values.size()));
  for (std::size_t xi_idx = 0; xi_idx < grid.xi_values.size(); ++xi_idx) {
    for (std::size_t z_idx = 0; z_idx < grid.zeta_values.size(); ++z_idx) {
      const double xi = grid.xi_values[xi_idx];
      const ZetaSchedule& zeta = grid.zeta_values[z_idx];
      LearnerParams params;
      params.noise.xi_tilde = xi;
      params.noise.zeta = zeta;
      double acc = 0.0;
      int cells = 0;
      for (std::uint64_t seed : grid.seeds) {
        for (std::size_t s = 0; s < specs.size(); ++s) {
          // seeded by cell values, not indices, so layout cannot matter
          const std::uint64_t zeta_code =
              zeta.kind == ZetaSchedule::Kind::inverse_t
                  ? ~std::uint64_t{0}
                  : std::bit_cast<std::uint64_t>(zeta.value);
          const std::uint64_t cell =
              derive_seed(seed, std::bit_cast<std::uint64_t>(xi), zeta_code);
          acc += tracking_mse(LearnerKind::ekf_fp, params, specs[s],
                              derive_seed(cell, s, 0));
          ++cells;
        }
      }
      result.mse(static_cast<int>(xi_idx), static_cast<int>(z_idx)) =
          acc / cells;
    }
  }
  return result;
}

// --- CSV ---

namespace {

class AtomicCsvFile {
 public:
  explicit AtomicCsvFile(const std::string& path) : path_(path), tmp_(path + ".tmp") {
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    file_ = std::fopen(tmp_.c_str(), "w");
    if (!file_) throw ConfigError("cannot open output file: " + tmp_);
  }

  ~AtomicCsvFile() {
    if (file_) {
      std::fclose(file_);
      std::remove(tmp_.c_str());
    }
  }

  void line(const std::string& s) {
    if (std::fputs(s.c_str(), file_) == EOF || std::fputc('\n', file_) == EOF)
      throw ConfigError("write failed: " + tmp_);
  }

  void commit() {
    if (std::fclose(file_) != 0) {
      file_ = nullptr;
      throw ConfigError("close failed: " + tmp_);
    }
    file_ = nullptr;
    std::filesystem::rename(tmp_, path_);
  }

 private:
  std::string path_, tmp_;
  std::FILE* file_ = nullptr;
};

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace

void write_traces_csv(const std::string& path,
                      const std::vector<ReplicationTrace>& traces) {
  AtomicCsvFile out(path);
  out.line("replication,iteration,agent,action,reward");
  for (const auto& trace : traces) {
    for (std::size_t it = 0; it < trace.iterations.size(); ++it) {
      const auto& rec = trace.iterations[it];
      for (std::size_t p = 0; p < rec.joint.size(); ++p) {
        out.line(std::to_string(trace.replication) + "," +
                 std::to_string(it + 1) + "," + std::to_string(p) + "," +
                 std::to_string(rec.joint[p]) + "," +
                 fmt_double(rec.global_reward));
      }
    }
  }
  out.commit();
}

void write_metrics_csv(const std::string& path,
                       const std::vector<MetricRow>& rows) {
  AtomicCsvFile out(path);
  out.line("metric,scenario,learner,value");
  for (const auto& row : rows)
    out.line(row.metric + "," + row.scenario + "," + row.learner + "," +
             fmt_double(row.value));
  out.commit();
}

void write_sweep_csv(const std::string& path, const SweepResult& result) {
  AtomicCsvFile out(path);
  out.line("xi,zeta,mse");
  for (std::size_t r = 0; r < result.grid.xi_values.size(); ++r)
    for (std::size_t c = 0; c < result.grid.zeta_values.size(); ++c)
      out.line(fmt_double(result.grid.xi_values[r]) + "," +
               result.grid.zeta_values[c].to_string() + "," +
               fmt_double(result.mse(static_cast<int>(r), static_cast<int>(c))));
  out.commit();
}

}  // namespace ekfp
