#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "ekfp/game.hpp"
#include "ekfp/learners.hpp"
#include "ekfp/linalg.hpp"
#include "ekfp/scenarios.hpp"

namespace ekfp {

// --- scenario selection ---

struct SymmetricScenario {
  int actions = 2;
};
struct WarehouseScenario {
  WarehouseGenParams gen;
};
struct CorridorScenario {
  CorridorSpec spec = default_corridor();
};
struct SensorScenario {
  SensorGenParams gen;
};

using ScenarioSpec = std::variant<SymmetricScenario, WarehouseScenario,
                                  CorridorScenario, SensorScenario>;

std::string scenario_name(const ScenarioSpec& spec);

// One playable game instance. Corridor scenarios produce one instance per
// checkpoint; everything else produces exactly one.
struct ScenarioInstance {
  Game game;
  ScalarRewardFn global_reward;
  // Scenario-specific score of the executed (final-iteration) joint action:
  // warehouse F-score, sensor normalized reward, plain reward elsewhere.
  std::function<double(std::span<const int>)> final_score;
};

// Deterministic given (spec, master_seed, replication); randomized scenario
// families draw their instance from the replication's scenario stream.
std::vector<ScenarioInstance> build_scenario_instances(
    const ScenarioSpec& spec, std::uint64_t master_seed, int replication);

// --- replication engine ---

struct RunConfig {
  ScenarioSpec scenario;
  LearnerKind learner_kind = LearnerKind::ekf_fp;
  LearnerParams learner_params;
  int iterations = 50;
  int replications = 100;
  std::uint64_t master_seed = 1;
  // Forces the round-1 joint action (single-game scenarios only).
  std::optional<JointAction> initial_joint_action;
  bool record_strategies = false;
  // Metric groups for metrics.csv: convergence, reward, score, checkpoints,
  // timing. Empty selects every group except timing, which is excluded from
  // the byte-identical determinism contract.
  std::vector<std::string> metrics;
  int jobs = 1;

  void validate() const;
};

struct IterationRecord {
  JointAction joint;
  double global_reward = 0.0;
};

struct ReplicationTrace {
  int replication = 0;
  std::vector<IterationRecord> iterations;
  // [iteration][agent] estimates of every player, recorded when enabled
  std::vector<std::vector<std::vector<MixedStrategy>>> strategy_snapshots;
  std::vector<double> agent_step_seconds;  // total per agent

  bool final_is_nash = false;
  // First iteration (1-based) after which the joint action never changes.
  int consensus_iteration = 0;
  std::optional<double> final_score;

  // corridor only
  std::vector<int> checkpoint_consensus;
  std::vector<bool> checkpoint_success;
  bool completed = true;

  bool failed = false;
  std::string failure_cause;
};

ReplicationTrace run_replication(const RunConfig& config, int replication);

// Runs every replication, `config.jobs` at a time. Traces are keyed by
// replication index, so the thread count cannot change any output.
std::vector<ReplicationTrace> run_all(const RunConfig& config);

// --- metrics ---

struct ConvergenceStats {
  double percent_converged = 0.0;
  double mean_iterations_to_consensus = 0.0;
  std::vector<double> mean_reward_curve;
  int failed_count = 0;
  int counted = 0;
};

// A replication converged iff its final joint action is a pure Nash
// equilibrium of its scenario game. Failed replications are excluded from the
// means and reported in failed_count.
ConvergenceStats convergence_stats(const std::vector<ReplicationTrace>& traces);

struct TimingReport {
  std::vector<double> per_agent_mean_seconds;
  double overall_mean_seconds = 0.0;
};

TimingReport timing_report(const std::vector<ReplicationTrace>& traces);

struct MetricRow {
  std::string metric;
  std::string scenario;
  std::string learner;
  double value = 0.0;
};

std::vector<MetricRow> standard_metrics(const RunConfig& config,
                                        const std::vector<ReplicationTrace>& traces);

// --- opponent tracking and the parameter sweep ---

// Mean over iterations of the mean-squared component error between the
// learner's opponent estimate (formed before seeing the iteration's action)
// and the true strategy.
double tracking_mse(LearnerKind kind, const LearnerParams& params,
                    const TrackingSpec& spec, std::uint64_t seed);

// Test-support core: estimator(t, action observed at t-1) -> estimate.
double tracking_mse_core(
    const TrackingSpec& spec, std::uint64_t seed,
    const std::function<MixedStrategy(int, std::optional<int>)>& estimator);

struct SweepGrid {
  std::vector<double> xi_values;
  std::vector<ZetaSchedule> zeta_values;
  int iterations = 5000;
  std::vector<std::uint64_t> seeds = {1};
  std::vector<TrackingSpec> specs;  // empty = sinusoid + abrupt defaults

  void validate() const;
};

struct SweepResult {
  SweepGrid grid;
  Matrix mse;  // xi rows x zeta columns
  std::pair<int, int> argmin() const;
};

// Cell values are seeded by (seed, xi value, zeta value, spec index), so the
// matrix does not depend on evaluation order or grid layout.
SweepResult parameter_sweep(const SweepGrid& grid);

// --- CSV outputs (12 significant digits, temp-file + rename) ---

void write_traces_csv(const std::string& path,
                      const std::vector<ReplicationTrace>& traces);
void write_metrics_csv(const std::string& path,
                       const std::vector<MetricRow>& rows);
void write_sweep_csv(const std::string& path, const SweepResult& result);

}  // namespace ekfp
