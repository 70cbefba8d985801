// ekfp: game-theoretic action-selection simulator.
//
// Subcommands:
//   run     execute a seeded experiment, write traces.csv + metrics.csv
//   sweep   grid-evaluate tracking MSE over (xi, zeta), write sweep.csv
//   nash    enumerate pure Nash equilibria, check the exact potential
//   verify  validate a config and dry-build its scenario
//
// Exit codes: 0 success, 1 experiment failure, 2 usage/config error.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>

#include <CLI11.hpp>

#include "ekfp/config.hpp"
#include "ekfp/errors.hpp"
#include "ekfp/harness.hpp"
#include "ekfp/kernels.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  std::int64_t seed = -1;
  int jobs = 0;
};

std::string resolve_out_dir(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("EKFP_OUT"); env && *env) return env;
  return "out";
}

void add_common(CLI::App* cmd, CommonOpts& opts, bool with_out = true) {
  cmd->add_option("--config", opts.config_path, "path to the JSON config")
      ->required();
  if (with_out)
    cmd->add_option("--out", opts.out_dir,
                    "output directory (overrides EKFP_OUT, default ./out)");
  cmd->add_option("--seed", opts.seed, "master seed override");
  cmd->add_option("--jobs", opts.jobs, "parallel replications");
}

std::string joint_to_string(const ekfp::Game& game,
                            const ekfp::JointAction& joint) {
  std::string s = "(";
  for (std::size_t p = 0; p < joint.size(); ++p) {
    if (p) s += ",";
    s += game.label(static_cast<int>(p), joint[p]);
  }
  return s + ")";
}

int cmd_run(const CommonOpts& opts) {
  ekfp::RunConfig config = ekfp::load_run_config(opts.config_path);
  if (opts.seed >= 0) config.master_seed = static_cast<std::uint64_t>(opts.seed);
  if (opts.jobs > 0) config.jobs = opts.jobs;
  const std::string out_dir = resolve_out_dir(opts.out_dir);

  std::printf("scenario: %s  learner: %s  replications: %d  iterations: %d  seed: %llu\n",
              ekfp::scenario_name(config.scenario).c_str(),
              ekfp::learner_kind_name(config.learner_kind).c_str(),
              config.replications, config.iterations,
              static_cast<unsigned long long>(config.master_seed));

  const std::vector<ekfp::ReplicationTrace> traces = ekfp::run_all(config);
  const std::vector<ekfp::MetricRow> rows = ekfp::standard_metrics(config, traces);

  const bool corridor =
      std::holds_alternative<ekfp::CorridorScenario>(config.scenario);
  int failed = 0;
  for (const auto& t : traces)
    if (t.failed) ++failed;
  const ekfp::ConvergenceStats stats = ekfp::convergence_stats(traces);
  if (corridor) {
    int completed = 0;
    for (const auto& t : traces)
      if (!t.failed && t.completed) ++completed;
    std::printf("completed: %d/%d\n", completed, config.replications);
  } else {
    const int converged = static_cast<int>(
        std::lround(stats.percent_converged / 100.0 * stats.counted));
    std::printf("converged: %d/%d\n", converged, config.replications);
    std::printf("mean iterations to consensus: %.6g\n",
                stats.mean_iterations_to_consensus);
  }
  if (!stats.mean_reward_curve.empty())
    std::printf("mean final reward: %.6g\n", stats.mean_reward_curve.back());
  for (const auto& row : rows)
    if (row.metric == "mean_final_score")
      std::printf("mean final score: %.6g\n", row.value);
  std::printf("failed replications: %d\n", failed);

  const std::string traces_path = out_dir + "/traces.csv";
  const std::string metrics_path = out_dir + "/metrics.csv";
  ekfp::write_traces_csv(traces_path, traces);
  ekfp::write_metrics_csv(metrics_path, rows);
  std::printf("wrote %s, %s\n", traces_path.c_str(), metrics_path.c_str());
  return failed == 0 ? 0 : 1;
}

int cmd_sweep(const CommonOpts& opts) {
  ekfp::SweepConfig config = ekfp::load_sweep_config(opts.config_path);
  if (opts.seed >= 0)
    config.grid.seeds = {static_cast<std::uint64_t>(opts.seed)};
  const std::string out_dir = resolve_out_dir(opts.out_dir);
  const ekfp::SweepResult result = ekfp::parameter_sweep(config.grid);
  const auto [xi_idx, zeta_idx] = result.argmin();
  std::printf("argmin: xi=%.6g zeta=%s mse=%.6g\n",
              result.grid.xi_values[xi_idx],
              result.grid.zeta_values[zeta_idx].to_string().c_str(),
              result.mse(xi_idx, zeta_idx));
  const std::string sweep_path = out_dir + "/sweep.csv";
  ekfp::write_sweep_csv(sweep_path, result);
  std::printf("wrote %s\n", sweep_path.c_str());
  return 0;
}

int cmd_nash(const CommonOpts& opts) {
  const ekfp::ScenarioOnlyConfig config =
      ekfp::load_scenario_config(opts.config_path);
  const std::uint64_t seed =
      opts.seed >= 0 ? static_cast<std::uint64_t>(opts.seed) : config.seed;
  const auto instances =
      ekfp::build_scenario_instances(config.scenario, seed, 0);
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const ekfp::Game& game = instances[i].game;
    if (instances.size() > 1) std::printf("checkpoint %zu:\n", i + 1);
    const auto equilibria = ekfp::enumerate_pure_nash(game, config.nash_cap);
    if (equilibria.empty()) {
      std::printf("pure Nash equilibria: none\n");
    } else {
      std::printf("pure Nash equilibria:");
      for (const auto& joint : equilibria)
        std::printf(" %s", joint_to_string(game, joint).c_str());
      std::printf("\n");
    }
    if (game.potential) {
      const bool ok = ekfp::verify_exact_potential(game, *game.potential,
                                                   1e-9, config.nash_cap);
      std::printf("exact potential verified: %s\n", ok ? "true" : "false");
    }
  }
  return 0;
}

int cmd_verify(const CommonOpts& opts) {
  // Try the config as a run config first, then sweep, then scenario-only.
  std::string errors;
  try {
    const ekfp::RunConfig config = ekfp::load_run_config(opts.config_path);
    const auto instances = ekfp::build_scenario_instances(
        config.scenario, config.master_seed, 0);
    for (const auto& inst : instances) inst.game.validate_shape();
    std::printf("run config OK: scenario %s, %d players, %d replications x %d iterations\n",
                ekfp::scenario_name(config.scenario).c_str(),
                instances.front().game.num_players, config.replications,
                config.iterations);
    return 0;
  } catch (const ekfp::ConfigError& e) {
    errors = std::string("  as run config: ") + e.what();
  }
  try {
    const ekfp::SweepConfig config = ekfp::load_sweep_config(opts.config_path);
    std::printf("sweep config OK: %zu x %zu grid, %zu seed(s)\n",
                config.grid.xi_values.size(), config.grid.zeta_values.size(),
                config.grid.seeds.size());
    return 0;
  } catch (const ekfp::ConfigError& e) {
    errors += std::string("\n  as sweep config: ") + e.what();
  }
  try {
    const ekfp::ScenarioOnlyConfig config =
        ekfp::load_scenario_config(opts.config_path);
    const auto instances =
        ekfp::build_scenario_instances(config.scenario, config.seed, 0);
    for (const auto& inst : instances) inst.game.validate_shape();
    std::printf("scenario config OK: %s, %d players\n",
                ekfp::scenario_name(config.scenario).c_str(),
                instances.front().game.num_players);
    return 0;
  } catch (const ekfp::ConfigError& e) {
    errors += std::string("\n  as scenario config: ") + e.what();
  }
  std::fprintf(stderr, "config invalid:\n%s\n", errors.c_str());
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"EKF fictitious play simulator"};
  app.require_subcommand(1);

  CommonOpts run_opts, sweep_opts, nash_opts, verify_opts;
  CLI::App* run = app.add_subcommand("run", "execute a seeded experiment");
  add_common(run, run_opts);
  CLI::App* sweep = app.add_subcommand("sweep", "parameter sweep over (xi, zeta)");
  add_common(sweep, sweep_opts);
  CLI::App* nash = app.add_subcommand(
      "nash", "enumerate pure Nash equilibria and verify the potential");
  add_common(nash, nash_opts, /*with_out=*/false);
  CLI::App* verify = app.add_subcommand("verify", "validate a config file");
  add_common(verify, verify_opts, /*with_out=*/false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (run->parsed()) return cmd_run(run_opts);
    if (sweep->parsed()) return cmd_sweep(sweep_opts);
    if (nash->parsed()) return cmd_nash(nash_opts);
    if (verify->parsed()) return cmd_verify(verify_opts);
  } catch (const ekfp::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
