#include "ekfp/game.hpp"

#include <cmath>
#include <sstream>

#include "ekfp/errors.hpp"

namespace ekfp {

MixedStrategy MixedStrategy::uniform(int n) {
  MixedStrategy s;
  s.probs.assign(n, 1.0 / n);
  return s;
}

MixedStrategy MixedStrategy::pure(int n, int action) {
  MixedStrategy s;
  s.probs.assign(n, 0.0);
  s.probs.at(action) = 1.0;
  return s;
}

void MixedStrategy::validate() const {
  double total = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0) || !std::isfinite(p))
      throw ConfigError("MixedStrategy: negative or non-finite entry");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw ConfigError("MixedStrategy: entries do not sum to 1");
}

std::vector<double> Game::rewards_at(std::span<const int> joint) const {
  std::vector<double> out(num_players, 0.0);
  reward(joint, out);
  return out;
}

double Game::reward_of(int player, std::span<const int> joint) const {
  std::vector<double> out(num_players, 0.0);
  reward(joint, out);
  return out[player];
}

std::uint64_t Game::joint_space_size(std::uint64_t cap) const {
  std::uint64_t total = 1;
  for (int c : action_counts) {
    total *= static_cast<std::uint64_t>(c);
    if (total > cap) return cap + 1;
  }
  return total;
}

std::string Game::label(int player, int action) const {
  if (player < static_cast<int>(action_labels.size()) &&
      action < static_cast<int>(action_labels[player].size()))
    return action_labels[player][action];
  return "a" + std::to_string(action);
}

std::vector<int> Game::opponents_of(int player) const {
  if (!relevant_opponents.empty()) return relevant_opponents[player];
  std::vector<int> opp;
  opp.reserve(num_players - 1);
  for (int j = 0; j < num_players; ++j)
    if (j != player) opp.push_back(j);
  return opp;
}

void Game::validate_shape() const {
  if (num_players < 1) throw ConfigError("Game: needs at least one player");
  if (static_cast<int>(action_counts.size()) != num_players)
    throw ConfigError("Game: action_counts size does not match num_players");
  for (int c : action_counts)
    if (c < 1) throw ConfigError("Game: every player needs at least one action");
  if (!reward) throw ConfigError("Game: reward function not set");
}

Game identical_interest_game(std::vector<int> action_counts,
                             ScalarRewardFn global) {
  Game g;
  g.num_players = static_cast<int>(action_counts.size());
  g.action_counts = std::move(action_counts);
  g.reward = [global](std::span<const int> joint, std::span<double> out) {
    const double r = global(joint);
    for (double& v : out) v = r;
  };
  g.potential = global;
  return g;
}

void for_each_joint(std::span<const int> action_counts,
                    const std::function<void(std::span<const int>)>& fn) {
  const int n = static_cast<int>(action_counts.size());
  std::vector<int> joint(n, 0);
  while (true) {
    fn(joint);
    int i = n - 1;
    for (; i >= 0; --i) {
      if (++joint[i] < action_counts[i]) break;
      joint[i] = 0;
    }
    if (i < 0) return;
  }
}

namespace {

void check_profile(const Game& game, const JointMixedProfile& profile) {
  if (static_cast<int>(profile.strategies.size()) != game.num_players)
    throw ConfigError("profile: one strategy required per player");
  for (int p = 0; p < game.num_players; ++p) {
    if (profile.strategies[p].size() != game.action_counts[p])
      throw ConfigError("profile: strategy dimension mismatch for player " +
                        std::to_string(p));
  }
}

}  // namespace

double expected_reward(const Game& game, int player, int action,
                       const JointMixedProfile& opponents) {
  if (player < 0 || player >= game.num_players)
    throw ConfigError("expected_reward: player out of range");
  if (action < 0 || action >= game.action_counts[player])
    throw ConfigError("expected_reward: action out of range");
  check_profile(game, opponents);
  if (game.expected_reward_override)
    return game.expected_reward_override(player, action, opponents);

  // exact enumeration of the opponents' joint space, skipping zero-probability
  // branches
  const int n = game.num_players;
  std::vector<int> joint(n, 0);
  joint[player] = action;
  std::vector<double> rewards(n, 0.0);
  double acc = 0.0;
  std::function<void(int, double)> rec = [&](int p, double prob) {
    if (p == n) {
      game.reward(joint, rewards);
      acc += prob * rewards[player];
      return;
    }
    if (p == player) {
      rec(p + 1, prob);
      return;
    }
    const auto& probs = opponents.strategies[p].probs;
    for (int a = 0; a < game.action_counts[p]; ++a) {
      if (probs[a] == 0.0) continue;
      joint[p] = a;
      rec(p + 1, prob * probs[a]);
    }
  };
  rec(0, 1.0);
  return acc;
}

std::vector<double> expected_rewards_all_actions(
    const Game& game, int player, const JointMixedProfile& opponents) {
  if (game.expected_rewards_batch) {
    check_profile(game, opponents);
    return game.expected_rewards_batch(player, opponents);
  }
  std::vector<double> values(game.action_counts[player]);
  for (int a = 0; a < game.action_counts[player]; ++a)
    values[a] = expected_reward(game, player, a, opponents);
  return values;
}

int best_response(const Game& game, int player,
                  const JointMixedProfile& opponents,
                  const BestResponseOptions& opts) {
  const std::vector<double> values =
      expected_rewards_all_actions(game, player, opponents);
  double best = values[0];
  for (double v : values) best = v > best ? v : best;
  if (opts.tie_break == TieBreak::stay && opts.previous_action &&
      *opts.previous_action >= 0 &&
      *opts.previous_action < static_cast<int>(values.size()) &&
      values[*opts.previous_action] >= best - opts.tie_tolerance)
    return *opts.previous_action;
  for (int a = 0; a < static_cast<int>(values.size()); ++a)
    if (values[a] >= best - opts.tie_tolerance) return a;
  return 0;  // unreachable
}

bool is_pure_nash(const Game& game, std::span<const int> joint, double tol) {
  if (static_cast<int>(joint.size()) != game.num_players)
    throw ConfigError("is_pure_nash: joint action size mismatch");
  for (int p = 0; p < game.num_players; ++p)
    if (joint[p] < 0 || joint[p] >= game.action_counts[p])
      throw ConfigError("is_pure_nash: joint action out of bounds");
  std::vector<int> probe(joint.begin(), joint.end());
  std::vector<double> rewards(game.num_players, 0.0);
  game.reward(probe, rewards);
  const std::vector<double> base = rewards;
  for (int p = 0; p < game.num_players; ++p) {
    for (int a = 0; a < game.action_counts[p]; ++a) {
      if (a == joint[p]) continue;
      probe[p] = a;
      game.reward(probe, rewards);
      if (rewards[p] > base[p] + tol) return false;
    }
    probe[p] = joint[p];
  }
  return true;
}

std::vector<JointAction> enumerate_pure_nash(const Game& game,
                                             std::uint64_t cap) {
  if (game.joint_space_size(cap) > cap) {
    std::ostringstream msg;
    msg << "enumerate_pure_nash: joint action space exceeds cap of " << cap;
    throw ConfigError(msg.str());
  }
  std::vector<JointAction> result;
  for_each_joint(game.action_counts, [&](std::span<const int> joint) {
    if (is_pure_nash(game, joint))
      result.emplace_back(joint.begin(), joint.end());
  });
  return result;
}

bool verify_exact_potential(const Game& game, const ScalarRewardFn& phi,
                            double tol, std::uint64_t cap) {
  if (game.joint_space_size(cap) > cap)
    throw ConfigError("verify_exact_potential: joint action space exceeds cap");
  bool holds = true;
  std::vector<double> rewards(game.num_players, 0.0);
  std::vector<double> dev_rewards(game.num_players, 0.0);
  for_each_joint(game.action_counts, [&](std::span<const int> joint) {
    if (!holds) return;
    game.reward(joint, rewards);
    const double phi_s = phi(joint);
    std::vector<int> probe(joint.begin(), joint.end());
    for (int p = 0; p < game.num_players && holds; ++p) {
      for (int a = 0; a < game.action_counts[p]; ++a) {
        if (a == joint[p]) continue;
        probe[p] = a;
        game.reward(probe, dev_rewards);
        const double lhs = rewards[p] - dev_rewards[p];
        const double rhs = phi_s - phi(probe);
        if (std::abs(lhs - rhs) > tol) {
          holds = false;
          break;
        }
      }
      probe[p] = joint[p];
    }
  });
  return holds;
}

ScalarRewardFn wonderful_life_utility(ScalarRewardFn global, int player,
                                      int reference_action) {
  return [global = std::move(global), player,
          reference_action](std::span<const int> joint) {
    std::vector<int> ref(joint.begin(), joint.end());
    ref[player] = reference_action;
    return global(joint) - global(ref);
  };
}

}  // namespace ekfp
