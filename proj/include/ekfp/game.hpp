#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ekfp {

// Probability vector over one player's actions.
struct MixedStrategy {
  std::vector<double> probs;

  static MixedStrategy uniform(int n);
  static MixedStrategy pure(int n, int action);

  int size() const { return static_cast<int>(probs.size()); }
  // entries >= 0 and summing to 1 within 1e-9
  void validate() const;
};

// One strategy per player.
struct JointMixedProfile {
  std::vector<MixedStrategy> strategies;
};

using JointAction = std::vector<int>;

// Per-player rewards of a joint action; `out` has one slot per player.
using RewardFn = std::function<void(std::span<const int>, std::span<double>)>;
// Scalar function of a joint action (potentials, global rewards, WLU).
using ScalarRewardFn = std::function<double(std::span<const int>)>;
// Closed-form expected reward for games whose opponent joint space is too
// large to enumerate; must equal the exact enumeration wherever both apply.
using ExpectedRewardFn =
    std::function<double(int player, int action, const JointMixedProfile&)>;
// Batched variant returning the expected reward of every action at once.
using ExpectedRewardBatchFn =
    std::function<std::vector<double>(int player, const JointMixedProfile&)>;

// Finite n-player game. Rewards are evaluated on demand; games stay cheap to
// copy because scenario state is captured in the reward closures.
struct Game {
  int num_players = 0;
  std::vector<int> action_counts;
  RewardFn reward;
  std::optional<ScalarRewardFn> potential;
  ExpectedRewardFn expected_reward_override;      // empty: exact enumeration
  ExpectedRewardBatchFn expected_rewards_batch;   // optional fast path
  std::vector<std::vector<std::string>> action_labels;  // optional
  // Per-player opponents the player's reward can depend on; empty = all.
  // Learners skip belief tracking for irrelevant opponents.
  std::vector<std::vector<int>> relevant_opponents;

  std::vector<double> rewards_at(std::span<const int> joint) const;
  double reward_of(int player, std::span<const int> joint) const;
  std::uint64_t joint_space_size(std::uint64_t cap) const;  // saturates at cap+1
  std::string label(int player, int action) const;
  std::vector<int> opponents_of(int player) const;
  void validate_shape() const;
};

// Identical-interest game: every player receives `global`.
Game identical_interest_game(std::vector<int> action_counts,
                             ScalarRewardFn global);

enum class TieBreak { stay, lowest_index };

struct BestResponseOptions {
  TieBreak tie_break = TieBreak::stay;
  // "stay" keeps this action when it is among the maximizers.
  std::optional<int> previous_action;
  double tie_tolerance = 1e-9;
};

// Expected reward of playing `action` against the product distribution of the
// other players' strategies. Uses the game's override when present, exact
// enumeration of the opponent joint space otherwise.
double expected_reward(const Game& game, int player, int action,
                       const JointMixedProfile& opponents);

std::vector<double> expected_rewards_all_actions(const Game& game, int player,
                                                 const JointMixedProfile& opponents);

int best_response(const Game& game, int player, const JointMixedProfile& opponents,
                  const BestResponseOptions& opts = {});

// True iff no player has a unilateral deviation strictly improving its own
// reward (beyond `tol`).
bool is_pure_nash(const Game& game, std::span<const int> joint,
                  double tol = 1e-9);

// Brute force over the joint action space; refuses when it exceeds `cap`.
std::vector<JointAction> enumerate_pure_nash(const Game& game,
                                             std::uint64_t cap = 1'000'000);

// True iff r_i(s) - r_i(s~) == phi(s) - phi(s~) within tol for every player i
// and every unilateral deviation s -> s~.
bool verify_exact_potential(const Game& game, const ScalarRewardFn& phi,
                            double tol = 1e-9, std::uint64_t cap = 1'000'000);

// Wonderful-life utility for one player: global(s) - global(s with the
// player's action replaced by reference_action).
ScalarRewardFn wonderful_life_utility(ScalarRewardFn global, int player,
                                      int reference_action);

// Visits every joint action of the given action-count vector.
void for_each_joint(std::span<const int> action_counts,
                    const std::function<void(std::span<const int>)>& fn);

}  // namespace ekfp
