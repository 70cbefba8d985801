#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ekfp/filters.hpp"
#include "ekfp/game.hpp"
#include "ekfp/rng.hpp"

namespace ekfp {

enum class LearnerKind { classic_fp, ekf_fp, pf_fp, greedy, random_choice };

LearnerKind parse_learner_kind(const std::string& name);
std::string learner_kind_name(LearnerKind kind);

struct LearnerParams {
  NoiseConfig noise;
  int particles = 500;
  double resample_threshold = 0.5;  // fraction of the particle count
  // Start propensity means at zero instead of drawing them from N(0, I).
  bool deterministic_init = false;

  enum class DecisionRule { best_response, smooth };
  DecisionRule decision_rule = DecisionRule::best_response;
  double smooth_temperature = 1.0;
  TieBreak tie_break = TieBreak::stay;

  void validate() const;
};

// Per-agent decision process. One instance per simulated agent; the round
// loop is synchronous, so step() receives every player's previous-round
// action (empty on round 0) and returns this round's choice.
class Learner {
 public:
  virtual ~Learner() = default;

  virtual int step(std::span<const int> prev_joint, Rng& rng) = 0;

  // Current estimate of an opponent's mixed strategy; uniform for opponents
  // the learner does not track.
  virtual MixedStrategy opponent_estimate(int opponent) const;

  // Harness hook for forced initial joint actions.
  void force_last_action(int action) { last_action_ = action; }
  std::optional<int> last_action() const { return last_action_; }

  // Number of times degenerate particle weights had to be reset (PF only).
  virtual int weight_reset_count() const { return 0; }

  int player() const { return player_; }

 protected:
  Learner(const Game& game, int player, LearnerParams params);
  int decide(const JointMixedProfile& profile, Rng& rng);

  const Game* game_;
  int player_;
  LearnerParams params_;
  std::vector<int> tracked_;  // opponents whose actions matter to this player
  std::optional<int> last_action_;
};

std::unique_ptr<Learner> make_learner(LearnerKind kind, const Game& game,
                                      int player, const LearnerParams& params,
                                      Rng& rng);

// --- classic fictitious play primitives ---

// Nonnegative observation weights, one vector per opponent (indexed by player
// id; empty slots for untracked players).
struct ClassicFpState {
  std::vector<std::vector<double>> weights;
};

// Returns the state with the observed action's weight incremented by one.
ClassicFpState classic_fp_observe(ClassicFpState state, int opponent,
                                  int action);

// Normalized weights as the opponent's estimated mixed strategy.
MixedStrategy classic_fp_strategy(const ClassicFpState& state, int opponent);

// --- stateless baselines ---

// greedy: best response assuming uniform opponents; random: uniform draw.
int baseline_step(LearnerKind kind, const Game& game, int player, Rng& rng,
                  const BestResponseOptions& opts = {});

}  // namespace ekfp
