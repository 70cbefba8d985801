#include "ekfp/learners.hpp"

#include <cmath>

#include "ekfp/errors.hpp"
#include "ekfp/kernels.hpp"

namespace ekfp {

LearnerKind parse_learner_kind(const std::string& name) {
  if (name == "classic_fp") return LearnerKind::classic_fp;
  if (name == "ekf_fp") return LearnerKind::ekf_fp;
  if (name == "pf_fp") return LearnerKind::pf_fp;
  if (name == "greedy") return LearnerKind::greedy;
  if (name == "random") return LearnerKind::random_choice;
  throw ConfigError("unknown learner kind: " + name);
}

std::string learner_kind_name(LearnerKind kind) {
  switch (kind) {
    case LearnerKind::classic_fp: return "classic_fp";
    case LearnerKind::ekf_fp: return "ekf_fp";
    case LearnerKind::pf_fp: return "pf_fp";
    case LearnerKind::greedy: return "greedy";
    case LearnerKind::random_choice: return "random";
  }
  return "?";
}

void LearnerParams::validate() const {
  noise.validate();
  if (particles < 1) throw ConfigError("LearnerParams: particles must be >= 1");
  if (!(resample_threshold > 0.0) || resample_threshold > 1.0)
    throw ConfigError("LearnerParams: resample_threshold must be in (0, 1]");
  if (!(smooth_temperature > 0.0))
    throw ConfigError("LearnerParams: smooth_temperature must be > 0");
}

Learner::Learner(const Game& game, int player, LearnerParams params)
    : game_(&game), player_(player), params_(std::move(params)) {
  params_.validate();
  tracked_ = game.opponents_of(player);
}

MixedStrategy Learner::opponent_estimate(int opponent) const {
  return MixedStrategy::uniform(game_->action_counts[opponent]);
}

int Learner::decide(const JointMixedProfile& profile, Rng& rng) {
  if (params_.decision_rule == LearnerParams::DecisionRule::smooth) {
    const std::vector<double> values =
        expected_rewards_all_actions(*game_, player_, profile);
    const MixedStrategy probs =
        softmax_link(values, params_.smooth_temperature);
    return rng.sample(probs.probs);
  }
  BestResponseOptions opts;
  opts.tie_break = params_.tie_break;
  opts.previous_action = last_action_;
  return best_response(*game_, player_, profile, opts);
}

// --- classic fictitious play ---

ClassicFpState classic_fp_observe(ClassicFpState state, int opponent,
                                  int action) {
  auto& w = state.weights.at(opponent);
  if (action < 0 || action >= static_cast<int>(w.size()))
    throw ConfigError("classic_fp_observe: action out of range");
  w[action] += 1.0;
  return state;
}

MixedStrategy classic_fp_strategy(const ClassicFpState& state, int opponent) {
  const auto& w = state.weights.at(opponent);
  const double total = kern::sum(w.data(), w.size());
  if (!(total > 0.0))
    throw ConfigError("classic_fp_strategy: weights sum to zero");
  MixedStrategy s;
  s.probs.resize(w.size());
  kern::scale(w.data(), 1.0 / total, s.probs.data(), w.size());
  return s;
}

namespace {

JointMixedProfile uniform_profile(const Game& game) {
  JointMixedProfile profile;
  profile.strategies.reserve(game.num_players);
  for (int p = 0; p < game.num_players; ++p)
    profile.strategies.push_back(MixedStrategy::uniform(game.action_counts[p]));
  return profile;
}

class ClassicFpLearner final : public Learner {
 public:
  ClassicFpLearner(const Game& game, int player, LearnerParams params)
      : Learner(game, player, std::move(params)) {
    state_.weights.resize(game.num_players);
    for (int j : tracked_)
      state_.weights[j].assign(game.action_counts[j], 1.0);
  }

  int step(std::span<const int> prev_joint, Rng& rng) override {
    if (!prev_joint.empty()) {
      for (int j : tracked_)
        state_ = classic_fp_observe(std::move(state_), j, prev_joint[j]);
    }
    JointMixedProfile profile = uniform_profile(*game_);
    for (int j : tracked_) profile.strategies[j] = classic_fp_strategy(state_, j);
    const int action = decide(profile, rng);
    last_action_ = action;
    return action;
  }

  MixedStrategy opponent_estimate(int opponent) const override {
    if (state_.weights[opponent].empty())
      return Learner::opponent_estimate(opponent);
    return classic_fp_strategy(state_, opponent);
  }

 private:
  ClassicFpState state_;
};

// --- EKF fictitious play ---

class EkfFpLearner final : public Learner {
 public:
  EkfFpLearner(const Game& game, int player, LearnerParams params, Rng& rng)
      : Learner(game, player, std::move(params)) {
    beliefs_.resize(game.num_players);
    for (int j : tracked_) {
      GaussianBelief b = GaussianBelief::standard(game.action_counts[j]);
      if (!params_.deterministic_init)
        for (double& m : b.mean) m = rng.normal();
      beliefs_[j] = std::move(b);
    }
  }

  int step(std::span<const int> prev_joint, Rng& rng) override {
    const bool have_obs = !prev_joint.empty();
    if (have_obs) ++t_;
    JointMixedProfile profile = uniform_profile(*game_);
    for (int j : tracked_) {
      if (have_obs)
        beliefs_[j] = ekf_update(beliefs_[j], prev_joint[j], t_, params_.noise);
      beliefs_[j] = ekf_predict(beliefs_[j], params_.noise, rng);
      profile.strategies[j] =
          softmax_link(beliefs_[j].mean, params_.noise.tau);
    }
    const int action = decide(profile, rng);
    last_action_ = action;
    return action;
  }

  MixedStrategy opponent_estimate(int opponent) const override {
    if (beliefs_[opponent].dim() == 0)
      return Learner::opponent_estimate(opponent);
    return softmax_link(beliefs_[opponent].mean, params_.noise.tau);
  }

  const GaussianBelief& belief(int opponent) const { return beliefs_[opponent]; }

 private:
  std::vector<GaussianBelief> beliefs_;
  int t_ = 0;
};

// --- particle-filter fictitious play ---

struct ParticleSet {
  Matrix propensities;  // one particle per row
  std::vector<double> weights;
};

class PfFpLearner final : public Learner {
 public:
  PfFpLearner(const Game& game, int player, LearnerParams params, Rng& rng)
      : Learner(game, player, std::move(params)) {
    sets_.resize(game.num_players);
    for (int j : tracked_) {
      const int dim = game.action_counts[j];
      ParticleSet set;
      set.propensities = Matrix(params_.particles, dim);
      if (!params_.deterministic_init) {
        for (int p = 0; p < params_.particles; ++p)
          for (int d = 0; d < dim; ++d) set.propensities(p, d) = rng.normal();
      }
      set.weights.assign(params_.particles, 1.0 / params_.particles);
      sets_[j] = std::move(set);
    }
  }

  int step(std::span<const int> prev_joint, Rng& rng) override {
    const bool have_obs = !prev_joint.empty();
    JointMixedProfile profile = uniform_profile(*game_);
    const double jitter = std::sqrt(params_.noise.xi_tilde);
    for (int j : tracked_) {
      ParticleSet& set = sets_[j];
      const int dim = game_->action_counts[j];
      const int count = params_.particles;
      for (int p = 0; p < count; ++p)
        for (int d = 0; d < dim; ++d)
          set.propensities(p, d) += rng.normal(0.0, jitter);

      if (have_obs) {
        const int observed = prev_joint[j];
        for (int p = 0; p < count; ++p) {
          const MixedStrategy s = particle_strategy(set, p);
          set.weights[p] *= s.probs[observed];
        }
        double total = kern::sum(set.weights.data(), count);
        if (!(total > 0.0)) {
          set.weights.assign(count, 1.0 / count);
          ++weight_resets_;
        } else {
          kern::scale(set.weights.data(), 1.0 / total, set.weights.data(), count);
        }
        if (effective_sample_size(set.weights) <
            params_.resample_threshold * count)
          systematic_resample(set, rng);
      }

      std::vector<double> mixed(dim, 0.0);
      for (int p = 0; p < count; ++p) {
        const MixedStrategy s = particle_strategy(set, p);
        kern::axpy(set.weights[p], s.probs.data(), mixed.data(), dim);
      }
      const double z = kern::sum(mixed.data(), dim);
      kern::scale(mixed.data(), 1.0 / z, mixed.data(), dim);
      profile.strategies[j].probs = std::move(mixed);
    }
    const int action = decide(profile, rng);
    last_action_ = action;
    estimates_ = std::move(profile);
    return action;
  }

  MixedStrategy opponent_estimate(int opponent) const override {
    if (estimates_.strategies.empty() || sets_[opponent].weights.empty())
      return Learner::opponent_estimate(opponent);
    return estimates_.strategies[opponent];
  }

  int weight_reset_count() const override { return weight_resets_; }

 private:
  MixedStrategy particle_strategy(const ParticleSet& set, int p) const {
    const int dim = set.propensities.cols();
    return softmax_link(
        std::span<const double>(set.propensities.data() + p * dim, dim),
        params_.noise.tau);
  }

  static double effective_sample_size(const std::vector<double>& w) {
    const double sq = kern::dot(w.data(), w.data(), w.size());
    return sq > 0.0 ? 1.0 / sq : 0.0;
  }

  void systematic_resample(ParticleSet& set, Rng& rng) {
    const int count = static_cast<int>(set.weights.size());
    const int dim = set.propensities.cols();
    Matrix next(count, dim);
    const double start = rng.uniform() / count;
    double cumulative = set.weights[0];
    int idx = 0;
    for (int p = 0; p < count; ++p) {
      const double target = start + static_cast<double>(p) / count;
      while (cumulative < target && idx + 1 < count)
        cumulative += set.weights[++idx];
      for (int d = 0; d < dim; ++d) next(p, d) = set.propensities(idx, d);
    }
    set.propensities = std::move(next);
    set.weights.assign(count, 1.0 / count);
  }

  std::vector<ParticleSet> sets_;
  JointMixedProfile estimates_;
  int weight_resets_ = 0;
};

// --- baselines ---

class GreedyLearner final : public Learner {
 public:
  GreedyLearner(const Game& game, int player, LearnerParams params)
      : Learner(game, player, std::move(params)) {}

  int step(std::span<const int>, Rng& rng) override {
    const int action = decide(uniform_profile(*game_), rng);
    last_action_ = action;
    return action;
  }
};

class RandomLearner final : public Learner {
 public:
  RandomLearner(const Game& game, int player, LearnerParams params)
      : Learner(game, player, std::move(params)) {}

  int step(std::span<const int>, Rng& rng) override {
    const int action = rng.uniform_int(game_->action_counts[player_]);
    last_action_ = action;
    return action;
  }
};

}  // namespace

int baseline_step(LearnerKind kind, const Game& game, int player, Rng& rng,
                  const BestResponseOptions& opts) {
  if (kind == LearnerKind::random_choice)
    return rng.uniform_int(game.action_counts[player]);
  if (kind != LearnerKind::greedy)
    throw ConfigError("baseline_step: kind must be greedy or random");
  JointMixedProfile profile;
  for (int p = 0; p < game.num_players; ++p)
    profile.strategies.push_back(MixedStrategy::uniform(game.action_counts[p]));
  return best_response(game, player, profile, opts);
}

std::unique_ptr<Learner> make_learner(LearnerKind kind, const Game& game,
                                      int player, const LearnerParams& params,
                                      Rng& rng) {
  switch (kind) {
    case LearnerKind::classic_fp:
      return std::make_unique<ClassicFpLearner>(game, player, params);
    case LearnerKind::ekf_fp:
      return std::make_unique<EkfFpLearner>(game, player, params, rng);
    case LearnerKind::pf_fp:
      return std::make_unique<PfFpLearner>(game, player, params, rng);
    case LearnerKind::greedy:
      return std::make_unique<GreedyLearner>(game, player, params);
    case LearnerKind::random_choice:
      return std::make_unique<RandomLearner>(game, player, params);
  }
  throw ConfigError("make_learner: unknown kind");
}

}  // namespace ekfp
