#pragma once

#include <span>
#include <string>
#include <vector>

#include "ekfp/game.hpp"
#include "ekfp/linalg.hpp"
#include "ekfp/rng.hpp"

namespace ekfp {

// Gaussian estimate of one opponent's propensity vector.
struct GaussianBelief {
  std::vector<double> mean;
  Matrix cov;

  static GaussianBelief standard(int dim);  // mean 0, cov I

  int dim() const { return static_cast<int>(mean.size()); }
  // cov symmetric within tol and PSD (eigenvalues >= -tol)
  void validate(double tol = 1e-9) const;
};

// Observation-noise scale per iteration: a fixed value or 1/t.
struct ZetaSchedule {
  enum class Kind { fixed, inverse_t };
  Kind kind = Kind::inverse_t;
  double value = 0.0;

  static ZetaSchedule fixed(double v) { return {Kind::fixed, v}; }
  static ZetaSchedule inverse_t() { return {Kind::inverse_t, 0.0}; }

  double operator()(int t) const;  // t >= 1
  std::string to_string() const;
  void validate() const;
};

struct NoiseConfig {
  double xi_tilde = 0.1;  // state-noise scale
  double psi = 0.05;      // variance of the jitter added to xi_tilde
  ZetaSchedule zeta;      // observation-noise scale
  double tau = 1.0;       // softmax temperature

  void validate() const;
};

// Boltzmann link h(q)_k = exp(q_k / tau) / sum_j exp(q_j / tau), computed
// with max-subtraction so large propensities cannot overflow.
MixedStrategy softmax_link(std::span<const double> q, double tau);

// Derivative of softmax_link at q: H[j,j] = s_j (1 - s_j) / tau,
// H[j,j'] = -s_j s_j' / tau. Symmetric; rows sum to zero.
Matrix softmax_jacobian(std::span<const double> q, double tau);

// Prediction step for the identity-transition propensity walk: mean is kept,
// covariance grows by (xi_tilde + eps) I with eps ~ N(0, psi) clamped from
// below at -xi_tilde so the increment stays PSD.
GaussianBelief ekf_predict(const GaussianBelief& belief,
                           const NoiseConfig& noise, Rng& rng);

// Measurement update against the one-hot observation of the opponent's
// action. t indexes the fictitious-play iteration for the zeta schedule.
GaussianBelief ekf_update(const GaussianBelief& predicted, int observed_action,
                          int t, const NoiseConfig& noise);

}  // namespace ekfp
