#include "ekfp/filters.hpp"

#include <cmath>

#include "ekfp/errors.hpp"
#include "ekfp/kernels.hpp"

namespace ekfp {

GaussianBelief GaussianBelief::standard(int dim) {
  GaussianBelief b;
  b.mean.assign(dim, 0.0);
  b.cov = Matrix::identity(dim);
  return b;
}

void GaussianBelief::validate(double tol) const {
  if (cov.rows() != dim() || cov.cols() != dim())
    throw ConfigError("GaussianBelief: covariance dimension mismatch");
  if (!cov.is_symmetric(tol))
    throw NumericError("GaussianBelief: covariance not symmetric");
  if (min_symmetric_eigenvalue(cov) < -tol)
    throw NumericError("GaussianBelief: covariance not PSD");
}

double ZetaSchedule::operator()(int t) const {
  if (t < 1) throw ConfigError("ZetaSchedule: iteration must be >= 1");
  return kind == Kind::fixed ? value : 1.0 / t;
}

std::string ZetaSchedule::to_string() const {
  return kind == Kind::fixed ? std::to_string(value) : "1/t";
}

void ZetaSchedule::validate() const {
  if (kind == Kind::fixed && !(value > 0.0))
    throw ConfigError("ZetaSchedule: fixed value must be positive");
}

void NoiseConfig::validate() const {
  if (!(xi_tilde >= 0.0)) throw ConfigError("NoiseConfig: xi_tilde must be >= 0");
  if (!(psi >= 0.0)) throw ConfigError("NoiseConfig: psi must be >= 0");
  if (!(tau > 0.0)) throw ConfigError("NoiseConfig: tau must be > 0");
  zeta.validate();
}

MixedStrategy softmax_link(std::span<const double> q, double tau) {
  if (!(tau > 0.0)) throw ConfigError("softmax_link: tau must be > 0");
  if (q.empty()) throw ConfigError("softmax_link: empty input");
  for (double v : q)
    if (!std::isfinite(v)) throw NumericError("softmax_link: non-finite input");
  const double m = kern::max_value(q.data(), q.size());
  MixedStrategy s;
  s.probs.resize(q.size());
  for (std::size_t i = 0; i < q.size(); ++i)
    s.probs[i] = std::exp((q[i] - m) / tau);
  const double z = kern::sum(s.probs.data(), s.probs.size());
  kern::scale(s.probs.data(), 1.0 / z, s.probs.data(), s.probs.size());
  return s;
}

Matrix softmax_jacobian(std::span<const double> q, double tau) {
  const MixedStrategy s = softmax_link(q, tau);
  const int n = s.size();
  Matrix h(n, n);
  for (int j = 0; j < n; ++j) {
    for (int j2 = 0; j2 < n; ++j2) {
      h(j, j2) = j == j2 ? s.probs[j] * (1.0 - s.probs[j]) / tau
                         : -s.probs[j] * s.probs[j2] / tau;
    }
  }
  return h;
}

GaussianBelief ekf_predict(const GaussianBelief& belief,
                           const NoiseConfig& noise, Rng& rng) {
  double eps = noise.psi > 0.0 ? rng.normal(0.0, std::sqrt(noise.psi)) : 0.0;
  if (eps < -noise.xi_tilde) eps = -noise.xi_tilde;
  GaussianBelief out = belief;
  out.cov.add_scaled_identity(noise.xi_tilde + eps);
  return out;
}

GaussianBelief ekf_update(const GaussianBelief& predicted, int observed_action,
                          int t, const NoiseConfig& noise) {
  const int n = predicted.dim();
  if (observed_action < 0 || observed_action >= n)
    throw ConfigError("ekf_update: observed action out of range");
  const double zeta = noise.zeta(t);

  const MixedStrategy h_of_q = softmax_link(predicted.mean, noise.tau);
  std::vector<double> innovation(n);
  for (int i = 0; i < n; ++i)
    innovation[i] = (i == observed_action ? 1.0 : 0.0) - h_of_q.probs[i];

  const Matrix h = softmax_jacobian(predicted.mean, noise.tau);
  const Matrix ph_t = matmul(predicted.cov, h.transposed());
  Matrix s = matmul(h, ph_t);
  s.add_scaled_identity(zeta);

  // K = P- H^T S^-1; with S symmetric this is (S^-1 (P- H^T)^T)^T
  const Matrix gain = solve_spd(s, ph_t.transposed()).transposed();

  GaussianBelief out;
  out.mean = matvec(gain, innovation);
  kern::add(out.mean.data(), predicted.mean.data(), out.mean.data(), n);
  out.cov = predicted.cov - matmul(matmul(gain, s), gain.transposed());
  out.cov.symmetrize();
  return out;
}

}  // namespace ekfp
