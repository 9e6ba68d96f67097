#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "iclt/sde_params.hpp"

namespace iclt::mc {

struct McConfig {
  double dt = 1e-3;
  double total_time = 1e4;
  int n_paths = 64;
  int n_batches = 32;
  std::uint64_t seed = 20080930;
  double theta0 = 0.0;
  unsigned threads = 0;  // 0 = hardware concurrency
};

/// Throws std::invalid_argument naming the violated constraint.
void validate(const McConfig& cfg);

/// The angle state became non-finite.
class NonFiniteStateError : public std::runtime_error {
 public:
  NonFiniteStateError(int path, long long step);
  long long step() const { return step_; }

 private:
  long long step_;
};

/// Drift of the projected angle, d(theta) = -((a-b)/2) sin(2 theta) dt + sigma dW.
double angle_drift(double theta, const SdeParams& p);

/// Q(theta) = a cos^2 theta + b sin^2 theta; ln|X_t| = ln|X_0| + int_0^t Q(theta_s) ds.
double growth_rate(double theta, const SdeParams& p);

struct PathIntegral {
  double integral = 0.0;  // left-point sum of Q dt
  double theta_final = 0.0;
};

/// Euler-Maruyama over the supplied Brownian increments (one per step).
PathIntegral integrate_path(const SdeParams& p, double dt, double theta0,
                            std::span<const double> dW);

struct McEstimate {
  double ell_hat = 0.0;
  double ell_se = 0.0;
  double s2_hat = 0.0;
  double s2_se = 0.0;
  std::vector<double> path_ell;
  std::vector<double> path_s2;
  long long steps_per_path = 0;
  long long batch_steps = 0;
  double horizon = 0.0;  // steps_per_path * dt
  bool sanity_ok = true;  // every path_ell within 6 per-path standard errors of ell_hat
  McConfig config;
};

/// Time-average estimate of ell and batch-means estimate of s^2, pooled over
/// independent paths. Bit-identical for identical (p, cfg) regardless of the
/// thread count.
McEstimate simulate(const SdeParams& p, const McConfig& cfg);

}  // namespace iclt::mc
