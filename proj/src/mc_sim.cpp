#include "iclt/mc_sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <string>
#include <thread>

namespace iclt::mc {

void validate(const McConfig& cfg) {
  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) throw std::invalid_argument("dt must be > 0");
  if (!(cfg.total_time >= 1000.0 * cfg.dt) || !std::isfinite(cfg.total_time))
    throw std::invalid_argument("total time must be at least 1000 * dt");
  if (cfg.n_paths < 1) throw std::invalid_argument("paths must be >= 1");
  if (cfg.n_batches < 8) throw std::invalid_argument("batches must be >= 8");
  if (!(cfg.theta0 >= 0.0 && cfg.theta0 < 2.0 * std::numbers::pi))
    throw std::invalid_argument("theta0 must lie in [0, 2 pi)");
}

NonFiniteStateError::NonFiniteStateError(int path, long long step)
    : std::runtime_error("non-finite angle on path " + std::to_string(path) + " at step " +
                         std::to_string(step)),
      step_(step) {}

double angle_drift(double theta, const SdeParams& p) {
  return -0.5 * (p.a() - p.b()) * std::sin(2.0 * theta);
}

double growth_rate(double theta, const SdeParams& p) {
  const double cs = std::cos(theta), sn = std::sin(theta);
  return p.a() * cs * cs + p.b() * sn * sn;
}

namespace {

constexpr double kPi = std::numbers::pi;

// Drift and Q are pi-periodic, so the state is kept in [0, pi).
double wrap(double theta) {
  if (theta >= kPi) {
    theta -= kPi;
    if (theta >= kPi) theta = std::fmod(theta, kPi);
  } else if (theta < 0.0) {
    theta += kPi;
    if (theta < 0.0) theta = kPi + std::fmod(theta, kPi);
    if (theta >= kPi) theta = 0.0;
  }
  return theta;
}

// One Euler-Maruyama step; returns Q(theta) at the left point.
struct Stepper {
  double mid;   // (a + b) / 2
  double half;  // (a - b) / 2
  double dt;

  double step(double& theta, double noise) const {
    const double s = std::sin(2.0 * theta);
    const double c = std::cos(2.0 * theta);
    theta = wrap(theta - half * s * dt + noise);
    return mid + half * c;
  }
};

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Counter-based stream: the i-th word of a path is splitmix64(key + i * golden),
// with the key derived from (seed, path). Normals come from Marsaglia's polar
// method, which uses only basic arithmetic, log and sqrt.
class GaussianStream {
 public:
  GaussianStream(std::uint64_t seed, std::uint64_t path)
      : key_(splitmix64(seed ^ splitmix64(path + 1))) {}

  double next() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

 private:
  double uniform() {
    counter_ += 0x9e3779b97f4a7c15ULL;
    return static_cast<double>(splitmix64(key_ + counter_) >> 11) * 0x1.0p-53;
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

struct PathResult {
  double ell = 0.0;
  double s2 = 0.0;
};

// Paths are advanced in small interleaved groups so that the independent
// dependency chains overlap; each lane's arithmetic is exactly that of a
// path run on its own.
constexpr int kLanes = 4;

void run_group(const SdeParams& p, const McConfig& cfg, int first, int lanes,
               long long batch_steps, std::span<PathResult> out) {
  const Stepper stepper{0.5 * (p.a() + p.b()), 0.5 * (p.a() - p.b()), cfg.dt};
  const double noise_scale = p.sigma() * std::sqrt(cfg.dt);

  std::vector<GaussianStream> gauss;
  for (int k = 0; k < lanes; ++k) gauss.emplace_back(cfg.seed, static_cast<std::uint64_t>(first + k));
  double theta[kLanes], total[kLanes], acc[kLanes];
  std::vector<double> batch_means[kLanes];
  for (int k = 0; k < lanes; ++k) {
    theta[k] = wrap(std::fmod(cfg.theta0, kPi));
    total[k] = 0.0;
    batch_means[k].reserve(static_cast<std::size_t>(cfg.n_batches));
  }

  for (int b = 0; b < cfg.n_batches; ++b) {
    for (int k = 0; k < lanes; ++k) acc[k] = 0.0;
    for (long long i = 0; i < batch_steps; ++i)
      for (int k = 0; k < lanes; ++k) acc[k] += stepper.step(theta[k], noise_scale * gauss[k].next());
    for (int k = 0; k < lanes; ++k) {
      if (!std::isfinite(theta[k]) || !std::isfinite(acc[k]))
        throw NonFiniteStateError(first + k, (b + 1) * batch_steps);
      total[k] += acc[k];
      batch_means[k].push_back(acc[k] / static_cast<double>(batch_steps));
    }
  }

  const double n_batches = cfg.n_batches;
  const double horizon = static_cast<double>(batch_steps) * n_batches * cfg.dt;
  for (int k = 0; k < lanes; ++k) {
    double batch_mean = 0.0;
    for (double y : batch_means[k]) batch_mean += y;
    batch_mean /= n_batches;
    double ss = 0.0;
    for (double y : batch_means[k]) ss += (y - batch_mean) * (y - batch_mean);
    const double batch_var = ss / (n_batches - 1.0);
    out[k] = {total[k] * cfg.dt / horizon, static_cast<double>(batch_steps) * cfg.dt * batch_var};
  }
}

double sample_sd(const std::vector<double>& xs, double mean) {
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

}  // namespace

PathIntegral integrate_path(const SdeParams& p, double dt, double theta0,
                            std::span<const double> dW) {
  const Stepper stepper{0.5 * (p.a() + p.b()), 0.5 * (p.a() - p.b()), dt};
  double theta = wrap(std::fmod(theta0, kPi));
  double acc = 0.0;
  for (double w : dW) acc += stepper.step(theta, p.sigma() * w);
  return {acc * dt, theta};
}

McEstimate simulate(const SdeParams& p, const McConfig& cfg) {
  validate(cfg);
  McEstimate est;
  est.config = cfg;
  const auto steps = static_cast<long long>(std::llround(cfg.total_time / cfg.dt));
  est.batch_steps = steps / cfg.n_batches;
  est.steps_per_path = est.batch_steps * cfg.n_batches;
  est.horizon = static_cast<double>(est.steps_per_path) * cfg.dt;

  std::vector<PathResult> results(static_cast<std::size_t>(cfg.n_paths));
  const int n_groups = (cfg.n_paths + kLanes - 1) / kLanes;
  std::atomic<int> next_group{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (int g = next_group++; g < n_groups && !failed; g = next_group++) {
      const int first = g * kLanes;
      const int lanes = std::min(kLanes, cfg.n_paths - first);
      try {
        run_group(p, cfg, first, lanes, est.batch_steps,
                  std::span<PathResult>(results).subspan(first, lanes));
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    }
  };
  unsigned n_threads = cfg.threads != 0 ? cfg.threads : std::thread::hardware_concurrency();
  n_threads = std::max(1u, std::min<unsigned>(n_threads, static_cast<unsigned>(n_groups)));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  for (const auto& r : results) {
    est.path_ell.push_back(r.ell);
    est.path_s2.push_back(r.s2);
  }
  const double n = cfg.n_paths;
  double ell_sum = 0.0, s2_sum = 0.0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    ell_sum += est.path_ell[i];
    s2_sum += est.path_s2[i];
  }
  est.ell_hat = ell_sum / n;
  est.s2_hat = s2_sum / n;
  if (cfg.n_paths >= 2) {
    est.ell_se = sample_sd(est.path_ell, est.ell_hat) / std::sqrt(n);
    est.s2_se = sample_sd(est.path_s2, est.s2_hat) / std::sqrt(n);
  } else {
    est.ell_se = std::sqrt(est.s2_hat / est.horizon);
    est.s2_se = est.s2_hat * std::sqrt(2.0 / (cfg.n_batches - 1.0));
  }

  const double per_path_se = std::sqrt(est.s2_hat / est.horizon);
  for (double ell : est.path_ell)
    if (std::abs(ell - est.ell_hat) > 6.0 * per_path_se) est.sanity_ok = false;
  return est;
}

}  // namespace iclt::mc
