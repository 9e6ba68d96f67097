#include "iclt/perturbation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "iclt/specfun.hpp"

namespace iclt::perturbation {

using quadrature::PeriodicGrid;

ConvergenceError::ConvergenceError(double last, double previous, int intervals)
    : std::runtime_error([&] {
        std::ostringstream msg;
        msg.precision(17);
        msg << "lambda''(0) did not converge by m = " << intervals << ": last " << last
            << ", previous " << previous;
        return msg.str();
      }()),
      last_(last),
      previous_(previous) {}

double ince_coefficient(const SdeParams& p) {
  return -(p.a() - p.b()) / (p.sigma() * p.sigma());
}

double lambda_prime_zero(double c) {
  if (c == 0.0) return 0.0;
  const double r = -0.5 * c;
  return c * specfun::bessel_i(1, r) / specfun::bessel_i(0, r);
}

namespace {

std::vector<double> jk_from_bessel(const std::vector<double>& ik, int K) {
  const double ratio = ik[1] / ik[0];
  std::vector<double> jk(static_cast<std::size_t>(K));
  for (int k = 1; k <= K; ++k) jk[k - 1] = ik[k - 1] - 2.0 * ratio * ik[k] + ik[k + 1];
  return jk;
}

// sin(2 k t_j) with the angle reduced on the integer lattice so that nodes at
// multiples of pi/2 give exact zeros.
double lattice_sin(long long k, std::size_t j, int m) {
  const long long period = 2LL * m;
  const long long idx = (2LL * k * static_cast<long long>(j)) % period;
  return std::sin(std::numbers::pi * static_cast<double>(idx) / m);
}

}  // namespace

std::vector<double> jk_coefficients(double c, int K) {
  if (K < 1) throw std::invalid_argument("jk_coefficients: K must be >= 1");
  return jk_from_bessel(specfun::cos_expansion_coeffs(-0.5 * c, K + 1), K);
}

int jk_order(double c) {
  const double r = -0.5 * c;
  const double i0 = specfun::bessel_i(0, r);
  const double i1 = specfun::bessel_i(1, r);
  const double ratio = i1 / i0;
  const double j1 = i0 - 2.0 * ratio * i1 + specfun::bessel_i(2, r);
  const double threshold = 1e-16 * (std::abs(j1) + 1.0);
  double lower = i1;
  double mid = specfun::bessel_i(2, r);
  for (int k = 2; k < 1000; ++k) {
    const double upper = specfun::bessel_i(k + 1, r);
    const double jk = lower - 2.0 * ratio * mid + upper;
    if (std::abs(jk) * std::max(1.0, 1.0 / k) < threshold) return k;
    lower = mid;
    mid = upper;
  }
  throw std::runtime_error("jk_order: series did not decay");
}

EigenfunctionCorrection eigenfunction_correction(double c, const PeriodicGrid& grid,
                                                 int series_k) {
  const int K = series_k > 0 ? series_k : jk_order(c);
  EigenfunctionCorrection out{grid, {}, {}, jk_coefficients(c, K), K};

  const int m = grid.intervals();
  out.zprime_values.assign(grid.size(), 0.0);
  if (c != 0.0) {
    std::vector<double> weights(out.jk.size());
    for (int k = 1; k <= K; ++k) weights[k - 1] = 0.5 * c * out.jk[k - 1] / k;
    for (std::size_t j = 0; j < grid.size(); ++j) {
      double sum = 0.0;
      for (int k = 1; k <= K; ++k) sum += weights[k - 1] * lattice_sin(k, j, m);
      const double cos2 = std::cos(2.0 * grid.node(j));
      out.zprime_values[j] = std::exp(0.5 * c * cos2) * sum;
    }
  }
  out.z_values = quadrature::cumulative_samples(out.zprime_values, grid);
  return out;
}

namespace {

double second_derivative_on(double c, double lambda1, double i0, const PeriodicGrid& grid,
                            int K) {
  const auto corr = eigenfunction_correction(c, grid, K);
  std::vector<double> integrand(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double cos2 = std::cos(2.0 * grid.node(j));
    integrand[j] = (c * cos2 - lambda1) * corr.z_values[j] * std::exp(-0.5 * c * cos2);
  }
  return 2.0 / (std::numbers::pi * i0) * quadrature::integrate_samples(integrand, grid);
}

}  // namespace

SecondDerivative second_derivative(double c, const Options& opts) {
  SecondDerivative out;
  if (c == 0.0) {
    out.intervals = opts.grid;
    out.K = 1;
    return out;
  }
  const int K = opts.series_k > 0 ? opts.series_k : jk_order(c);
  out.K = K;
  {
    const auto tail = jk_coefficients(c, K + 6);
    for (int k = K; k < K + 6; ++k) out.tail_bound += std::abs(tail[k]);
  }
  const double lambda1 = lambda_prime_zero(c);
  const double i0 = specfun::bessel_i(0, -0.5 * c);

  PeriodicGrid grid(opts.grid);
  double previous = second_derivative_on(c, lambda1, i0, grid, K);
  double before = previous;
  const double stop = 0.1 * opts.tol;
  while (grid.intervals() < opts.max_grid) {
    grid = grid.refined();
    const double value = second_derivative_on(c, lambda1, i0, grid, K);
    if (std::abs(value - previous) <= stop * std::abs(value)) {
      out.value = value;
      out.previous = previous;
      out.intervals = grid.intervals();
      return out;
    }
    before = previous;
    previous = value;
  }
  throw ConvergenceError(previous, before, grid.intervals());
}

double lambda_double_prime_zero(double c, const Options& opts) {
  return second_derivative(c, opts).value;
}

CltResult compute_clt(const SdeParams& p, const Options& opts) {
  const double c = ince_coefficient(p);
  const double half_var = 0.5 * p.sigma() * p.sigma();
  const auto second = second_derivative(c, opts);

  CltResult out;
  out.lambda1 = lambda_prime_zero(c);
  out.lambda2 = second.value;
  out.ell = 0.5 * (p.a() + p.b()) - half_var * out.lambda1;
  out.s2 = -half_var * out.lambda2;
  out.method = "perturbation";
  out.diagnostics = {second.K, second.intervals, second.tail_bound,
                     std::abs(second.value - second.previous)};
  return out;
}

double lambda_to_gamma(double lambda, double mu, const SdeParams& p) {
  return 0.5 * ((p.a() + p.b()) * mu - p.sigma() * p.sigma() * lambda);
}

double gamma_to_lambda(double gamma, double mu, const SdeParams& p) {
  const double var = p.sigma() * p.sigma();
  return (-2.0 * gamma + (p.a() + p.b()) * mu) / var;
}

}  // namespace iclt::perturbation
