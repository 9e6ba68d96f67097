// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "iclt/mc_sim.hpp"
#include "iclt/perturbation.hpp"
#include "iclt/quadrature.hpp"
#include "iclt/specfun.hpp"
#include "iclt/spectral.hpp"
#include "oracles.hpp"

using namespace iclt;
using test::rel_err;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void report(int id, const char* title, bool ok, const std::string& detail) {
  std::printf("[%s] criterion %d: %s -- %s\n", ok ? "PASS" : "FAIL", id, title, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

bool regression(int id, double sigma, double ell_ref, double s2_ref) {
  const auto t0 = Clock::now();
  const auto r = perturbation::compute_clt(SdeParams(1, -2, sigma));
  const double secs = seconds_since(t0);
  const double e_ell = rel_err(r.ell, ell_ref);
  const double e_s2 = rel_err(r.s2, s2_ref);
  const bool ok = e_ell <= 1e-12 && e_s2 <= 1e-12 && secs < 1.0;
  report(id, sigma == 10 ? "published pair, sigma = 10" : "published pair, sigma = 1", ok,
         fmt("ell=%.17g (rel %.2e) s2=%.17g (rel %.2e) in %.3fs", r.ell, e_ell, r.s2, e_s2, secs));
  return ok;
}

void cross_method() {
  double worst = 0.0, worst_zero = 0.0;
  for (double c : {-0.03, -1.0, -3.0, -10.0}) {
    for (double mu : {1e-4, 1e-3, 1e-2}) {
      const double m = spectral::leftmost_eigenvalue(spectral::build_matrix(c, mu, 40));
      const double f = spectral::continued_fraction_lambda(c, mu, 60);
      worst = std::max(worst, std::abs(m - f));
    }
    worst_zero = std::max({worst_zero, std::abs(spectral::leftmost_eigenvalue(spectral::build_matrix(c, 0.0, 40))),
                           std::abs(spectral::continued_fraction_lambda(c, 0.0, 60))});
  }
  report(3, "matrix (N=40) vs continued fraction (depth 60)", worst <= 1e-12 && worst_zero <= 1e-13,
         fmt("max |matrix - cfrac| = %.2e, max |lambda(0)| = %.2e", worst, worst_zero));
}

void derivatives() {
  spectral::SpectralOptions opts;
  opts.matrix_size = 40;
  opts.depth = 60;
  double worst = 0.0, worst_one_sided = 0.0;
  for (double c : {-0.03, -3.0}) {
    const double l1 = perturbation::lambda_prime_zero(c);
    const double l2 = perturbation::lambda_double_prime_zero(c);
    for (auto method : {spectral::Method::matrix, spectral::Method::cfrac}) {
      const auto d = spectral::derivatives_by_differencing(c, 1e-4, method, opts);
      worst = std::max({worst, std::abs(d.lambda1 - l1), std::abs(d.lambda2 - l2)});
      worst_one_sided =
          std::max({worst_one_sided, std::abs(d.one_sided_lambda1 - l1), std::abs(d.one_sided_lambda2 - l2)});
    }
  }
  report(4, "derivatives by differencing", worst <= 1e-8 && worst_one_sided <= 1e-4,
         fmt("central+Richardson max dev %.2e, one-sided max dev %.2e", worst, worst_one_sided));
}

void monte_carlo() {
  const SdeParams p(1, -2, 1);
  mc::McConfig cfg;
  cfg.dt = 1e-3;
  cfg.total_time = 1e4;
  cfg.n_paths = 64;
  const auto t0 = Clock::now();
  const auto first = mc::simulate(p, cfg);
  const double secs = seconds_since(t0);
  const auto second = mc::simulate(p, cfg);
  const double z = (first.ell_hat - test::kEllSigma1) / first.ell_se;
  const double s2_rel = rel_err(first.s2_hat, test::kS2Sigma1);
  const bool identical = first.ell_hat == second.ell_hat && first.s2_hat == second.s2_hat &&
                         first.ell_se == second.ell_se && first.s2_se == second.s2_se &&
                         first.path_ell == second.path_ell && first.path_s2 == second.path_s2;
  const bool ok = std::abs(z) <= 3.0 && s2_rel <= 0.2 && secs < 60.0 && identical;
  report(5, "Monte Carlo CLT check", ok,
         fmt("ell=%.6f (z=%.2f) s2=%.6f (rel %.3f) in %.1fs, rerun %s", first.ell_hat, z, first.s2_hat, s2_rel,
             secs, identical ? "bit-identical" : "DIFFERS"));
}

// Each property returns its worst deviation and whether it meets its tolerance.
struct Property {
  const char* name;
  std::function<bool(std::string&)> check;
};

bool bessel_properties(std::string& out) {
  double worst = 0.0;
  for (double x : {0.01, 0.5, 1.5, 7.0, 19.5, 25.0, 80.0}) {
    const double scale = specfun::bessel_i(0, x);
    for (int n = 1; n <= 20; ++n) {
      const double lhs = specfun::bessel_i(n - 1, x) - specfun::bessel_i(n + 1, x);
      const double rhs = 2.0 * n / x * specfun::bessel_i(n, x);
      worst = std::max(worst, std::abs(lhs - rhs) / scale);
    }
    for (int n = 0; n <= 20; ++n) {
      const double parity = specfun::bessel_i(n, -x) - (n % 2 ? -1.0 : 1.0) * specfun::bessel_i(n, x);
      worst = std::max(worst, std::abs(parity) / scale);
    }
  }
  out = fmt("%.1e", worst);
  return worst <= 1e-12;
}

bool shift_property(std::string& out) {
  double worst = 0.0;
  const auto base = perturbation::compute_clt(SdeParams(1, -2, 10));
  for (double h : {-1.0, 0.5, 3.0}) {
    const auto s = perturbation::compute_clt(SdeParams(1 + h, -2 + h, 10));
    worst = std::max({worst, std::abs(s.ell - base.ell - h), std::abs(s.s2 - base.s2),
                      std::abs(s.lambda1 - base.lambda1), std::abs(s.lambda2 - base.lambda2)});
  }
  out = fmt("%.1e", worst);
  return worst <= 1e-12;
}

bool rescale_property(std::string& out) {
  double worst = 0.0;
  for (double sigma : {1.0, 10.0}) {
    const auto base = perturbation::compute_clt(SdeParams(1, -2, sigma));
    for (double kappa : {0.25, 4.0}) {
      const auto s = perturbation::compute_clt(SdeParams(kappa, -2 * kappa, std::sqrt(kappa) * sigma));
      worst = std::max({worst, rel_err(s.ell, kappa * base.ell), rel_err(s.s2, kappa * base.s2)});
    }
  }
  out = fmt("%.1e", worst);
  return worst <= 1e-10;
}

bool nonnegative_property(std::string& out) {
  double lowest = INFINITY;
  int n = 0;
  for (double a : {-1.0, 0.5, 2.0, 5.0})
    for (double gap : {0.01, 1.0, 4.0, 12.0, 40.0}) {
      const double sigma = 0.3 + 0.7 * (n++ % 5);
      lowest = std::min(lowest, perturbation::compute_clt(SdeParams(a, a - gap, sigma)).s2);
    }
  out = fmt("min s2 over %d points %.3e", n, lowest);
  return n == 20 && lowest >= 0.0;
}

bool boundary_property(std::string& out) {
  double worst = 0.0;
  for (double c : {-0.03, -1.0, -3.0, -10.0}) {
    const auto corr = perturbation::eigenfunction_correction(c, quadrature::PeriodicGrid(1024));
    worst = std::max(worst, std::abs(corr.zprime_values.back()));
  }
  out = fmt("%.1e", worst);
  return worst <= 1e-12;
}

bool solvability_property(std::string& out) {
  double worst = 0.0;
  for (double c : {-0.03, -1.0, -3.0}) {
    const quadrature::PeriodicGrid grid(8192);
    const auto corr = perturbation::eigenfunction_correction(c, grid);
    const double l1 = perturbation::lambda_prime_zero(c);
    const double l2 = perturbation::lambda_double_prime_zero(c);
    std::vector<double> g(grid.size());
    for (std::size_t j = 0; j < g.size(); ++j) {
      const double cs = std::cos(2 * grid.node(j));
      g[j] = (2 * (c * cs - l1) * corr.z_values[j] - l2) * std::exp(-0.5 * c * cs);
    }
    worst = std::max(worst, std::abs(quadrature::integrate_samples(g, grid)));
  }
  out = fmt("%.1e", worst);
  return worst <= 1e-11;
}

bool ince_residual_property(std::string& out) {
  const double c = -3.0;
  const quadrature::PeriodicGrid grid(2048);
  const auto corr = perturbation::eigenfunction_correction(c, grid);
  const double h = grid.step();
  const auto& z = corr.z_values;
  const auto& zp = corr.zprime_values;
  const auto residual = [&](double mu) {
    const double lam = spectral::continued_fraction_lambda(c, mu, 60);
    double worst = 0.0;
    for (std::size_t j = 2; j + 2 < grid.size(); ++j) {
      const double x = grid.node(j);
      const double zpp = (-zp[j + 2] + 8 * zp[j + 1] - 8 * zp[j - 1] + zp[j - 2]) / (12 * h);
      const double r = mu * zpp + c * std::sin(2 * x) * mu * zp[j] + (lam - mu * c * std::cos(2 * x)) * (1 + mu * z[j]);
      worst = std::max(worst, std::abs(r));
    }
    return worst;
  };
  const double ratio = residual(1e-2) / residual(5e-3);
  out = fmt("halving ratio %.3f", ratio);
  return std::abs(ratio - 4.0) <= 0.8;
}

void properties() {
  const std::vector<Property> suite = {
      {"bessel recurrence/parity", bessel_properties}, {"shift", shift_property},
      {"time rescaling", rescale_property},            {"s2 >= 0", nonnegative_property},
      {"z'(pi) = 0", boundary_property},               {"solvability", solvability_property},
      {"Ince residual O(mu^2)", ince_residual_property}};
  bool all = true;
  std::string detail;
  for (const auto& prop : suite) {
    std::string d;
    const bool ok = prop.check(d);
    all = all && ok;
    if (!detail.empty()) detail += "; ";
    detail += fmt("%s %s [%s]", prop.name, ok ? "ok" : "FAILED", d.c_str());
  }
  report(6, "property suites", all, detail);
}

// Double precision carries about 16 digits, so the 25-digit reference values can only
// be matched to roughly 13 significant digits. This criterion confirms that level.
void precision_scope() {
  const auto r10 = perturbation::compute_clt(SdeParams(1, -2, 10));
  const auto r1 = perturbation::compute_clt(SdeParams(1, -2, 1));
  const double worst = std::max({rel_err(r10.ell, test::kEllSigma10), rel_err(r10.s2, test::kS2Sigma10),
                                 rel_err(r1.ell, test::kEllSigma1), rel_err(r1.s2, test::kS2Sigma1)});
  const double digits = worst > 0 ? -std::log10(worst) : 17.0;
  report(7, "precision scope (about 13 digits, not 25)", worst <= 1e-12,
         fmt("worst relative error %.2e, about %.1f matching significant digits", worst, digits));
}

}  // namespace

int main() {
  regression(1, 10.0, test::kEllSigma10, test::kS2Sigma10);
  regression(2, 1.0, test::kEllSigma1, test::kS2Sigma1);
  cross_method();
  derivatives();
  monte_carlo();
  properties();
  precision_scope();
  std::printf("%s: %d criterion(s) failed\n", failures ? "FAILED" : "ALL PASSED", failures);
  return failures ? 1 : 0;
}
