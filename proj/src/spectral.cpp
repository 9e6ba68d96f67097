#include "iclt/spectral.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>

#include "iclt/perturbation.hpp"

namespace iclt::spectral {

TridiagonalTruncation build_matrix(double c, double mu, int N) {
  if (N < 8) throw std::invalid_argument("build_matrix: N must be >= 8");
  const auto q = [&](int n) { return (-n + 0.5 * mu) * c; };
  TridiagonalTruncation T;
  T.diag.resize(N);
  T.super.resize(N - 1);
  T.sub.resize(N - 1);
  for (int n = 0; n < N; ++n) T.diag[n] = 4.0 * n * n;
  T.super[0] = std::numbers::sqrt2 * q(-1);
  T.sub[0] = std::numbers::sqrt2 * q(0);
  for (int n = 1; n < N - 1; ++n) {
    T.super[n] = q(-(n + 1));
    T.sub[n] = q(n);
  }
  return T;
}

namespace {

// Number of eigenvalues of the symmetric tridiagonal (a, e) below x.
int sturm_count(std::span<const double> a, std::span<const double> e2, double x) {
  int count = 0;
  double d = 1.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    d = a[i] - x - (i > 0 ? e2[i - 1] / d : 0.0);
    if (d == 0.0) d = -std::numeric_limits<double>::min();
    if (d < 0.0) ++count;
  }
  return count;
}

double sturm_leftmost(std::span<const double> a, std::span<const double> e2) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double radius = (i > 0 ? std::sqrt(e2[i - 1]) : 0.0) +
                          (i < e2.size() ? std::sqrt(e2[i]) : 0.0);
    lo = std::min(lo, a[i] - radius);
    hi = std::max(hi, a[i] + radius);
  }
  constexpr int kMaxIterations = 5000;
  for (int it = 0; it < kMaxIterations; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) return mid;
    if (sturm_count(a, e2, mid) >= 1)
      hi = mid;
    else
      lo = mid;
  }
  std::ostringstream msg;
  msg.precision(17);
  msg << "Sturm bisection stalled after " << kMaxIterations << " iterations on [" << lo << ", "
      << hi << "]";
  throw SpectralError(msg.str());
}

double dense_leftmost(const TridiagonalTruncation& T, std::size_t begin, std::size_t end) {
  const auto n = static_cast<Eigen::Index>(end - begin);
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    M(i, i) = T.diag[begin + i];
    if (i + 1 < n) {
      M(i, i + 1) = T.super[begin + i];
      M(i + 1, i) = T.sub[begin + i];
    }
  }
  Eigen::EigenSolver<Eigen::MatrixXd> solver(M, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "dense eigensolver failed on a " << n << "x" << n << " block starting at row " << begin;
    throw SpectralError(msg.str());
  }
  const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
  std::optional<double> best;
  for (const auto& ev : solver.eigenvalues()) {
    if (std::abs(ev.imag()) > 1e-10 * scale) continue;
    if (!best || ev.real() < *best) best = ev.real();
  }
  if (!best) throw SpectralError("dense eigensolver found no real eigenvalue");
  return *best;
}

double block_leftmost(const TridiagonalTruncation& T, std::size_t begin, std::size_t end) {
  if (end - begin == 1) return T.diag[begin];
  std::vector<double> e2;
  e2.reserve(end - begin - 1);
  bool symmetrizable = true;
  for (std::size_t i = begin; i + 1 < end; ++i) {
    const double prod = T.super[i] * T.sub[i];
    if (!(prod > 0.0)) {
      symmetrizable = false;
      break;
    }
    e2.push_back(prod);
  }
  if (!symmetrizable) return dense_leftmost(T, begin, end);
  return sturm_leftmost(std::span<const double>(T.diag).subspan(begin, end - begin), e2);
}

}  // namespace

double leftmost_eigenvalue(const TridiagonalTruncation& T) {
  const std::size_t n = T.size();
  if (n == 0 || T.super.size() + 1 != n || T.sub.size() + 1 != n)
    throw std::invalid_argument("leftmost_eigenvalue: inconsistent diagonal lengths");
  double best = std::numeric_limits<double>::infinity();
  std::size_t begin = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const bool split = i + 1 == n || T.super[i] * T.sub[i] == 0.0;
    if (!split) continue;
    best = std::min(best, block_leftmost(T, begin, i + 1));
    begin = i + 1;
  }
  return best;
}

double continued_fraction_residual(double c, double mu, double lambda, int depth) {
  const double c2 = c * c;
  const auto p = [&](int n) { return (-n + 0.5 * mu) * (n + 1 + 0.5 * mu) * c2; };
  double t = 4.0 * depth * depth - lambda;
  for (int n = depth - 1; n >= 1; --n) t = 4.0 * n * n - lambda - p(n) / t;
  return 0.5 * lambda + p(0) / t;
}

namespace {

double cfrac_root(double c, double mu, int depth) {
  const double p0 = 0.5 * mu * (1.0 + 0.5 * mu) * c * c;
  if (p0 == 0.0) return 0.0;
  const auto f = [&](double x) { return continued_fraction_residual(c, mu, x, depth); };

  double half_width = std::max(1.0, std::abs(c) * std::abs(mu));
  double lo = -half_width, hi = half_width;
  double flo = f(lo), fhi = f(hi);
  int expansions = 0;
  while (!(std::isfinite(flo) && std::isfinite(fhi) && (flo < 0.0) != (fhi < 0.0))) {
    if (++expansions > 60) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "continued fraction: no sign change on [" << lo << ", " << hi << "] for c = " << c
          << ", mu = " << mu;
      throw SpectralError(msg.str());
    }
    half_width *= 2.0;
    lo = -half_width;
    hi = half_width;
    flo = f(lo);
    fhi = f(hi);
  }

  for (;;) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fmid = f(mid);
    if (fmid == 0.0) return mid;
    if ((fmid < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  const double root = std::abs(flo) < std::abs(fhi) ? lo : hi;
  if (!(std::abs(f(root)) <= 1e-8 * std::max(1.0, std::abs(root)))) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "continued fraction: sign change at " << root << " is a pole, not a root";
    throw SpectralError(msg.str());
  }
  return root;
}

}  // namespace

double continued_fraction_lambda(double c, double mu, int depth, double tol) {
  if (depth < 8) throw std::invalid_argument("continued_fraction_lambda: depth must be >= 8");
  if (!(tol > 0.0)) throw std::invalid_argument("continued_fraction_lambda: tol must be > 0");
  double current = cfrac_root(c, mu, depth);
  for (int attempt = 0; attempt < 8; ++attempt) {
    const int deeper = depth + depth / 2;
    const double next = cfrac_root(c, mu, deeper);
    if (std::abs(next - current) < tol) return next;
    depth = deeper;
    current = next;
  }
  std::ostringstream msg;
  msg << "continued fraction did not settle by depth " << depth;
  throw SpectralError(msg.str());
}

std::string to_string(Method m) { return m == Method::matrix ? "matrix" : "cfrac"; }

Method method_from_string(const std::string& name) {
  if (name == "matrix") return Method::matrix;
  if (name == "cfrac") return Method::cfrac;
  throw std::invalid_argument("unknown method '" + name + "' (expected matrix or cfrac)");
}

EigenEstimate estimate_lambda(double c, double mu, Method method, const SpectralOptions& opts) {
  EigenEstimate est;
  est.mu = mu;
  est.method = method;
  if (method == Method::matrix) {
    int n = opts.matrix_size;
    double current = leftmost_eigenvalue(build_matrix(c, mu, n));
    for (;;) {
      const double next = leftmost_eigenvalue(build_matrix(c, mu, 2 * n));
      est.residual = std::abs(next - current);
      if (est.residual < opts.tol) break;
      n *= 2;
      current = next;
      if (n > opts.max_truncation)
        throw SpectralError("matrix truncation did not settle by N = " + std::to_string(n));
    }
    est.lambda = current;
    est.truncation = n;
  } else {
    int depth = opts.depth;
    double current = cfrac_root(c, mu, depth);
    for (;;) {
      const double next = cfrac_root(c, mu, 2 * depth);
      est.residual = std::abs(next - current);
      if (est.residual < opts.tol) break;
      depth *= 2;
      current = next;
      if (depth > opts.max_truncation)
        throw SpectralError("continued fraction did not settle by depth " + std::to_string(depth));
    }
    est.lambda = current;
    est.truncation = depth;
  }
  return est;
}

DifferenceDerivatives derivatives_by_differencing(double c, double mu, Method method,
                                                  const SpectralOptions& opts) {
  if (!(mu != 0.0 && std::abs(mu) <= 0.1))
    throw std::invalid_argument("derivatives_by_differencing: need 0 < |mu| <= 0.1");
  const auto lambda = [&](double m) { return estimate_lambda(c, m, method, opts).lambda; };

  DifferenceDerivatives d;
  d.mu = mu;
  d.lambda_plus = lambda(mu);
  d.lambda_minus = lambda(-mu);
  const double half = 0.5 * mu;
  const double half_plus = lambda(half);
  const double half_minus = lambda(-half);

  d.central_lambda1 = (d.lambda_plus - d.lambda_minus) / (2.0 * mu);
  d.central_lambda2 = (d.lambda_plus + d.lambda_minus) / (mu * mu);
  const double fine1 = (half_plus - half_minus) / (2.0 * half);
  const double fine2 = (half_plus + half_minus) / (half * half);
  d.lambda1 = (4.0 * fine1 - d.central_lambda1) / 3.0;
  d.lambda2 = (4.0 * fine2 - d.central_lambda2) / 3.0;

  d.one_sided_lambda1 = d.lambda_plus / mu;
  d.one_sided_lambda2 = (d.one_sided_lambda1 - perturbation::lambda_prime_zero(c)) / half;
  return d;
}

}  // namespace iclt::spectral
