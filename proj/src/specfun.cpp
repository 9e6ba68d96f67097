#include "iclt/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace iclt::specfun {

namespace {

constexpr double kSeriesLimit = 20.0;

// Sum of (x/2)^{2m+n} / (m! (m+n)!) for x > 0. All terms are positive.
double series_i(int n, double x) {
  const double half = 0.5 * x;
  double lead = 1.0;
  for (int k = 1; k <= n; ++k) {
    lead *= half / k;
    if (lead == 0.0) return 0.0;
  }
  const double q = half * half;
  double term = lead;
  double sum = lead;
  for (int m = 1; m < 500; ++m) {
    term *= q / (static_cast<double>(m) * (m + n));
    sum += term;
    if (term < 0.5 * std::numeric_limits<double>::epsilon() * sum) break;
  }
  return sum;
}

// Miller's backward recurrence for x > 0. Returns e^{-x} I_n(x).
double scaled_miller_i(int n, double x) {
  const int reach = std::max(n, static_cast<int>(std::ceil(x)));
  int start = reach + 16 + static_cast<int>(std::sqrt(40.0 * reach));
  start += start % 2;

  const double two_over_x = 2.0 / x;
  double next = 0.0;  // I_{k+1}
  double cur = 1e-300;  // I_k
  double target = 0.0;
  double norm = 0.0;  // I_0 + 2 sum_{k>=1} I_k, in the same unnormalised units
  for (int k = start; k >= 1; --k) {
    const double prev = next + k * two_over_x * cur;
    next = cur;
    cur = prev;
    if (k == n) target = next;
    norm += 2.0 * next;
    if (std::abs(cur) > 1e250) {
      cur *= 1e-250;
      next *= 1e-250;
      target *= 1e-250;
      norm *= 1e-250;
    }
  }
  // cur now holds I_0.
  norm += cur;
  if (n == 0) target = cur;
  return target / norm;
}

}  // namespace

double bessel_i(int n, double x) {
  if (n < 0) throw std::domain_error("bessel_i: negative order " + std::to_string(n));
  if (!std::isfinite(x)) throw std::domain_error("bessel_i: non-finite argument");
  if (x == 0.0) return n == 0 ? 1.0 : 0.0;

  const double ax = std::abs(x);
  double value;
  if (ax <= kSeriesLimit) {
    value = series_i(n, ax);
  } else {
    const double scaled = scaled_miller_i(n, ax);
    if (scaled == 0.0) {
      value = 0.0;
    } else if (ax < 700.0) {
      value = scaled * std::exp(ax);
    } else {
      const double log_value = ax + std::log(scaled);
      if (log_value >= std::log(std::numeric_limits<double>::max()))
        throw std::overflow_error("bessel_i: I_" + std::to_string(n) + "(" + std::to_string(x) +
                                  ") overflows");
      value = std::exp(log_value);
    }
  }
  if (!std::isfinite(value))
    throw std::overflow_error("bessel_i: I_" + std::to_string(n) + "(" + std::to_string(x) +
                              ") overflows");
  return (x < 0.0 && n % 2 == 1) ? -value : value;
}

std::vector<double> cos_expansion_coeffs(double r, int K) {
  if (K < 1) throw std::invalid_argument("cos_expansion_coeffs: K must be >= 1");
  std::vector<double> coeffs(static_cast<std::size_t>(K) + 1);
  for (int k = 0; k <= K; ++k) coeffs[k] = bessel_i(k, r);
  return coeffs;
}

int expansion_order(double r) {
  const double i0 = bessel_i(0, r);
  int k = 1;
  while (std::abs(bessel_i(k, r)) >= 1e-16 * i0) ++k;
  return k;
}

}  // namespace iclt::specfun
