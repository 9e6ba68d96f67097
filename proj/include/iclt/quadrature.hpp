#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace iclt::quadrature {

/// Uniform grid t_j = j*pi/m, j = 0..m, on [0, pi]. m must be even and >= 4.
class PeriodicGrid {
 public:
  explicit PeriodicGrid(int m);

  int intervals() const { return m_; }
  std::size_t size() const { return static_cast<std::size_t>(m_) + 1; }
  double step() const { return step_; }
  double node(std::size_t j) const;
  std::vector<double> nodes() const;

  PeriodicGrid refined() const { return PeriodicGrid(2 * m_); }

 private:
  int m_;
  double step_;
};

/// A non-finite integrand value was produced at a grid node.
class EvaluationError : public std::runtime_error {
 public:
  EvaluationError(std::size_t node, double value);
  std::size_t node() const { return node_; }

 private:
  std::size_t node_;
};

using Integrand = std::function<double(double)>;

/// Samples f at every node; throws EvaluationError on a non-finite value.
std::vector<double> sample(const Integrand& f, const PeriodicGrid& grid);

/// Composite trapezoid over [0, pi]. Spectrally accurate for smooth
/// pi-periodic integrands.
double integrate_periodic(const Integrand& f, const PeriodicGrid& grid);
double integrate_samples(std::span<const double> values, const PeriodicGrid& grid);

/// F(t_j) = int_0^{t_j} f, F(t_0) = 0. Composite Simpson at even nodes; odd
/// nodes add a four-point cubic rule over one panel to the preceding even node.
std::vector<double> cumulative_integral(const Integrand& f, const PeriodicGrid& grid);
std::vector<double> cumulative_samples(std::span<const double> values, const PeriodicGrid& grid);

struct AdaptiveResult {
  double value;
  double previous;  // value on the last grid before the accepted one
  int intervals;
};

/// Doubles m from `start` until successive trapezoid results differ by less
/// than rel_tol relative (absolute when the value is zero). Throws
/// std::runtime_error if `max_intervals` is exceeded.
AdaptiveResult integrate_adaptive(const Integrand& f, double rel_tol = 1e-13, int start = 256,
                                  int max_intervals = 65536);

}  // namespace iclt::quadrature
