#include "iclt/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

namespace iclt::quadrature {

PeriodicGrid::PeriodicGrid(int m) : m_(m), step_(std::numbers::pi / m) {
  if (m < 4 || m % 2 != 0)
    throw std::invalid_argument("PeriodicGrid: m must be even and >= 4, got " + std::to_string(m));
}

double PeriodicGrid::node(std::size_t j) const {
  // The last node is exactly pi.
  if (j == static_cast<std::size_t>(m_)) return std::numbers::pi;
  return static_cast<double>(j) * step_;
}

std::vector<double> PeriodicGrid::nodes() const {
  std::vector<double> out(size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = node(j);
  return out;
}

EvaluationError::EvaluationError(std::size_t node, double value)
    : std::runtime_error([&] {
        std::ostringstream msg;
        msg << "non-finite integrand value " << value << " at node " << node;
        return msg.str();
      }()),
      node_(node) {}

namespace {

void check_finite(std::span<const double> values) {
  for (std::size_t j = 0; j < values.size(); ++j)
    if (!std::isfinite(values[j])) throw EvaluationError(j, values[j]);
}

// Neumaier compensated accumulator; keeps long sums at rounding level.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

void check_size(std::span<const double> values, const PeriodicGrid& grid) {
  if (values.size() != grid.size())
    throw std::invalid_argument("quadrature: sample count does not match grid");
}

}  // namespace

std::vector<double> sample(const Integrand& f, const PeriodicGrid& grid) {
  std::vector<double> values(grid.size());
  for (std::size_t j = 0; j < values.size(); ++j) {
    values[j] = f(grid.node(j));
    if (!std::isfinite(values[j])) throw EvaluationError(j, values[j]);
  }
  return values;
}

double integrate_samples(std::span<const double> values, const PeriodicGrid& grid) {
  check_size(values, grid);
  check_finite(values);
  CompensatedSum sum;
  sum.add(0.5 * values.front());
  for (std::size_t j = 1; j + 1 < values.size(); ++j) sum.add(values[j]);
  sum.add(0.5 * values.back());
  return sum.value() * grid.step();
}

double integrate_periodic(const Integrand& f, const PeriodicGrid& grid) {
  return integrate_samples(sample(f, grid), grid);
}

std::vector<double> cumulative_samples(std::span<const double> values, const PeriodicGrid& grid) {
  check_size(values, grid);
  check_finite(values);
  const double h = grid.step();
  std::vector<double> out(values.size(), 0.0);
  CompensatedSum running;
  for (std::size_t j = 0; j + 2 < values.size(); j += 2) {
    const double f0 = values[j], f1 = values[j + 1], f2 = values[j + 2];
    // Cubic through four neighbouring samples, integrated over [t_j, t_{j+1}].
    const double half_panel =
        j == 0 ? h / 24.0 * (9.0 * f0 + 19.0 * f1 - 5.0 * f2 + values[3])
               : h / 24.0 * (-values[j - 1] + 13.0 * f0 + 13.0 * f1 - f2);
    out[j + 1] = running.value() + half_panel;
    running.add(h / 3.0 * (f0 + 4.0 * f1 + f2));
    out[j + 2] = running.value();
  }
  return out;
}

std::vector<double> cumulative_integral(const Integrand& f, const PeriodicGrid& grid) {
  return cumulative_samples(sample(f, grid), grid);
}

AdaptiveResult integrate_adaptive(const Integrand& f, double rel_tol, int start,
                                  int max_intervals) {
  PeriodicGrid grid(start);
  double previous = integrate_periodic(f, grid);
  while (grid.intervals() < max_intervals) {
    grid = grid.refined();
    const double value = integrate_periodic(f, grid);
    const double scale = std::abs(value) > 0.0 ? std::abs(value) : 1.0;
    if (std::abs(value - previous) <= rel_tol * scale) return {value, previous, grid.intervals()};
    previous = value;
  }
  throw std::runtime_error("integrate_adaptive: no convergence up to m = " +
                           std::to_string(max_intervals));
}

}  // namespace iclt::quadrature
