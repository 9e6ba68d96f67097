#pragma once

namespace iclt {

/// Drift eigenvalues a > b and rotational noise intensity sigma > 0 of
///   dX = diag(a, b) X dt + sigma [[0, -1], [1, 0]] X o dW.
/// Construction throws std::invalid_argument naming the violated constraint.
class SdeParams {
 public:
  SdeParams(double a, double b, double sigma);

  double a() const { return a_; }
  double b() const { return b_; }
  double sigma() const { return sigma_; }

 private:
  double a_;
  double b_;
  double sigma_;
};

}  // namespace iclt
