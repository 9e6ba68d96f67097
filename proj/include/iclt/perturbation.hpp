#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "iclt/quadrature.hpp"
#include "iclt/sde_params.hpp"

namespace iclt::perturbation {

struct Options {
  double tol = 1e-12;      // relative target for lambda''(0)
  int grid = 256;          // starting number of subintervals
  int max_grid = 65536;
  int series_k = 0;        // fixed J_k truncation; 0 selects it adaptively
};

/// Raised when grid doubling fails to stabilise lambda''(0).
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(double last, double previous, int intervals);
  double last() const { return last_; }
  double previous() const { return previous_; }

 private:
  double last_;
  double previous_;
};

/// c = -(a - b) / sigma^2, always negative for valid parameters.
double ince_coefficient(const SdeParams& p);

/// lambda'(0) = c I_1(-c/2) / I_0(-c/2).
double lambda_prime_zero(double c);

/// J_k = I_{k-1}(r) - 2 (I_1(r)/I_0(r)) I_k(r) + I_{k+1}(r), r = -c/2, for k = 1..K.
/// These are the cosine coefficients of (c cos 2t - lambda'(0)) e^{r cos 2t} / c.
std::vector<double> jk_coefficients(double c, int K);

/// Smallest K with |J_K| max(1, 1/K) < 1e-16 (|J_1| + 1).
int jk_order(double c);

/// First-order eigenfunction correction z(x, 0) and its derivative on a grid,
/// normalised by z(0, 0) = z'(0, 0) = 0.
struct EigenfunctionCorrection {
  quadrature::PeriodicGrid grid;
  std::vector<double> z_values;
  std::vector<double> zprime_values;
  std::vector<double> jk;
  int K = 0;
};

EigenfunctionCorrection eigenfunction_correction(double c, const quadrature::PeriodicGrid& grid,
                                                 int series_k = 0);

struct SecondDerivative {
  double value = 0.0;
  double previous = 0.0;  // estimate on the preceding (half-size) grid
  int intervals = 0;
  int K = 0;
  double tail_bound = 0.0;
};

SecondDerivative second_derivative(double c, const Options& opts = {});

/// lambda''(0) = 2 / (pi I_0(-c/2)) int_0^pi (c cos 2t - lambda'(0)) z(t, 0) e^{-(c/2) cos 2t} dt.
double lambda_double_prime_zero(double c, const Options& opts = {});

struct CltDiagnostics {
  int K = 0;
  int intervals = 0;
  double tail_bound = 0.0;
  double refinement_delta = 0.0;
};

struct CltResult {
  double ell = 0.0;
  double s2 = 0.0;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  std::string method;
  CltDiagnostics diagnostics;
};

/// ell = (a + b)/2 - (sigma^2/2) lambda'(0), s^2 = -(sigma^2/2) lambda''(0).
CltResult compute_clt(const SdeParams& p, const Options& opts = {});

/// gamma = ((a + b) mu - sigma^2 lambda) / 2, where gamma / sigma^2 is the
/// principal eigenvalue of the angle generator with potential mu Q.
double lambda_to_gamma(double lambda, double mu, const SdeParams& p);
double gamma_to_lambda(double gamma, double mu, const SdeParams& p);

}  // namespace iclt::perturbation
