#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace iclt::spectral {

/// Failure of an eigenvalue iteration, a root bracket, or a truncation
/// refinement.
class SpectralError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Tridiagonal matrix stored by diagonals: super[i] = M(i, i+1),
/// sub[i] = M(i+1, i).
struct TridiagonalTruncation {
  std::vector<double> diag;
  std::vector<double> super;
  std::vector<double> sub;

  std::size_t size() const { return diag.size(); }
};

/// Leading N x N block of the infinite Ince matrix: r_n = 4n^2 on the
/// diagonal, q_n = (-n + mu/2) c off it, sqrt(2) on the first off-diagonal pair.
/// Requires N >= 8.
TridiagonalTruncation build_matrix(double c, double mu, int N);

/// Smallest real eigenvalue. Blocks split at vanishing couplings; a block
/// whose paired off-diagonal products are all positive is symmetrised and
/// bisected with Sturm counts, any other block goes to a dense solver.
double leftmost_eigenvalue(const TridiagonalTruncation& T);

/// f(lambda) = lambda/2 + p_0 / (4 - lambda - p_1 / (16 - lambda - ...)),
/// truncated after `depth` denominators and evaluated bottom-up. The Ince
/// eigenvalues are the zeros of f.
double continued_fraction_residual(double c, double mu, double lambda, int depth);

/// Root of continued_fraction_residual nearest 0, refined in depth until a 50%
/// deeper fraction moves it by less than tol.
double continued_fraction_lambda(double c, double mu, int depth = 60, double tol = 1e-14);

enum class Method { matrix, cfrac };

std::string to_string(Method m);
Method method_from_string(const std::string& name);

struct EigenEstimate {
  double mu = 0.0;
  double lambda = 0.0;
  Method method = Method::matrix;
  int truncation = 0;     // N for the matrix, depth for the continued fraction
  double residual = 0.0;  // change when the truncation is enlarged
};

struct SpectralOptions {
  int matrix_size = 40;
  int depth = 60;
  double tol = 1e-13;
  int max_truncation = 640;
};

/// lambda(mu) by either route, doubling the truncation until the change under
/// enlargement is below opts.tol.
EigenEstimate estimate_lambda(double c, double mu, Method method, const SpectralOptions& opts = {});

struct DifferenceDerivatives {
  double mu = 0.0;
  double lambda1 = 0.0;          // central difference, one Richardson step with mu/2
  double lambda2 = 0.0;
  double central_lambda1 = 0.0;  // central difference at mu alone
  double central_lambda2 = 0.0;
  double one_sided_lambda1 = 0.0;  // lambda(mu)/mu
  double one_sided_lambda2 = 0.0;  // (lambda(mu)/mu - c I_1/I_0) / (mu/2)
  double lambda_plus = 0.0;        // lambda(mu)
  double lambda_minus = 0.0;       // lambda(-mu)
};

/// Finite-difference estimates of lambda'(0) and lambda''(0) using lambda(0) = 0.
/// Requires 0 < |mu| <= 0.1.
DifferenceDerivatives derivatives_by_differencing(double c, double mu, Method method,
                                                  const SpectralOptions& opts = {});

}  // namespace iclt::spectral
