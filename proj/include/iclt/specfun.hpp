#pragma once

#include <vector>

namespace iclt::specfun {

/// Modified Bessel function of the first kind, I_n(x), for integer n >= 0.
///
/// Power series for |x| <= 20, Miller backward recurrence normalised by
/// e^x = I_0(x) + 2 sum_k I_k(x) above that. Negative orders are not
/// accepted; use I_{-n}(x) = I_n(x) at the call site.
///
/// Throws std::domain_error for n < 0 or non-finite x, and
/// std::overflow_error when |I_n(x)| is not representable.
double bessel_i(int n, double x);

/// [I_0(r), I_1(r), ..., I_K(r)]: the coefficients of
/// exp(r cos 2t) = I_0(r) + 2 sum_{k>=1} I_k(r) cos(2kt).
std::vector<double> cos_expansion_coeffs(double r, int K);

/// Smallest K >= 1 with |I_K(r)| < 1e-16 * I_0(r).
int expansion_order(double r);

}  // namespace iclt::specfun
