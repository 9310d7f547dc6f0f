#pragma once

#include <cstdint>

namespace attnspec {

// Standard normal CDF via erfc, accurate to a few ulp over the double range.
double normal_cdf(double x);

// Inverse of normal_cdf on (0, 1), Wichura's AS 241 (PPND16) rational
// approximations, |relative error| < 1e-15. Throws std::domain_error outside (0, 1).
double normal_quantile(double p);

// E[chi^(2r)] = (2r - 1)!! for chi ~ N(0,1). Throws std::overflow_error once the
// value leaves double range (r > 150).
double gaussian_even_moment(int r);

// Truncated exponential series P_n(y) = sum_{k=0}^{n-1} y^k / k!, n >= 1.
double taylor_polynomial(double y, int n);

// E[P_n(beta * chi)] = sum_{2r <= n-1} (beta^2/2)^r / r! for chi ~ N(0,1).
double expected_taylor_mean(double beta, int n);

}  // namespace attnspec
