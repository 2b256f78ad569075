#pragma once

#include <cstddef>
#include <span>

namespace marketforge {

// Simple linear regression y = intercept + slope * x with classical
// standard errors and two-sided Student-t p-values.
struct OlsFit {
  double intercept = 0.0;
  double slope = 0.0;
  double intercept_se = 0.0;
  double slope_se = 0.0;
  double intercept_t = 0.0;
  double slope_t = 0.0;
  double intercept_p = 1.0;
  double slope_p = 1.0;
  double r_squared = 0.0;
  double adjusted_r_squared = 0.0;
  std::size_t n = 0;
};

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation,
// accurate to ~1e-14.
double reg_incomplete_beta(double a, double b, double x);

// P(|T| > t) for Student t with nu degrees of freedom.
double student_t_two_sided_p(double t, double nu);

// "***" at the 99.9% significance level, else empty.
const char* significance_stars(double p);

OlsFit ols_fit(std::span<const double> x, std::span<const double> y);

}  // namespace marketforge
