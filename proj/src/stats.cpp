#include "marketforge/stats.hpp"

#include <cmath>
#include <limits>

#include "marketforge/errors.hpp"

namespace marketforge {

namespace {

// Lentz's continued fraction for the incomplete beta, convergent for
// x < (a+1)/(a+b+2); the symmetry transform covers the rest.
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIterations = 400;
  constexpr double kEps = 3e-16;
  constexpr double kTiny = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double reg_incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, double nu) {
  if (std::isnan(t)) return 1.0;
  if (std::isinf(t)) return 0.0;
  return reg_incomplete_beta(nu / 2.0, 0.5, nu / (nu + t * t));
}

const char* significance_stars(double p) { return p < 0.001 ? "***" : ""; }

OlsFit ols_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) raise(Errc::shape_mismatch, "x and y lengths differ");
  const std::size_t n = x.size();
  if (n < 3) raise(Errc::too_few_points, "regression needs at least 3 points");

  double mean_x = 0.0, mean_y = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mean_x += x[i];
    mean_y += y[i];
  }
  mean_x /= static_cast<double>(n);
  mean_y /= static_cast<double>(n);

  double sxx = 0.0, sxy = 0.0, sst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mean_x;
    const double dy = y[i] - mean_y;
    sxx += dx * dx;
    sxy += dx * dy;
    sst += dy * dy;
  }
  if (sxx == 0.0) raise(Errc::degenerate_x, "all x values are equal");

  OlsFit fit;
  fit.n = n;
  fit.slope = sxy / sxx;
  fit.intercept = mean_y - fit.slope * mean_x;

  double ss_res = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double res = y[i] - fit.intercept - fit.slope * x[i];
    ss_res += res * res;
  }
  const double nu = static_cast<double>(n) - 2.0;
  const double s2 = ss_res / nu;
  fit.slope_se = std::sqrt(s2 / sxx);
  fit.intercept_se = std::sqrt(s2 * (1.0 / static_cast<double>(n) + mean_x * mean_x / sxx));

  const auto t_of = [](double estimate, double se) {
    if (se > 0.0) return estimate / se;
    if (estimate == 0.0) return 0.0;
    return estimate > 0.0 ? std::numeric_limits<double>::infinity()
                          : -std::numeric_limits<double>::infinity();
  };
  fit.slope_t = t_of(fit.slope, fit.slope_se);
  fit.intercept_t = t_of(fit.intercept, fit.intercept_se);
  fit.slope_p = student_t_two_sided_p(fit.slope_t, nu);
  fit.intercept_p = student_t_two_sided_p(fit.intercept_t, nu);

  if (sst > 0.0) {
    fit.r_squared = 1.0 - ss_res / sst;
  } else {
    fit.r_squared = ss_res == 0.0 ? 1.0 : 0.0;
  }
  fit.adjusted_r_squared =
      1.0 - (1.0 - fit.r_squared) * (static_cast<double>(n) - 1.0) / nu;
  return fit;
}

}  // namespace marketforge
