#pragma once

// Scalar special functions used throughout the library: standard normal
// cdf/pdf/quantile, log-gamma, log-beta, the regularized incomplete beta
// function and its inverse, plus a few tail-stable helpers.
//
// Everything here is pure and reentrant. Invalid inputs raise
// std::domain_error.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace rankdist {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double inv_sqrt2 = 0.70710678118654752440;
inline constexpr double sqrt2pi = 2.50662827463100050242;
inline constexpr double log_sqrt2pi = 0.91893853320467274178;
inline constexpr double inv_sqrt2pi = 0.39894228040143267794;

struct integrity_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct complexity_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline double std_normal_pdf(double x) {
  if (!std::isfinite(x)) throw std::domain_error("std_normal_pdf: non-finite input");
  return inv_sqrt2pi * std::exp(-0.5 * x * x);
}

// Phi(x). Evaluated through erfc so the small tail is produced directly
// instead of as 1 - (something near 1); accurate down to the underflow
// limit (|x| ~ 38).
inline double std_normal_cdf(double x) {
  if (!std::isfinite(x)) throw std::domain_error("std_normal_cdf: non-finite input");
  return 0.5 * std::erfc(-x * inv_sqrt2);
}

// Mills ratio Phi(x)/phi(x). For x <= -10 uses the divergent tail series
// -(1/x)(1 - 1/x^2 + 3/x^4 - ...) summed to its smallest term; below that
// threshold the direct ratio would juggle subnormals. Overflows for
// x >~ 38 (as the true value does).
inline double mills_ratio(double x) {
  if (x > -10.0) return std_normal_cdf(x) / std_normal_pdf(x);
  const double inv_x2 = 1.0 / (x * x);
  double term = 1.0, sum = 1.0;
  for (int k = 1; k <= 40; ++k) {
    term *= -(2 * k - 1) * inv_x2;
    sum += term;
    if (std::abs(term) < 1e-17 * sum) break;
  }
  return -sum / x;
}

// log Phi(x), stable over the whole real line.
inline double std_normal_logcdf(double x) {
  if (!std::isfinite(x)) throw std::domain_error("std_normal_logcdf: non-finite input");
  if (x >= 0.0) return std::log1p(-std_normal_cdf(-x));
  if (x > -37.0) return std::log(std_normal_cdf(x));
  return -0.5 * x * x - log_sqrt2pi + std::log(mills_ratio(x));
}

// Phi^{-1}(p) by Wichura's algorithm AS 241 (PPND16), sharpened with one
// Halley step on Phi. p in (0,1); the endpoints are infinite quantiles.
inline double std_normal_quantile(double p) {
  if (std::isnan(p) || p < 0.0 || p > 1.0)
    throw std::domain_error("std_normal_quantile: p outside [0,1]");
  if (p == 0.0 || p == 1.0)
    throw std::domain_error("std_normal_quantile: infinite quantile at p in {0,1}");

  const double q = p - 0.5;
  double x;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    x = q *
        (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
              6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
            1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
          1.3314166789178437745e+2) * r + 3.3871328727963666080e+0) /
        (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
              3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
            5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
          4.2313330701600911252e+1) * r + 1.0);
  } else {
    double r = (q < 0.0) ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    if (r <= 5.0) {
      r -= 1.6;
      x = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) * r +
              3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
            4.63033784615654529590e+0) * r + 1.42343711074968357734e+0) /
          (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
              6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
            2.05319162663775882187e+0) * r + 1.0);
    } else {
      r -= 5.0;
      x = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
              2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
            5.46378491116411436990e+0) * r + 6.65790464350110377720e+0) /
          (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
              1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
            5.99832206555887937690e-1) * r + 1.0);
    }
    if (q < 0.0) x = -x;
  }

  const double pdf = std_normal_pdf(x);
  if (pdf > 1e-290) {
    const double u = (std_normal_cdf(x) - p) / pdf;
    x -= u / (1.0 + 0.5 * x * u);
  }
  return x;
}

// log Gamma(x) for x > 0, Lanczos approximation (g = 7, 9 terms).
inline double log_gamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x))
    throw std::domain_error("log_gamma: requires x > 0");
  static constexpr double g = 7.0;
  static constexpr double coef[9] = {
      0.99999999999980993,      676.5203681218851,     -1259.1392167224028,
      771.32342877765313,      -176.61502916214059,    12.507343278686905,
      -0.13857109526572012,    9.9843695780195716e-6,  1.5056327351493116e-7};
  if (x < 0.5) {
    // reflection keeps the series argument >= 0.5
    return std::log(pi / std::sin(pi * x)) - log_gamma(1.0 - x);
  }
  const double z = x - 1.0;
  double s = coef[0];
  for (int i = 1; i < 9; ++i) s += coef[i] / (z + i);
  const double t = z + g + 0.5;
  return log_sqrt2pi + (z + 0.5) * std::log(t) - t + std::log(s);
}

inline double log_factorial(int n) {
  if (n < 0) throw std::domain_error("log_factorial: negative n");
  return log_gamma(static_cast<double>(n) + 1.0);
}

inline double log_binomial(double n, double k) {
  if (k < 0.0 || k > n) throw std::domain_error("log_binomial: k outside [0,n]");
  if (k == 0.0 || k == n) return 0.0;
  return log_gamma(n + 1.0) - log_gamma(k + 1.0) - log_gamma(n - k + 1.0);
}

// log B(alpha, beta)
inline double log_beta(double alpha, double beta) {
  if (!(alpha > 0.0) || !(beta > 0.0))
    throw std::domain_error("log_beta: requires alpha, beta > 0");
  return log_gamma(alpha) + log_gamma(beta) - log_gamma(alpha + beta);
}

// log(exp(a) + exp(b)) and log(exp(a) - exp(b)), a >= b for the difference.
inline double log_add_exp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

inline double log_sub_exp(double a, double b) {
  if (b == -std::numeric_limits<double>::infinity()) return a;
  if (!(a > b)) throw integrity_error("log_sub_exp: requires a > b");
  return a + std::log1p(-std::exp(b - a));
}

namespace detail {

// Continued fraction for the regularized incomplete beta (modified Lentz).
inline double ibeta_cf(double a, double b, double x) {
  constexpr int max_iter = 2000;
  constexpr double eps = 1e-16, fpmin = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < fpmin) d = fpmin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= max_iter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::abs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::abs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < eps) return h;
  }
  throw integrity_error("ibeta_cf: continued fraction did not converge");
}

}  // namespace detail

// I_x(a, b) = B(x; a, b) / B(a, b)
inline double regularized_incomplete_beta(double x, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0))
    throw std::domain_error("regularized_incomplete_beta: requires a, b > 0");
  if (std::isnan(x) || x < 0.0 || x > 1.0)
    throw std::domain_error("regularized_incomplete_beta: x outside [0,1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double lbt = a * std::log(x) + b * std::log1p(-x) - log_beta(a, b);
  if (x < (a + 1.0) / (a + b + 2.0))
    return std::exp(lbt) * detail::ibeta_cf(a, b, x) / a;
  return 1.0 - std::exp(lbt) * detail::ibeta_cf(b, a, 1.0 - x) / b;
}

// Beta(a, b) density, assembled in log space so large parameters stay finite.
inline double beta_pdf(double x, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::domain_error("beta_pdf: requires a, b > 0");
  if (!(x > 0.0) || !(x < 1.0)) throw std::domain_error("beta_pdf: x outside (0,1)");
  return std::exp((a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) - log_beta(a, b));
}

// Inverse of I_x(a, b). Bisection brackets the root to width 1e-3, then
// Newton finishes; steps that would leave the bracket fall back to
// bisection, which keeps extreme (a, b) shapes safe.
inline double beta_quantile(double p, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::domain_error("beta_quantile: requires a, b > 0");
  if (std::isnan(p) || p < 0.0 || p > 1.0)
    throw std::domain_error("beta_quantile: p outside [0,1]");
  if (p == 0.0) return 0.0;
  if (p == 1.0) return 1.0;

  double lo = 0.0, hi = 1.0;
  double x = a / (a + b);
  while (hi - lo > 1e-3) {
    x = 0.5 * (lo + hi);
    (regularized_incomplete_beta(x, a, b) > p ? hi : lo) = x;
  }
  x = 0.5 * (lo + hi);
  for (int it = 0; it < 60; ++it) {
    const double f = regularized_incomplete_beta(x, a, b) - p;
    if (std::abs(f) < 1e-14) break;
    if (f > 0.0) hi = x; else lo = x;
    const double g = beta_pdf(x, a, b);
    double xn = (g > 0.0 && std::isfinite(g)) ? x - f / g : 0.5 * (lo + hi);
    if (!(xn >= lo && xn <= hi)) xn = 0.5 * (lo + hi);
    if (xn == x) break;
    x = xn;
  }
  return x;
}

}  // namespace rankdist
