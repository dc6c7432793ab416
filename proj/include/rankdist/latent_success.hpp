#pragma once

// The law of Z = Phi((X0 - mu)/sigma) when X0 ~ N(mu0, sigma0^2) and the
// in-group is N(mu, sigma^2): density, cdf, quantile, moments, and the
// moment-matched Beta(a, b) surrogate. Everything is parameterized by
// rho = sigma/sigma0 and delta = (mu - mu0)/sigma0, which fully determine
// the law.

#include <cmath>
#include <limits>
#include <stdexcept>

#include "rankdist/special_functions.hpp"

namespace rankdist {

struct LatentSuccessLaw {
  double rho;
  double delta;

  LatentSuccessLaw(double rho_, double delta_) : rho(rho_), delta(delta_) {
    if (!(rho > 0.0) || !std::isfinite(rho))
      throw std::domain_error("LatentSuccessLaw: rho must be positive and finite");
    if (!std::isfinite(delta))
      throw std::domain_error("LatentSuccessLaw: delta must be finite");
  }
};

struct OutlierModel {
  double mu0;
  double sigma0;
  double mu;
  double sigma;
  int n;  // in-group size; n+1 observations in total

  OutlierModel(double mu0_, double sigma0_, double mu_, double sigma_, int n_)
      : mu0(mu0_), sigma0(sigma0_), mu(mu_), sigma(sigma_), n(n_) {
    if (!(sigma0 > 0.0) || !(sigma > 0.0))
      throw std::domain_error("OutlierModel: standard deviations must be positive");
    if (!std::isfinite(mu0) || !std::isfinite(mu))
      throw std::domain_error("OutlierModel: means must be finite");
    if (n < 1) throw std::domain_error("OutlierModel: n >= 1 required");
  }

  static OutlierModel standardized(double rho, double delta, int n) {
    return OutlierModel(0.0, 1.0, delta, rho, n);
  }

  double delta() const { return (mu - mu0) / sigma0; }
  double rho() const { return sigma / sigma0; }
  LatentSuccessLaw law() const { return LatentSuccessLaw(rho(), delta()); }
};

// f(y) = rho * exp(-[ (rho^2-1) q^2 + 2 rho delta q + delta^2 ] / 2),
// q = Phi^{-1}(y). May diverge at the endpoints when rho < 1.
inline double z_density(const LatentSuccessLaw& law, double y) {
  if (!(y > 0.0) || !(y < 1.0))
    throw std::domain_error("z_density: y must lie strictly inside (0,1)");
  const double q = std_normal_quantile(y);
  const double r2 = law.rho * law.rho;
  return law.rho *
         std::exp(-0.5 * ((r2 - 1.0) * q * q + 2.0 * law.rho * law.delta * q +
                          law.delta * law.delta));
}

// F(y) = Phi(delta + rho * Phi^{-1}(y)); exact 0/1 at the endpoints.
inline double z_cdf(const LatentSuccessLaw& law, double y) {
  if (std::isnan(y) || y < 0.0 || y > 1.0)
    throw std::domain_error("z_cdf: y outside [0,1]");
  if (y == 0.0) return 0.0;
  if (y == 1.0) return 1.0;
  return std_normal_cdf(law.delta + law.rho * std_normal_quantile(y));
}

// F^{-1}(u) = Phi((Phi^{-1}(u) - delta)/rho)
inline double z_quantile(const LatentSuccessLaw& law, double u) {
  if (!(u > 0.0) || !(u < 1.0))
    throw std::domain_error("z_quantile: u must lie strictly inside (0,1)");
  return std_normal_cdf((std_normal_quantile(u) - law.delta) / law.rho);
}

// E Z = Pr(X1 <= X0) = Phi(-delta / sqrt(rho^2 + 1))
inline double z_mean(const LatentSuccessLaw& law) {
  return std_normal_cdf(-law.delta / std::sqrt(law.rho * law.rho + 1.0));
}

struct VarianceBreakdown {
  double integral_term;  // integral of G over [11pi/12, 19pi/12)
  double arccos_term;    // acos(-1/(rho^2+1)) e^{-delta^2/(rho^2+2)} / (2 pi)
  double mean_sq_term;   // (E Z)^2
  double total;          // integral + arccos - mean^2
};

enum class ThetaRule {
  left_riemann,  // the published binning convention, bin width epsilon
  simpson        // composite Simpson on the same half-interval
};

namespace detail {

// Integrand pieces of the variance theta-integral. With
// sigma2 = sin^2(theta + pi/4), the integrand reduces to functions of
// sigma2 alone; B carries the sign of -delta.
struct ThetaIntegrand {
  double rho2, delta, coef_alg;  // coef_alg excludes e^{-delta^2/(rho^2+2)}

  explicit ThetaIntegrand(double rho, double delta_)
      : rho2(rho * rho), delta(delta_),
        coef_alg(std::sqrt(3.0) / (2.0 * pi * rho * std::sqrt(rho2 + 2.0))) {}

  // G(theta) without the e^{-delta^2/(rho^2+2)} factor
  double scaled(double theta) const {
    const double s = std::sin(theta + pi / 4.0);
    const double c = std::cos(theta + pi / 4.0);
    const double B = std::sqrt(6.0) * delta * s / (rho2 + 2.0);
    const double twoA =
        (rho2 * (std::sin(2.0 * theta) + 2.0) + 2.0 * c * c) / (rho2 * (rho2 + 2.0));
    const double root = std::sqrt(twoA);
    return coef_alg * (B / (twoA * root)) * mills_ratio(B / root);
  }

  // log |scaled(theta)|; needed once e^{-delta^2/(rho^2+2)} underflows and
  // the Mills factor alone would overflow.
  double log_abs_scaled(double theta) const {
    const double s = std::sin(theta + pi / 4.0);
    const double c = std::cos(theta + pi / 4.0);
    const double B = std::sqrt(6.0) * delta * s / (rho2 + 2.0);
    const double twoA =
        (rho2 * (std::sin(2.0 * theta) + 2.0) + 2.0 * c * c) / (rho2 * (rho2 + 2.0));
    const double root = std::sqrt(twoA);
    const double u = B / root;
    // log Mills(u) = u^2/2 + log(sqrt(2 pi)) + log Phi(u)
    const double log_mills = 0.5 * u * u + log_sqrt2pi + std_normal_logcdf(u);
    return std::log(coef_alg) + std::log(std::abs(B)) - 1.5 * std::log(twoA) + log_mills;
  }
};

// Quadrature of h over [11pi/12, 5pi/4), doubled (the integrand is
// symmetric about 5pi/4). The left_riemann rule reproduces the published
// equal-width binning, floor(width/eps)+1 left endpoints.
template <typename F>
double theta_half_integral(F&& h, double bin_width, ThetaRule rule) {
  const double a = 11.0 * pi / 12.0;
  const double half = pi / 3.0;
  if (rule == ThetaRule::left_riemann) {
    const long k_max = static_cast<long>(std::floor(half / bin_width));
    double sum = 0.0;
    for (long k = 0; k <= k_max; ++k) sum += h(a + k * bin_width);
    return 2.0 * bin_width * sum;
  }
  long m = static_cast<long>(std::ceil(half / bin_width));
  if (m % 2 == 1) ++m;
  const double step = half / m;
  double sum = h(a) + h(a + half);
  for (long k = 1; k < m; k += 2) sum += 4.0 * h(a + k * step);
  for (long k = 2; k < m; k += 2) sum += 2.0 * h(a + k * step);
  return 2.0 * (step / 3.0) * sum;
}

// log of |integral of G| with the e^{-delta^2/(rho^2+2)} factor removed,
// via a log-sum-exp Riemann sum. The integrand keeps one sign over the
// whole interval (that of -delta).
inline double log_abs_scaled_theta_integral(double rho, double delta, double bin_width,
                                            ThetaRule rule) {
  ThetaIntegrand g(rho, delta);
  const double a = 11.0 * pi / 12.0;
  const double half = pi / 3.0;
  double m = -std::numeric_limits<double>::infinity();
  double acc = 0.0;
  auto accumulate = [&](double log_v, double w) {
    if (log_v == -std::numeric_limits<double>::infinity()) return;
    if (log_v > m) {
      acc = acc * std::exp(m - log_v) + w;
      m = log_v;
    } else {
      acc += w * std::exp(log_v - m);
    }
  };
  if (rule == ThetaRule::left_riemann) {
    const long k_max = static_cast<long>(std::floor(half / bin_width));
    for (long k = 0; k <= k_max; ++k) accumulate(g.log_abs_scaled(a + k * bin_width), 1.0);
    return m + std::log(acc) + std::log(2.0 * bin_width);
  }
  long n = static_cast<long>(std::ceil(half / bin_width));
  if (n % 2 == 1) ++n;
  const double step = half / n;
  accumulate(g.log_abs_scaled(a), 1.0);
  accumulate(g.log_abs_scaled(a + half), 1.0);
  for (long k = 1; k < n; k += 2) accumulate(g.log_abs_scaled(a + k * step), 4.0);
  for (long k = 2; k < n; k += 2) accumulate(g.log_abs_scaled(a + k * step), 2.0);
  return m + std::log(acc) + std::log(2.0 * step / 3.0);
}

}  // namespace detail

// Var(Z) via the closed arccos term plus the theta-integral. Default rule
// is Simpson; left_riemann reproduces the published equal-bin sum.
inline VarianceBreakdown z_variance(const LatentSuccessLaw& law, double bin_width = 1e-4,
                                    ThetaRule rule = ThetaRule::simpson) {
  if (!(bin_width > 0.0 && bin_width <= 1e-2))
    throw std::domain_error("z_variance: bin_width must lie in (0, 1e-2]");
  const double r2 = law.rho * law.rho;
  const double damp = std::exp(-law.delta * law.delta / (r2 + 2.0));

  // Var(Z_{rho,-delta}) = Var(Z_{rho,delta}); the positive-delta direction
  // subtracts a small mean^2 and keeps full precision, so negative delta
  // is evaluated mirrored and its integral term recovered from the
  // identity afterwards.
  const double adelta = std::abs(law.delta);

  VarianceBreakdown out{};
  double integral_pos = 0.0;
  if (adelta != 0.0) {
    detail::ThetaIntegrand g(law.rho, adelta);
    integral_pos = damp * detail::theta_half_integral(
                              [&](double t) { return g.scaled(t); }, bin_width, rule);
  }
  out.arccos_term = std::acos(-1.0 / (r2 + 1.0)) * damp / (2.0 * pi);
  const double mean = z_mean(law);
  const double mean_pos = std_normal_cdf(-adelta / std::sqrt(r2 + 1.0));
  out.total = integral_pos + out.arccos_term - mean_pos * mean_pos;
  out.mean_sq_term = mean * mean;
  out.integral_term =
      (law.delta >= 0.0) ? integral_pos : out.total - out.arccos_term + out.mean_sq_term;

  const double bound = mean * (1.0 - mean);
  if (!(out.total > 0.0) || !(out.total < bound))
    throw integrity_error("z_variance: result violates 0 < Var < EZ(1-EZ)");
  return out;
}

// E Z^k = integral of Phi((y-delta)/rho)^k phi(y) dy, trapezoid on a
// uniform grid. The integrand decays like phi at the truncation points,
// so the rule is effectively spectrally accurate here.
inline double z_raw_moment(const LatentSuccessLaw& law, int k, double grid_halfwidth = 8.0,
                           long grid_points = 20001) {
  if (k < 1) throw std::domain_error("z_raw_moment: k >= 1 required");
  if (grid_points < 3) throw std::domain_error("z_raw_moment: too few grid points");
  const double h = 2.0 * grid_halfwidth / (grid_points - 1);
  double sum = 0.0;
  for (long i = 0; i < grid_points; ++i) {
    const double y = -grid_halfwidth + i * h;
    const double f =
        std::pow(std_normal_cdf((y - law.delta) / law.rho), k) * std_normal_pdf(y);
    sum += (i == 0 || i == grid_points - 1) ? 0.5 * f : f;
  }
  return sum * h;
}

struct BetaSurrogate {
  double a;      // exp(log_a); may underflow to 0 in the far tails
  double b;
  double log_a;
  double log_b;
  double iota;   // intra-class correlation, 1/(a+b+1)
  bool extreme;  // true when the log-domain tail path produced (a, b)
};

namespace detail {

// log EZ and log Var(Z) without intermediate underflow. Assumes
// delta >= 0 (the caller mirrors via a_{rho,-delta} = b_{rho,delta}).
struct LogMoments {
  double log_mean;        // log Phi(-delta/sqrt(rho^2+1))
  double log_comp_mean;   // log Phi(+delta/sqrt(rho^2+1))
  double log_var;
};

inline LogMoments log_z_moments(double rho, double delta, double bin_width, ThetaRule rule) {
  const double r2 = rho * rho;
  const double t = delta / std::sqrt(r2 + 1.0);
  LogMoments lm{};
  lm.log_mean = std_normal_logcdf(-t);
  lm.log_comp_mean = std_normal_logcdf(t);
  const double log_damp = -delta * delta / (r2 + 2.0);
  const double log_arccos = std::log(std::acos(-1.0 / (r2 + 1.0)) / (2.0 * pi));
  double log_pos = log_damp + log_arccos;  // arccos term
  if (delta > 0.0) {
    // The integral term is negative for delta > 0 and cancels the arccos
    // term to O(1/delta^2), so it is resolved on a refined grid before the
    // log-space subtraction.
    const double log_int = log_damp + detail::log_abs_scaled_theta_integral(
                                          rho, delta, bin_width / 8.0, rule);
    log_pos = log_sub_exp(log_pos, log_int);
  }
  lm.log_var = log_sub_exp(log_pos, 2.0 * lm.log_mean);
  return lm;
}

}  // namespace detail

// Moment-matched Beta(a, b):
//   a = m (m(1-m) - v) / v,  b = (1-m)(m(1-m) - v) / v,
// with m = EZ and v = Var(Z). For |delta| > 12 the factors are assembled
// in log space, where plain arithmetic would hit 0/0.
inline BetaSurrogate beta_surrogate(const LatentSuccessLaw& law, double bin_width = 1e-4,
                                    ThetaRule rule = ThetaRule::simpson) {
  BetaSurrogate s{};
  s.extreme = std::abs(law.delta) > 12.0;
  if (!s.extreme) {
    const double m = z_mean(law);
    const double v = z_variance(law, bin_width, rule).total;
    const double mm = m * (1.0 - m);
    if (!(v < mm))
      throw integrity_error("beta_surrogate: Var(Z) >= EZ(1-EZ), no beta match exists");
    const double excess = mm - v;
    s.a = m * excess / v;
    s.b = (1.0 - m) * excess / v;
    s.log_a = std::log(s.a);
    s.log_b = std::log(s.b);
  } else {
    const double ad = std::abs(law.delta);
    const auto lm = detail::log_z_moments(law.rho, ad, bin_width, rule);
    const double log_mm = lm.log_mean + lm.log_comp_mean;
    if (!(lm.log_var < log_mm))
      throw integrity_error("beta_surrogate: Var(Z) >= EZ(1-EZ), no beta match exists");
    const double log_excess = log_sub_exp(log_mm, lm.log_var);
    // orientation for delta > 0; swap for delta < 0
    double la = lm.log_mean + log_excess - lm.log_var;
    double lb = lm.log_comp_mean + log_excess - lm.log_var;
    if (law.delta < 0.0) std::swap(la, lb);
    s.log_a = la;
    s.log_b = lb;
    s.a = std::exp(la);
    s.b = std::exp(lb);
  }
  s.iota = 1.0 / (s.a + s.b + 1.0);
  return s;
}

inline BetaSurrogate beta_surrogate(const OutlierModel& model, double bin_width = 1e-4,
                                    ThetaRule rule = ThetaRule::simpson) {
  return beta_surrogate(model.law(), bin_width, rule);
}

}  // namespace rankdist
