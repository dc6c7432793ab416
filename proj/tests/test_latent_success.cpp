#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "rankdist/latent_success.hpp"
#include "rankdist/monte_carlo.hpp"

using namespace rankdist;

namespace {

struct SampleStats {
  double mean, var, se_mean, se_var;
};

SampleStats stats_of(const std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= n;
  double m2 = 0.0, m4 = 0.0;
  for (double v : x) {
    const double d = v - mean;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m4 /= n;
  SampleStats s{};
  s.mean = mean;
  s.var = m2 * n / (n - 1.0);
  s.se_mean = std::sqrt(m2 / n);
  s.se_var = std::sqrt(std::max(0.0, m4 - m2 * m2) / n);
  return s;
}

}  // namespace

TEST_CASE("OutlierModel standardization") {
  const OutlierModel model(-0.2, 1.0, 0.2, 1.0, 25);
  CHECK(model.delta() == Catch::Approx(0.4).margin(1e-15));
  CHECK(model.rho() == 1.0);
  CHECK_THROWS_AS(OutlierModel(0, 0.0, 0, 1, 5), std::domain_error);
  CHECK_THROWS_AS(OutlierModel(0, 1.0, 0, 1, 0), std::domain_error);
}

TEST_CASE("z_density") {
  const LatentSuccessLaw uniform(1.0, 0.0);
  for (double y : {0.05, 0.3, 0.5, 0.77, 0.99})
    CHECK(z_density(uniform, y) == Catch::Approx(1.0).margin(1e-14));

  // reflection f_{rho,-delta}(y) = f_{rho,delta}(1-y)
  const LatentSuccessLaw plus(2.0, 1.5), minus(2.0, -1.5);
  CHECK(z_density(minus, 0.3) == Catch::Approx(z_density(plus, 0.7)).epsilon(1e-12));

  CHECK(z_density(LatentSuccessLaw(2.0, 0.0), 0.5) == Catch::Approx(2.0).margin(1e-14));
  CHECK_THROWS_AS(z_density(uniform, 0.0), std::domain_error);
  CHECK_THROWS_AS(z_density(uniform, 1.0), std::domain_error);
}

TEST_CASE("z_cdf and z_quantile") {
  const LatentSuccessLaw uniform(1.0, 0.0);
  for (double y : {0.1, 0.42, 0.9})
    CHECK(z_cdf(uniform, y) == Catch::Approx(y).margin(1e-14));

  const LatentSuccessLaw law(1.7, -0.8);
  CHECK(z_quantile(law, z_cdf(law, 0.42)) == Catch::Approx(0.42).margin(1e-9));

  // frozen: Phi(2)
  CHECK(z_cdf(LatentSuccessLaw(1.0, 2.0), 0.5) ==
        Catch::Approx(0.9772498680518208).margin(1e-14));

  CHECK(z_cdf(law, 0.0) == 0.0);
  CHECK(z_cdf(law, 1.0) == 1.0);
  CHECK_THROWS_AS(z_quantile(law, 0.0), std::domain_error);
  CHECK_THROWS_AS(z_quantile(law, 1.0), std::domain_error);
}

TEST_CASE("z_mean closed form") {
  for (double rho : {0.3, 1.0, 5.0})
    CHECK(z_mean(LatentSuccessLaw(rho, 0.0)) == 0.5);
  // frozen: Phi(-sqrt(2))
  CHECK(z_mean(LatentSuccessLaw(1.0, 2.0)) ==
        Catch::Approx(0.07864960352514257).margin(1e-15));
  const double lhs = z_mean(LatentSuccessLaw(0.6, -3.1));
  const double rhs = 1.0 - z_mean(LatentSuccessLaw(0.6, 3.1));
  CHECK(lhs == Catch::Approx(rhs).margin(1e-15));
}

TEST_CASE("z_variance: uniform case is exactly 1/12 via the arccos term") {
  const VarianceBreakdown v = z_variance(LatentSuccessLaw(1.0, 0.0));
  CHECK(v.integral_term == 0.0);
  CHECK(v.arccos_term == Catch::Approx(1.0 / 3.0).margin(1e-15));
  CHECK(v.mean_sq_term == 0.25);
  CHECK(v.total == Catch::Approx(1.0 / 12.0).margin(1e-15));
}

TEST_CASE("z_variance symmetric in the sign of delta") {
  const double vp = z_variance(LatentSuccessLaw(0.7, 2.2)).total;
  const double vm = z_variance(LatentSuccessLaw(0.7, -2.2)).total;
  CHECK(vp == Catch::Approx(vm).epsilon(1e-12));
}

TEST_CASE("z_variance frozen references") {
  // frozen from direct quadrature of E Z^2 - (E Z)^2 at high precision
  CHECK(z_variance(LatentSuccessLaw(2.0, 1.0)).total ==
        Catch::Approx(0.02670864149092024).epsilon(1e-12));
  CHECK(z_variance(LatentSuccessLaw(0.85, 1.9)).total ==
        Catch::Approx(0.019563404726861845).epsilon(1e-12));
  CHECK(z_variance(LatentSuccessLaw(0.5, -1.0)).total ==
        Catch::Approx(0.083443036441839813).epsilon(1e-12));
  // the published left-endpoint binning lands close but not identical
  const double riem = z_variance(LatentSuccessLaw(2.0, 1.0), 1e-4, ThetaRule::left_riemann).total;
  CHECK(riem == Catch::Approx(0.02670864149092024).margin(2e-6));
  CHECK_THROWS_AS(z_variance(LatentSuccessLaw(1.0, 0.0), 0.0), std::domain_error);
  CHECK_THROWS_AS(z_variance(LatentSuccessLaw(1.0, 0.0), 0.5), std::domain_error);
}

TEST_CASE("z_variance matches Monte Carlo at (2,1)") {
  const LatentSuccessLaw law(2.0, 1.0);
  const auto z = sample_z(law, 1000000, 91101);
  const auto s = stats_of(z);
  const double v = z_variance(law).total;
  CHECK(std::abs(s.var - v) <= 3.0 * s.se_var);
}

TEST_CASE("z_raw_moment") {
  const LatentSuccessLaw uniform(1.0, 0.0);
  CHECK(z_raw_moment(uniform, 1) == Catch::Approx(0.5).margin(1e-8));
  CHECK(z_raw_moment(uniform, 2) == Catch::Approx(1.0 / 3.0).margin(1e-6));

  const LatentSuccessLaw law(2.0, 1.0);
  CHECK(z_raw_moment(law, 1) == Catch::Approx(z_mean(law)).margin(1e-8));
  const double v = z_variance(law).total;
  const double m = z_mean(law);
  CHECK(z_raw_moment(law, 2) == Catch::Approx(v + m * m).margin(1e-6));

  // third moment against a seeded Monte Carlo oracle
  const LatentSuccessLaw law3(1.5, 0.5);
  auto z = sample_z(law3, 1000000, 5150);
  for (double& zi : z) zi = zi * zi * zi;
  const auto s = stats_of(z);
  CHECK(std::abs(z_raw_moment(law3, 3) - s.mean) <= 3.0 * s.se_mean);
  CHECK_THROWS_AS(z_raw_moment(law3, 0), std::domain_error);
}

TEST_CASE("z_density integrates to its cdf (substituted coordinate)") {
  // quadrature of the density between two interior points must match the
  // closed-form cdf difference; with z_cdf(0) = 0 and z_cdf(1) = 1 pinned,
  // this is the normalization check without endpoint singularities
  for (auto [rho, delta] : {std::pair{0.5, 1.2}, {2.0, -0.7}, {1.3, 0.0}}) {
    const LatentSuccessLaw law(rho, delta);
    const double y_lo = std_normal_cdf(-8.0), y_hi = std_normal_cdf(8.0);
    const double mass = oracle::trapezoid(
        [&](double t) { return z_density(law, std_normal_cdf(t)) * std_normal_pdf(t); },
        -8.0, 8.0, 20000);
    CHECK(mass == Catch::Approx(z_cdf(law, y_hi) - z_cdf(law, y_lo)).margin(1e-6));
  }
  // full mass where the truncation covers the law outright
  const LatentSuccessLaw law(1.3, 0.0);
  const double mass = oracle::trapezoid(
      [&](double t) { return z_density(law, std_normal_cdf(t)) * std_normal_pdf(t); },
      -8.0, 8.0, 20000);
  CHECK(mass == Catch::Approx(1.0).margin(1e-6));
}

TEST_CASE("beta_surrogate moment matching") {
  const BetaSurrogate u = beta_surrogate(LatentSuccessLaw(1.0, 0.0));
  CHECK(u.a == Catch::Approx(1.0).margin(1e-12));
  CHECK(u.b == Catch::Approx(1.0).margin(1e-12));
  CHECK(u.iota == Catch::Approx(1.0 / 3.0).margin(1e-12));
  CHECK(u.iota == 1.0 / (u.a + u.b + 1.0));
  CHECK_FALSE(u.extreme);

  // a_{rho,-delta} = b_{rho,delta}
  const BetaSurrogate sp = beta_surrogate(LatentSuccessLaw(0.85, 1.9));
  const BetaSurrogate sm = beta_surrogate(LatentSuccessLaw(0.85, -1.9));
  CHECK(sm.a == Catch::Approx(sp.b).epsilon(1e-11));
  CHECK(sm.b == Catch::Approx(sp.a).epsilon(1e-11));

  // mean and variance of Beta(a,b) reproduce (m, v)
  for (auto [rho, delta] : {std::pair{0.85, 1.9}, {2.0, 1.0}, {0.5, -1.0}}) {
    const LatentSuccessLaw law(rho, delta);
    const BetaSurrogate s = beta_surrogate(law);
    const double m = z_mean(law);
    const double v = z_variance(law).total;
    CHECK(s.a / (s.a + s.b) == Catch::Approx(m).margin(1e-10));
    CHECK(s.a * s.b / ((s.a + s.b) * (s.a + s.b) * (s.a + s.b + 1.0)) ==
          Catch::Approx(v).margin(1e-10));
  }
}

TEST_CASE("beta_surrogate log-domain tail path") {
  CHECK_FALSE(beta_surrogate(LatentSuccessLaw(1.0, 11.5)).extreme);
  const BetaSurrogate s20 = beta_surrogate(LatentSuccessLaw(1.0, 20.0));
  CHECK(s20.extreme);
  // frozen from a cancellation-free high-precision evaluation
  CHECK(s20.log_a == Catch::Approx(-67.6095259606991).epsilon(1e-9));
  CHECK(s20.log_b == Catch::Approx(35.9635102447).epsilon(1e-9));

  const BetaSurrogate s40 = beta_surrogate(LatentSuccessLaw(1.0, 40.0));
  CHECK(s40.log_a == Catch::Approx(-267.618351466688).epsilon(1e-8));
  CHECK(s40.log_b == Catch::Approx(136.644139047977).epsilon(1e-8));

  // mirrored sign swaps the parameters
  const BetaSurrogate m20 = beta_surrogate(LatentSuccessLaw(1.0, -20.0));
  CHECK(m20.log_a == s20.log_b);
  CHECK(m20.log_b == s20.log_a);

  // continuity across the switch at |delta| = 12
  const auto lm = rankdist::detail::log_z_moments(1.0, 11.5, 1e-4, ThetaRule::simpson);
  const BetaSurrogate plain = beta_surrogate(LatentSuccessLaw(1.0, 11.5));
  const double log_mm = lm.log_mean + lm.log_comp_mean;
  const double log_excess = log_sub_exp(log_mm, lm.log_var);
  CHECK(plain.log_a == Catch::Approx(lm.log_mean + log_excess - lm.log_var).epsilon(1e-9));
}

TEST_CASE("variance bound and monotone decay in |delta|") {
  for (double rho : {0.25, 0.5, 1.0, 2.0, 4.0}) {
    double prev_pos = -1.0;
    for (int di = -4; di <= 4; ++di) {
      const LatentSuccessLaw law(rho, static_cast<double>(di));
      const double v = z_variance(law).total;
      const double m = z_mean(law);
      CHECK(v > 0.0);
      CHECK(v < m * (1.0 - m));
      CHECK(m * (1.0 - m) <= 0.25);
      (void)prev_pos;
    }
    // fixed rho: larger |delta| means smaller variance
    double prev = z_variance(LatentSuccessLaw(rho, 0.0)).total;
    for (double d : {0.5, 1.0, 2.0, 4.0}) {
      const double v = z_variance(LatentSuccessLaw(rho, d)).total;
      CHECK(v < prev);
      CHECK(z_variance(LatentSuccessLaw(rho, -d)).total == Catch::Approx(v).epsilon(1e-10));
      prev = v;
    }
  }
}

TEST_CASE("limit suite: mean and scaled variance approach the stated limits") {
  const double ladder[3] = {10.0, 30.0, 100.0};

  // delta -> -inf: Z -> 1, and delta -> +inf: Z -> 0. The deviation is
  // Phi(-|delta|/sqrt(2)) either way, which saturates to 0 in doubles by
  // |delta| = 100, so the decrease is checked on the log scale.
  double prev = 0.0;
  for (double d : ladder) {
    const double log_dev = std_normal_logcdf(-d / std::sqrt(2.0));
    CHECK(log_dev < prev);
    prev = log_dev;
  }
  // spot-check the linear-scale deviations where still representable
  CHECK(std::abs(1.0 - z_mean(LatentSuccessLaw(1.0, -10.0))) <
        std::abs(1.0 - z_mean(LatentSuccessLaw(1.0, -5.0))));
  CHECK(z_mean(LatentSuccessLaw(1.0, 30.0)) < z_mean(LatentSuccessLaw(1.0, 10.0)));
  // rho -> inf: Z -> 1/2 and rho^2 Var -> 1/(2 pi)
  prev = 1.0;
  double prev_v = 1.0;
  for (double rho : ladder) {
    const LatentSuccessLaw law(rho, 2.0);
    const double dev = std::abs(z_mean(law) - 0.5);
    const double dev_v = std::abs(rho * rho * z_variance(law).total - 1.0 / (2.0 * pi));
    CHECK(dev < prev);
    CHECK(dev_v < prev_v);
    prev = dev;
    prev_v = dev_v;
  }
  // rho, |delta| -> inf with delta/rho = 1: Z -> Phi(-1), rho^2 Var -> phi(1)^2
  const double target_m = std_normal_cdf(-1.0);
  const double target_v = std_normal_pdf(1.0) * std_normal_pdf(1.0);
  prev = 1.0;
  prev_v = 1.0;
  for (double t : ladder) {
    const LatentSuccessLaw law(t, t);
    const double dev = std::abs(z_mean(law) - target_m);
    const double dev_v = std::abs(t * t * z_variance(law).total - target_v);
    CHECK(dev < prev);
    CHECK(dev_v < prev_v);
    prev = dev;
    prev_v = dev_v;
  }
}
