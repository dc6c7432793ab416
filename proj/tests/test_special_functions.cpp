#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "rankdist/special_functions.hpp"

using namespace rankdist;

TEST_CASE("std_normal_cdf basics") {
  CHECK(std_normal_cdf(0.0) == 0.5);
  CHECK(std_normal_cdf(-1.7) == Catch::Approx(1.0 - std_normal_cdf(1.7)).margin(1e-15));
  // frozen from the long-double erf series (truncation < 1e-19)
  const double phi1 = 0.8413447460685429486;
  CHECK(std::abs(static_cast<double>(oracle::std_normal_cdf(1.0L)) - phi1) < 1e-16);
  CHECK(std::abs(std_normal_cdf(1.0) - phi1) < 1e-15);
  CHECK_THROWS_AS(std_normal_cdf(std::numeric_limits<double>::quiet_NaN()), std::domain_error);
  CHECK_THROWS_AS(std_normal_cdf(std::numeric_limits<double>::infinity()), std::domain_error);
}

TEST_CASE("std_normal_cdf monotone on a grid") {
  double prev = std_normal_cdf(-10.0);
  for (int i = 1; i < 1000; ++i) {
    const double x = -10.0 + 20.0 * i / 999.0;
    const double v = std_normal_cdf(x);
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("Mills-ratio tail bound") {
  for (int x = 1; x <= 8; ++x) {
    // upper tail taken in the stable direction: 1 - Phi(x) = Phi(-x)
    const double q = std_normal_cdf(-static_cast<double>(x));
    CHECK(q <= std_normal_pdf(static_cast<double>(x)) / x);
  }
}

TEST_CASE("mills_ratio matches direct evaluation across the switch") {
  for (double x : {-9.0, -9.9, -10.1, -12.0, -20.0, -35.0}) {
    const double direct = std_normal_cdf(x) / std_normal_pdf(x);
    CHECK(mills_ratio(x) == Catch::Approx(direct).epsilon(1e-11));
  }
}

TEST_CASE("std_normal_pdf") {
  CHECK(std_normal_pdf(0.0) == Catch::Approx(0.3989422804014327).margin(1e-16));
  CHECK(std_normal_pdf(2.3) == std_normal_pdf(-2.3));
  // frozen: exp(-1/2)/sqrt(2 pi)
  CHECK(std_normal_pdf(1.0) == Catch::Approx(0.24197072451914335).margin(1e-16));
  CHECK_THROWS_AS(std_normal_pdf(std::numeric_limits<double>::infinity()), std::domain_error);
}

TEST_CASE("std_normal_quantile") {
  CHECK(std_normal_quantile(0.5) == 0.0);
  CHECK(std_normal_quantile(std_normal_cdf(1.3)) == Catch::Approx(1.3).margin(1e-9));
  // frozen from bisection on std_normal_cdf to 1e-14
  const double q975 = oracle::bisect([](double x) { return std_normal_cdf(x); }, 0.975, 0.0, 4.0);
  CHECK(q975 == Catch::Approx(1.9599639845400545).margin(1e-13));
  CHECK(std_normal_quantile(0.975) == Catch::Approx(1.9599639845400545).margin(1e-13));
  CHECK_THROWS_AS(std_normal_quantile(0.0), std::domain_error);
  CHECK_THROWS_AS(std_normal_quantile(1.0), std::domain_error);
  CHECK_THROWS_AS(std_normal_quantile(-0.1), std::domain_error);
  CHECK_THROWS_AS(std_normal_quantile(1.1), std::domain_error);
}

TEST_CASE("std_normal_quantile contract |Phi(result) - p| <= 1e-12") {
  std::mt19937_64 gen(42);
  std::uniform_real_distribution<double> unif(1e-12, 1.0 - 1e-12);
  for (int i = 0; i < 2000; ++i) {
    const double p = unif(gen);
    CHECK(std::abs(std_normal_cdf(std_normal_quantile(p)) - p) <= 1e-12);
  }
  // strictly increasing on a 1000-point grid
  double prev = std_normal_quantile(1e-6);
  for (int i = 1; i < 1000; ++i) {
    const double p = 1e-6 + (1.0 - 2e-6) * i / 999.0;
    const double v = std_normal_quantile(p);
    CHECK(v > prev);
    prev = v;
  }
}

TEST_CASE("std_normal_quantile deep tails round-trip") {
  for (double lp : {-10.0, -50.0, -200.0, -600.0}) {
    const double p = std::exp(lp);
    const double x = std_normal_quantile(p);
    CHECK(std_normal_logcdf(x) == Catch::Approx(lp).epsilon(1e-10));
  }
}

TEST_CASE("std_normal_logcdf consistent with cdf") {
  for (double x : {-30.0, -8.0, -1.0, 0.0}) {
    CHECK(std_normal_logcdf(x) == Catch::Approx(std::log(std_normal_cdf(x))).epsilon(1e-12));
  }
  for (double x : {1.5, 7.0}) {
    // near 1 compare through the tail, where both sides keep full precision
    CHECK(std_normal_logcdf(x) ==
          Catch::Approx(std::log1p(-std_normal_cdf(-x))).epsilon(1e-12));
  }
  // far tail: log Phi(-40) against the tail series done by hand
  const double lp = std_normal_logcdf(-40.0);
  CHECK(lp == Catch::Approx(-0.5 * 1600.0 - std::log(40.0) - 0.9189385332046727 +
                            std::log1p(-1.0 / 1600.0 + 3.0 / (1600.0 * 1600.0)))
                  .epsilon(1e-9));
}

TEST_CASE("log_gamma") {
  CHECK(std::abs(log_gamma(1.0)) < 1e-14);
  CHECK(std::abs(log_gamma(2.0)) < 1e-14);
  CHECK(log_gamma(0.5) == Catch::Approx(0.5723649429247001).margin(1e-13));
  CHECK(log_gamma(10.0) == Catch::Approx(std::log(362880.0)).epsilon(1e-13));
  for (double x : {0.1, 0.7, 1.3, 4.2, 17.0, 123.0, 4096.5}) {
    CHECK(log_gamma(x + 1.0) - log_gamma(x) == Catch::Approx(std::log(x)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(log_gamma(0.0), std::domain_error);
  CHECK_THROWS_AS(log_gamma(-3.2), std::domain_error);
}

TEST_CASE("log_beta") {
  CHECK(std::abs(log_beta(1.0, 1.0)) < 1e-14);
  CHECK(log_beta(2.0, 3.0) == Catch::Approx(std::log(1.0 / 12.0)).epsilon(1e-13));
  CHECK(log_beta(0.3, 4.7) == log_beta(4.7, 0.3));
  for (int m = 1; m <= 10; ++m) {
    for (int n = 1; n <= 10; ++n) {
      const double exact = static_cast<double>(
          oracle::factorial(m - 1) * oracle::factorial(n - 1) / oracle::factorial(m + n - 1));
      CHECK(std::exp(log_beta(m, n)) == Catch::Approx(exact).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(log_beta(0.0, 1.0), std::domain_error);
}

TEST_CASE("regularized_incomplete_beta") {
  CHECK(regularized_incomplete_beta(0.5, 1.0, 1.0) == Catch::Approx(0.5).margin(1e-14));
  CHECK(regularized_incomplete_beta(0.0, 2.4, 3.1) == 0.0);
  CHECK(regularized_incomplete_beta(1.0, 2.4, 3.1) == 1.0);
  // reflection identity
  CHECK(regularized_incomplete_beta(0.3, 2.0, 5.0) ==
        Catch::Approx(1.0 - regularized_incomplete_beta(0.7, 5.0, 2.0)).margin(1e-13));
  // exact polynomial CDF of Beta(2,3); frozen value 0.26171875
  CHECK(oracle::beta23_cdf(0.25) == 0.26171875);
  CHECK(regularized_incomplete_beta(0.25, 2.0, 3.0) == Catch::Approx(0.26171875).margin(1e-12));
  for (double x : {0.05, 0.2, 0.45, 0.6, 0.85, 0.99}) {
    CHECK(regularized_incomplete_beta(x, 2.0, 3.0) ==
          Catch::Approx(oracle::beta23_cdf(x)).margin(1e-12));
  }
  CHECK_THROWS_AS(regularized_incomplete_beta(-0.1, 1.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(regularized_incomplete_beta(0.5, 0.0, 1.0), std::domain_error);
}

TEST_CASE("beta_quantile") {
  CHECK(beta_quantile(0.5, 1.0, 1.0) == Catch::Approx(0.5).margin(1e-12));
  CHECK(beta_quantile(0.5, 2.0, 2.0) == Catch::Approx(0.5).margin(1e-10));
  CHECK(beta_quantile(0.0, 3.0, 2.0) == 0.0);
  CHECK(beta_quantile(1.0, 3.0, 2.0) == 1.0);
  const double x = beta_quantile(0.7, 3.0, 2.0);
  CHECK(regularized_incomplete_beta(x, 3.0, 2.0) == Catch::Approx(0.7).margin(1e-9));

  // contract |I(result) - p| <= 1e-10, incl. lopsided and large shapes
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> unif(0.001, 0.999);
  for (auto [a, b] : {std::pair{2.5, 0.7}, {0.3, 0.3}, {40.0, 90.0}, {500.0, 2.0}, {1e3, 1e3}}) {
    for (int i = 0; i < 50; ++i) {
      const double p = unif(gen);
      const double q = beta_quantile(p, a, b);
      CHECK(std::abs(regularized_incomplete_beta(q, a, b) - p) <= 1e-10);
    }
  }

  // strictly increasing on a 1000-point grid
  double prev = beta_quantile(0.0005, 2.5, 0.7);
  for (int i = 1; i < 1000; ++i) {
    const double p = 0.0005 + (0.999) * i / 999.0;
    const double v = beta_quantile(p, 2.5, 0.7);
    CHECK(v > prev);
    prev = v;
  }
}

TEST_CASE("log helpers") {
  CHECK(log_add_exp(std::log(2.0), std::log(3.0)) == Catch::Approx(std::log(5.0)).epsilon(1e-15));
  CHECK(log_sub_exp(std::log(5.0), std::log(3.0)) == Catch::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(log_binomial(10, 3) == Catch::Approx(std::log(120.0)).epsilon(1e-13));
  CHECK(log_factorial(5) == Catch::Approx(std::log(120.0)).epsilon(1e-13));
}
