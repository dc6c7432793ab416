#pragma once

// Marginal and joint rank distributions for the single-outlier normal
// model: the beta-binomial surrogate pmf, the exact-integral pmf, joint
// rank laws, closed-form moments, extreme-rank probabilities with their
// large-n forms, and asymptotic-regime diagnostics.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "rankdist/latent_success.hpp"
#include "rankdist/special_functions.hpp"

namespace rankdist {

enum class PmfMethod { exact_integral, surrogate, monte_carlo };

inline const char* to_string(PmfMethod m) {
  switch (m) {
    case PmfMethod::exact_integral: return "exact-integral";
    case PmfMethod::surrogate: return "surrogate";
    case PmfMethod::monte_carlo: return "monte-carlo";
  }
  return "?";
}

// Distribution of the outlier's rank over {1, ..., n+1}.
struct RankPmf {
  int n = 0;                  // in-group size
  std::vector<double> probs;  // probs[k-1] = Pr(R0 = k)
  PmfMethod method = PmfMethod::surrogate;
  double raw_mass = 1.0;      // quadrature mass before renormalization
  bool precision_warning = false;

  double prob(int k) const {
    if (k < 1 || k > n + 1) throw std::domain_error("RankPmf: rank outside 1..n+1");
    return probs[k - 1];
  }
  double mean() const {
    double m = 0.0;
    for (int k = 1; k <= n + 1; ++k) m += k * probs[k - 1];
    return m;
  }
  double variance() const {
    const double m = mean();
    double v = 0.0;
    for (int k = 1; k <= n + 1; ++k) v += (k - m) * (k - m) * probs[k - 1];
    return v;
  }
};

namespace detail {

// log Gamma(alpha + j) - log Gamma(alpha) for integer j >= 0, usable even
// when alpha itself has underflowed (log_alpha then carries it).
inline double lgamma_shift(double alpha, double log_alpha, int j) {
  if (j == 0) return 0.0;
  if (alpha >= 1e-270)
    return log_gamma(alpha + static_cast<double>(j)) - log_gamma(alpha);
  // Gamma(alpha+j)/Gamma(alpha) = alpha (alpha+1) ... = alpha Gamma(j) (1 + O(alpha))
  return log_alpha + log_gamma(static_cast<double>(j));
}

}  // namespace detail

// Beta-binomial surrogate pmf:
//   p(k) = C(n, k-1) B(a+k-1, b+n+1-k) / B(a, b)
// assembled entirely in the log domain as shifted log-gamma ratios, so the
// leading Gamma(a)/Gamma(b) factors cancel algebraically and extreme
// (a, b) stay finite.
inline RankPmf r0_pmf_surrogate(const OutlierModel& model, double bin_width = 1e-4,
                                ThetaRule rule = ThetaRule::simpson) {
  const int n = model.n;
  const BetaSurrogate s = beta_surrogate(model, bin_width, rule);
  const double log_ab = (s.a > 0.0 && s.b > 0.0 && s.a + s.b > 1e-270)
                            ? std::log(s.a + s.b)
                            : std::max(s.log_a, s.log_b);
  const double denom = detail::lgamma_shift(s.a + s.b, log_ab, n);

  RankPmf pmf;
  pmf.n = n;
  pmf.method = PmfMethod::surrogate;
  pmf.probs.resize(n + 1);
  for (int k = 1; k <= n + 1; ++k) {
    const double lp = log_binomial(n, k - 1.0) +
                      detail::lgamma_shift(s.a, s.log_a, k - 1) +
                      detail::lgamma_shift(s.b, s.log_b, n + 1 - k) - denom;
    pmf.probs[k - 1] = std::exp(lp);
  }
  return pmf;
}

struct QuadratureConfig {
  double half_width = 8.0;  // the X0 variable is integrated over [-hw, hw]
  long points = 20001;
};

// Exact-integral pmf:
//   Pr(R0 = k) = C(n, k-1) E[ Z^{k-1} (1-Z)^{n+1-k} ],
// integrated in the X0 coordinate (the Phi^{-1} substitution of the unit
// interval), where the integrand is smooth and phi-damped. Integrand
// products are assembled in log space. Reported probabilities are
// renormalized; the raw quadrature mass is kept alongside.
inline RankPmf r0_pmf_exact(const OutlierModel& model, QuadratureConfig quad = {}) {
  const int n = model.n;
  const LatentSuccessLaw law = model.law();
  if (quad.points < 3 || !(quad.half_width > 0.0))
    throw std::domain_error("r0_pmf_exact: bad quadrature config");

  std::vector<double> log_choose(n + 1);
  for (int k = 1; k <= n + 1; ++k) log_choose[k - 1] = log_binomial(n, k - 1.0);

  RankPmf pmf;
  pmf.n = n;
  pmf.method = PmfMethod::exact_integral;
  pmf.probs.assign(n + 1, 0.0);

  const double h = 2.0 * quad.half_width / (quad.points - 1);
  for (long i = 0; i < quad.points; ++i) {
    const double y = -quad.half_width + i * h;
    const double t = (y - law.delta) / law.rho;
    const double lp = std_normal_logcdf(t);    // log Z(y)
    const double lq = std_normal_logcdf(-t);   // log (1 - Z(y))
    const double lphi = -0.5 * y * y - log_sqrt2pi;
    const double w = (i == 0 || i == quad.points - 1) ? 0.5 : 1.0;
    for (int k = 1; k <= n + 1; ++k) {
      double le = log_choose[k - 1] + lphi;
      if (k > 1) le += (k - 1) * lp;
      if (k < n + 1) le += (n + 1 - k) * lq;
      pmf.probs[k - 1] += w * std::exp(le);
    }
  }

  double mass = 0.0;
  for (double& p : pmf.probs) {
    p *= h;
    mass += p;
  }
  pmf.raw_mass = mass;
  pmf.precision_warning = std::abs(mass - 1.0) > 1e-2;
  for (double& p : pmf.probs) p /= mass;
  return pmf;
}

// Joint rank query: optional rank j0 for the outlier plus ranks for m
// distinct in-group indices.
struct JointRankQuery {
  std::optional<int> j0;
  std::vector<int> indices;  // in 1..n, distinct
  std::vector<int> ranks;    // in 1..n+1, distinct, j0 excluded

  void validate(int n) const {
    if (indices.size() != ranks.size())
      throw std::domain_error("JointRankQuery: indices/ranks size mismatch");
    const int m = static_cast<int>(indices.size());
    if (m < 1 || m > n) throw std::domain_error("JointRankQuery: need 1 <= m <= n");
    std::set<int> idx(indices.begin(), indices.end());
    std::set<int> rnk(ranks.begin(), ranks.end());
    if (static_cast<int>(idx.size()) != m || static_cast<int>(rnk.size()) != m)
      throw std::domain_error("JointRankQuery: duplicate indices or ranks");
    for (int i : indices)
      if (i < 1 || i > n) throw std::domain_error("JointRankQuery: index outside 1..n");
    for (int r : ranks)
      if (r < 1 || r > n + 1) throw std::domain_error("JointRankQuery: rank outside 1..n+1");
    if (j0) {
      if (*j0 < 1 || *j0 > n + 1) throw std::domain_error("JointRankQuery: j0 outside 1..n+1");
      if (rnk.count(*j0)) throw std::domain_error("JointRankQuery: j0 duplicates an in-group rank");
    }
  }
};

// Pr(R0 = j0, R_{i_1} = j_1, ...) = Pr(R0 = j0) / (n (n-1) ... (n-m+1)),
// and with j0 marginalized out, (1 - sum_k Pr(R0 = j_k)) / (same product).
// Any R0 pmf (exact, surrogate, or empirical) may back the query.
inline double joint_prob(const OutlierModel& model, const JointRankQuery& query,
                         const RankPmf& pmf) {
  if (pmf.n != model.n) throw std::domain_error("joint_prob: pmf dimension mismatch");
  query.validate(model.n);
  const int m = static_cast<int>(query.indices.size());
  double perm = 1.0;
  for (int i = 1; i <= m; ++i) perm *= model.n - i + 1;
  if (query.j0) return pmf.prob(*query.j0) / perm;
  double tail = 1.0;
  for (int r : query.ranks) tail -= pmf.prob(r);
  return tail / perm;
}

struct RankMoments {
  double mean_r0, var_r0;
  double mean_r1, var_r1;
  double cov_r0_r1, cov_r1_r2;
  double iota;  // intra-class correlation of two success indicators
};

// Closed-form first and second moments of (R0, R1, R2); exact, not
// surrogate-based. var_r0 = -n cov_r0_r1 holds identically by
// construction.
inline RankMoments rank_moments(const OutlierModel& model, double bin_width = 1e-4,
                                ThetaRule rule = ThetaRule::simpson) {
  const int n = model.n;
  const LatentSuccessLaw law = model.law();
  const double m = z_mean(law);
  const double v = z_variance(law, bin_width, rule).total;
  const double mm = m * (1.0 - m);
  const double iota = v / mm;

  RankMoments out{};
  out.iota = iota;
  const double w = mm * (1.0 + (n - 1.0) * iota);
  out.mean_r0 = 1.0 + n * m;
  out.var_r0 = n * w;
  out.cov_r0_r1 = -w;
  out.mean_r1 = 0.5 * (n + 1.0) + (1.0 - m);
  out.var_r1 = (static_cast<double>(n) * n - 1.0) / 12.0 +
               n * mm * (1.0 - (n - 1.0) * iota / n);
  out.cov_r1_r2 = -(n + 1.0) / 12.0 + 2.0 * mm * (iota - 0.5);
  return out;
}

struct ExtremeRankProbs {
  double min_prob, max_prob;
  std::optional<double> median_prob;  // only defined for even n = 2m
  double asymptotic_min, asymptotic_max;
  std::optional<double> asymptotic_median;
};

// Surrogate probabilities of the outlier landing at the minimum, median
// (even n only) and maximum positions, with their large-n asymptotics
//   Gamma(a+b) / (n^b Gamma(a)),  2^{1-a-b} / (m B(a,b)),  Gamma(a+b) / (n^a Gamma(b)).
inline ExtremeRankProbs extreme_probs(const OutlierModel& model, bool want_median = true,
                                      double bin_width = 1e-4,
                                      ThetaRule rule = ThetaRule::simpson) {
  const int n = model.n;
  const BetaSurrogate s = beta_surrogate(model, bin_width, rule);
  const double log_ab = (s.a + s.b > 1e-270) ? std::log(s.a + s.b)
                                             : std::max(s.log_a, s.log_b);
  const double denom_n = detail::lgamma_shift(s.a + s.b, log_ab, n);

  auto lgamma_safe = [](double x, double log_x) {
    return (x >= 1e-270) ? log_gamma(x) : -log_x;  // Gamma(x) ~ 1/x as x -> 0
  };

  ExtremeRankProbs out{};
  out.min_prob = std::exp(detail::lgamma_shift(s.b, s.log_b, n) - denom_n);
  out.max_prob = std::exp(detail::lgamma_shift(s.a, s.log_a, n) - denom_n);
  const double lg_a = lgamma_safe(s.a, s.log_a);
  const double lg_b = lgamma_safe(s.b, s.log_b);
  const double lg_ab = lgamma_safe(s.a + s.b, log_ab);
  out.asymptotic_min = std::exp(lg_ab - s.b * std::log(static_cast<double>(n)) - lg_a);
  out.asymptotic_max = std::exp(lg_ab - s.a * std::log(static_cast<double>(n)) - lg_b);

  if (want_median) {
    if (n % 2 != 0)
      throw std::domain_error("extreme_probs: median position requires even n = 2m");
    const int m = n / 2;
    out.median_prob = std::exp(log_binomial(n, m) + detail::lgamma_shift(s.a, s.log_a, m) +
                               detail::lgamma_shift(s.b, s.log_b, m) - denom_n);
    const double log_beta_ab = lg_a + lg_b - lg_ab;
    out.asymptotic_median =
        std::exp((1.0 - s.a - s.b) * std::log(2.0) - std::log(static_cast<double>(m)) -
                 log_beta_ab);
  }
  return out;
}

}  // namespace rankdist
