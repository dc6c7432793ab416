#pragma once

// Exact and approximate ranking probabilities for classical latent-utility
// models: exponential (Plackett-Luce form), Gumbel, gamma races, the
// Henery (1981) Taylor expansion for near-homogeneous normals, and nested
// quadrature for small normal models. These serve both as benchmarks and
// as oracles for the single-outlier approximations.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rankdist/latent_success.hpp"
#include "rankdist/special_functions.hpp"

namespace rankdist {

// A full ranking r over n items: r[i] is the rank (1-based) of item i.
// o(j) inverts it: the item holding rank j.
class Ranking {
 public:
  explicit Ranking(std::vector<int> r) : r_(std::move(r)) {
    const int n = static_cast<int>(r_.size());
    if (n == 0) throw std::domain_error("Ranking: empty");
    o_.assign(n, -1);
    for (int i = 0; i < n; ++i) {
      if (r_[i] < 1 || r_[i] > n || o_[r_[i] - 1] != -1)
        throw std::domain_error("Ranking: not a permutation of 1..n");
      o_[r_[i] - 1] = i;
    }
  }

  static Ranking identity(int n) {
    std::vector<int> r(n);
    for (int i = 0; i < n; ++i) r[i] = i + 1;
    return Ranking(std::move(r));
  }

  Ranking reversed() const {
    const int n = size();
    std::vector<int> r(n);
    for (int i = 0; i < n; ++i) r[i] = n + 1 - r_[i];
    return Ranking(std::move(r));
  }

  int size() const { return static_cast<int>(r_.size()); }
  int rank_of(int item) const { return r_.at(item); }
  int item_at(int rank) const { return o_.at(rank - 1); }  // rank is 1-based
  const std::vector<int>& ranks() const { return r_; }

 private:
  std::vector<int> r_;
  std::vector<int> o_;
};

// Pr(R = r) for independent X_i ~ Exp(lambda_i):
//   prod_j lambda_{o_j} / sum_{k>=j} lambda_{o_k}
inline double exp_rank_prob(std::span<const double> lambdas, const Ranking& ranking) {
  const int n = ranking.size();
  if (static_cast<int>(lambdas.size()) != n)
    throw std::domain_error("exp_rank_prob: size mismatch");
  for (double l : lambdas)
    if (!(l > 0.0)) throw std::domain_error("exp_rank_prob: rates must be positive");
  std::vector<double> lam(n);
  for (int j = 1; j <= n; ++j) lam[j - 1] = lambdas[ranking.item_at(j)];
  // suffix sums of rates in rank order, folded into the log product
  double acc = 0.0;
  double log_p = 0.0;
  for (int j = n; j >= 1; --j) {
    acc += lam[j - 1];
    log_p += std::log(lam[j - 1]) - std::log(acc);
  }
  return std::exp(log_p);
}

// Pr(R = r) for independent X_i ~ Gumbel(mu_i, sigma_i):
//   prod_j exp(m_{o_{n-j+1}}) / sum_{k<=n-j+1} exp(m_{o_k}),  m_i = mu_i/sigma_i
inline double gumbel_rank_prob(std::span<const double> mus, std::span<const double> sigmas,
                               const Ranking& ranking) {
  const int n = ranking.size();
  if (static_cast<int>(mus.size()) != n || static_cast<int>(sigmas.size()) != n)
    throw std::domain_error("gumbel_rank_prob: size mismatch");
  for (double s : sigmas)
    if (!(s > 0.0)) throw std::domain_error("gumbel_rank_prob: scales must be positive");
  double log_p = 0.0;
  double lse = -std::numeric_limits<double>::infinity();
  for (int t = 1; t <= n; ++t) {
    const int item = ranking.item_at(t);
    const double m = mus[item] / sigmas[item];
    lse = log_add_exp(lse, m);
    log_p += m - lse;
  }
  return std::exp(log_p);
}

struct GammaRaceModel {
  int s;                        // common integer shape
  std::vector<double> lambdas;  // one positive rate per racer

  GammaRaceModel(int s_, std::vector<double> lambdas_)
      : s(s_), lambdas(std::move(lambdas_)) {
    if (s < 1) throw std::domain_error("GammaRaceModel: s >= 1 required");
    if (lambdas.empty()) throw std::domain_error("GammaRaceModel: no rates");
    for (double l : lambdas)
      if (!(l > 0.0)) throw std::domain_error("GammaRaceModel: rates must be positive");
  }
};

namespace detail {

// Number of odometer states (digits i_2..i_{n-1}); the innermost index i_1
// is folded into a prefix table, so it does not count toward the guard.
inline double gamma_predicted_states(int s, int n) {
  if (n <= 2) return 1.0;
  // h_j(x): states of digits (i_2..i_j) given i_{j+1} = x
  const int xmax = (n - 2) * (s - 1);
  std::vector<double> h(xmax + 1);
  for (int x = 0; x <= xmax; ++x) h[x] = static_cast<double>(s + x);
  for (int j = 3; j <= n - 1; ++j) {
    const int upper = (n - 1 - j) * (s - 1);
    std::vector<double> next(upper + 1, 0.0);
    for (int x = 0; x <= upper; ++x) {
      double acc = 0.0;
      for (int i = 0; i <= s - 1 + x; ++i) {
        acc += h[i];
        if (acc > 1e18) return 1e18;
      }
      next[x] = acc;
    }
    h = std::move(next);
  }
  return h[0];
}

}  // namespace detail

// Pr(R = r) for independent X_i ~ Gamma(s, lambda_i), by the nested
// negative-binomial sums of the Poisson-race representation. Terms are
// combined with log-sum-exp. The sum runs as an iterative odometer over
// the failure-count lattice (i_2, ..., i_{n-1}); the innermost index is
// absorbed into a prefix-sum table, so the per-state work is O(1) and no
// recursion depth depends on n. The guard caps the number of odometer
// states.
inline double gamma_rank_prob(const GammaRaceModel& model, const Ranking& ranking,
                              double max_terms = 1e8) {
  const int n = ranking.size();
  const int s = model.s;
  if (static_cast<int>(model.lambdas.size()) != n)
    throw std::domain_error("gamma_rank_prob: size mismatch");
  if (n == 1) return 1.0;

  const double predicted = detail::gamma_predicted_states(s, n);
  if (predicted > max_terms)
    throw complexity_error(
        "gamma_rank_prob: predicted " + std::to_string(predicted) +
        " odometer states exceed the work guard; consider the beta-binomial surrogate");

  // rates in rank order and suffix totals Lambda_j = sum_{k>=j} lam_k
  std::vector<double> lam(n), Lambda(n + 2, 0.0);
  for (int j = 1; j <= n; ++j) lam[j - 1] = model.lambdas[ranking.item_at(j)];
  for (int j = n; j >= 1; --j) Lambda[j] = Lambda[j + 1] + lam[j - 1];

  double lc = 0.0;
  for (int j = 1; j <= n - 1; ++j) lc += s * (std::log(lam[j - 1]) - std::log(Lambda[j]));

  // per-level tables A_j[i] = log C(s-1+i, i) + i log(Lambda_{j+1}/Lambda_j)
  std::vector<std::vector<double>> A(n);  // A[j] for j = 1..n-1
  std::vector<double> A_max(n, 0.0);
  for (int j = 1; j <= n - 1; ++j) {
    const int imax = (n - j) * (s - 1);
    const double logq = std::log(Lambda[j + 1]) - std::log(Lambda[j]);
    A[j].resize(imax + 1);
    double mx = -std::numeric_limits<double>::infinity();
    for (int i = 0; i <= imax; ++i) {
      A[j][i] = log_binomial(s - 1.0 + i, static_cast<double>(i)) + i * logq;
      mx = std::max(mx, A[j][i]);
    }
    A_max[j] = mx;
  }

  // prefix table for the folded innermost index i_1
  const double m1 = A_max[1];
  std::vector<double> prefix(A[1].size());
  double run = 0.0;
  for (std::size_t i = 0; i < A[1].size(); ++i) {
    run += std::exp(A[1][i] - m1);
    prefix[i] = run;
  }

  if (n == 2) return std::exp(lc + m1 + std::log(prefix[s - 1]));

  double shift = 0.0;  // upper bound for the odometer's partial sum
  for (int j = 2; j <= n - 1; ++j) shift += A_max[j];

  std::vector<int> idx(n + 1, 0);  // idx[j] = i_j; idx[n] pinned at 0
  double S = 0.0;                  // sum of A_j[idx[j]], j = 2..n-1 (A_j[0] = 0)
  double total = 0.0;
  while (true) {
    total += std::exp(S - shift) * prefix[s - 1 + idx[2]];
    int j = 2;
    while (j <= n - 1) {
      if (idx[j] < s - 1 + idx[j + 1]) {
        S += A[j][idx[j] + 1] - A[j][idx[j]];
        ++idx[j];
        break;
      }
      S -= A[j][idx[j]];  // A_j[0] = 0, so resetting adds nothing back
      idx[j] = 0;
      ++j;
    }
    if (j > n - 1) break;
  }
  return std::exp(lc + shift + m1 + std::log(total));
}

// Maps a single-outlier gamma race (lambda_0 != lambda_1 = ... = lambda_n)
// onto the normal outlier model through Gamma(s, l) ~ N(s/l, s/l^2).
inline OutlierModel gamma_outlier_to_normal(const GammaRaceModel& model) {
  const int total = static_cast<int>(model.lambdas.size());
  if (total < 2) throw std::domain_error("gamma_outlier_to_normal: need n >= 1 in-group racers");
  const double l0 = model.lambdas[0];
  const double l1 = model.lambdas[1];
  for (int i = 2; i < total; ++i)
    if (model.lambdas[i] != l1)
      throw std::domain_error("gamma_outlier_to_normal: in-group rates must be equal");
  const double s = static_cast<double>(model.s);
  return OutlierModel(s / l0, std::sqrt(s) / l0, s / l1, std::sqrt(s) / l1, total - 1);
}

// Henery (1981) Taylor approximations; assumes sigma_i = 1 and mu_i near 0.
struct TaylorConfig {
  int n;                    // number of latent normals
  std::vector<double> mus;  // one mean per item

  TaylorConfig(int n_, std::vector<double> mus_) : n(n_), mus(std::move(mus_)) {
    if (n < 2) throw std::domain_error("TaylorConfig: n >= 2 required");
    if (static_cast<int>(mus.size()) != n)
      throw std::domain_error("TaylorConfig: means size mismatch");
  }
};

namespace detail {

// Blom's approximation to the mean of the i-th of n standard normal order
// statistics: Phi^{-1}((i - 3/8) / (n - 3/4)).
inline double blom_order_mean(int i, int n) {
  return std_normal_quantile((i - 0.375) / (n - 0.75));
}

// psi for a count given as log k: Phi^{-1}(exp(-log k)), tail-stable.
inline double psi_of_log_count(double log_k) {
  const double p = std::exp(-log_k);
  if (p == 0.0)
    throw std::domain_error("taylor: 1/k underflows, full-ranking formula unusable");
  return std_normal_quantile(p);
}

}  // namespace detail

// Pr(R = r) ~ Phi(psi_{n!} + sum_i mu_{o_i} mu_(i) / (n! phi(psi_{n!})))
inline double taylor_full_ranking_prob(const TaylorConfig& config, const Ranking& ranking) {
  const int n = config.n;
  if (ranking.size() != n) throw std::domain_error("taylor_full_ranking_prob: size mismatch");
  const double log_nfact = log_factorial(n);
  const double psi = detail::psi_of_log_count(log_nfact);
  double num = 0.0;
  for (int j = 1; j <= n; ++j)
    num += config.mus[ranking.item_at(j)] * detail::blom_order_mean(j, n);
  const double denom_log = log_nfact + std::log(std_normal_pdf(psi));
  return std_normal_cdf(psi + num * std::exp(-denom_log));
}

// Pr(R_i = 1) ~ Phi(psi_n + mu_i mu_(1) / ((n-1) phi(psi_n))). The (n-1)
// normalization here versus n! in the full-ranking form follows the
// published formulas as printed.
inline double taylor_top1_prob(const TaylorConfig& config, int item) {
  const int n = config.n;
  if (item < 0 || item >= n) throw std::domain_error("taylor_top1_prob: bad item");
  const double psi = std_normal_quantile(1.0 / n);
  return std_normal_cdf(psi + config.mus[item] * detail::blom_order_mean(1, n) /
                                  ((n - 1.0) * std_normal_pdf(psi)));
}

// Pr(R_i = 1, R_j = 2)
inline double taylor_top2_prob(const TaylorConfig& config, int item_i, int item_j) {
  const int n = config.n;
  if (item_i < 0 || item_i >= n || item_j < 0 || item_j >= n || item_i == item_j)
    throw std::domain_error("taylor_top2_prob: bad items");
  const double nn1 = static_cast<double>(n) * (n - 1.0);
  const double psi = detail::psi_of_log_count(std::log(nn1));
  const double phi_psi = std_normal_pdf(psi);
  const double mu1 = detail::blom_order_mean(1, n);
  const double mu2 = detail::blom_order_mean(2, n);
  const double mi = config.mus[item_i];
  const double mj = config.mus[item_j];
  return std_normal_cdf(psi + (mi * mu1 + mj * mu2) / (nn1 * phi_psi) +
                        (mi + mj) * (mu1 + mu2) / (nn1 * (n - 2.0) * phi_psi));
}

namespace detail {

template <typename F>
double adaptive_simpson_rec(const F& f, double a, double b, double fa, double fm, double fb,
                            double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

template <typename F>
double adaptive_simpson(const F& f, double a, double b, double tol) {
  if (!(b > a)) return 0.0;
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, 24);
}

}  // namespace detail

// Pr(R = r) for independent X_i ~ N(mu_i, sigma_i^2) by nested adaptive
// quadrature of the ordered-density integral; practical only for n <= 4.
// Absolute error target ~1e-6.
inline double normal_rank_prob_quadrature(std::span<const double> mus,
                                          std::span<const double> sigmas,
                                          const Ranking& ranking, double level_tol = 1e-9) {
  const int n = ranking.size();
  if (static_cast<int>(mus.size()) != n || static_cast<int>(sigmas.size()) != n)
    throw std::domain_error("normal_rank_prob_quadrature: size mismatch");
  if (n > 4)
    throw complexity_error("normal_rank_prob_quadrature: n <= 4 required");
  for (double s : sigmas)
    if (!(s > 0.0)) throw std::domain_error("normal_rank_prob_quadrature: scales must be positive");

  std::vector<double> m(n), sd(n);
  for (int j = 1; j <= n; ++j) {
    m[j - 1] = mus[ranking.item_at(j)];
    sd[j - 1] = sigmas[ranking.item_at(j)];
  }

  // value(j, lower) = Pr(lower < X_(j) < X_(j+1) < ... ), with the last
  // level in closed form.
  std::function<double(int, double)> value = [&](int j, double lower) -> double {
    if (j == n - 1) return std_normal_cdf((m[j] - lower) / sd[j]);
    const double lo = std::max(lower, m[j] - 9.0 * sd[j]);
    const double hi = m[j] + 9.0 * sd[j];
    auto f = [&](double t) {
      return std_normal_pdf((t - m[j]) / sd[j]) / sd[j] * value(j + 1, t);
    };
    return detail::adaptive_simpson(f, lo, hi, level_tol);
  };
  if (n == 1) return 1.0;
  return value(0, -std::numeric_limits<double>::infinity());
}

}  // namespace rankdist
