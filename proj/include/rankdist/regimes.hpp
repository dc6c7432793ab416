#pragma once

// Asymptotic-regime diagnostics: W1(exact, surrogate) ladders in the four
// parameter regimes where the surrogate becomes exact, and empirical
// checks of the limiting joint-rank laws (scaled-rank convergence as n
// grows, endpoint concentration as rho vanishes).

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "rankdist/metrics.hpp"
#include "rankdist/monte_carlo.hpp"
#include "rankdist/rank_dist.hpp"

namespace rankdist {

enum class Regime {
  rho_to_zero,
  rho_to_inf,
  abs_delta_to_inf,
  rho_delta_to_inf,  // rho and |delta| grow with delta/rho = r fixed
  n_to_inf
};

inline const char* to_string(Regime r) {
  switch (r) {
    case Regime::rho_to_zero: return "rho->0";
    case Regime::rho_to_inf: return "rho->inf";
    case Regime::abs_delta_to_inf: return "|delta|->inf";
    case Regime::rho_delta_to_inf: return "rho,|delta|->inf";
    case Regime::n_to_inf: return "n->inf";
  }
  return "?";
}

struct RegimeStep {
  double param;      // the ladder value (rho, delta, t, or n)
  double statistic;  // W1(exact, surrogate) or Kolmogorov distance
};

struct RegimeOptions {
  int n = 25;                      // in-group size for the W1 ladders
  double anchor = 0.0;             // fixed delta (rho ladders), rho (delta ladder), or r
  std::vector<double> ladder;      // empty -> per-regime default
  std::uint64_t seed = 20240501;   // n_to_inf empirical check
  std::uint64_t replications = 10000;
};

struct RegimeReport {
  Regime regime;
  std::string statistic_name;
  std::vector<RegimeStep> steps;
  bool decreasing = false;  // strictly decreasing along the ladder
};

inline RegimeReport asymptotic_regime_check(Regime regime, RegimeOptions opt = {}) {
  RegimeReport report;
  report.regime = regime;

  auto w1_at = [&](double rho, double delta) {
    const OutlierModel model = OutlierModel::standardized(rho, delta, opt.n);
    return w1_discrete(r0_pmf_exact(model), r0_pmf_surrogate(model));
  };

  if (regime == Regime::n_to_inf) {
    report.statistic_name = "kolmogorov((R0-1)/n, z_cdf)";
    const double rho = 1.0;
    const double delta = (opt.anchor == 0.0) ? 0.5 : opt.anchor;
    std::vector<double> ladder =
        opt.ladder.empty() ? std::vector<double>{100, 1000, 10000} : opt.ladder;
    const LatentSuccessLaw law(rho, delta);
    for (double nv : ladder) {
      const int n = static_cast<int>(nv);
      SimConfig config{opt.replications, opt.seed, OutlierModel::standardized(rho, delta, n), {0}};
      const EmpiricalRankTable table = simulate_ranks(config);
      std::vector<double> scaled;
      scaled.reserve(opt.replications);
      for (int k = 1; k <= n + 1; ++k) {
        const double v = static_cast<double>(k - 1) / n;
        for (std::uint64_t c = 0; c < table.marginal[0][k - 1]; ++c) scaled.push_back(v);
      }
      const double d =
          kolmogorov_distance(std::move(scaled), [&](double y) { return z_cdf(law, y); });
      report.steps.push_back({nv, d});
    }
  } else {
    report.statistic_name = "w1(exact, surrogate)";
    std::vector<double> ladder = opt.ladder;
    switch (regime) {
      case Regime::rho_to_zero: {
        if (ladder.empty()) ladder = {1.0, 0.25, 0.0625, 0.015625};
        const double delta = (opt.anchor == 0.0) ? 0.5 : opt.anchor;
        for (double rho : ladder) report.steps.push_back({rho, w1_at(rho, delta)});
        break;
      }
      case Regime::rho_to_inf: {
        if (ladder.empty()) ladder = {1.0, 4.0, 16.0, 64.0};
        const double delta = (opt.anchor == 0.0) ? 2.0 : opt.anchor;
        for (double rho : ladder) report.steps.push_back({rho, w1_at(rho, delta)});
        break;
      }
      case Regime::abs_delta_to_inf: {
        if (ladder.empty()) ladder = {1.0, 2.0, 4.0, 8.0};
        const double rho = (opt.anchor == 0.0) ? 1.0 : opt.anchor;
        for (double delta : ladder) report.steps.push_back({delta, w1_at(rho, delta)});
        break;
      }
      case Regime::rho_delta_to_inf: {
        if (ladder.empty()) ladder = {1.0, 2.0, 4.0, 8.0};
        const double r = (opt.anchor == 0.0) ? 1.0 : opt.anchor;
        for (double t : ladder) report.steps.push_back({t, w1_at(t, r * t)});
        break;
      }
      default: break;
    }
  }

  report.decreasing = report.steps.size() >= 2;
  for (std::size_t i = 1; i < report.steps.size(); ++i)
    if (!(report.steps[i].statistic < report.steps[i - 1].statistic))
      report.decreasing = false;
  return report;
}

}  // namespace rankdist
