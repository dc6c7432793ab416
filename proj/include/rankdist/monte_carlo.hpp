#pragma once

// Seeded simulation oracle. The generator is xoshiro256++ (Blackman &
// Vigna) seeded through splitmix64; normal variates come from the
// inverse-CDF method on top of it, so the integer generator is the only
// source of randomness and every draw replays bit-exactly across
// platforms. Replications run in fixed-size blocks with per-block derived
// seeds; merged counts do not depend on how blocks are scheduled.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <stdexcept>
#include <variant>
#include <vector>

#include "rankdist/classical_models.hpp"
#include "rankdist/latent_success.hpp"
#include "rankdist/rank_dist.hpp"
#include "rankdist/special_functions.hpp"

namespace rankdist {

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}
}  // namespace detail

class Xoshiro256pp {
 public:
  explicit Xoshiro256pp(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& w : state_) w = detail::splitmix64(sm);
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // uniform on the open interval (0,1): 53-bit mantissa, half-ulp offset
  double uniform_open01() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }

  double normal() { return std_normal_quantile(uniform_open01()); }

  // substream seed for replication block b: two splitmix64 rounds over
  // (seed xor (b+1) * golden-gamma)
  static std::uint64_t block_seed(std::uint64_t seed, std::uint64_t block) {
    std::uint64_t sm = seed ^ ((block + 1) * 0x9E3779B97F4A7C15ULL);
    detail::splitmix64(sm);
    return detail::splitmix64(sm);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::uint64_t state_[4];
};

struct GenericNormalModel {
  std::vector<double> mus;
  std::vector<double> sigmas;
};

struct SimConfig {
  std::uint64_t replications = 0;
  std::uint64_t seed = 0;
  std::variant<OutlierModel, GammaRaceModel, GenericNormalModel> model;
  // Items whose ranks are tabulated. Item 0 is the outlier (or the first
  // racer); an empty list defaults to {0}. With two or more entries the
  // joint table of their rank tuples is kept as well (sparse).
  std::vector<int> tracked;
};

struct EmpiricalRankTable {
  std::uint64_t replications = 0;
  std::uint64_t seed = 0;
  int n_items = 0;
  std::vector<int> tracked;
  std::vector<std::vector<std::uint64_t>> marginal;  // [tracked pos][rank-1]
  std::map<std::vector<int>, std::uint64_t> joint;   // rank tuple -> count

  double frequency(int tracked_pos, int rank) const {
    return static_cast<double>(marginal.at(tracked_pos).at(rank - 1)) /
           static_cast<double>(replications);
  }

  double joint_frequency(const std::vector<int>& rank_tuple) const {
    const auto it = joint.find(rank_tuple);
    return it == joint.end() ? 0.0
                             : static_cast<double>(it->second) / static_cast<double>(replications);
  }

  RankPmf to_pmf(int tracked_pos = 0) const {
    RankPmf pmf;
    pmf.n = n_items - 1;
    pmf.method = PmfMethod::monte_carlo;
    pmf.probs.resize(n_items);
    for (int k = 0; k < n_items; ++k)
      pmf.probs[k] = static_cast<double>(marginal.at(tracked_pos).at(k)) /
                     static_cast<double>(replications);
    return pmf;
  }
};

namespace detail {

constexpr std::uint64_t kSimBlock = 65536;

// ranks by sorting with index tie-break; values almost surely distinct
inline void ranks_from_values(const std::vector<double>& x, std::vector<int>& rank,
                              std::vector<int>& order) {
  const int n = static_cast<int>(x.size());
  order.resize(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int i, int j) {
    return x[i] < x[j] || (x[i] == x[j] && i < j);
  });
  rank.resize(n);
  for (int pos = 0; pos < n; ++pos) rank[order[pos]] = pos + 1;
}

}  // namespace detail

// Draws latent utilities, computes ranks by counting weak inequalities,
// and tabulates marginal and joint rank frequencies.
inline EmpiricalRankTable simulate_ranks(const SimConfig& config) {
  if (config.replications < 1)
    throw std::domain_error("simulate_ranks: replications >= 1 required");

  const int n_items = std::visit(
      [](const auto& m) -> int {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, OutlierModel>) return m.n + 1;
        else if constexpr (std::is_same_v<T, GammaRaceModel>) return static_cast<int>(m.lambdas.size());
        else return static_cast<int>(m.mus.size());
      },
      config.model);

  std::vector<int> tracked = config.tracked.empty() ? std::vector<int>{0} : config.tracked;
  for (int t : tracked)
    if (t < 0 || t >= n_items) throw std::domain_error("simulate_ranks: tracked item out of range");

  EmpiricalRankTable table;
  table.replications = config.replications;
  table.seed = config.seed;
  table.n_items = n_items;
  table.tracked = tracked;
  table.marginal.assign(tracked.size(), std::vector<std::uint64_t>(n_items, 0));

  const bool only_first = (tracked.size() == 1 && tracked[0] == 0);
  std::vector<double> x(n_items);
  std::vector<int> rank, order, key(tracked.size());

  const std::uint64_t blocks =
      (config.replications + detail::kSimBlock - 1) / detail::kSimBlock;
  for (std::uint64_t b = 0; b < blocks; ++b) {
    Xoshiro256pp rng(Xoshiro256pp::block_seed(config.seed, b));
    const std::uint64_t lo = b * detail::kSimBlock;
    const std::uint64_t hi = std::min(config.replications, lo + detail::kSimBlock);
    for (std::uint64_t rep = lo; rep < hi; ++rep) {
      std::visit(
          [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, OutlierModel>) {
              x[0] = m.mu0 + m.sigma0 * rng.normal();
              for (int i = 1; i <= m.n; ++i) x[i] = m.mu + m.sigma * rng.normal();
            } else if constexpr (std::is_same_v<T, GammaRaceModel>) {
              for (int i = 0; i < n_items; ++i) {
                double total = 0.0;
                for (int l = 0; l < m.s; ++l) total -= std::log(rng.uniform_open01());
                x[i] = total / m.lambdas[i];
              }
            } else {
              for (int i = 0; i < n_items; ++i) x[i] = m.mus[i] + m.sigmas[i] * rng.normal();
            }
          },
          config.model);

      if (only_first) {
        // R0 = 1 + #, weak inequalities exactly as the rank definition
        int r0 = 1;
        for (int i = 1; i < n_items; ++i) r0 += (x[i] <= x[0]) ? 1 : 0;
        table.marginal[0][r0 - 1]++;
      } else {
        detail::ranks_from_values(x, rank, order);
        for (std::size_t t = 0; t < tracked.size(); ++t) {
          const int r = rank[tracked[t]];
          table.marginal[t][r - 1]++;
          key[t] = r;
        }
        if (tracked.size() >= 2) table.joint[key]++;
      }
    }
  }
  return table;
}

// Z_j = Phi((X_{0,j} - delta)/rho) for X_{0,j} iid standard normal.
inline std::vector<double> sample_z(const LatentSuccessLaw& law, std::size_t m,
                                    std::uint64_t seed) {
  if (m < 2) throw std::domain_error("sample_z: m >= 2 required");
  std::vector<double> z(m);
  Xoshiro256pp rng(seed);
  for (std::size_t j = 0; j < m; ++j)
    z[j] = std_normal_cdf((rng.normal() - law.delta) / law.rho);
  return z;
}

// Kolmogorov distance between a sample and a continuous CDF.
template <typename Cdf>
double kolmogorov_distance(std::vector<double> sample, Cdf&& cdf) {
  if (sample.empty()) throw std::domain_error("kolmogorov_distance: empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max(d, std::max(f - static_cast<double>(i) / n,
                             static_cast<double>(i + 1) / n - f));
  }
  return d;
}

}  // namespace rankdist
