#pragma once

#include "rankdist/classical_models.hpp"
#include "rankdist/latent_success.hpp"
#include "rankdist/metrics.hpp"
#include "rankdist/monte_carlo.hpp"
#include "rankdist/rank_dist.hpp"
#include "rankdist/regimes.hpp"
#include "rankdist/special_functions.hpp"

namespace rankdist {
inline constexpr const char* kVersion = "0.1.0";
}
