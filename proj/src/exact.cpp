// Copyright 2026 The coopsolve Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "coopsolve/exact.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

namespace coopsolve {

namespace {

void check_cap(const WeightedVotingGame& game, int cap, const char* caller) {
  if (game.num_players() > cap) {
    throw EnumerationLimitError(std::string(caller) + ": n=" +
                                std::to_string(game.num_players()) +
                                " exceeds enumeration cap " + std::to_string(cap));
  }
}

std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) {
    r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  }
  return r;
}

// Scans all 2^n - 1 nonempty coalitions once and counts, per player and
// coalition size, how often the player is pivotal. Both power indices read
// off this table: Shapley weights pivots by coalition size, Banzhaf does not.
// Integer counts make the parallel reduction order-independent.
std::vector<std::vector<std::uint64_t>> pivot_counts(const WeightedVotingGame& game) {
  const int n = game.num_players();
  const auto& w = game.weights();
  const double q = game.quota();
  const std::uint64_t total = (n >= 64 ? ~0ULL : (1ULL << n) - 1);

  const int workers = resolve_threads(0);
  std::vector<std::vector<std::vector<std::uint64_t>>> partial(
      static_cast<std::size_t>(workers),
      std::vector<std::vector<std::uint64_t>>(
          static_cast<std::size_t>(n),
          std::vector<std::uint64_t>(static_cast<std::size_t>(n) + 1, 0)));

  const std::uint64_t chunk = (total + static_cast<std::uint64_t>(workers) - 1) /
                              static_cast<std::uint64_t>(workers);
  parallel_for(
      workers,
      [&](std::int64_t wb, std::int64_t we) {
        for (std::int64_t slot = wb; slot < we; ++slot) {
          auto& counts = partial[static_cast<std::size_t>(slot)];
          const std::uint64_t begin = 1 + static_cast<std::uint64_t>(slot) * chunk;
          const std::uint64_t end =
              std::min<std::uint64_t>(begin + chunk, total + 1);
          for (std::uint64_t mask = begin; mask < end; ++mask) {
            double sum = 0.0;
            for (std::uint64_t b = mask; b != 0; b &= b - 1) {
              sum += w[static_cast<std::size_t>(std::countr_zero(b))];
            }
            if (sum < q) continue;
            const int size = std::popcount(mask);
            for (std::uint64_t b = mask; b != 0; b &= b - 1) {
              const int i = std::countr_zero(b);
              if (sum - w[static_cast<std::size_t>(i)] < q) {
                ++counts[static_cast<std::size_t>(i)][static_cast<std::size_t>(size)];
              }
            }
          }
        }
      },
      workers);

  auto& result = partial[0];
  for (int s = 1; s < workers; ++s) {
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k <= n; ++k) {
        result[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] +=
            partial[static_cast<std::size_t>(s)][static_cast<std::size_t>(i)]
                   [static_cast<std::size_t>(k)];
      }
    }
  }
  return result;
}

}  // namespace

CoalitionSet winning_coalitions(const WeightedVotingGame& game, int cap) {
  check_cap(game, cap, "winning_coalitions");
  game.require_winnable("winning_coalitions");
  const int n = game.num_players();
  const std::uint64_t total = (1ULL << n) - 1;
  CoalitionSet set{CoalitionKind::AllWinning, {}};
  for (std::uint64_t mask = 1; mask <= total; ++mask) {
    const Coalition c(mask);
    if (game.coalition_weight(c) >= game.quota()) set.coalitions.push_back(c);
  }
  return set;
}

CoalitionSet minimal_winning_coalitions(const WeightedVotingGame& game, int cap) {
  check_cap(game, cap, "minimal_winning_coalitions");
  game.require_winnable("minimal_winning_coalitions");
  const int n = game.num_players();
  const auto& w = game.weights();
  const double q = game.quota();
  const std::uint64_t total = (1ULL << n) - 1;
  CoalitionSet set{CoalitionKind::MinimalWinning, {}};
  for (std::uint64_t mask = 1; mask <= total; ++mask) {
    double sum = 0.0;
    for (std::uint64_t b = mask; b != 0; b &= b - 1) {
      sum += w[static_cast<std::size_t>(std::countr_zero(b))];
    }
    if (sum < q) continue;
    bool minimal = true;
    for (std::uint64_t b = mask; b != 0; b &= b - 1) {
      if (sum - w[static_cast<std::size_t>(std::countr_zero(b))] >= q) {
        minimal = false;
        break;
      }
    }
    if (minimal) set.coalitions.push_back(Coalition(mask));
  }
  return set;
}

SolutionVector shapley_exact(const WeightedVotingGame& game, int cap) {
  check_cap(game, cap, "shapley_exact");
  game.require_winnable("shapley_exact");
  const int n = game.num_players();
  const auto counts = pivot_counts(game);

  // Weight for a pivot inside a coalition of size k:
  // (k-1)!(n-k)!/n! = 1 / (n * C(n-1, k-1)); exact in uint64 for n <= 24.
  std::vector<double> size_weight(static_cast<std::size_t>(n) + 1, 0.0);
  for (int k = 1; k <= n; ++k) {
    size_weight[static_cast<std::size_t>(k)] =
        1.0 / (static_cast<double>(n) * static_cast<double>(binomial(n - 1, k - 1)));
  }

  SolutionVector result;
  result.payoffs.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    double phi = 0.0;
    for (int k = 1; k <= n; ++k) {
      const auto c = counts[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
      if (c != 0) phi += static_cast<double>(c) * size_weight[static_cast<std::size_t>(k)];
    }
    result.payoffs[static_cast<std::size_t>(i)] = phi;
  }
  return result;
}

SolutionVector banzhaf_exact(const WeightedVotingGame& game, bool normalized,
                             int cap) {
  check_cap(game, cap, "banzhaf_exact");
  game.require_winnable("banzhaf_exact");
  const int n = game.num_players();
  const auto counts = pivot_counts(game);

  const double scale = std::pow(2.0, -(n - 1));
  SolutionVector result;
  result.payoffs.assign(static_cast<std::size_t>(n), 0.0);
  double raw_sum = 0.0;
  for (int i = 0; i < n; ++i) {
    std::uint64_t pivots = 0;
    for (int k = 1; k <= n; ++k) {
      pivots += counts[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
    }
    result.payoffs[static_cast<std::size_t>(i)] = static_cast<double>(pivots) * scale;
    raw_sum += result.payoffs[static_cast<std::size_t>(i)];
  }
  if (normalized) {
    if (raw_sum <= 0.0) {
      throw SolverError("banzhaf_exact: degenerate game, all raw indices zero");
    }
    for (double& b : result.payoffs) b /= raw_sum;
  }
  return result;
}

}  // namespace coopsolve
