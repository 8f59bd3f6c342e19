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

#include "coopsolve/mc.hpp"

#include <bit>
#include <cmath>
#include <numeric>

namespace coopsolve {

namespace {

void validate(const McConfig& cfg) {
  if (cfg.permutations < 1 || cfg.resamples < 1) {
    throw InvalidGameError("mc config requires P >= 1 and R >= 1");
  }
}

// Averages per-resample estimates and computes the standard error of the
// mean across resamples.
McEstimate combine(int n, const std::vector<std::vector<double>>& per_resample) {
  const int r = static_cast<int>(per_resample.size());
  McEstimate est;
  est.solution.payoffs.assign(static_cast<std::size_t>(n), 0.0);
  est.std_error.assign(static_cast<std::size_t>(n), 0.0);
  for (const auto& sample : per_resample) {
    for (int i = 0; i < n; ++i) {
      est.solution.payoffs[static_cast<std::size_t>(i)] +=
          sample[static_cast<std::size_t>(i)];
    }
  }
  for (double& p : est.solution.payoffs) p /= r;
  if (r > 1) {
    for (int i = 0; i < n; ++i) {
      double ss = 0.0;
      for (const auto& sample : per_resample) {
        const double d = sample[static_cast<std::size_t>(i)] -
                         est.solution.payoffs[static_cast<std::size_t>(i)];
        ss += d * d;
      }
      est.std_error[static_cast<std::size_t>(i)] =
          std::sqrt(ss / (r - 1)) / std::sqrt(static_cast<double>(r));
    }
  }
  return est;
}

template <typename ResampleFn>
McEstimate run_resamples(int n, const McConfig& cfg, const ResampleFn& fn) {
  std::vector<std::vector<double>> per_resample(
      static_cast<std::size_t>(cfg.resamples));
  parallel_for(
      cfg.resamples,
      [&](std::int64_t begin, std::int64_t end) {
        for (std::int64_t r = begin; r < end; ++r) {
          Rng rng = Rng::substream(cfg.seed, {static_cast<std::uint64_t>(r)});
          per_resample[static_cast<std::size_t>(r)] = fn(rng);
        }
      },
      cfg.threads);
  return combine(n, per_resample);
}

}  // namespace

McEstimate shapley_mc(const WeightedVotingGame& game, const McConfig& cfg) {
  validate(cfg);
  game.require_winnable("shapley_mc");
  const int n = game.num_players();
  const auto& w = game.weights();
  const double q = game.quota();

  // P permutations per player per resample, pooled: every sampled permutation
  // credits its pivot, so each player's estimate rests on n*P samples and the
  // estimates sum to one exactly (every permutation has exactly one pivot).
  const std::int64_t draws =
      static_cast<std::int64_t>(n) * cfg.permutations;
  return run_resamples(n, cfg, [&](Rng& rng) {
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::vector<std::uint64_t> pivots(static_cast<std::size_t>(n), 0);
    for (std::int64_t p = 0; p < draws; ++p) {
      rng.shuffle(order);
      double prefix = 0.0;
      for (int j : order) {
        prefix += w[static_cast<std::size_t>(j)];
        if (prefix >= q) {
          ++pivots[static_cast<std::size_t>(j)];
          break;
        }
      }
    }
    std::vector<double> estimate(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      estimate[static_cast<std::size_t>(i)] =
          static_cast<double>(pivots[static_cast<std::size_t>(i)]) /
          static_cast<double>(draws);
    }
    return estimate;
  });
}

McEstimate shapley_mc(const CharacteristicFn& value, int n, const McConfig& cfg) {
  validate(cfg);
  if (n < 1 || n > 64) throw InvalidGameError("player count out of range");

  const std::int64_t draws =
      static_cast<std::int64_t>(n) * cfg.permutations;
  return run_resamples(n, cfg, [&](Rng& rng) {
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> marginal_sum(static_cast<std::size_t>(n), 0.0);
    for (std::int64_t p = 0; p < draws; ++p) {
      rng.shuffle(order);
      Coalition prefix = Coalition::empty();
      double prev = value(prefix);
      for (int j : order) {
        prefix = prefix.with(j);
        const double cur = value(prefix);
        marginal_sum[static_cast<std::size_t>(j)] += cur - prev;
        prev = cur;
      }
    }
    for (double& m : marginal_sum) m /= static_cast<double>(draws);
    return marginal_sum;
  });
}

McEstimate banzhaf_mc(const WeightedVotingGame& game, const McConfig& cfg,
                      bool normalized) {
  validate(cfg);
  game.require_winnable("banzhaf_mc");
  const int n = game.num_players();
  const auto& w = game.weights();
  const double q = game.quota();

  McEstimate est = run_resamples(n, cfg, [&](Rng& rng) {
    std::vector<double> estimate(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
      const std::uint64_t self = 1ULL << i;
      std::uint64_t pivots = 0;
      for (int p = 0; p < cfg.permutations; ++p) {
        const std::uint64_t mask = rng.next_u64() & ~self &
                                   (n >= 64 ? ~0ULL : (1ULL << n) - 1);
        double sum = 0.0;
        for (std::uint64_t bits = mask; bits != 0; bits &= bits - 1) {
          sum += w[static_cast<std::size_t>(std::countr_zero(bits))];
        }
        if (sum < q && sum + w[static_cast<std::size_t>(i)] >= q) ++pivots;
      }
      estimate[static_cast<std::size_t>(i)] =
          static_cast<double>(pivots) / cfg.permutations;
    }
    return estimate;
  });

  if (normalized) {
    const double sum = std::accumulate(est.solution.payoffs.begin(),
                                       est.solution.payoffs.end(), 0.0);
    if (sum <= 0.0) {
      throw SolverError("banzhaf_mc: degenerate estimate, all indices zero");
    }
    for (double& p : est.solution.payoffs) p /= sum;
    for (double& e : est.std_error) e /= sum;
  }
  return est;
}

}  // namespace coopsolve
