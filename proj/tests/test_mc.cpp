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

#include <cmath>
#include <numeric>

#include "coopsolve/exact.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace coopsolve;

TEST_CASE("mc shapley approximates the parliament game") {
  const WeightedVotingGame parliament({49, 49, 2}, 50);
  const auto est = shapley_mc(parliament, {.seed = 7});
  for (double p : est.solution.payoffs) {
    CHECK(std::abs(p - 1.0 / 3) <= 0.02);
  }
}

TEST_CASE("single-player games are trivial") {
  const auto est = shapley_mc(WeightedVotingGame({3.0}, 2.0), {.seed = 1});
  CHECK(est.solution.payoffs == std::vector<double>{1.0});
}

TEST_CASE("mc estimates are efficient") {
  Rng rng(41);
  for (int trial = 0; trial < 10; ++trial) {
    const auto game = testing::random_valid_game(6, rng);
    const auto est = shapley_mc(game, {.permutations = 200, .resamples = 3,
                                       .seed = static_cast<std::uint64_t>(trial)});
    const double sum = std::accumulate(est.solution.payoffs.begin(),
                                       est.solution.payoffs.end(), 0.0);
    CHECK(std::abs(sum - 1.0) <= 1e-12);
  }
}

TEST_CASE("identical seeds give bit-identical estimates at any thread count") {
  Rng rng(42);
  const auto game = testing::random_valid_game(8, rng);
  const auto a = shapley_mc(game, {.seed = 99, .threads = 1});
  const auto b = shapley_mc(game, {.seed = 99, .threads = 4});
  CHECK(a.solution.payoffs == b.solution.payoffs);
  CHECK(a.std_error == b.std_error);

  const auto c = banzhaf_mc(game, {.seed = 99, .threads = 1});
  const auto d = banzhaf_mc(game, {.seed = 99, .threads = 3});
  CHECK(c.solution.payoffs == d.solution.payoffs);
}

TEST_CASE("general characteristic path reproduces the weighted-game path") {
  Rng rng(43);
  const auto game = testing::random_valid_game(6, rng);
  const McConfig cfg{.permutations = 500, .resamples = 4, .seed = 5};
  const auto direct = shapley_mc(game, cfg);
  const auto generic = shapley_mc(make_characteristic(game), game.num_players(), cfg);
  CHECK(direct.solution.payoffs == generic.solution.payoffs);
}

TEST_CASE("mc banzhaf approximates exact indices") {
  const WeightedVotingGame pair({1, 1}, 2);
  const auto est = banzhaf_mc(pair, {.seed = 11});
  CHECK(std::abs(est.solution.payoffs[0] - 0.5) <= 0.05);
  CHECK(std::abs(est.solution.payoffs[1] - 0.5) <= 0.05);

  const WeightedVotingGame g({2, 1, 1}, 3);
  const auto exact = banzhaf_exact(g, false);
  const auto mc = banzhaf_mc(g, {.seed = 12});
  for (int i = 0; i < 3; ++i) {
    const double se = std::max(mc.std_error[static_cast<std::size_t>(i)], 1e-3);
    CHECK(std::abs(mc.solution.payoffs[static_cast<std::size_t>(i)] -
                   exact.payoffs[static_cast<std::size_t>(i)]) <= 3.0 * se + 0.01);
  }

  const auto zero = banzhaf_mc(WeightedVotingGame({2, 0, 1}, 3), {.seed = 13});
  CHECK(zero.solution.payoffs[1] == 0.0);
}

TEST_CASE("mc shapley is unbiased across independent seeds") {
  Rng rng(44);
  const auto game = testing::random_valid_game(8, rng);
  const auto exact = shapley_exact(game);

  const int kSeeds = 50;
  const int n = game.num_players();
  std::vector<double> mean(static_cast<std::size_t>(n), 0.0);
  std::vector<double> pooled_var(static_cast<std::size_t>(n), 0.0);
  for (int s = 0; s < kSeeds; ++s) {
    const auto est = shapley_mc(game, {.seed = 1000 + static_cast<std::uint64_t>(s)});
    for (int i = 0; i < n; ++i) {
      mean[static_cast<std::size_t>(i)] +=
          est.solution.payoffs[static_cast<std::size_t>(i)];
      const double se = est.std_error[static_cast<std::size_t>(i)];
      pooled_var[static_cast<std::size_t>(i)] += se * se;
    }
  }
  for (int i = 0; i < n; ++i) {
    mean[static_cast<std::size_t>(i)] /= kSeeds;
    // Standard error of the grand mean over kSeeds independent estimates.
    const double pooled_se =
        std::sqrt(pooled_var[static_cast<std::size_t>(i)]) / kSeeds;
    CHECK(std::abs(mean[static_cast<std::size_t>(i)] -
                   exact.payoffs[static_cast<std::size_t>(i)]) <
          3.0 * std::max(pooled_se, 1e-4));
  }
}

TEST_CASE("invalid configs and games are rejected") {
  const WeightedVotingGame g({1, 1}, 2);
  CHECK_THROWS_AS(shapley_mc(g, {.permutations = 0}), InvalidGameError);
  CHECK_THROWS_AS(shapley_mc(g, {.resamples = 0}), InvalidGameError);
  CHECK_THROWS_AS(shapley_mc(WeightedVotingGame({1, 1}, 5), {}), InvalidGameError);
}
