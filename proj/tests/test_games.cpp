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

#include "coopsolve/games.hpp"

#include <cmath>

#include "doctest.h"
#include "oracles.hpp"

using namespace coopsolve;

TEST_CASE("char_value follows the quota rule") {
  const WeightedVotingGame parliament({49, 49, 2}, 50);
  CHECK(char_value(parliament, Coalition::single(0).with(2)) == 1.0);
  CHECK(char_value(parliament, Coalition::empty()) == 0.0);
  CHECK(char_value(parliament, Coalition::single(2)) == 0.0);

  const WeightedVotingGame g({2, 1, 1}, 3);
  CHECK(char_value(g, Coalition::single(1).with(2)) == 0.0);
  CHECK(char_value(g, Coalition::grand(3)) == 1.0);
}

TEST_CASE("normalize_weights divides by the quota") {
  const WeightedVotingGame eu({12, 13, 27, 7}, 30.5);
  const auto x = normalize_weights(eu);
  CHECK(x[0] == doctest::Approx(12 / 30.5).epsilon(1e-15));
  CHECK(x[1] == doctest::Approx(13 / 30.5).epsilon(1e-15));
  CHECK(x[2] == doctest::Approx(27 / 30.5).epsilon(1e-15));
  CHECK(x[3] == doctest::Approx(7 / 30.5).epsilon(1e-15));
  // x_i > 1 exactly when the singleton wins alone.
  for (int i = 0; i < 4; ++i) {
    CHECK((x[static_cast<std::size_t>(i)] > 1.0) ==
          (eu.value(Coalition::single(i)) == 1.0));
  }

  const WeightedVotingGame equal({7.5, 7.5, 7.5}, 7.5);
  for (double v : normalize_weights(equal)) CHECK(v == 1.0);

  const auto x2 = normalize_weights(WeightedVotingGame({2, 1, 1}, 3));
  CHECK(x2[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(x2[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("game construction rejects invalid inputs") {
  CHECK_THROWS_AS(WeightedVotingGame({}, 1.0), InvalidGameError);
  CHECK_THROWS_AS(WeightedVotingGame({1, 2}, 0.0), InvalidGameError);
  CHECK_THROWS_AS(WeightedVotingGame({1, 2}, -3.0), InvalidGameError);
  CHECK_THROWS_AS(WeightedVotingGame({1, -2}, 3.0), InvalidGameError);
  CHECK_THROWS_AS(WeightedVotingGame({1, 1}, 5.0).require_winnable("test"),
                  InvalidGameError);
  CHECK_NOTHROW(WeightedVotingGame({1, 1}, 2.0).require_winnable("test"));
}

TEST_CASE("is_imputation checks non-negativity and efficiency") {
  const WeightedVotingGame g({1, 1, 1}, 2);
  CHECK(is_imputation({{1.0 / 3, 1.0 / 3, 1.0 / 3}, {}}, g));
  CHECK_FALSE(is_imputation({{0.6, 0.6, -0.2}, {}}, g));

  const WeightedVotingGame g2({1, 1}, 1.5);
  CHECK_FALSE(is_imputation({{0.5, 0.4}, {}}, g2));
  CHECK_THROWS_AS(is_imputation({{0.5}, {}}, g2), DimensionError);
}

TEST_CASE("characteristic function is scale invariant") {
  Rng rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(6));
    const auto game = testing::random_valid_game(n, rng);
    for (double c : {2.0, 0.5, 8.0}) {
      std::vector<double> scaled = game.weights();
      for (double& w : scaled) w *= c;
      const WeightedVotingGame g2(scaled, c * game.quota());
      for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
        CHECK(game.value(Coalition(mask)) == g2.value(Coalition(mask)));
      }
    }
  }
}

TEST_CASE("winning coalitions stay winning when players join") {
  Rng rng(12);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(6));
    const auto game = testing::random_valid_game(n, rng);
    for (std::uint64_t mask = 1; mask < (1ULL << n); ++mask) {
      const Coalition c(mask);
      if (game.value(c) != 1.0) continue;
      for (int i = 0; i < n; ++i) {
        CHECK(game.value(c.with(i)) == 1.0);
      }
    }
  }
}

TEST_CASE("normalized weights determine the characteristic function") {
  // Quotas that are powers of two make the division exact, so the normalized
  // game must decide every coalition identically.
  Rng rng(13);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(5));
    std::vector<double> weights(static_cast<std::size_t>(n));
    for (double& w : weights) w = static_cast<double>(rng.below(17));
    weights[0] += 1.0;
    const double quota = std::ldexp(1.0, 1 + static_cast<int>(rng.below(4)));
    const WeightedVotingGame game(weights, quota);
    const WeightedVotingGame normalized(normalize_weights(game), 1.0);
    for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
      CHECK(game.value(Coalition(mask)) == normalized.value(Coalition(mask)));
    }
  }
}
