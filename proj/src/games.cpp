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
#include <numeric>

namespace coopsolve {

WeightedVotingGame::WeightedVotingGame(std::vector<double> weights, double quota)
    : weights_(std::move(weights)), quota_(quota) {
  if (weights_.empty()) throw InvalidGameError("game needs at least one player");
  if (weights_.size() > 64) throw InvalidGameError("player count exceeds 64");
  if (!(quota_ > 0.0) || !std::isfinite(quota_)) {
    throw InvalidGameError("quota must be positive and finite");
  }
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw InvalidGameError("weights must be non-negative and finite");
    }
  }
  total_weight_ = std::accumulate(weights_.begin(), weights_.end(), 0.0);
}

double WeightedVotingGame::coalition_weight(Coalition c) const {
  double sum = 0.0;
  for (std::uint64_t b = c.bits(); b != 0; b &= b - 1) {
    sum += weights_[static_cast<std::size_t>(std::countr_zero(b))];
  }
  return sum;
}

double WeightedVotingGame::value(Coalition c) const {
  if (c.is_empty()) return 0.0;
  return coalition_weight(c) >= quota_ ? 1.0 : 0.0;
}

void WeightedVotingGame::require_winnable(const std::string& caller) const {
  if (!grand_coalition_wins()) {
    throw InvalidGameError(caller + ": grand coalition loses (quota " +
                           format_g17(quota_) + " > total weight " +
                           format_g17(total_weight_) + ")");
  }
}

CharacteristicFn make_characteristic(const WeightedVotingGame& game) {
  return [game](Coalition c) { return game.value(c); };
}

double char_value(const WeightedVotingGame& game, Coalition c) {
  return game.value(c);
}

std::vector<double> normalize_weights(const WeightedVotingGame& game) {
  std::vector<double> x(game.weights());
  for (double& w : x) w /= game.quota();
  return x;
}

bool is_imputation(const SolutionVector& s, const WeightedVotingGame& game,
                   double tol) {
  if (static_cast<int>(s.payoffs.size()) != game.num_players()) {
    throw DimensionError("payoff length does not match player count");
  }
  double sum = 0.0;
  for (double p : s.payoffs) {
    if (p < -tol) return false;
    sum += p;
  }
  const double grand = game.value(Coalition::grand(game.num_players()));
  return std::abs(sum - grand) <= tol;
}

}  // namespace coopsolve
