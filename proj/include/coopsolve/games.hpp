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

#ifndef COOPSOLVE_GAMES_HPP
#define COOPSOLVE_GAMES_HPP

#include <bit>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "coopsolve/common.hpp"

namespace coopsolve {

// A coalition is a subset of players {0..n-1} stored as a bitset. Player
// counts are capped at 64 by representation; enumeration-based solvers apply
// a much lower cap of their own.
class Coalition {
 public:
  constexpr Coalition() = default;
  constexpr explicit Coalition(std::uint64_t bits) : bits_(bits) {}

  static constexpr Coalition empty() { return Coalition(0); }
  static constexpr Coalition grand(int n) {
    return Coalition(n >= 64 ? ~0ULL : (1ULL << n) - 1);
  }
  static constexpr Coalition single(int player) { return Coalition(1ULL << player); }

  constexpr std::uint64_t bits() const { return bits_; }
  constexpr bool contains(int player) const { return (bits_ >> player) & 1ULL; }
  constexpr bool is_empty() const { return bits_ == 0; }
  int size() const { return std::popcount(bits_); }

  constexpr Coalition with(int player) const { return Coalition(bits_ | (1ULL << player)); }
  constexpr Coalition without(int player) const { return Coalition(bits_ & ~(1ULL << player)); }
  constexpr bool subset_of(Coalition other) const { return (bits_ & ~other.bits_) == 0; }

  std::vector<int> members() const {
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(size()));
    for (std::uint64_t b = bits_; b != 0; b &= b - 1) out.push_back(std::countr_zero(b));
    return out;
  }

  friend constexpr bool operator==(Coalition a, Coalition b) { return a.bits_ == b.bits_; }
  friend constexpr bool operator<(Coalition a, Coalition b) { return a.bits_ < b.bits_; }

 private:
  std::uint64_t bits_ = 0;
};

// Simple game defined by non-negative weights and a positive quota: a
// coalition wins when its member weights sum to at least the quota.
// Instances are immutable and safe to share across threads.
class WeightedVotingGame {
 public:
  WeightedVotingGame(std::vector<double> weights, double quota);

  int num_players() const { return static_cast<int>(weights_.size()); }
  const std::vector<double>& weights() const { return weights_; }
  double quota() const { return quota_; }
  double total_weight() const { return total_weight_; }

  double coalition_weight(Coalition c) const;

  // 1 if the coalition meets the quota, else 0; v(empty) = 0.
  double value(Coalition c) const;

  bool grand_coalition_wins() const { return total_weight_ >= quota_; }

  // Solvers for solution concepts require v(N) = 1.
  void require_winnable(const std::string& caller) const;

 private:
  std::vector<double> weights_;
  double quota_ = 0.0;
  double total_weight_ = 0.0;
};

using CharacteristicFn = std::function<double(Coalition)>;

CharacteristicFn make_characteristic(const WeightedVotingGame& game);

// Payoff allocation; lcv carries the least-core value when the solution came
// from a least-core solve.
struct SolutionVector {
  std::vector<double> payoffs;
  std::optional<double> lcv;
};

double char_value(const WeightedVotingGame& game, Coalition c);

// Weights divided by the quota; entry i exceeds 1 iff player i wins alone.
std::vector<double> normalize_weights(const WeightedVotingGame& game);

// True iff payoffs are non-negative (within tol) and sum to v(N) within tol.
bool is_imputation(const SolutionVector& s, const WeightedVotingGame& game,
                   double tol = 1e-9);

}  // namespace coopsolve

#endif  // COOPSOLVE_GAMES_HPP
