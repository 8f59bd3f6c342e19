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

#ifndef COOPSOLVE_EXACT_HPP
#define COOPSOLVE_EXACT_HPP

#include <vector>

#include "coopsolve/games.hpp"

namespace coopsolve {

// All enumeration-based solvers scan the 2^n coalition lattice; the cap keeps
// that scan tractable. Raise it only with care: memory and time double per
// player.
inline constexpr int kEnumerationCap = 24;

enum class CoalitionKind { AllWinning, MinimalWinning };

struct CoalitionSet {
  CoalitionKind kind = CoalitionKind::AllWinning;
  std::vector<Coalition> coalitions;
};

// Every nonempty coalition meeting the quota, in ascending bitset order.
CoalitionSet winning_coalitions(const WeightedVotingGame& game,
                                int cap = kEnumerationCap);

// Winning coalitions in which every member is pivotal (any single removal
// drops the weight below the quota).
CoalitionSet minimal_winning_coalitions(const WeightedVotingGame& game,
                                        int cap = kEnumerationCap);

// Exact Shapley values via the subset-weighted formula
//   phi_i = sum_{C not containing i} |C|!(n-|C|-1)!/n! [v(C+i) - v(C)],
// equal to the average marginal contribution over all n! player orders.
SolutionVector shapley_exact(const WeightedVotingGame& game,
                             int cap = kEnumerationCap);

// Exact Banzhaf indices. Raw form averages marginal contributions over the
// 2^(n-1) subsets excluding the player; the normalized form rescales the raw
// vector to sum to one.
SolutionVector banzhaf_exact(const WeightedVotingGame& game,
                             bool normalized = false, int cap = kEnumerationCap);

}  // namespace coopsolve

#endif  // COOPSOLVE_EXACT_HPP
