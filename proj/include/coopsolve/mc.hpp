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

#ifndef COOPSOLVE_MC_HPP
#define COOPSOLVE_MC_HPP

#include <cstdint>

#include "coopsolve/games.hpp"

namespace coopsolve {

struct McConfig {
  int permutations = 1000;  // P, permutations per player per resample
  int resamples = 10;       // R, independent resamples averaged
  std::uint64_t seed = 0;
  int threads = 0;  // 0 = auto
};

struct McEstimate {
  SolutionVector solution;
  // Sample standard error of the per-resample means (zero when R = 1).
  std::vector<double> std_error;
};

// Permutation-sampling Shapley estimate. Each resample draws P permutations
// per player (n*P pooled); every permutation credits its pivotal player, so
// per-resample estimates sum to one exactly and the R resamples average to
// the final estimate. Resample streams are derived from (seed, resample), so
// results are bit-identical for a given config regardless of thread count.
McEstimate shapley_mc(const WeightedVotingGame& game, const McConfig& cfg);

// General form for arbitrary characteristic functions (model-backed games).
McEstimate shapley_mc(const CharacteristicFn& value, int n, const McConfig& cfg);

// Uniform-subset Banzhaf estimate: for each player, samples subsets of the
// other players and averages the marginal contribution.
McEstimate banzhaf_mc(const WeightedVotingGame& game, const McConfig& cfg,
                      bool normalized = false);

}  // namespace coopsolve

#endif  // COOPSOLVE_MC_HPP
