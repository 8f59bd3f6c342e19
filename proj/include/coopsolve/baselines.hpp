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

#ifndef COOPSOLVE_BASELINES_HPP
#define COOPSOLVE_BASELINES_HPP

#include "coopsolve/neural.hpp"

namespace coopsolve {

// Splits the payoff in proportion to raw weights, ignoring the quota.
SolutionVector weight_proportional(const WeightedVotingGame& game);

// Multinomial regression: a single n-to-n linear layer with a softmax.
// Trained with the same optimizer, split, and early stopping as the MLPs so
// comparisons isolate model capacity.
struct LinearPayoffModel {
  PayoffModel model;
};

LinearPayoffModel train_multinomial(const GameDataset& dataset,
                                    const TrainConfig& cfg);

SolutionVector predict(const LinearPayoffModel& baseline,
                       const WeightedVotingGame& game);

}  // namespace coopsolve

#endif  // COOPSOLVE_BASELINES_HPP
