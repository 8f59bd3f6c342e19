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

#include "coopsolve/baselines.hpp"

namespace coopsolve {

SolutionVector weight_proportional(const WeightedVotingGame& game) {
  const double total = game.total_weight();
  if (total <= 0.0) {
    throw InvalidGameError("weight_proportional: all weights are zero");
  }
  SolutionVector result;
  result.payoffs = game.weights();
  for (double& p : result.payoffs) p /= total;
  return result;
}

LinearPayoffModel train_multinomial(const GameDataset& dataset,
                                    const TrainConfig& cfg) {
  if (dataset.meta.layout != Layout::Fixed) {
    throw DimensionError("multinomial baseline expects a fixed-size dataset");
  }
  MlpArchitecture arch = architecture_for(dataset, {}, 0.0);
  return {train(dataset, arch, cfg).model};
}

SolutionVector predict(const LinearPayoffModel& baseline,
                       const WeightedVotingGame& game) {
  return predict_payoffs(baseline.model, game, Layout::Fixed);
}

}  // namespace coopsolve
