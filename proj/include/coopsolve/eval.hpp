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

#ifndef COOPSOLVE_EVAL_HPP
#define COOPSOLVE_EVAL_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "coopsolve/neural.hpp"

namespace coopsolve {

// Mean absolute per-player deviation.
double mae(std::span<const double> p, std::span<const double> p_hat);

struct EvalConfig {
  std::string distribution = "in-sample";
  int games = 1000;
  std::uint64_t seed = 0;
  int cap = kEnumerationCap;
  double feasibility_tol = kLpTol;
  // Ground-truth fallback above the enumeration cap.
  int mc_permutations = 1000;
  int mc_resamples = 10;
  int threads = 0;
};

struct EvalReport {
  std::string concept_label;
  std::string distribution;
  int n = 0;
  std::uint64_t seed = 0;
  std::vector<double> per_game_mae;
  double mean_mae = 0.0;
  // Least-core models only: epsilon error, stability of the predicted
  // payoffs, and the fraction passing the hard feasibility constraints.
  std::optional<double> eps_mae;
  std::optional<double> mean_max_excess;
  std::optional<double> feasibility_rate;
};

using Predictor = std::function<SolutionVector(const WeightedVotingGame&)>;

// Draws games from the named test distribution, computes ground truth with
// the designated solver, and scores the predictor.
EvalReport evaluate_predictor(const Predictor& predict, Concept solution_concept,
                              int n, const EvalConfig& cfg);

EvalReport evaluate_model(const PayoffModel& model, int n, const EvalConfig& cfg);

// One solved game per grid point; transitions mark grid indices whose
// winning-coalition set differs from the previous point (detected
// structurally, not from solution deltas).
struct SweepResult {
  std::vector<double> grid;
  Matrix truth;  // one row per grid point; least-core appends epsilon
  std::optional<Matrix> predictions;
  std::optional<Matrix> abs_error;
  std::vector<int> transitions;
};

// Quotas from min(w) to sum(w) in `step` increments (endpoint included).
SweepResult quota_sweep(const std::vector<double>& weights,
                        Concept solution_concept, double step = 0.1,
                        const PayoffModel* model = nullptr,
                        int cap = kEnumerationCap);

// Increments one player's weight until it first exceeds the quota.
SweepResult weight_sweep(const WeightedVotingGame& game, int player,
                         Concept solution_concept, double step = 1.0,
                         const PayoffModel* model = nullptr,
                         int cap = kEnumerationCap);

// Council of the European Union voting games: the four-state example
// (Hungary, Netherlands, Poland, Ireland) and the full twenty-state council
// with a majority quota of half the total weight plus one.
WeightedVotingGame eu_council_game4();
WeightedVotingGame eu_council_game20();
const std::vector<std::string>& eu_council_members20();

struct EuModels {
  const PayoffModel* fixed_shapley = nullptr;
  const PayoffModel* fixed_banzhaf = nullptr;
  const PayoffModel* fixed_leastcore = nullptr;
  const PayoffModel* variable_shapley = nullptr;
  const PayoffModel* variable_banzhaf = nullptr;
  const PayoffModel* variable_leastcore = nullptr;
};

struct EuCaseEntry {
  std::string concept_label;
  std::string scope;         // eu4 | eu20
  std::string truth_solver;  // exact | mc | lp
  std::vector<double> truth;
  std::optional<double> truth_lcv;
  std::vector<double> prediction;
  std::optional<double> prediction_lcv;
  double mean_mae = 0.0;
  std::optional<double> lcv_abs_error;
};

struct EuCaseReport {
  std::vector<EuCaseEntry> entries;
};

// Compares model predictions against ground truth on both council games.
// Fixed models cover the four-state game, variable models the full council
// (Monte-Carlo Shapley ground truth there). Requires at least one model.
EuCaseReport eu_case_study(const EuModels& models, std::uint64_t seed,
                           int cap = kEnumerationCap);

}  // namespace coopsolve

#endif  // COOPSOLVE_EVAL_HPP
