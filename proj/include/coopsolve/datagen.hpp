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

#ifndef COOPSOLVE_DATAGEN_HPP
#define COOPSOLVE_DATAGEN_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "coopsolve/lp.hpp"
#include "coopsolve/mc.hpp"

namespace coopsolve {

// Player weights are location + width * Beta(alpha, beta).
struct WeightDistribution {
  double alpha = 1.0;
  double beta = 1.0;
  double location = 1.0;
  double width = 1.0;
};

// Training default: uniform weights on [1, 2n].
WeightDistribution default_train_distribution(int n);

// The five standardized test parameterizations, from in-sample to
// significantly out-of-distribution. Locations scale with n where noted;
// the width is fixed at 2n (the table leaves the scale unstated).
WeightDistribution test_distribution(const std::string& name, int n);

// "train" plus the five test names.
WeightDistribution resolve_distribution(const std::string& name, int n);

// Weights from the distribution; quota drawn from N(n(2n+1)/4, 2n) and
// rejection-resampled until 0 < q <= total weight, so the grand coalition
// always wins and the average quota is half the expected weight sum.
WeightedVotingGame sample_wvg(int n, const WeightDistribution& dist, Rng& rng);

enum class Concept { Shapley, Banzhaf, LeastCore };

std::string concept_name(Concept c);
Concept parse_concept(const std::string& name);

enum class Layout { Fixed, Variable };

std::string layout_name(Layout l);
Layout parse_layout(const std::string& name);

// Controls how ground-truth labels are produced. Below the enumeration cap,
// power indices are exact and least-core labels come from the LP; above it,
// Shapley and Banzhaf fall back to Monte-Carlo with the given P and R.
struct LabelOptions {
  int cap = kEnumerationCap;
  bool canonical_lc = false;
  int mc_permutations = 1000;
  int mc_resamples = 10;
  int threads = 0;
};

struct DatasetMeta {
  Concept solution_concept = Concept::Shapley;
  Layout layout = Layout::Fixed;
  std::vector<int> n_values;  // one entry for fixed layouts
  int max_players = 0;        // M for variable layouts, n for fixed
  std::uint64_t seed = 0;
  std::string distribution;   // distribution name
  WeightDistribution dist;    // resolved parameters (fixed layouts)
  std::string solver;         // exact | mc | lp
  bool canonical_lc = false;
  bool banzhaf_normalized = true;
  int mc_permutations = 0;
  int mc_resamples = 0;
  int regenerated_rows = 0;
};

// Feature rows are quota-normalized weights; label rows are solution vectors
// (least-core labels carry epsilon in the final column). Variable layouts are
// zero-padded to max_players with real players shuffled to random positions.
struct GameDataset {
  Matrix features;
  Matrix labels;
  DatasetMeta meta;
};

GameDataset make_fixed_dataset(int n, int games, Concept solution_concept,
                               const WeightDistribution& dist, std::uint64_t seed,
                               const LabelOptions& options = {});

GameDataset make_variable_dataset(const std::vector<int>& n_list, int games_per_n,
                                  int max_players, Concept solution_concept,
                                  const std::string& dist_name, std::uint64_t seed,
                                  const LabelOptions& options = {});

// Replays the generation stream for one row; the returned game's normalized
// weights equal the row's (unshuffled) features.
WeightedVotingGame regenerate_row_game(const DatasetMeta& meta, int row,
                                       const LabelOptions& options = {});

// File format: one JSON metadata line, then one CSV row per game with
// features followed by labels, 17 significant digits throughout.
void save_dataset(const GameDataset& ds, const std::filesystem::path& path);
GameDataset load_dataset(const std::filesystem::path& path);

}  // namespace coopsolve

#endif  // COOPSOLVE_DATAGEN_HPP
