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

#ifndef COOPSOLVE_XAI_HPP
#define COOPSOLVE_XAI_HPP

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "coopsolve/neural.hpp"

namespace coopsolve {

enum class ColumnKind { Numeric, Categorical };
enum class Task { Regression, Classification };

std::string task_name(Task t);
Task parse_task(const std::string& name);

struct ColumnSchema {
  std::string name;
  ColumnKind kind = ColumnKind::Numeric;
};

struct IngestConfig {
  std::string target;
  Task task = Task::Regression;
  // Optional per-column overrides; unlisted columns are inferred (numeric iff
  // every non-missing value parses as a number).
  std::map<std::string, ColumnKind> column_kinds;
};

// Preprocessed table: numeric columns z-scored (population std), categorical
// columns integer-coded by first appearance, missing values encoded as zero.
struct TabularDataset {
  Matrix x;  // N x F
  std::vector<double> y;
  std::vector<ColumnSchema> schema;
  // Per column: category labels in code order (empty for numeric columns).
  std::vector<std::vector<std::string>> encodings;
  std::vector<double> mean;    // z-score parameters, 0/1 for categoricals
  std::vector<double> stddev;
  std::string target_name;
  Task task = Task::Regression;
};

TabularDataset ingest(const std::filesystem::path& csv, const IngestConfig& cfg);

// Serialized encoding map + z-score parameters; reapplying them to the same
// CSV reproduces the matrix exactly.
void save_preprocessing(const TabularDataset& ds, const std::filesystem::path& path);
TabularDataset reapply_preprocessing(const std::filesystem::path& preprocessing,
                                     const std::filesystem::path& csv);

// Any deterministic per-instance predictor can back a feature-importance
// game; the default is a CART, optionally bagged into a small forest.
class TargetModel {
 public:
  virtual ~TargetModel() = default;
  virtual double predict(std::span<const double> x) const = 0;
};

struct TreeFitConfig {
  Task task = Task::Regression;
  int max_depth = 6;
  int min_leaf = 1;
  int trees = 1;  // > 1 switches to a bootstrap-averaged ensemble
  // Rows held out of fitting for the fit report; 0 trains on everything.
  double holdout_fraction = 0.0;
  std::uint64_t seed = 0;
};

// Fit quality on the split: MSE for regression, accuracy for classification
// (holdout entries are NaN when no rows were held out).
struct TargetFitReport {
  int train_rows = 0;
  int holdout_rows = 0;
  double train_score = 0.0;
  double holdout_score = 0.0;
};

std::unique_ptr<TargetModel> fit_target_model(const TabularDataset& ds,
                                              const TreeFitConfig& cfg,
                                              TargetFitReport* report = nullptr);

// Feature-importance game over one instance: the value of a coalition is the
// model output averaged over background rows with coalition features taken
// from the instance. The instance and background are copied; the model must
// outlive the returned callable.
CharacteristicFn make_feature_game(const TargetModel& model,
                                   std::span<const double> x,
                                   const Matrix& background);

struct Attribution {
  std::vector<double> phi;
  double base = 0.0;  // mean model output over the background rows
};

// Interventional permutation-sampling attribution: the value of a coalition
// is the model output averaged over background rows with coalition features
// replaced by the instance's values. Marginals telescope, so
// base + sum(phi) equals the model output at the instance.
Attribution attribute_instance(const TargetModel& model, std::span<const double> x,
                               const Matrix& background, const McConfig& cfg);

struct AttributionDataset {
  Matrix phi;
  double base = 0.0;
  std::vector<double> row_seconds;  // zero for rows restored from a resume file
  int resumed_rows = 0;
};

// Labels every instance; rows are flushed to `resume_file` as they finish, so
// an interrupted run picks up where it stopped and still produces identical
// values (per-row seed streams).
AttributionDataset build_attribution_dataset(
    const TabularDataset& ds, const TargetModel& model, int background_size,
    const McConfig& cfg,
    const std::optional<std::filesystem::path>& resume_file = std::nullopt);

struct FractionPoint {
  double fraction = 0.0;
  int train_rows = 0;
  double rmse = 0.0;
};

// Trains a distillation network (linear head; attributions are signed) on
// each fraction of the rows and reports RMSE on the held-out remainder.
std::vector<FractionPoint> fraction_sweep(const Matrix& x, const Matrix& phi,
                                          const std::vector<double>& fractions,
                                          const MlpArchitecture& arch,
                                          const TrainConfig& cfg);

MlpArchitecture distillation_architecture(int features);

struct SpeedupTimings {
  std::vector<double> label_seconds_per_row;
  double train_seconds = 0.0;
  double predict_seconds = 0.0;
  double distilled_mse = 0.0;  // distilled-vs-sampled accuracy tradeoff
};

struct SpeedupReport {
  double fraction = 0.0;
  double label_all_seconds = 0.0;
  double label_fraction_seconds = 0.0;
  double pipeline_seconds = 0.0;  // label fraction + train + predict rest
  double speedup = 0.0;           // label_all / pipeline
  double distilled_mse = 0.0;
};

SpeedupReport speedup_report(const SpeedupTimings& timings, double fraction);

}  // namespace coopsolve

#endif  // COOPSOLVE_XAI_HPP
