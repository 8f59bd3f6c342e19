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

#ifndef COOPSOLVE_NEURAL_HPP
#define COOPSOLVE_NEURAL_HPP

#include <Eigen/Dense>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "coopsolve/datagen.hpp"

namespace coopsolve {

// Output heads: payoff predictions go through a softmax (optionally with a
// sigmoid epsilon unit appended); signed targets such as feature
// attributions use a plain linear head.
enum class OutputHead { Simplex, SimplexWithEpsilon, Linear };

std::string head_name(OutputHead head);
OutputHead parse_head(const std::string& name);

struct MlpArchitecture {
  int input_dim = 0;
  std::vector<int> hidden = {128, 128, 128};
  double dropout = 0.1;
  int payoff_dim = 0;
  OutputHead head = OutputHead::Simplex;

  int output_dim() const {
    return payoff_dim + (head == OutputHead::SimplexWithEpsilon ? 1 : 0);
  }
  void validate() const;
};

struct TrainMeta {
  std::uint64_t seed = 0;
  int run_index = 0;
  int epochs_run = 0;
  double best_val_loss = std::numeric_limits<double>::infinity();
  std::string concept_label;  // shapley | banzhaf | leastcore | attribution
  std::string layout;   // fixed | variable | tabular
};

// Feedforward network parameters; layer l maps fan_in x fan_out with ReLU
// between hidden layers and the configured head at the end.
struct PayoffModel {
  MlpArchitecture arch;
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;
  TrainMeta meta;
};

struct TrainConfig {
  int max_epochs = 6000;
  int baseline_epochs = 500;  // early stopping activates after this many
  int patience = 75;          // epochs without validation improvement
  double train_fraction = 0.7;
  double learning_rate = 1e-4;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-5;
  double weight_decay = 0.0;
  int batch_size = 128;  // <= 0 means full batch
  int runs = 1;          // best-of-R model selection
  std::uint64_t seed = 0;
  bool early_stopping = true;
  int log_every = 0;  // epochs between progress lines, 0 = silent
  int threads = 0;    // parallelism across runs
};

struct TrainingCurve {
  std::vector<double> train_loss;
  std::vector<double> val_loss;
};

struct TrainResult {
  PayoffModel model;
  TrainingCurve curve;  // curve of the selected run
};

// Kaiming-uniform weights, zero biases.
PayoffModel init_model(const MlpArchitecture& arch, std::uint64_t seed);

// Evaluation-mode forward pass. Supplying a dropout stream switches to
// training mode and samples inverted-scaling dropout masks from it.
std::vector<double> forward(const PayoffModel& model, std::span<const double> x,
                            Rng* dropout_rng = nullptr);

// Minimizes the MSE over all outputs with Adam on a 70/30 split, early
// stopping on validation loss, returning the parameters from the best
// validation epoch of the best run.
TrainResult train(const Matrix& features, const Matrix& labels,
                  const MlpArchitecture& arch, const TrainConfig& cfg);

// Convenience wrapper deriving head and dimensions from the dataset.
TrainResult train(const GameDataset& dataset, MlpArchitecture arch,
                  const TrainConfig& cfg);

MlpArchitecture architecture_for(const GameDataset& dataset,
                                 std::vector<int> hidden = {128, 128, 128},
                                 double dropout = 0.1);

// Compares backpropagated gradients against central finite differences
// (h = 1e-5) over every parameter of a small dropout-free network; returns
// the maximum relative error.
double grad_check(const MlpArchitecture& arch, std::uint64_t seed);

// Fixed layout: feed normalized weights straight through. Variable layout:
// zero-pad to the model width, then renormalize the payoff mass assigned to
// real players (padding mass is discarded proportionally).
SolutionVector predict_payoffs(const PayoffModel& model,
                               const WeightedVotingGame& game, Layout layout);

void save_model(const PayoffModel& model, const std::filesystem::path& path);
PayoffModel load_model(const std::filesystem::path& path);

}  // namespace coopsolve

#endif  // COOPSOLVE_NEURAL_HPP
