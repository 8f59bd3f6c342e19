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

#include "coopsolve/neural.hpp"

#include <cmath>
#include <filesystem>
#include <numeric>

#include "doctest.h"

using namespace coopsolve;

namespace {

MlpArchitecture tiny_arch(int in, std::vector<int> hidden, int payoff,
                          OutputHead head) {
  MlpArchitecture arch;
  arch.input_dim = in;
  arch.hidden = std::move(hidden);
  arch.dropout = 0.0;
  arch.payoff_dim = payoff;
  arch.head = head;
  return arch;
}

}  // namespace

TEST_CASE("softmax head emits a probability vector") {
  const auto arch = tiny_arch(4, {8, 8}, 4, OutputHead::Simplex);
  const auto model = init_model(arch, 3);
  Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> x(4);
    for (double& v : x) v = rng.normal(0.0, 2.0);
    const auto out = forward(model, x);
    const double sum = std::accumulate(out.begin(), out.end(), 0.0);
    CHECK(std::abs(sum - 1.0) <= 1e-12);
    for (double p : out) CHECK(p >= 0.0);
  }
}

TEST_CASE("zeroed output layer gives the uniform vector and sigmoid(0)") {
  auto arch = tiny_arch(3, {8}, 3, OutputHead::SimplexWithEpsilon);
  auto model = init_model(arch, 5);
  model.weights.back().setZero();
  model.biases.back().setZero();
  const auto out = forward(model, std::vector<double>{0.3, -1.0, 2.0});
  REQUIRE(out.size() == 4);
  for (int i = 0; i < 3; ++i) {
    CHECK(out[static_cast<std::size_t>(i)] ==
          doctest::Approx(1.0 / 3).epsilon(1e-15));
  }
  CHECK(out[3] == 0.5);
}

TEST_CASE("forward validates inputs") {
  const auto model = init_model(tiny_arch(3, {4}, 3, OutputHead::Simplex), 1);
  CHECK_THROWS_AS(forward(model, std::vector<double>{1.0, 2.0}), DimensionError);
  CHECK_THROWS_AS(
      forward(model, std::vector<double>{1.0, 2.0,
                                         std::numeric_limits<double>::quiet_NaN()}),
      DimensionError);
}

TEST_CASE("gradients match finite differences on random tiny nets") {
  Rng rng(6);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const int in = 2 + static_cast<int>(rng.below(4));
    const int out = 2 + static_cast<int>(rng.below(3));
    std::vector<int> hidden;
    const int layers = static_cast<int>(rng.below(3));  // 0..2 hidden layers
    for (int l = 0; l < layers; ++l) {
      hidden.push_back(2 + static_cast<int>(rng.below(7)));
    }
    const OutputHead head = trial % 3 == 0   ? OutputHead::Linear
                            : trial % 3 == 1 ? OutputHead::Simplex
                                             : OutputHead::SimplexWithEpsilon;
    const auto arch = tiny_arch(in, hidden, out, head);
    const double err = grad_check(arch, 1000 + static_cast<std::uint64_t>(trial));
    worst = std::max(worst, err);
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("linear nets reach tighter gradient agreement") {
  const double err = grad_check(tiny_arch(5, {}, 4, OutputHead::Linear), 3);
  CHECK(err < 1e-6);
}

TEST_CASE("heads are covered by the gradient check") {
  CHECK(grad_check(tiny_arch(4, {8, 8}, 4, OutputHead::Simplex), 4) < 1e-4);
  CHECK(grad_check(tiny_arch(4, {8}, 4, OutputHead::SimplexWithEpsilon), 5) < 1e-4);
}

TEST_CASE("training memorizes a constant target") {
  Matrix features(64, 3);
  Matrix labels(64, 3);
  for (int r = 0; r < 64; ++r) {
    features(r, 0) = 0.4;
    features(r, 1) = 0.8;
    features(r, 2) = 1.3;
    labels(r, 0) = 0.5;
    labels(r, 1) = 0.3;
    labels(r, 2) = 0.2;
  }
  auto arch = tiny_arch(3, {16}, 3, OutputHead::Simplex);
  TrainConfig cfg;
  cfg.learning_rate = 0.01;
  cfg.max_epochs = 500;
  cfg.early_stopping = false;
  cfg.batch_size = 16;
  cfg.seed = 9;
  const auto result = train(features, labels, arch, cfg);
  const auto out = forward(result.model, std::vector<double>{0.4, 0.8, 1.3});
  double mae = 0.0;
  mae += std::abs(out[0] - 0.5);
  mae += std::abs(out[1] - 0.3);
  mae += std::abs(out[2] - 0.2);
  CHECK(mae / 3.0 < 1e-2);
}

TEST_CASE("training is deterministic per seed") {
  Matrix features(60, 2);
  Matrix labels(60, 2);
  Rng rng(10);
  for (int r = 0; r < 60; ++r) {
    features(r, 0) = rng.uniform01();
    features(r, 1) = rng.uniform01();
    const double s = features(r, 0) + features(r, 1);
    labels(r, 0) = features(r, 0) / s;
    labels(r, 1) = features(r, 1) / s;
  }
  auto arch = tiny_arch(2, {8}, 2, OutputHead::Simplex);
  arch.dropout = 0.1;
  TrainConfig cfg;
  cfg.max_epochs = 40;
  cfg.early_stopping = false;
  cfg.seed = 33;
  const auto a = train(features, labels, arch, cfg);
  const auto b = train(features, labels, arch, cfg);
  for (std::size_t l = 0; l < a.model.weights.size(); ++l) {
    CHECK(a.model.weights[l] == b.model.weights[l]);
    CHECK(a.model.biases[l] == b.model.biases[l]);
  }
  CHECK(a.curve.val_loss == b.curve.val_loss);
}

TEST_CASE("best validation loss is non-increasing") {
  Matrix features(80, 2);
  Matrix labels(80, 2);
  Rng rng(11);
  for (int r = 0; r < 80; ++r) {
    features(r, 0) = rng.uniform01();
    features(r, 1) = rng.uniform01();
    labels(r, 0) = features(r, 0) > features(r, 1) ? 1.0 : 0.0;
    labels(r, 1) = 1.0 - labels(r, 0);
  }
  TrainConfig cfg;
  cfg.max_epochs = 60;
  cfg.early_stopping = false;
  cfg.seed = 12;
  const auto result =
      train(features, labels, tiny_arch(2, {8}, 2, OutputHead::Simplex), cfg);
  double best = std::numeric_limits<double>::infinity();
  for (double v : result.curve.val_loss) {
    const double next = std::min(best, v);
    CHECK(next <= best);
    best = next;
  }
  CHECK(result.model.meta.best_val_loss == best);
}

TEST_CASE("variable-layout prediction redistributes padded mass") {
  const auto ds = make_variable_dataset({3, 4}, 10, 6, Concept::Shapley, "train", 3);
  TrainConfig cfg;
  cfg.max_epochs = 5;
  cfg.early_stopping = false;
  cfg.seed = 2;
  const auto trained = train(ds, architecture_for(ds, {8}, 0.0), cfg);

  Rng rng(14);
  const auto dist = default_train_distribution(4);
  const auto game = sample_wvg(4, dist, rng);

  // Raw outputs over the padded vector, renormalized over real players.
  auto padded = normalize_weights(game);
  padded.resize(6, 0.0);
  const auto raw = forward(trained.model, padded);
  const double mass = raw[0] + raw[1] + raw[2] + raw[3];

  const auto pred = predict_payoffs(trained.model, game, Layout::Variable);
  REQUIRE(pred.payoffs.size() == 4);
  double sum = 0.0;
  for (int i = 0; i < 4; ++i) {
    CHECK(pred.payoffs[static_cast<std::size_t>(i)] ==
          doctest::Approx(raw[static_cast<std::size_t>(i)] / mass).epsilon(1e-12));
    sum += pred.payoffs[static_cast<std::size_t>(i)];
  }
  CHECK(std::abs(sum - 1.0) <= 1e-12);

  // Full-width games pass through without redistribution.
  const auto full_game = sample_wvg(6, default_train_distribution(6), rng);
  const auto full_pred = predict_payoffs(trained.model, full_game, Layout::Variable);
  const auto full_raw = forward(trained.model, normalize_weights(full_game));
  for (int i = 0; i < 6; ++i) {
    CHECK(full_pred.payoffs[static_cast<std::size_t>(i)] ==
          doctest::Approx(full_raw[static_cast<std::size_t>(i)]).epsilon(1e-9));
  }

  const auto big_game = sample_wvg(7, default_train_distribution(7), rng);
  CHECK_THROWS_AS(predict_payoffs(trained.model, big_game, Layout::Variable),
                  CapacityError);
}

TEST_CASE("models round-trip through their JSON file") {
  const auto ds = make_fixed_dataset(3, 40, Concept::LeastCore,
                                     default_train_distribution(3), 8);
  TrainConfig cfg;
  cfg.max_epochs = 10;
  cfg.early_stopping = false;
  cfg.seed = 21;
  const auto trained = train(ds, architecture_for(ds, {8, 8}, 0.1), cfg);

  const auto dir = std::filesystem::temp_directory_path() / "coopsolve_nn_test";
  std::filesystem::create_directories(dir);
  save_model(trained.model, dir / "m.json");
  const auto loaded = load_model(dir / "m.json");

  CHECK(loaded.meta.concept_label == "leastcore");
  CHECK(loaded.meta.layout == "fixed");
  for (std::size_t l = 0; l < trained.model.weights.size(); ++l) {
    CHECK(loaded.weights[l] == trained.model.weights[l]);
    CHECK(loaded.biases[l] == trained.model.biases[l]);
  }
  Rng rng(15);
  const auto game = sample_wvg(3, default_train_distribution(3), rng);
  const auto a = predict_payoffs(trained.model, game, Layout::Fixed);
  const auto b = predict_payoffs(loaded, game, Layout::Fixed);
  CHECK(a.payoffs == b.payoffs);
  REQUIRE(a.lcv.has_value());
  CHECK(*a.lcv == *b.lcv);
  CHECK(*a.lcv > 0.0);
  CHECK(*a.lcv < 1.0);
  std::filesystem::remove_all(dir);
}

TEST_CASE("best-of-runs selection picks the lowest validation loss") {
  Matrix features(50, 2);
  Matrix labels(50, 2);
  Rng rng(16);
  for (int r = 0; r < 50; ++r) {
    features(r, 0) = rng.uniform01();
    features(r, 1) = 1.0 - features(r, 0);
    labels(r, 0) = features(r, 0);
    labels(r, 1) = features(r, 1);
  }
  TrainConfig cfg;
  cfg.max_epochs = 15;
  cfg.early_stopping = false;
  cfg.runs = 3;
  cfg.seed = 77;
  const auto result =
      train(features, labels, tiny_arch(2, {6}, 2, OutputHead::Simplex), cfg);
  CHECK(result.model.meta.run_index >= 0);
  CHECK(result.model.meta.run_index < 3);
  CHECK(std::isfinite(result.model.meta.best_val_loss));
}
