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

#include "coopsolve/datagen.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "doctest.h"

using namespace coopsolve;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace

TEST_CASE("test distributions follow the published table") {
  const auto slight = test_distribution("slight-ood", 5);
  CHECK(slight.alpha == 8.0);
  CHECK(slight.beta == 12.0);
  CHECK(slight.location == 2.0);

  const auto in_sample = test_distribution("in-sample", 5);
  CHECK(in_sample.alpha == 1.0);
  CHECK(in_sample.beta == 1.0);
  CHECK(in_sample.location == 1.0);

  CHECK(test_distribution("significant-ood", 10).location == 30.0);
  CHECK(test_distribution("out-of-sample", 4).location == 10.0);
  CHECK(test_distribution("moderate-ood", 4).location == 6.0);
  CHECK_THROWS_AS(test_distribution("bogus", 5), GenerationError);
}

TEST_CASE("sampled games satisfy the quota contract") {
  const auto dist = default_train_distribution(5);
  Rng rng(7);
  double quota_sum = 0.0;
  const int kGames = 4000;
  for (int g = 0; g < kGames; ++g) {
    const auto game = sample_wvg(5, dist, rng);
    CHECK(game.grand_coalition_wins());
    CHECK(game.quota() > 0.0);
    for (double w : game.weights()) {
      CHECK(w >= 1.0);
      CHECK(w <= 10.0);
    }
    quota_sum += game.quota();
  }
  // Mean quota targets n(2n+1)/4 = 13.75, half the expected weight sum.
  CHECK(std::abs(quota_sum / kGames - 13.75) < 0.3);
}

TEST_CASE("sample_wvg rejects bad inputs") {
  Rng rng(1);
  CHECK_THROWS_AS(sample_wvg(1, default_train_distribution(4), rng),
                  GenerationError);
  CHECK_THROWS_AS(sample_wvg(4, {1.0, 1.0, 1.0, 0.0}, rng), GenerationError);
  CHECK_THROWS_AS(sample_wvg(4, {0.0, 1.0, 1.0, 7.0}, rng), GenerationError);
}

TEST_CASE("sampling is deterministic for a fixed seed") {
  const auto dist = default_train_distribution(6);
  Rng a(99);
  Rng b(99);
  const auto g1 = sample_wvg(6, dist, a);
  const auto g2 = sample_wvg(6, dist, b);
  CHECK(g1.weights() == g2.weights());
  CHECK(g1.quota() == g2.quota());
}

TEST_CASE("fixed shapley dataset has simplex label rows") {
  const auto ds = make_fixed_dataset(4, 32, Concept::Shapley,
                                     default_train_distribution(4), 11);
  CHECK(ds.features.rows == 32);
  CHECK(ds.features.cols == 4);
  CHECK(ds.labels.cols == 4);
  CHECK(ds.meta.solver == "exact");
  for (int r = 0; r < ds.labels.rows; ++r) {
    const auto row = ds.labels.row(r);
    const double sum = std::accumulate(row.begin(), row.end(), 0.0);
    CHECK(std::abs(sum - 1.0) <= 1e-12);
    for (double p : row) CHECK(p >= 0.0);
  }
}

TEST_CASE("row games can be replayed from the metadata") {
  const auto ds = make_fixed_dataset(5, 8, Concept::Banzhaf,
                                     default_train_distribution(5), 40);
  for (int r = 0; r < ds.features.rows; ++r) {
    const auto game = regenerate_row_game(ds.meta, r);
    const auto x = normalize_weights(game);
    for (int c = 0; c < 5; ++c) {
      CHECK(ds.features(r, c) == x[static_cast<std::size_t>(c)]);
    }
  }
}

TEST_CASE("least-core labels are feasible for their own epsilon") {
  const auto ds = make_fixed_dataset(5, 10, Concept::LeastCore,
                                     default_train_distribution(5), 21);
  CHECK(ds.labels.cols == 6);
  CHECK(ds.meta.solver == "lp");
  for (int r = 0; r < ds.labels.rows; ++r) {
    const auto game = regenerate_row_game(ds.meta, r);
    const auto label = ds.labels.row(r);
    const std::vector<double> payoffs(label.begin(), label.begin() + 5);
    const double eps = label[5];
    CHECK(check_feasibility(game, payoffs, eps, kEnumerationCap, 1e-8).feasible);
    CHECK(max_excess(game, payoffs) == doctest::Approx(eps).epsilon(1e-8));
  }
}

TEST_CASE("variable datasets zero-pad and shuffle consistently") {
  const std::vector<int> n_list{4, 5, 6};
  const auto ds =
      make_variable_dataset(n_list, 12, 10, Concept::Shapley, "train", 31);
  CHECK(ds.features.rows == 36);
  CHECK(ds.features.cols == 10);
  CHECK(ds.labels.cols == 10);

  for (int r = 0; r < ds.features.rows; ++r) {
    const int n = n_list[static_cast<std::size_t>(r / 12)];
    int real = 0;
    double label_sum = 0.0;
    for (int c = 0; c < 10; ++c) {
      const bool has_player = ds.features(r, c) != 0.0;
      if (has_player) {
        ++real;
      } else {
        CHECK(ds.labels(r, c) == 0.0);  // padded positions carry no payoff
      }
      label_sum += ds.labels(r, c);
    }
    CHECK(real == n);
    CHECK(std::abs(label_sum - 1.0) <= 1e-12);
  }
}

TEST_CASE("variable least-core labels keep epsilon in the last column") {
  const auto ds =
      make_variable_dataset({3, 4}, 6, 6, Concept::LeastCore, "train", 77);
  CHECK(ds.labels.cols == 7);
  for (int r = 0; r < ds.labels.rows; ++r) {
    const double eps = ds.labels(r, 6);
    CHECK(eps >= 0.0);
    CHECK(eps < 1.0);
  }
}

TEST_CASE("datasets round-trip and regenerate byte-identically") {
  const auto dir = std::filesystem::temp_directory_path() / "coopsolve_dg_test";
  std::filesystem::create_directories(dir);

  const auto ds = make_fixed_dataset(4, 25, Concept::Shapley,
                                     default_train_distribution(4), 123);
  save_dataset(ds, dir / "a.csv");
  const auto loaded = load_dataset(dir / "a.csv");
  CHECK(loaded.features.data == ds.features.data);
  CHECK(loaded.labels.data == ds.labels.data);
  CHECK(loaded.meta.seed == ds.meta.seed);
  save_dataset(loaded, dir / "b.csv");
  CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));

  const auto regen = make_fixed_dataset(4, 25, Concept::Shapley,
                                        default_train_distribution(4), 123);
  save_dataset(regen, dir / "c.csv");
  CHECK(slurp(dir / "a.csv") == slurp(dir / "c.csv"));

  // Thread count must not change the artifact.
  LabelOptions serial;
  serial.threads = 1;
  const auto serial_ds = make_fixed_dataset(4, 25, Concept::Shapley,
                                            default_train_distribution(4), 123,
                                            serial);
  CHECK(serial_ds.features.data == ds.features.data);
  CHECK(serial_ds.labels.data == ds.labels.data);

  std::filesystem::remove_all(dir);
}

TEST_CASE("variable datasets regenerate identically as well") {
  const auto a = make_variable_dataset({4, 5}, 8, 8, Concept::Banzhaf, "train", 5);
  const auto b = make_variable_dataset({4, 5}, 8, 8, Concept::Banzhaf, "train", 5);
  CHECK(a.features.data == b.features.data);
  CHECK(a.labels.data == b.labels.data);
}
