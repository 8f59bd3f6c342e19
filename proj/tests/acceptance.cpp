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

// Acceptance suite: every release-gating criterion with its tolerance pinned
// in code. Run with no arguments for the full gate or with a criterion number
// for one check. Prints one PASS/FAIL line per criterion.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "coopsolve/baselines.hpp"
#include "coopsolve/eval.hpp"
#include "coopsolve/xai.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace coopsolve;

namespace {

class Check {
 public:
  void require(bool ok, const std::string& what) {
    if (!ok) {
      ++failures_;
      if (!message_.empty()) message_ += "; ";
      message_ += what;
    }
  }

  bool passed() const { return failures_ == 0; }
  const std::string& message() const { return message_; }

 private:
  int failures_ = 0;
  std::string message_;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// 1. Exact solvers against brute-force enumeration oracles.
// ---------------------------------------------------------------------------
void criterion_oracle_equivalence(Check& check) {
  Rng rng(101);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(7));  // 2..8
    const auto game = testing::random_valid_game(n, rng);

    const auto shapley = shapley_exact(game);
    const auto shapley_oracle = testing::shapley_permutation_oracle(game);
    const auto banzhaf = banzhaf_exact(game, false);
    const auto banzhaf_oracle = testing::banzhaf_subset_oracle(game);
    for (int i = 0; i < n; ++i) {
      const auto idx = static_cast<std::size_t>(i);
      check.require(std::abs(shapley.payoffs[idx] - shapley_oracle[idx]) <= 1e-12,
                    "game " + std::to_string(trial) + " shapley player " +
                        std::to_string(i) + " off by " +
                        fmt(shapley.payoffs[idx] - shapley_oracle[idx]));
      check.require(std::abs(banzhaf.payoffs[idx] - banzhaf_oracle[idx]) <= 1e-12,
                    "game " + std::to_string(trial) + " banzhaf player " +
                        std::to_string(i) + " off by " +
                        fmt(banzhaf.payoffs[idx] - banzhaf_oracle[idx]));
    }
  }
}

// ---------------------------------------------------------------------------
// 2. Published known-value checks.
// ---------------------------------------------------------------------------
void criterion_known_values(Check& check) {
  const WeightedVotingGame parliament({49, 49, 2}, 50);
  const auto phi = shapley_exact(parliament);
  for (double p : phi.payoffs) {
    check.require(p == 1.0 / 3.0, "parliament shapley " + fmt(p) + " != 1/3");
  }
  const auto lc = least_core(parliament);
  check.require(std::abs(*lc.lcv - 1.0 / 3.0) <= 1e-9,
                "parliament lcv " + fmt(*lc.lcv) + " != 1/3 within 1e-9");

  const WeightedVotingGame grand_only({2.8, 1.6, 6.6, 1.5}, 12.1);
  const auto lc4 = least_core(grand_only);
  check.require(std::abs(*lc4.lcv) <= 1e-9, "hard-case lcv " + fmt(*lc4.lcv));
  check.require(std::abs(max_excess(grand_only, lc4.payoffs)) <= 1e-8,
                "hard-case max excess " +
                    fmt(max_excess(grand_only, lc4.payoffs)));
  check.require(is_imputation(lc4, grand_only, 1e-9), "hard-case not an imputation");

  // Vertex check: at least n+1 active constraints at the returned point.
  int active = 1;  // efficiency row
  for (double p : lc4.payoffs) {
    if (std::abs(p) <= 1e-9) ++active;
  }
  if (std::abs(*lc4.lcv) <= 1e-9) ++active;
  for (const Coalition& c : winning_coalitions(grand_only).coalitions) {
    double sum = 0.0;
    for (int i : c.members()) sum += lc4.payoffs[static_cast<std::size_t>(i)];
    if (std::abs(sum - (1.0 - *lc4.lcv)) <= 1e-9) ++active;
  }
  check.require(active >= 5, "hard-case payoff is not a vertex (" +
                                 std::to_string(active) + " active constraints)");
}

// ---------------------------------------------------------------------------
// 3. Naive and minimal least-core formulations agree.
// ---------------------------------------------------------------------------
void criterion_least_core_consistency(Check& check) {
  Rng rng(103);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 3 + static_cast<int>(rng.below(8));  // 3..10
    const auto game = testing::random_valid_game(n, rng);
    const auto naive = least_core(game, {.formulation = LcFormulation::Naive});
    const auto minimal = least_core(game, {.formulation = LcFormulation::Minimal});
    check.require(std::abs(*naive.lcv - *minimal.lcv) <= 1e-9,
                  "game " + std::to_string(trial) + " naive eps " +
                      fmt(*naive.lcv) + " vs minimal " + fmt(*minimal.lcv));
    for (const auto& sol : {naive, minimal}) {
      check.require(
          check_feasibility(game, sol.payoffs, *sol.lcv, kEnumerationCap, 1e-8)
              .feasible,
          "game " + std::to_string(trial) + " payoff infeasible at own eps");
      check.require(std::abs(max_excess(game, sol.payoffs) - *sol.lcv) <= 1e-8,
                    "game " + std::to_string(trial) + " max excess " +
                        fmt(max_excess(game, sol.payoffs)) + " != eps " +
                        fmt(*sol.lcv));
    }
  }
}

// ---------------------------------------------------------------------------
// 4. Monte-Carlo Shapley fidelity at the published sampling budget.
// ---------------------------------------------------------------------------
void criterion_mc_fidelity(Check& check) {
  for (int n = 5; n <= 10; ++n) {
    double total_mae = 0.0;
    const int kGames = 1000;
    std::vector<double> maes(kGames, 0.0);
    parallel_for(kGames, [&](std::int64_t begin, std::int64_t end) {
      for (std::int64_t g = begin; g < end; ++g) {
        Rng rng = Rng::substream(104, {static_cast<std::uint64_t>(n),
                                       static_cast<std::uint64_t>(g)});
        const auto game = sample_wvg(n, default_train_distribution(n), rng);
        const auto exact = shapley_exact(game);
        const auto mc = shapley_mc(
            game, {1000, 10,
                   Rng::substream(105, {static_cast<std::uint64_t>(n),
                                        static_cast<std::uint64_t>(g)})
                       .next_u64(),
                   1});
        maes[static_cast<std::size_t>(g)] =
            mae(exact.payoffs, mc.solution.payoffs);
      }
    });
    total_mae = std::accumulate(maes.begin(), maes.end(), 0.0);
    const double mean_mae = total_mae / kGames;
    check.require(mean_mae <= 0.0014,
                  "n=" + std::to_string(n) + " mean MAE " + fmt(mean_mae) +
                      " exceeds 0.0014");
  }
}

// ---------------------------------------------------------------------------
// 5. Gradient correctness across random architectures and both heads.
// ---------------------------------------------------------------------------
void criterion_gradients(Check& check) {
  Rng rng(106);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    MlpArchitecture arch;
    arch.input_dim = 2 + static_cast<int>(rng.below(5));
    arch.hidden.clear();
    const int layers = static_cast<int>(rng.below(3));
    for (int l = 0; l < layers; ++l) {
      arch.hidden.push_back(2 + static_cast<int>(rng.below(7)));
    }
    arch.dropout = 0.0;
    arch.payoff_dim = 2 + static_cast<int>(rng.below(4));
    arch.head = trial % 3 == 0   ? OutputHead::Linear
                : trial % 3 == 1 ? OutputHead::Simplex
                                 : OutputHead::SimplexWithEpsilon;
    const double err = grad_check(arch, 500 + static_cast<std::uint64_t>(trial));
    worst = std::max(worst, err);
  }
  check.require(worst < 1e-4, "max relative gradient error " + fmt(worst));
}

// ---------------------------------------------------------------------------
// 6. Desk-scale learning: the n=4 Shapley model beats both baselines.
// ---------------------------------------------------------------------------
void criterion_learning(Check& check) {
  const auto dataset = make_fixed_dataset(4, 5000, Concept::Shapley,
                                          default_train_distribution(4), 4242);
  TrainConfig cfg;  // stock defaults: 3x128, dropout 0.1, lr 1e-4, batch 128
  cfg.seed = 4242;
  const auto trained = train(dataset, architecture_for(dataset), cfg);

  TrainConfig linear_cfg = cfg;
  const auto linear = train_multinomial(dataset, linear_cfg);

  EvalConfig eval_cfg;
  eval_cfg.games = 1000;
  eval_cfg.seed = 777;
  const auto nn_report = evaluate_model(trained.model, 4, eval_cfg);
  const auto wp_report = evaluate_predictor(
      [](const WeightedVotingGame& game) { return weight_proportional(game); },
      Concept::Shapley, 4, eval_cfg);
  const auto linear_report = evaluate_predictor(
      [&](const WeightedVotingGame& game) { return predict(linear, game); },
      Concept::Shapley, 4, eval_cfg);

  std::printf("  [criterion 6] nn %.4f | weight-proportional %.4f | linear %.4f "
              "(epochs %d, best val %.3g)\n",
              nn_report.mean_mae, wp_report.mean_mae, linear_report.mean_mae,
              trained.model.meta.epochs_run, trained.model.meta.best_val_loss);
  check.require(nn_report.mean_mae <= 0.09,
                "mean MAE " + fmt(nn_report.mean_mae) + " exceeds 0.09");
  check.require(nn_report.mean_mae < wp_report.mean_mae,
                "nn " + fmt(nn_report.mean_mae) + " does not beat weight "
                "proportional " + fmt(wp_report.mean_mae));
  check.require(nn_report.mean_mae < linear_report.mean_mae,
                "nn " + fmt(nn_report.mean_mae) + " does not beat linear " +
                    fmt(linear_report.mean_mae));
}

// ---------------------------------------------------------------------------
// 7. Variable-size contract, including extrapolation beyond training sizes.
// ---------------------------------------------------------------------------
void criterion_variable_contract(Check& check) {
  const auto dataset =
      make_variable_dataset({4, 5, 6}, 1000, 10, Concept::Shapley, "train", 515);
  TrainConfig cfg;
  cfg.max_epochs = 15000;
  cfg.seed = 515;
  const auto trained = train(dataset, architecture_for(dataset), cfg);
  std::printf("  [criterion 7] trained %d epochs, best val %.3g\n",
              trained.model.meta.epochs_run, trained.model.meta.best_val_loss);

  for (int n = 4; n <= 10; ++n) {
    Rng rng = Rng::substream(516, {static_cast<std::uint64_t>(n)});
    for (int g = 0; g < 50; ++g) {
      const auto game = sample_wvg(n, default_train_distribution(n), rng);
      const auto pred = predict_payoffs(trained.model, game, Layout::Variable);
      check.require(static_cast<int>(pred.payoffs.size()) == n,
                    "n=" + std::to_string(n) + " wrong output size");
      double sum = 0.0;
      bool valid = true;
      for (double p : pred.payoffs) {
        if (!(p >= 0.0) || !std::isfinite(p)) valid = false;
        sum += p;
      }
      check.require(valid, "n=" + std::to_string(n) + " negative/non-finite payoff");
      check.require(std::abs(sum - 1.0) <= 1e-9,
                    "n=" + std::to_string(n) + " payoffs sum to " + fmt(sum));
    }
  }
}

// ---------------------------------------------------------------------------
// 8. Piecewise-constant solutions and the EU dictatorship transition.
// ---------------------------------------------------------------------------
void criterion_piecewise_constancy(Check& check) {
  Rng rng(108);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 4 + static_cast<int>(rng.below(2));
    const auto game = testing::random_valid_game(n, rng);
    const auto sweep = quota_sweep(game.weights(), Concept::Shapley, 0.1);
    std::size_t next = 0;
    for (int i = 1; i < static_cast<int>(sweep.grid.size()); ++i) {
      if (next < sweep.transitions.size() && sweep.transitions[next] == i) {
        ++next;
        continue;
      }
      for (int c = 0; c < sweep.truth.cols; ++c) {
        check.require(sweep.truth(i, c) == sweep.truth(i - 1, c),
                      "trial " + std::to_string(trial) +
                          ": solution changed without a winning-set change");
      }
    }
  }

  const auto eu = eu_council_game4();
  const auto sweep = weight_sweep(eu, 0, Concept::Shapley, 1.0);
  check.require(!sweep.transitions.empty(), "EU sweep found no transitions");
  const int last = sweep.transitions.back();
  check.require(sweep.grid[static_cast<std::size_t>(last)] > eu.quota(),
                "final transition not past the quota");
  check.require(sweep.grid[static_cast<std::size_t>(last - 1)] <= eu.quota(),
                "final transition is not the first point past the quota");
  for (int i = last; i < static_cast<int>(sweep.grid.size()); ++i) {
    check.require(sweep.truth(i, 0) > 0.5,
                  "swept player's exact shapley " + fmt(sweep.truth(i, 0)) +
                      " not above 0.5 past the quota");
  }
}

// ---------------------------------------------------------------------------
// 9. XAI pipeline on a synthetic additive dataset (N=2000, F=8).
// ---------------------------------------------------------------------------
class AdditiveModel : public TargetModel {
 public:
  AdditiveModel(std::vector<double> coeffs, double intercept)
      : coeffs_(std::move(coeffs)), intercept_(intercept) {}
  double predict(std::span<const double> x) const override {
    double out = intercept_;
    for (std::size_t i = 0; i < coeffs_.size(); ++i) out += coeffs_[i] * x[i];
    return out;
  }

 private:
  std::vector<double> coeffs_;
  double intercept_;
};

void criterion_xai(Check& check) {
  constexpr int kRows = 2000;
  constexpr int kFeatures = 8;
  const std::vector<double> coeffs{1.5, -2.0, 0.75, 3.0, -0.5, 1.0, 2.5, -1.25};
  const AdditiveModel additive(coeffs, 0.4);

  TabularDataset ds;
  ds.x = Matrix(kRows, kFeatures);
  ds.y.resize(kRows);
  Rng rng(109);
  for (int r = 0; r < kRows; ++r) {
    std::vector<double> row(kFeatures);
    for (int c = 0; c < kFeatures; ++c) {
      ds.x(r, c) = rng.normal();
      row[static_cast<std::size_t>(c)] = ds.x(r, c);
    }
    ds.y[static_cast<std::size_t>(r)] = additive.predict(row);
  }

  // (a) Closed form against a single-row background.
  Matrix single(1, kFeatures);
  for (int c = 0; c < kFeatures; ++c) single(0, c) = ds.x(7, c);
  const std::vector<double> instance(ds.x.row(42).begin(), ds.x.row(42).end());
  const auto attribution = attribute_instance(additive, instance, single,
                                              {.permutations = 10,
                                               .resamples = 2,
                                               .seed = 1});
  for (int i = 0; i < kFeatures; ++i) {
    const double expected = coeffs[static_cast<std::size_t>(i)] *
                            (instance[static_cast<std::size_t>(i)] - single(0, i));
    check.require(
        std::abs(attribution.phi[static_cast<std::size_t>(i)] - expected) <= 1e-10,
        "phi[" + std::to_string(i) + "] off closed form by " +
            fmt(attribution.phi[static_cast<std::size_t>(i)] - expected));
  }

  // (b) Fraction sweep: more training data reduces RMSE in >= 9/10 seeds.
  // Additive-model attributions are permutation-independent, so a small
  // sampling budget already yields exact labels.
  const auto labels = build_attribution_dataset(ds, additive, 8,
                                                {.permutations = 2,
                                                 .resamples = 1,
                                                 .seed = 2});
  MlpArchitecture arch = distillation_architecture(kFeatures);
  int improved = 0;
  for (int rep = 0; rep < 10; ++rep) {
    TrainConfig cfg;
    cfg.max_epochs = 100;
    cfg.early_stopping = false;  // fixed-epoch distillation protocol
    cfg.seed = 1000 + static_cast<std::uint64_t>(rep);
    const auto curve = fraction_sweep(ds.x, labels.phi, {0.01, 0.10}, arch, cfg);
    if (curve[1].rmse < curve[0].rmse) ++improved;
  }
  std::printf("  [criterion 9] fraction sweep improved in %d/10 repetitions\n",
              improved);
  check.require(improved >= 9, "rmse(0.10) < rmse(0.01) in only " +
                                   std::to_string(improved) + "/10 repetitions");

  // (c) Speedup ratio with labeling at least 100x inference cost per row.
  TreeFitConfig tree_cfg;
  tree_cfg.max_depth = 8;
  const auto tree = fit_target_model(ds, tree_cfg);
  const auto labeled = build_attribution_dataset(ds, *tree, 64,
                                                 {.permutations = 800,
                                                  .resamples = 1,
                                                  .seed = 3});
  const int train_rows = kRows / 10;
  Matrix x_train(train_rows, kFeatures);
  Matrix y_train(train_rows, kFeatures);
  for (int r = 0; r < train_rows; ++r) {
    std::copy(ds.x.row(r).begin(), ds.x.row(r).end(), x_train.row(r).begin());
    std::copy(labeled.phi.row(r).begin(), labeled.phi.row(r).end(),
              y_train.row(r).begin());
  }
  TrainConfig distil_cfg;
  distil_cfg.max_epochs = 100;
  distil_cfg.early_stopping = false;
  distil_cfg.seed = 4;
  const auto t0 = std::chrono::steady_clock::now();
  const auto distilled = train(x_train, y_train, arch, distil_cfg);
  const double train_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const auto t1 = std::chrono::steady_clock::now();
  double mse_sum = 0.0;
  for (int r = train_rows; r < kRows; ++r) {
    const auto pred = forward(distilled.model, ds.x.row(r));
    for (int c = 0; c < kFeatures; ++c) {
      const double d = pred[static_cast<std::size_t>(c)] - labeled.phi(r, c);
      mse_sum += d * d;
    }
  }
  const double predict_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t1).count();

  const double label_per_row =
      std::accumulate(labeled.row_seconds.begin(), labeled.row_seconds.end(), 0.0) /
      kRows;
  const double predict_per_row = predict_seconds / (kRows - train_rows);
  check.require(label_per_row > 100.0 * predict_per_row,
                "premise violated: labeling " + fmt(label_per_row) +
                    "s/row vs inference " + fmt(predict_per_row) + "s/row");

  SpeedupTimings timings;
  timings.label_seconds_per_row = labeled.row_seconds;
  timings.train_seconds = train_seconds;
  timings.predict_seconds = predict_seconds;
  timings.distilled_mse =
      mse_sum / (static_cast<double>(kRows - train_rows) * kFeatures);
  const auto report = speedup_report(timings, 0.1);
  std::printf("  [criterion 9] speedup %.2fx (label %.2fs, train %.2fs, "
              "predict %.3fs)\n",
              report.speedup, report.label_all_seconds, train_seconds,
              predict_seconds);
  check.require(report.speedup > 4.0,
                "speedup " + fmt(report.speedup) + " not above 4x");
}

// ---------------------------------------------------------------------------
// 10. Byte-identical artifacts from seeded CLI invocations.
// ---------------------------------------------------------------------------
std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void criterion_determinism(Check& check) {
  const fs::path root = fs::temp_directory_path() / "coopsolve_acceptance";
  fs::remove_all(root);
  fs::create_directories(root);
  const std::string cli = COOPSOLVE_CLI_BIN;
  const auto run = [&](const std::string& args) {
    const std::string command = cli + " " + args + " > /dev/null 2> /dev/null";
    return WEXITSTATUS(std::system(command.c_str()));
  };

  for (const char* variant : {"a", "b"}) {
    const fs::path dir = root / variant;
    fs::create_directories(dir);
    check.require(run("gen --concept leastcore --n 5 --games 60 --seed 99 "
                      "--name ds --out " +
                      dir.string()) == 0,
                  "gen failed");
    check.require(run("train --data " + (dir / "ds.csv").string() +
                      " --hidden 16 --epochs 30 --baseline 10 --patience 10 "
                      "--seed 52 --name model --out " +
                      dir.string()) == 0,
                  "train failed");
    check.require(run("solve --weights 9,4,3,2 --quota 10 --concept shapley "
                      "--method mc --permutations 500 --resamples 4 --seed 17 "
                      "--out " +
                      dir.string()) == 0,
                  "mc solve failed");
  }
  for (const char* artifact : {"ds.csv", "model.json", "solve-shapley.json"}) {
    const std::string a = slurp(root / "a" / artifact);
    const std::string b = slurp(root / "b" / artifact);
    check.require(!a.empty() && a == b,
                  std::string(artifact) + " differs between identical runs");
  }
  fs::remove_all(root);
}

struct Criterion {
  int id;
  const char* title;
  std::function<void(Check&)> run;
};

const Criterion kCriteria[] = {
    {1, "exact solvers match enumeration oracles", criterion_oracle_equivalence},
    {2, "known-value checks", criterion_known_values},
    {3, "least-core formulations agree", criterion_least_core_consistency},
    {4, "monte-carlo shapley fidelity", criterion_mc_fidelity},
    {5, "gradient correctness", criterion_gradients},
    {6, "desk-scale learning beats baselines", criterion_learning},
    {7, "variable-size contract and extrapolation", criterion_variable_contract},
    {8, "piecewise constancy and EU transitions", criterion_piecewise_constancy},
    {9, "xai attribution, sweep, and speedup", criterion_xai},
    {10, "byte-identical seeded artifacts", criterion_determinism},
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  if (argc > 1) only = std::atoi(argv[1]);

  int failures = 0;
  for (const Criterion& criterion : kCriteria) {
    if (only != 0 && criterion.id != only) continue;
    Check check;
    const auto start = std::chrono::steady_clock::now();
    try {
      criterion.run(check);
    } catch (const std::exception& e) {
      check.require(false, std::string("exception: ") + e.what());
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    if (check.passed()) {
      std::printf("[PASS] criterion %2d: %s (%.1fs)\n", criterion.id,
                  criterion.title, seconds);
    } else {
      ++failures;
      std::printf("[FAIL] criterion %2d: %s (%.1fs): %s\n", criterion.id,
                  criterion.title, seconds, check.message().c_str());
    }
    std::fflush(stdout);
  }
  return failures;
}
