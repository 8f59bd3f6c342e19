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

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "coopsolve/baselines.hpp"
#include "coopsolve/eval.hpp"
#include "coopsolve/xai.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace coopsolve;

namespace {

#ifndef COOPSOLVE_BUILD_ID
#define COOPSOLVE_BUILD_ID "unknown"
#endif

constexpr int kExitOk = 0;
constexpr int kExitArgs = 2;
constexpr int kExitSolver = 3;
constexpr int kExitIo = 4;

// Output files never overwrite silently: the stem gets a version suffix.
fs::path versioned_path(const fs::path& dir, const std::string& stem,
                        const std::string& ext) {
  fs::create_directories(dir);
  fs::path candidate = dir / (stem + ext);
  for (int version = 2; fs::exists(candidate); ++version) {
    candidate = dir / (stem + "-" + std::to_string(version) + ext);
  }
  return candidate;
}

std::uint64_t ensure_seed(std::optional<std::uint64_t> seed) {
  if (seed) return *seed;
  std::random_device device;
  const std::uint64_t drawn =
      (static_cast<std::uint64_t>(device()) << 32) ^ device();
  std::cout << "seed: " << drawn << " (drawn from system entropy)\n";
  return drawn;
}

class Manifest {
 public:
  Manifest(std::string command, std::uint64_t seed) : start_(Clock::now()) {
    doc_["command"] = std::move(command);
    doc_["seed"] = seed;
    doc_["build"] = COOPSOLVE_BUILD_ID;
  }

  json& config() { return doc_["config"]; }

  void add_output(const fs::path& path) {
    doc_["outputs"].push_back(path.string());
  }

  void write(const fs::path& dir, const std::string& stem) {
    doc_["wall_seconds"] =
        std::chrono::duration<double>(Clock::now() - start_).count();
    const fs::path path = versioned_path(dir, stem + ".manifest", ".json");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write manifest '" + path.string() + "'");
    out << doc_.dump(2) << '\n';
    std::cout << "manifest: " << path.string() << '\n';
  }

 private:
  using Clock = std::chrono::steady_clock;
  json doc_;
  Clock::time_point start_;
};

std::vector<double> parse_weight_list(const std::string& csv) {
  std::vector<double> weights;
  std::size_t start = 0;
  while (start <= csv.size()) {
    std::size_t comma = csv.find(',', start);
    if (comma == std::string::npos) comma = csv.size();
    weights.push_back(parse_double(std::string_view(csv).substr(start, comma - start)));
    start = comma + 1;
  }
  return weights;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> values;
  const std::size_t colon = text.find(':');
  if (colon != std::string::npos) {
    const int lo = std::stoi(text.substr(0, colon));
    const int hi = std::stoi(text.substr(colon + 1));
    for (int v = lo; v <= hi; ++v) values.push_back(v);
    return values;
  }
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t comma = text.find(',', start);
    if (comma == std::string::npos) comma = text.size();
    values.push_back(std::stoi(text.substr(start, comma - start)));
    start = comma + 1;
  }
  return values;
}

WeightedVotingGame load_game_json(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open game file '" + path.string() + "'");
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw IoError("malformed game file");
  return WeightedVotingGame(doc.at("weights").get<std::vector<double>>(),
                            doc.at("quota").get<double>());
}

void print_solution(const std::string& label, const SolutionVector& solution) {
  std::printf("%s:", label.c_str());
  for (double p : solution.payoffs) std::printf(" %.6g", p);
  std::printf("\n");
  if (solution.lcv) std::printf("lcv: %.6g\n", *solution.lcv);
}

json solution_to_json(const SolutionVector& solution) {
  json doc;
  doc["payoffs"] = solution.payoffs;
  if (solution.lcv) doc["lcv"] = *solution.lcv;
  return doc;
}

json report_to_json(const EvalReport& report) {
  json doc;
  doc["concept"] = report.concept_label;
  doc["distribution"] = report.distribution;
  doc["n"] = report.n;
  doc["seed"] = report.seed;
  doc["games"] = report.per_game_mae.size();
  doc["mean_mae"] = report.mean_mae;
  if (report.eps_mae) doc["eps_mae"] = *report.eps_mae;
  if (report.mean_max_excess) doc["mean_max_excess"] = *report.mean_max_excess;
  if (report.feasibility_rate) doc["feasibility_rate"] = *report.feasibility_rate;
  doc["per_game_mae"] = report.per_game_mae;
  return doc;
}

void write_json(const json& doc, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << doc.dump(2) << '\n';
}

void write_sweep_csv(const SweepResult& sweep, const std::string& axis,
                     bool least_core, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  const int n = least_core ? sweep.truth.cols - 1 : sweep.truth.cols;
  out << axis;
  for (int i = 1; i <= n; ++i) out << ",p" << i;
  if (least_core) out << ",eps";
  if (sweep.predictions) {
    for (int i = 1; i <= n; ++i) out << ",p" << i << "_hat";
    if (least_core) out << ",eps_hat";
  }
  out << '\n';
  for (int r = 0; r < sweep.truth.rows; ++r) {
    out << format_g17(sweep.grid[static_cast<std::size_t>(r)]);
    for (int c = 0; c < sweep.truth.cols; ++c) {
      out << ',' << format_g17(sweep.truth(r, c));
    }
    if (sweep.predictions) {
      for (int c = 0; c < sweep.predictions->cols; ++c) {
        out << ',' << format_g17((*sweep.predictions)(r, c));
      }
    }
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// solve
// ---------------------------------------------------------------------------

struct SolveArgs {
  std::string weights_csv;
  std::string game_file;
  double quota = 0.0;
  std::string concept_label;
  std::string method = "auto";
  bool normalized = false;
  std::string formulation = "minimal";
  bool canonical = false;
  int permutations = 1000;
  int resamples = 10;
  std::optional<std::uint64_t> seed;
  int cap = kEnumerationCap;
  int threads = 0;
  std::string out_dir = "out";
};

int run_solve(const SolveArgs& args) {
  WeightedVotingGame game =
      args.game_file.empty()
          ? WeightedVotingGame(parse_weight_list(args.weights_csv), args.quota)
          : load_game_json(args.game_file);

  const Concept solution_concept = parse_concept(args.concept_label);
  std::string method = args.method;
  if (method == "auto") {
    method = solution_concept == Concept::LeastCore ? "lp" : "exact";
  }
  if ((solution_concept == Concept::LeastCore) != (method == "lp")) {
    throw InvalidGameError("method '" + method + "' does not solve " +
                           args.concept_label);
  }

  std::uint64_t seed = 0;
  SolutionVector solution;
  if (method == "exact") {
    solution = solution_concept == Concept::Shapley
                   ? shapley_exact(game, args.cap)
                   : banzhaf_exact(game, args.normalized, args.cap);
  } else if (method == "mc") {
    seed = ensure_seed(args.seed);
    const McConfig cfg{args.permutations, args.resamples, seed, args.threads};
    solution = solution_concept == Concept::Shapley
                   ? shapley_mc(game, cfg).solution
                   : banzhaf_mc(game, cfg, args.normalized).solution;
  } else if (method == "lp") {
    LeastCoreOptions options;
    options.formulation = args.formulation == "naive" ? LcFormulation::Naive
                                                      : LcFormulation::Minimal;
    options.canonical = args.canonical;
    options.cap = args.cap;
    solution = least_core(game, options);
  } else {
    throw InvalidGameError("unknown method '" + method + "'");
  }

  print_solution(args.concept_label, solution);

  Manifest manifest("solve", seed);
  manifest.config()["weights"] = game.weights();
  manifest.config()["quota"] = game.quota();
  manifest.config()["concept"] = args.concept_label;
  manifest.config()["method"] = method;
  manifest.config()["normalized"] = args.normalized;
  manifest.config()["formulation"] = args.formulation;
  manifest.config()["canonical"] = args.canonical;

  json record = solution_to_json(solution);
  record["concept"] = args.concept_label;
  record["method"] = method;
  record["weights"] = game.weights();
  record["quota"] = game.quota();
  if (method == "mc") {
    record["seed"] = seed;
    record["permutations"] = args.permutations;
    record["resamples"] = args.resamples;
  }
  if (solution_concept == Concept::Banzhaf) record["normalized"] = args.normalized;
  const fs::path path =
      versioned_path(args.out_dir, "solve-" + args.concept_label, ".json");
  write_json(record, path);
  manifest.add_output(path);
  std::cout << "wrote " << path.string() << '\n';
  manifest.write(args.out_dir, "solve-" + args.concept_label);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// gen
// ---------------------------------------------------------------------------

struct GenArgs {
  std::string concept_label;
  std::string n_text;
  int games = 5000;
  std::string layout = "auto";
  int max_players = 20;
  std::string dist = "train";
  std::optional<std::uint64_t> seed;
  bool canonical = false;
  int cap = kEnumerationCap;
  int mc_permutations = 1000;
  int mc_resamples = 10;
  int threads = 0;
  std::string out_dir = "out";
  std::string name;
};

int run_gen(const GenArgs& args) {
  const Concept solution_concept = parse_concept(args.concept_label);
  const std::vector<int> n_list = parse_int_list(args.n_text);
  std::string layout = args.layout;
  if (layout == "auto") layout = n_list.size() > 1 ? "variable" : "fixed";
  const std::uint64_t seed = ensure_seed(args.seed);

  LabelOptions options;
  options.cap = args.cap;
  options.canonical_lc = args.canonical;
  options.mc_permutations = args.mc_permutations;
  options.mc_resamples = args.mc_resamples;
  options.threads = args.threads;

  GameDataset ds;
  if (layout == "fixed") {
    if (n_list.size() != 1) {
      throw InvalidGameError("fixed layout expects a single n");
    }
    ds = make_fixed_dataset(n_list[0], args.games, solution_concept,
                            resolve_distribution(args.dist, n_list[0]), seed,
                            options);
    ds.meta.distribution = args.dist;
  } else {
    ds = make_variable_dataset(n_list, args.games, args.max_players, solution_concept,
                               args.dist, seed, options);
  }

  std::string stem = args.name;
  if (stem.empty()) {
    stem = args.concept_label + "-" + layout + "-n" + args.n_text + "-" +
           args.dist + "-s" + std::to_string(seed);
  }
  const fs::path path = versioned_path(args.out_dir, stem, ".csv");
  save_dataset(ds, path);
  std::cout << "wrote " << path.string() << " (" << ds.features.rows
            << " rows, " << ds.meta.regenerated_rows << " regenerated)\n";

  Manifest manifest("gen", seed);
  manifest.config()["concept"] = args.concept_label;
  manifest.config()["n"] = n_list;
  manifest.config()["games"] = args.games;
  manifest.config()["layout"] = layout;
  manifest.config()["max_players"] = args.max_players;
  manifest.config()["dist"] = args.dist;
  manifest.config()["canonical"] = args.canonical;
  manifest.add_output(path);
  manifest.write(args.out_dir, stem);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// train
// ---------------------------------------------------------------------------

struct TrainArgs {
  std::string data_file;
  std::string hidden = "128,128,128";
  double dropout = 0.1;
  double learning_rate = 1e-4;
  double weight_decay = 0.0;
  int batch = 128;
  int epochs = 0;  // 0 = layout default (6000 fixed, 15000 variable)
  int baseline = 500;
  int patience = 75;
  double train_fraction = 0.7;
  int runs = 1;
  std::optional<std::uint64_t> seed;
  int threads = 0;
  int log_every = 0;
  std::string out_dir = "out";
  std::string name;
};

int run_train(const TrainArgs& args) {
  const GameDataset ds = load_dataset(args.data_file);
  const std::uint64_t seed = ensure_seed(args.seed);

  MlpArchitecture arch =
      architecture_for(ds, parse_int_list(args.hidden), args.dropout);

  TrainConfig cfg;
  cfg.max_epochs = args.epochs > 0
                       ? args.epochs
                       : (ds.meta.layout == Layout::Fixed ? 6000 : 15000);
  cfg.baseline_epochs = args.baseline;
  cfg.patience = args.patience;
  cfg.train_fraction = args.train_fraction;
  cfg.learning_rate = args.learning_rate;
  cfg.weight_decay = args.weight_decay;
  cfg.batch_size = args.batch;
  cfg.runs = args.runs;
  cfg.seed = seed;
  cfg.threads = args.threads;
  cfg.log_every = args.log_every;

  const TrainResult result = train(ds, arch, cfg);
  std::printf("best validation loss %.6g after %d epochs (run %d)\n",
              result.model.meta.best_val_loss, result.model.meta.epochs_run,
              result.model.meta.run_index);

  std::string stem = args.name;
  if (stem.empty()) {
    stem = "model-" + result.model.meta.concept_label + "-" +
           result.model.meta.layout + "-s" + std::to_string(seed);
  }
  const fs::path model_path = versioned_path(args.out_dir, stem, ".json");
  save_model(result.model, model_path);
  std::cout << "wrote " << model_path.string() << '\n';

  const fs::path curve_path = versioned_path(args.out_dir, stem + "-curve", ".csv");
  {
    std::ofstream out(curve_path, std::ios::binary);
    out << "epoch,train_loss,val_loss\n";
    for (std::size_t e = 0; e < result.curve.train_loss.size(); ++e) {
      out << (e + 1) << ',' << format_g17(result.curve.train_loss[e]) << ','
          << format_g17(result.curve.val_loss[e]) << '\n';
    }
  }

  Manifest manifest("train", seed);
  manifest.config()["data"] = args.data_file;
  manifest.config()["hidden"] = args.hidden;
  manifest.config()["dropout"] = args.dropout;
  manifest.config()["learning_rate"] = args.learning_rate;
  manifest.config()["batch"] = args.batch;
  manifest.config()["max_epochs"] = cfg.max_epochs;
  manifest.config()["runs"] = args.runs;
  manifest.add_output(model_path);
  manifest.add_output(curve_path);
  manifest.write(args.out_dir, stem);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

struct EvalArgs {
  std::string model_file;
  std::string dist = "in-sample";
  int n = 0;
  int games = 1000;
  std::optional<std::uint64_t> seed;
  int cap = kEnumerationCap;
  int threads = 0;
  std::string out_dir = "out";
};

int run_eval(const EvalArgs& args) {
  const PayoffModel model = load_model(args.model_file);
  EvalConfig cfg;
  cfg.distribution = args.dist;
  cfg.games = args.games;
  cfg.seed = ensure_seed(args.seed);
  cfg.cap = args.cap;
  cfg.threads = args.threads;

  const EvalReport report = evaluate_model(model, args.n, cfg);
  std::printf("%s n=%d dist=%s games=%d: mean MAE %.5f", report.concept_label.c_str(),
              report.n, report.distribution.c_str(), args.games, report.mean_mae);
  if (report.eps_mae) std::printf(", eps MAE %.5f", *report.eps_mae);
  if (report.mean_max_excess) {
    std::printf(", mean max excess %.5f", *report.mean_max_excess);
  }
  if (report.feasibility_rate) {
    std::printf(", feasible %.1f%%", 100.0 * *report.feasibility_rate);
  }
  std::printf("\n");

  const std::string stem = "eval-" + report.concept_label + "-n" +
                           std::to_string(args.n) + "-" + args.dist;
  const fs::path path = versioned_path(args.out_dir, stem, ".json");
  json doc = report_to_json(report);
  doc["model"] = args.model_file;
  write_json(doc, path);
  std::cout << "wrote " << path.string() << '\n';

  Manifest manifest("eval", cfg.seed);
  manifest.config()["model"] = args.model_file;
  manifest.config()["dist"] = args.dist;
  manifest.config()["n"] = args.n;
  manifest.config()["games"] = args.games;
  manifest.add_output(path);
  manifest.write(args.out_dir, stem);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

struct SweepArgs {
  std::string mode = "quota";
  std::string weights_csv;
  double quota = 0.0;
  int player = 0;
  std::string concept_label = "shapley";
  double step = 0.0;  // 0 = mode default
  std::string model_file;
  int cap = kEnumerationCap;
  std::string out_dir = "out";
};

int run_sweep(const SweepArgs& args) {
  const Concept solution_concept = parse_concept(args.concept_label);
  const std::vector<double> weights = parse_weight_list(args.weights_csv);

  std::optional<PayoffModel> model;
  if (!args.model_file.empty()) model = load_model(args.model_file);

  SweepResult sweep;
  std::string axis;
  if (args.mode == "quota") {
    const double step = args.step > 0.0 ? args.step : 0.1;
    sweep = quota_sweep(weights, solution_concept, step, model ? &*model : nullptr,
                        args.cap);
    axis = "quota";
  } else if (args.mode == "weight") {
    const double step = args.step > 0.0 ? args.step : 1.0;
    const WeightedVotingGame game(weights, args.quota);
    sweep = weight_sweep(game, args.player, solution_concept, step,
                         model ? &*model : nullptr, args.cap);
    axis = "weight";
  } else {
    throw InvalidGameError("unknown sweep mode '" + args.mode + "'");
  }

  std::printf("%zu grid points, %zu transitions\n", sweep.grid.size(),
              sweep.transitions.size());

  const std::string stem = "sweep-" + args.mode + "-" + args.concept_label;
  const fs::path csv_path = versioned_path(args.out_dir, stem, ".csv");
  write_sweep_csv(sweep, axis, solution_concept == Concept::LeastCore, csv_path);

  json summary;
  summary["mode"] = args.mode;
  summary["concept"] = args.concept_label;
  summary["weights"] = weights;
  if (args.mode == "weight") {
    summary["quota"] = args.quota;
    summary["player"] = args.player;
  }
  summary["grid_points"] = sweep.grid.size();
  summary["transitions"] = sweep.transitions;
  const fs::path json_path = versioned_path(args.out_dir, stem, ".json");
  write_json(summary, json_path);
  std::cout << "wrote " << csv_path.string() << " and " << json_path.string()
            << '\n';

  Manifest manifest("sweep", 0);
  manifest.config() = summary;
  manifest.add_output(csv_path);
  manifest.add_output(json_path);
  manifest.write(args.out_dir, stem);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// xai
// ---------------------------------------------------------------------------

struct XaiArgs {
  std::string stage = "all";
  std::string csv_file;
  std::string schema_file;
  std::string target;
  std::string task = "regression";
  int max_depth = 6;
  int trees = 1;
  int background = 32;
  int permutations = 20;
  int resamples = 2;
  std::string fractions;  // empty = 20 log-spaced points in [0.005, 0.5]
  int epochs = 100;
  std::string hidden = "128,128,128";
  double dropout = 0.1;
  double learning_rate = 1e-4;
  double speedup_fraction = 0.1;
  std::optional<std::uint64_t> seed;
  int threads = 0;
  std::string out_dir = "out";
};

std::vector<double> default_fraction_grid() {
  std::vector<double> fractions;
  const double lo = std::log(0.005);
  const double hi = std::log(0.5);
  for (int i = 0; i < 20; ++i) {
    fractions.push_back(std::exp(lo + (hi - lo) * i / 19.0));
  }
  return fractions;
}

int run_xai(const XaiArgs& args) {
  IngestConfig ingest_cfg;
  if (!args.schema_file.empty()) {
    std::ifstream in(args.schema_file, std::ios::binary);
    if (!in) throw IoError("cannot open schema '" + args.schema_file + "'");
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded()) throw IoError("malformed schema file");
    ingest_cfg.target = doc.at("target").get<std::string>();
    if (doc.contains("task")) {
      ingest_cfg.task = parse_task(doc.at("task").get<std::string>());
    }
    if (doc.contains("columns")) {
      for (const auto& [name, kind] : doc.at("columns").items()) {
        ingest_cfg.column_kinds[name] = kind.get<std::string>() == "categorical"
                                            ? ColumnKind::Categorical
                                            : ColumnKind::Numeric;
      }
    }
  } else {
    ingest_cfg.target = args.target;
    ingest_cfg.task = parse_task(args.task);
  }
  if (ingest_cfg.target.empty()) {
    throw InvalidGameError("xai needs --target or a schema file");
  }

  const std::uint64_t seed = ensure_seed(args.seed);
  const TabularDataset ds = ingest(args.csv_file, ingest_cfg);
  std::printf("ingested %d rows x %d features\n", ds.x.rows, ds.x.cols);

  TreeFitConfig tree_cfg;
  tree_cfg.task = ingest_cfg.task;
  tree_cfg.max_depth = args.max_depth;
  tree_cfg.trees = args.trees;
  tree_cfg.holdout_fraction = 0.25;
  tree_cfg.seed = seed;
  TargetFitReport fit_report;
  const auto model = fit_target_model(ds, tree_cfg, &fit_report);
  std::printf("target model: %d train rows, %d holdout rows, %s %.4g / %.4g\n",
              fit_report.train_rows, fit_report.holdout_rows,
              ingest_cfg.task == Task::Classification ? "accuracy" : "mse",
              fit_report.train_score, fit_report.holdout_score);

  Manifest manifest("xai", seed);
  manifest.config()["stage"] = args.stage;
  manifest.config()["csv"] = args.csv_file;
  manifest.config()["target"] = ingest_cfg.target;
  manifest.config()["task"] = task_name(ingest_cfg.task);
  manifest.config()["background"] = args.background;
  manifest.config()["permutations"] = args.permutations;
  manifest.config()["resamples"] = args.resamples;

  const fs::path prep_path = versioned_path(args.out_dir, "preprocessing", ".json");
  save_preprocessing(ds, prep_path);
  manifest.add_output(prep_path);

  const McConfig mc{args.permutations, args.resamples, seed, args.threads};
  const fs::path phi_path = fs::path(args.out_dir) / "attributions.csv";
  fs::create_directories(args.out_dir);
  const AttributionDataset attributions =
      build_attribution_dataset(ds, *model, args.background, mc, phi_path);
  std::printf("attributions: %d rows (%d resumed), base value %.6g\n",
              attributions.phi.rows, attributions.resumed_rows,
              attributions.base);
  manifest.add_output(phi_path);

  MlpArchitecture arch = distillation_architecture(ds.x.cols);
  arch.hidden = parse_int_list(args.hidden);
  arch.dropout = args.dropout;
  TrainConfig train_cfg;
  train_cfg.max_epochs = args.epochs;
  train_cfg.early_stopping = false;  // fixed-epoch distillation
  train_cfg.learning_rate = args.learning_rate;
  train_cfg.seed = seed;
  train_cfg.threads = args.threads;

  if (args.stage == "sweep" || args.stage == "all") {
    const std::vector<double> fractions =
        args.fractions.empty()
            ? default_fraction_grid()
            : [&] {
                std::vector<double> f;
                for (const auto& part : parse_weight_list(args.fractions)) {
                  f.push_back(part);
                }
                return f;
              }();
    const auto curve =
        fraction_sweep(ds.x, attributions.phi, fractions, arch, train_cfg);
    json doc = json::array();
    for (const auto& point : curve) {
      doc.push_back({{"fraction", point.fraction},
                     {"train_rows", point.train_rows},
                     {"rmse", point.rmse}});
      std::printf("fraction %.4f (%d rows): RMSE %.6g\n", point.fraction,
                  point.train_rows, point.rmse);
    }
    const fs::path path = versioned_path(args.out_dir, "fraction-sweep", ".json");
    write_json(doc, path);
    manifest.add_output(path);
  }

  if (args.stage == "speedup" || args.stage == "all") {
    const int rows = ds.x.rows;
    const int train_rows = std::max(
        1, static_cast<int>(std::lround(args.speedup_fraction * rows)));

    Matrix x_train(train_rows, ds.x.cols);
    Matrix y_train(train_rows, attributions.phi.cols);
    for (int r = 0; r < train_rows; ++r) {
      std::copy(ds.x.row(r).begin(), ds.x.row(r).end(), x_train.row(r).begin());
      std::copy(attributions.phi.row(r).begin(), attributions.phi.row(r).end(),
                y_train.row(r).begin());
    }
    const auto t0 = std::chrono::steady_clock::now();
    const TrainResult distilled = train(x_train, y_train, arch, train_cfg);
    const double train_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();

    const auto t1 = std::chrono::steady_clock::now();
    double mse_sum = 0.0;
    std::int64_t count = 0;
    for (int r = train_rows; r < rows; ++r) {
      const auto pred = forward(distilled.model, ds.x.row(r));
      for (int c = 0; c < attributions.phi.cols; ++c) {
        const double d = pred[static_cast<std::size_t>(c)] - attributions.phi(r, c);
        mse_sum += d * d;
        ++count;
      }
    }
    const double predict_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t1)
            .count();

    SpeedupTimings timings;
    timings.label_seconds_per_row = attributions.row_seconds;
    timings.train_seconds = train_seconds;
    timings.predict_seconds = predict_seconds;
    timings.distilled_mse = count > 0 ? mse_sum / static_cast<double>(count) : 0.0;
    const SpeedupReport report = speedup_report(timings, args.speedup_fraction);

    std::printf("speedup %.2fx (label all %.2fs vs pipeline %.2fs), "
                "distilled MSE %.6g\n",
                report.speedup, report.label_all_seconds,
                report.pipeline_seconds, report.distilled_mse);
    json doc;
    doc["fraction"] = report.fraction;
    doc["label_all_seconds"] = report.label_all_seconds;
    doc["label_fraction_seconds"] = report.label_fraction_seconds;
    doc["train_seconds"] = train_seconds;
    doc["predict_seconds"] = predict_seconds;
    doc["pipeline_seconds"] = report.pipeline_seconds;
    doc["speedup"] = report.speedup;
    doc["distilled_mse"] = report.distilled_mse;
    const fs::path path = versioned_path(args.out_dir, "speedup", ".json");
    write_json(doc, path);
    manifest.add_output(path);
  }

  manifest.write(args.out_dir, "xai-" + args.stage);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// case-eu
// ---------------------------------------------------------------------------

struct CaseEuArgs {
  std::string models_dir;
  std::optional<std::uint64_t> seed;
  int cap = kEnumerationCap;
  std::string out_dir = "out";
};

int run_case_eu(const CaseEuArgs& args) {
  std::vector<PayoffModel> loaded;
  for (const auto& entry : fs::directory_iterator(args.models_dir)) {
    if (entry.path().extension() != ".json") continue;
    try {
      loaded.push_back(load_model(entry.path()));
      std::cout << "loaded " << entry.path().filename().string() << " ("
                << loaded.back().meta.concept_label << ", "
                << loaded.back().meta.layout << ")\n";
    } catch (const IoError&) {
      // Not a model file; skip.
    }
  }

  EuModels models;
  for (const PayoffModel& model : loaded) {
    const bool fixed4 = model.meta.layout == "fixed" && model.arch.input_dim == 4;
    const bool variable = model.meta.layout == "variable";
    if (!fixed4 && !variable) continue;
    if (model.meta.concept_label == "shapley") {
      (fixed4 ? models.fixed_shapley : models.variable_shapley) = &model;
    } else if (model.meta.concept_label == "banzhaf") {
      (fixed4 ? models.fixed_banzhaf : models.variable_banzhaf) = &model;
    } else if (model.meta.concept_label == "leastcore") {
      (fixed4 ? models.fixed_leastcore : models.variable_leastcore) = &model;
    }
  }

  const std::uint64_t seed = ensure_seed(args.seed);
  const EuCaseReport report = eu_case_study(models, seed, args.cap);

  json doc = json::array();
  for (const auto& entry : report.entries) {
    std::printf("%s %s (%s truth): mean MAE %.5f", entry.scope.c_str(),
                entry.concept_label.c_str(), entry.truth_solver.c_str(),
                entry.mean_mae);
    if (entry.lcv_abs_error) std::printf(", lcv error %.5f", *entry.lcv_abs_error);
    std::printf("\n");

    json e;
    e["concept"] = entry.concept_label;
    e["scope"] = entry.scope;
    e["truth_solver"] = entry.truth_solver;
    e["truth"] = entry.truth;
    e["prediction"] = entry.prediction;
    e["mean_mae"] = entry.mean_mae;
    if (entry.truth_lcv) e["truth_lcv"] = *entry.truth_lcv;
    if (entry.prediction_lcv) e["prediction_lcv"] = *entry.prediction_lcv;
    if (entry.lcv_abs_error) e["lcv_abs_error"] = *entry.lcv_abs_error;
    if (entry.scope == "eu20") e["members"] = eu_council_members20();
    doc.push_back(std::move(e));
  }
  const fs::path path = versioned_path(args.out_dir, "case-eu", ".json");
  write_json(doc, path);
  std::cout << "wrote " << path.string() << '\n';

  Manifest manifest("case-eu", seed);
  manifest.config()["models_dir"] = args.models_dir;
  manifest.add_output(path);
  manifest.write(args.out_dir, "case-eu");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cooperative game solvers and neural payoff prediction"};
  app.require_subcommand(1);

  SolveArgs solve_args;
  auto* solve = app.add_subcommand("solve", "Solve one game for a solution concept");
  solve->add_option("--weights", solve_args.weights_csv, "Comma-separated weights");
  solve->add_option("--quota", solve_args.quota, "Quota");
  solve->add_option("--game", solve_args.game_file, "Game JSON file");
  solve->add_option("--concept", solve_args.concept_label,
                    "shapley | banzhaf | leastcore")->required();
  solve->add_option("--method", solve_args.method, "exact | mc | lp (default auto)");
  solve->add_flag("--normalized", solve_args.normalized, "Normalize Banzhaf indices");
  solve->add_option("--formulation", solve_args.formulation, "minimal | naive");
  solve->add_flag("--canonical", solve_args.canonical,
                  "Canonical least-core representative");
  solve->add_option("--permutations", solve_args.permutations, "MC permutations");
  solve->add_option("--resamples", solve_args.resamples, "MC resamples");
  solve->add_option("--seed", solve_args.seed, "RNG seed");
  solve->add_option("--cap", solve_args.cap, "Enumeration cap");
  solve->add_option("--threads", solve_args.threads, "Worker threads");
  solve->add_option("--out", solve_args.out_dir, "Output directory");

  GenArgs gen_args;
  auto* gen = app.add_subcommand("gen", "Generate a solved game dataset");
  gen->add_option("--concept", gen_args.concept_label, "Solution concept")->required();
  gen->add_option("--n", gen_args.n_text, "Players: single n, list, or lo:hi")->required();
  gen->add_option("--games", gen_args.games, "Games (per n for variable layouts)");
  gen->add_option("--layout", gen_args.layout, "fixed | variable (default auto)");
  gen->add_option("--max-players", gen_args.max_players, "Padding width M");
  gen->add_option("--dist", gen_args.dist,
                  "train | in-sample | out-of-sample | slight-ood | moderate-ood | "
                  "significant-ood");
  gen->add_option("--seed", gen_args.seed, "RNG seed");
  gen->add_flag("--canonical", gen_args.canonical, "Canonical least-core labels");
  gen->add_option("--cap", gen_args.cap, "Enumeration cap");
  gen->add_option("--mc-permutations", gen_args.mc_permutations,
                  "MC label permutations above the cap");
  gen->add_option("--mc-resamples", gen_args.mc_resamples, "MC label resamples");
  gen->add_option("--threads", gen_args.threads, "Worker threads");
  gen->add_option("--out", gen_args.out_dir, "Output directory");
  gen->add_option("--name", gen_args.name, "Artifact stem");

  TrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "Train a payoff model on a dataset");
  train_cmd->add_option("--data", train_args.data_file, "Dataset file")->required();
  train_cmd->add_option("--hidden", train_args.hidden, "Hidden sizes");
  train_cmd->add_option("--dropout", train_args.dropout, "Dropout rate");
  train_cmd->add_option("--lr", train_args.learning_rate, "Adam learning rate");
  train_cmd->add_option("--weight-decay", train_args.weight_decay, "L2 coefficient");
  train_cmd->add_option("--batch", train_args.batch, "Mini-batch size (0 = full)");
  train_cmd->add_option("--epochs", train_args.epochs, "Max epochs (0 = default)");
  train_cmd->add_option("--baseline", train_args.baseline, "Early-stop baseline");
  train_cmd->add_option("--patience", train_args.patience, "Early-stop patience");
  train_cmd->add_option("--train-frac", train_args.train_fraction, "Train fraction");
  train_cmd->add_option("--runs", train_args.runs, "Independent runs (best-of)");
  train_cmd->add_option("--seed", train_args.seed, "RNG seed");
  train_cmd->add_option("--threads", train_args.threads, "Worker threads");
  train_cmd->add_option("--log-every", train_args.log_every, "Progress interval");
  train_cmd->add_option("--out", train_args.out_dir, "Output directory");
  train_cmd->add_option("--name", train_args.name, "Artifact stem");

  EvalArgs eval_args;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a model on a test distribution");
  eval_cmd->add_option("--model", eval_args.model_file, "Model file")->required();
  eval_cmd->add_option("--dist", eval_args.dist, "Test distribution");
  eval_cmd->add_option("--n", eval_args.n, "Players per test game")->required();
  eval_cmd->add_option("--games", eval_args.games, "Test games");
  eval_cmd->add_option("--seed", eval_args.seed, "RNG seed");
  eval_cmd->add_option("--cap", eval_args.cap, "Enumeration cap");
  eval_cmd->add_option("--threads", eval_args.threads, "Worker threads");
  eval_cmd->add_option("--out", eval_args.out_dir, "Output directory");

  SweepArgs sweep_args;
  auto* sweep = app.add_subcommand("sweep", "Quota or weight perturbation sweep");
  sweep->add_option("--mode", sweep_args.mode, "quota | weight");
  sweep->add_option("--weights", sweep_args.weights_csv, "Comma-separated weights")
      ->required();
  sweep->add_option("--quota", sweep_args.quota, "Quota (weight mode)");
  sweep->add_option("--player", sweep_args.player, "Swept player (weight mode)");
  sweep->add_option("--concept", sweep_args.concept_label, "Solution concept");
  sweep->add_option("--step", sweep_args.step, "Grid step");
  sweep->add_option("--model", sweep_args.model_file, "Model for predictions");
  sweep->add_option("--cap", sweep_args.cap, "Enumeration cap");
  sweep->add_option("--out", sweep_args.out_dir, "Output directory");

  XaiArgs xai_args;
  auto* xai = app.add_subcommand("xai", "Feature-importance pipeline");
  xai->add_option("--stage", xai_args.stage, "attribute | sweep | speedup | all");
  xai->add_option("--csv", xai_args.csv_file, "Tabular CSV input")->required();
  xai->add_option("--schema", xai_args.schema_file, "Schema JSON");
  xai->add_option("--target", xai_args.target, "Target column");
  xai->add_option("--task", xai_args.task, "regression | classification");
  xai->add_option("--max-depth", xai_args.max_depth, "Tree depth");
  xai->add_option("--trees", xai_args.trees, "Ensemble size");
  xai->add_option("--background", xai_args.background, "Background rows");
  xai->add_option("--permutations", xai_args.permutations, "Sampling permutations");
  xai->add_option("--resamples", xai_args.resamples, "Sampling resamples");
  xai->add_option("--fractions", xai_args.fractions, "Sweep fractions");
  xai->add_option("--epochs", xai_args.epochs, "Distillation epochs");
  xai->add_option("--hidden", xai_args.hidden, "Distillation hidden sizes");
  xai->add_option("--dropout", xai_args.dropout, "Distillation dropout");
  xai->add_option("--lr", xai_args.learning_rate, "Distillation learning rate");
  xai->add_option("--speedup-fraction", xai_args.speedup_fraction,
                  "Fraction for the speedup report");
  xai->add_option("--seed", xai_args.seed, "RNG seed");
  xai->add_option("--threads", xai_args.threads, "Worker threads");
  xai->add_option("--out", xai_args.out_dir, "Output directory");

  CaseEuArgs case_args;
  auto* case_eu = app.add_subcommand("case-eu", "EU Council voting case study");
  case_eu->add_option("--models", case_args.models_dir, "Model directory")->required();
  case_eu->add_option("--seed", case_args.seed, "RNG seed");
  case_eu->add_option("--cap", case_args.cap, "Enumeration cap");
  case_eu->add_option("--out", case_args.out_dir, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitArgs;
  }

  try {
    if (*solve) return run_solve(solve_args);
    if (*gen) return run_gen(gen_args);
    if (*train_cmd) return run_train(train_args);
    if (*eval_cmd) return run_eval(eval_args);
    if (*sweep) return run_sweep(sweep_args);
    if (*xai) return run_xai(xai_args);
    if (*case_eu) return run_case_eu(case_args);
  } catch (const InvalidGameError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitArgs;
  } catch (const DimensionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitArgs;
  } catch (const CapacityError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitArgs;
  } catch (const EnumerationLimitError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitSolver;
  } catch (const SolverError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitSolver;
  } catch (const TrainingError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitSolver;
  } catch (const GenerationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitSolver;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitArgs;
}
