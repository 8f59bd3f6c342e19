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

#include "coopsolve/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace coopsolve {

namespace {

SolutionVector ground_truth(const WeightedVotingGame& game,
                            Concept solution_concept, const EvalConfig& cfg,
                            std::uint64_t mc_seed, std::string* solver = nullptr) {
  const int n = game.num_players();
  switch (solution_concept) {
    case Concept::Shapley:
      if (n <= cfg.cap) {
        if (solver != nullptr) *solver = "exact";
        return shapley_exact(game, cfg.cap);
      }
      if (solver != nullptr) *solver = "mc";
      return shapley_mc(game, {cfg.mc_permutations, cfg.mc_resamples, mc_seed, 1})
          .solution;
    case Concept::Banzhaf:
      if (n <= cfg.cap) {
        if (solver != nullptr) *solver = "exact";
        return banzhaf_exact(game, true, cfg.cap);
      }
      if (solver != nullptr) *solver = "mc";
      return banzhaf_mc(game, {cfg.mc_permutations, cfg.mc_resamples, mc_seed, 1},
                        true)
          .solution;
    case Concept::LeastCore: {
      if (solver != nullptr) *solver = "lp";
      LeastCoreOptions options;
      options.cap = cfg.cap;
      return least_core(game, options);
    }
  }
  throw InvalidGameError("unknown concept");
}

// Winning-coalition fingerprint for structural transition detection.
std::vector<std::uint64_t> winning_fingerprint(const WeightedVotingGame& game,
                                               int cap) {
  std::vector<std::uint64_t> out;
  for (const Coalition& c : winning_coalitions(game, cap).coalitions) {
    out.push_back(c.bits());
  }
  return out;
}

SweepResult run_sweep(const std::vector<WeightedVotingGame>& games,
                      std::vector<double> grid, Concept solution_concept,
                      const PayoffModel* model, int cap) {
  const int n = games.front().num_players();
  const bool lc = solution_concept == Concept::LeastCore;
  const int cols = lc ? n + 1 : n;
  const int points = static_cast<int>(games.size());

  SweepResult result;
  result.grid = std::move(grid);
  result.truth = Matrix(points, cols);
  if (model != nullptr) {
    result.predictions = Matrix(points, cols);
    result.abs_error = Matrix(points, cols);
  }

  EvalConfig cfg;
  cfg.cap = cap;
  std::vector<std::uint64_t> prev_fingerprint;
  for (int i = 0; i < points; ++i) {
    const auto& game = games[static_cast<std::size_t>(i)];
    const SolutionVector truth =
        ground_truth(game, solution_concept, cfg, 0x5eedULL + i);
    for (int c = 0; c < n; ++c) {
      result.truth(i, c) = truth.payoffs[static_cast<std::size_t>(c)];
    }
    if (lc) result.truth(i, n) = *truth.lcv;

    if (model != nullptr) {
      const Layout layout = parse_layout(model->meta.layout);
      const SolutionVector pred = predict_payoffs(*model, game, layout);
      for (int c = 0; c < n; ++c) {
        (*result.predictions)(i, c) = pred.payoffs[static_cast<std::size_t>(c)];
        (*result.abs_error)(i, c) =
            std::abs(pred.payoffs[static_cast<std::size_t>(c)] -
                     result.truth(i, c));
      }
      if (lc) {
        const double eps_hat = pred.lcv.value_or(0.0);
        (*result.predictions)(i, n) = eps_hat;
        (*result.abs_error)(i, n) = std::abs(eps_hat - result.truth(i, n));
      }
    }

    auto fingerprint = winning_fingerprint(game, cap);
    if (i > 0 && fingerprint != prev_fingerprint) result.transitions.push_back(i);
    prev_fingerprint = std::move(fingerprint);
  }
  return result;
}

void append_entry(EuCaseReport* report, const std::string& concept_label,
                  const std::string& scope, const std::string& solver,
                  const SolutionVector& truth, const SolutionVector& pred) {
  EuCaseEntry entry;
  entry.concept_label = concept_label;
  entry.scope = scope;
  entry.truth_solver = solver;
  entry.truth = truth.payoffs;
  entry.truth_lcv = truth.lcv;
  entry.prediction = pred.payoffs;
  entry.prediction_lcv = pred.lcv;
  entry.mean_mae = mae(truth.payoffs, pred.payoffs);
  if (truth.lcv && pred.lcv) {
    entry.lcv_abs_error = std::abs(*truth.lcv - *pred.lcv);
  }
  report->entries.push_back(std::move(entry));
}

}  // namespace

double mae(std::span<const double> p, std::span<const double> p_hat) {
  if (p.size() != p_hat.size()) {
    throw DimensionError("mae: vector lengths differ");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) sum += std::abs(p[i] - p_hat[i]);
  return sum / static_cast<double>(p.size());
}

EvalReport evaluate_predictor(const Predictor& predict, Concept solution_concept,
                              int n, const EvalConfig& cfg) {
  if (cfg.games < 1) throw DimensionError("evaluate: needs at least one game");
  const WeightDistribution dist = resolve_distribution(cfg.distribution, n);
  const bool lc = solution_concept == Concept::LeastCore;

  EvalReport report;
  report.concept_label = concept_name(solution_concept);
  report.distribution = cfg.distribution;
  report.n = n;
  report.seed = cfg.seed;
  report.per_game_mae.assign(static_cast<std::size_t>(cfg.games), 0.0);

  std::vector<double> eps_err(lc ? cfg.games : 0, 0.0);
  std::vector<double> excess(lc ? cfg.games : 0, 0.0);
  std::vector<char> feasible(lc ? cfg.games : 0, 0);

  parallel_for(
      cfg.games,
      [&](std::int64_t begin, std::int64_t end) {
        for (std::int64_t g = begin; g < end; ++g) {
          Rng rng = Rng::substream(cfg.seed, {0xe7a1ULL, static_cast<std::uint64_t>(g)});
          const WeightedVotingGame game = sample_wvg(n, dist, rng);
          const SolutionVector truth =
              ground_truth(game, solution_concept, cfg,
                           Rng::substream(cfg.seed, {0x6cULL,
                                                     static_cast<std::uint64_t>(g)})
                               .next_u64());
          const SolutionVector pred = predict(game);
          report.per_game_mae[static_cast<std::size_t>(g)] =
              mae(truth.payoffs, pred.payoffs);
          if (lc) {
            const double eps_hat = pred.lcv.value_or(0.0);
            eps_err[static_cast<std::size_t>(g)] = std::abs(*truth.lcv - eps_hat);
            excess[static_cast<std::size_t>(g)] =
                max_excess(game, pred.payoffs, cfg.cap);
            feasible[static_cast<std::size_t>(g)] =
                check_feasibility(game, pred.payoffs, eps_hat, cfg.cap,
                                  cfg.feasibility_tol)
                    .feasible
                    ? 1
                    : 0;
          }
        }
      },
      cfg.threads);

  report.mean_mae =
      std::accumulate(report.per_game_mae.begin(), report.per_game_mae.end(), 0.0) /
      cfg.games;
  if (lc) {
    report.eps_mae =
        std::accumulate(eps_err.begin(), eps_err.end(), 0.0) / cfg.games;
    report.mean_max_excess =
        std::accumulate(excess.begin(), excess.end(), 0.0) / cfg.games;
    report.feasibility_rate =
        std::accumulate(feasible.begin(), feasible.end(), 0.0) / cfg.games;
  }
  return report;
}

EvalReport evaluate_model(const PayoffModel& model, int n, const EvalConfig& cfg) {
  const Concept solution_concept = parse_concept(model.meta.concept_label);
  const Layout layout = parse_layout(model.meta.layout);
  return evaluate_predictor(
      [&](const WeightedVotingGame& game) {
        return predict_payoffs(model, game, layout);
      },
      solution_concept, n, cfg);
}

SweepResult quota_sweep(const std::vector<double>& weights,
                        Concept solution_concept, double step,
                        const PayoffModel* model, int cap) {
  if (step <= 0.0) throw DimensionError("quota_sweep: step must be positive");
  const double lo = *std::min_element(weights.begin(), weights.end());
  const double hi = std::accumulate(weights.begin(), weights.end(), 0.0);

  std::vector<double> grid;
  for (double q = lo; q < hi - 1e-12; q += step) grid.push_back(q);
  grid.push_back(hi);

  std::vector<WeightedVotingGame> games;
  games.reserve(grid.size());
  for (double q : grid) games.emplace_back(weights, q);
  return run_sweep(games, std::move(grid), solution_concept, model, cap);
}

SweepResult weight_sweep(const WeightedVotingGame& game, int player,
                         Concept solution_concept, double step,
                         const PayoffModel* model, int cap) {
  if (step <= 0.0) throw DimensionError("weight_sweep: step must be positive");
  if (player < 0 || player >= game.num_players()) {
    throw DimensionError("weight_sweep: player index out of range");
  }

  std::vector<double> grid;
  std::vector<WeightedVotingGame> games;
  double w = game.weights()[static_cast<std::size_t>(player)];
  for (;;) {
    grid.push_back(w);
    std::vector<double> weights = game.weights();
    weights[static_cast<std::size_t>(player)] = w;
    games.emplace_back(weights, game.quota());
    if (w > game.quota()) break;
    w += step;
  }
  return run_sweep(games, std::move(grid), solution_concept, model, cap);
}

WeightedVotingGame eu_council_game4() {
  return WeightedVotingGame({12, 13, 27, 7}, 30.5);
}

const std::vector<std::string>& eu_council_members20() {
  static const std::vector<std::string> members{
      "Germany",  "France",   "UK",       "Italy",    "Spain",
      "Poland",   "Romania",  "Netherlands", "Greece", "Portugal",
      "Belgium",  "Czech Rep.", "Hungary", "Sweden",  "Austria",
      "Bulgaria", "Denmark",  "Slovakia", "Finland",  "Ireland"};
  return members;
}

WeightedVotingGame eu_council_game20() {
  const std::vector<double> weights{29, 29, 29, 29, 27, 27, 14, 13, 12, 12,
                                    12, 12, 12, 10, 10, 10, 7,  7,  7,  7};
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  return WeightedVotingGame(weights, total / 2.0 + 1.0);
}

EuCaseReport eu_case_study(const EuModels& models, std::uint64_t seed, int cap) {
  const bool any_fixed = models.fixed_shapley != nullptr ||
                         models.fixed_banzhaf != nullptr ||
                         models.fixed_leastcore != nullptr;
  const bool any_variable = models.variable_shapley != nullptr ||
                            models.variable_banzhaf != nullptr ||
                            models.variable_leastcore != nullptr;
  if (!any_fixed && !any_variable) {
    throw InvalidGameError("eu_case_study: no models supplied");
  }

  EuCaseReport report;
  const WeightedVotingGame four = eu_council_game4();
  if (models.fixed_shapley != nullptr) {
    append_entry(&report, "shapley", "eu4", "exact", shapley_exact(four, cap),
                 predict_payoffs(*models.fixed_shapley, four, Layout::Fixed));
  }
  if (models.fixed_banzhaf != nullptr) {
    append_entry(&report, "banzhaf", "eu4", "exact", banzhaf_exact(four, true, cap),
                 predict_payoffs(*models.fixed_banzhaf, four, Layout::Fixed));
  }
  if (models.fixed_leastcore != nullptr) {
    LeastCoreOptions options;
    options.cap = cap;
    append_entry(&report, "leastcore", "eu4", "lp", least_core(four, options),
                 predict_payoffs(*models.fixed_leastcore, four, Layout::Fixed));
  }

  const WeightedVotingGame council = eu_council_game20();
  if (models.variable_shapley != nullptr) {
    // Council-scale Shapley ground truth follows the Monte-Carlo policy.
    const auto truth = shapley_mc(council, {1000, 10, seed, 0});
    append_entry(&report, "shapley", "eu20", "mc", truth.solution,
                 predict_payoffs(*models.variable_shapley, council,
                                 Layout::Variable));
  }
  if (models.variable_banzhaf != nullptr) {
    append_entry(&report, "banzhaf", "eu20", "exact",
                 banzhaf_exact(council, true, cap),
                 predict_payoffs(*models.variable_banzhaf, council,
                                 Layout::Variable));
  }
  if (models.variable_leastcore != nullptr) {
    LeastCoreOptions options;
    options.cap = cap;
    append_entry(&report, "leastcore", "eu20", "lp", least_core(council, options),
                 predict_payoffs(*models.variable_leastcore, council,
                                 Layout::Variable));
  }
  return report;
}

}  // namespace coopsolve
