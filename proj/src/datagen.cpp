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

#include <algorithm>
#include <atomic>
#include <fstream>
#include <numeric>

#include "json.hpp"

namespace coopsolve {

namespace {

using nlohmann::json;

void validate_distribution(const WeightDistribution& d) {
  if (!(d.alpha > 0.0) || !(d.beta > 0.0)) {
    throw GenerationError("beta shape parameters must be positive");
  }
  if (!(d.width > 0.0)) throw GenerationError("distribution width must be positive");
  if (!(d.location >= 0.0)) throw GenerationError("distribution location must be >= 0");
}

std::uint64_t row_label_seed(std::uint64_t seed, int row, int attempt) {
  std::uint64_t sm = seed ^ 0xa5a5a5a5a5a5a5a5ULL;
  splitmix64(sm);
  sm ^= static_cast<std::uint64_t>(row) * 0x9e3779b97f4a7c15ULL;
  splitmix64(sm);
  sm ^= static_cast<std::uint64_t>(attempt) + 1;
  return splitmix64(sm);
}

struct RowSample {
  WeightedVotingGame game;
  SolutionVector solution;
};

SolutionVector solve_labels(const WeightedVotingGame& game, Concept solution_concept,
                            const LabelOptions& options, std::uint64_t mc_seed,
                            std::string* solver_used) {
  const int n = game.num_players();
  const McConfig mc{options.mc_permutations, options.mc_resamples, mc_seed, 1};
  switch (solution_concept) {
    case Concept::Shapley:
      if (n <= options.cap) {
        *solver_used = "exact";
        return shapley_exact(game, options.cap);
      }
      *solver_used = "mc";
      return shapley_mc(game, mc).solution;
    case Concept::Banzhaf:
      if (n <= options.cap) {
        *solver_used = "exact";
        return banzhaf_exact(game, true, options.cap);
      }
      *solver_used = "mc";
      return banzhaf_mc(game, mc, true).solution;
    case Concept::LeastCore: {
      *solver_used = "lp";
      LeastCoreOptions lc;
      lc.canonical = options.canonical_lc;
      lc.cap = options.cap;
      return least_core(game, lc);
    }
  }
  throw InvalidGameError("unknown concept");
}

// Samples and solves one row, retrying (from the same stream) when the label
// solver fails so the dataset stays the configured size.
RowSample generate_row(int n, const WeightDistribution& dist, Concept solution_concept,
                       std::uint64_t seed, int row, const LabelOptions& options,
                       std::string* solver_used, std::atomic<int>* regenerated,
                       Rng* rng_out) {
  Rng rng = Rng::substream(seed, {static_cast<std::uint64_t>(row)});
  for (int attempt = 0; attempt < 100; ++attempt) {
    WeightedVotingGame game = sample_wvg(n, dist, rng);
    try {
      SolutionVector sol = solve_labels(game, solution_concept, options,
                                        row_label_seed(seed, row, attempt),
                                        solver_used);
      if (rng_out != nullptr) *rng_out = rng;
      return {std::move(game), std::move(sol)};
    } catch (const SolverError&) {
      if (regenerated != nullptr) regenerated->fetch_add(1);
    }
  }
  throw GenerationError("row " + std::to_string(row) +
                        ": label solver failed on 100 consecutive games");
}

json distribution_json(const DatasetMeta& meta) {
  json d;
  d["name"] = meta.distribution;
  if (meta.layout == Layout::Fixed) {
    d["alpha"] = meta.dist.alpha;
    d["beta"] = meta.dist.beta;
    d["location"] = meta.dist.location;
    d["width"] = meta.dist.width;
  }
  return d;
}

}  // namespace

WeightDistribution default_train_distribution(int n) {
  return {1.0, 1.0, 1.0, 2.0 * n - 1.0};
}

WeightDistribution test_distribution(const std::string& name, int n) {
  const double dn = static_cast<double>(n);
  WeightDistribution d;
  d.width = 2.0 * dn;
  if (name == "in-sample") {
    d.alpha = 1.0;
    d.beta = 1.0;
    d.location = 1.0;
  } else if (name == "out-of-sample") {
    d.alpha = 1.0;
    d.beta = 1.0;
    d.location = 2.5 * dn;
  } else if (name == "slight-ood") {
    d.alpha = 8.0;
    d.beta = 12.0;
    d.location = 2.0;
  } else if (name == "moderate-ood") {
    d.alpha = 7.0;
    d.beta = 1.5;
    d.location = 1.5 * dn;
  } else if (name == "significant-ood") {
    d.alpha = 12.0;
    d.beta = 8.0;
    d.location = 3.0 * dn;
  } else {
    throw GenerationError("unknown test distribution '" + name + "'");
  }
  return d;
}

WeightDistribution resolve_distribution(const std::string& name, int n) {
  if (name == "train") return default_train_distribution(n);
  return test_distribution(name, n);
}

WeightedVotingGame sample_wvg(int n, const WeightDistribution& dist, Rng& rng) {
  if (n < 2) throw GenerationError("sample_wvg requires n >= 2");
  validate_distribution(dist);

  std::vector<double> weights(static_cast<std::size_t>(n));
  double total = 0.0;
  for (double& w : weights) {
    w = dist.location + dist.width * rng.beta(dist.alpha, dist.beta);
    total += w;
  }
  const double mu = 0.25 * (2.0 * n + 1.0) * n;
  const double sigma = std::sqrt(2.0 * n);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const double quota = rng.normal(mu, sigma);
    if (quota > 0.0 && quota <= total) {
      return WeightedVotingGame(std::move(weights), quota);
    }
  }
  throw GenerationError("quota resampling exceeded 1000 attempts (total weight " +
                        format_g17(total) + ")");
}

std::string concept_name(Concept c) {
  switch (c) {
    case Concept::Shapley: return "shapley";
    case Concept::Banzhaf: return "banzhaf";
    case Concept::LeastCore: return "leastcore";
  }
  return "unknown";
}

Concept parse_concept(const std::string& name) {
  if (name == "shapley") return Concept::Shapley;
  if (name == "banzhaf") return Concept::Banzhaf;
  if (name == "leastcore") return Concept::LeastCore;
  throw InvalidGameError("unknown concept '" + name + "'");
}

std::string layout_name(Layout l) {
  return l == Layout::Fixed ? "fixed" : "variable";
}

Layout parse_layout(const std::string& name) {
  if (name == "fixed") return Layout::Fixed;
  if (name == "variable") return Layout::Variable;
  throw InvalidGameError("unknown layout '" + name + "'");
}

GameDataset make_fixed_dataset(int n, int games, Concept solution_concept,
                               const WeightDistribution& dist, std::uint64_t seed,
                               const LabelOptions& options) {
  if (games < 1) throw GenerationError("dataset needs at least one game");
  const int label_dim = solution_concept == Concept::LeastCore ? n + 1 : n;

  GameDataset ds;
  ds.features = Matrix(games, n);
  ds.labels = Matrix(games, label_dim);

  std::atomic<int> regenerated{0};
  parallel_for(
      games,
      [&](std::int64_t begin, std::int64_t end) {
        std::string solver_used;
        for (std::int64_t row = begin; row < end; ++row) {
          const RowSample sample =
              generate_row(n, dist, solution_concept, seed, static_cast<int>(row), options,
                           &solver_used, &regenerated, nullptr);
          const auto x = normalize_weights(sample.game);
          auto feat = ds.features.row(static_cast<int>(row));
          std::copy(x.begin(), x.end(), feat.begin());
          auto label = ds.labels.row(static_cast<int>(row));
          std::copy(sample.solution.payoffs.begin(), sample.solution.payoffs.end(),
                    label.begin());
          if (solution_concept == Concept::LeastCore) {
            label[static_cast<std::size_t>(n)] = *sample.solution.lcv;
          }
        }
      },
      options.threads);

  ds.meta.solution_concept = solution_concept;
  ds.meta.layout = Layout::Fixed;
  ds.meta.n_values = {n};
  ds.meta.max_players = n;
  ds.meta.seed = seed;
  ds.meta.distribution = "custom";
  ds.meta.dist = dist;
  ds.meta.solver = solution_concept == Concept::LeastCore ? "lp"
                   : (n <= options.cap ? "exact" : "mc");
  ds.meta.canonical_lc = options.canonical_lc;
  ds.meta.mc_permutations = options.mc_permutations;
  ds.meta.mc_resamples = options.mc_resamples;
  ds.meta.regenerated_rows = regenerated.load();
  return ds;
}

GameDataset make_variable_dataset(const std::vector<int>& n_list, int games_per_n,
                                  int max_players, Concept solution_concept,
                                  const std::string& dist_name, std::uint64_t seed,
                                  const LabelOptions& options) {
  if (n_list.empty() || games_per_n < 1) {
    throw GenerationError("variable dataset needs players and games per n");
  }
  for (int n : n_list) {
    if (n > max_players) {
      throw GenerationError("n=" + std::to_string(n) + " exceeds max players " +
                            std::to_string(max_players));
    }
  }
  const int rows = static_cast<int>(n_list.size()) * games_per_n;
  const int label_dim =
      solution_concept == Concept::LeastCore ? max_players + 1 : max_players;

  GameDataset ds;
  ds.features = Matrix(rows, max_players);
  ds.labels = Matrix(rows, label_dim);

  std::atomic<int> regenerated{0};
  parallel_for(
      rows,
      [&](std::int64_t begin, std::int64_t end) {
        std::string solver_used;
        std::vector<int> position(static_cast<std::size_t>(max_players));
        for (std::int64_t row = begin; row < end; ++row) {
          const int n = n_list[static_cast<std::size_t>(row) /
                               static_cast<std::size_t>(games_per_n)];
          const WeightDistribution dist = resolve_distribution(dist_name, n);
          Rng rng(0);
          const RowSample sample =
              generate_row(n, dist, solution_concept, seed, static_cast<int>(row), options,
                           &solver_used, &regenerated, &rng);
          // Real players land at random positions; padded entries stay zero.
          std::iota(position.begin(), position.end(), 0);
          rng.shuffle(position);
          const auto x = normalize_weights(sample.game);
          auto feat = ds.features.row(static_cast<int>(row));
          auto label = ds.labels.row(static_cast<int>(row));
          for (int i = 0; i < n; ++i) {
            feat[static_cast<std::size_t>(position[static_cast<std::size_t>(i)])] =
                x[static_cast<std::size_t>(i)];
            label[static_cast<std::size_t>(position[static_cast<std::size_t>(i)])] =
                sample.solution.payoffs[static_cast<std::size_t>(i)];
          }
          if (solution_concept == Concept::LeastCore) {
            label[static_cast<std::size_t>(max_players)] = *sample.solution.lcv;
          }
        }
      },
      options.threads);

  ds.meta.solution_concept = solution_concept;
  ds.meta.layout = Layout::Variable;
  ds.meta.n_values = n_list;
  ds.meta.max_players = max_players;
  ds.meta.seed = seed;
  ds.meta.distribution = dist_name;
  const bool all_exact = *std::max_element(n_list.begin(), n_list.end()) <= options.cap;
  ds.meta.solver = solution_concept == Concept::LeastCore ? "lp" : (all_exact ? "exact" : "mc");
  ds.meta.canonical_lc = options.canonical_lc;
  ds.meta.mc_permutations = options.mc_permutations;
  ds.meta.mc_resamples = options.mc_resamples;
  ds.meta.regenerated_rows = regenerated.load();
  return ds;
}

WeightedVotingGame regenerate_row_game(const DatasetMeta& meta, int row,
                                       const LabelOptions& options) {
  if (meta.layout != Layout::Fixed) {
    throw InvalidGameError(
        "regenerate_row_game supports fixed layouts only; variable rows are "
        "position-shuffled");
  }
  const int n = meta.n_values.at(0);
  const WeightDistribution& dist = meta.dist;
  std::string solver_used;
  LabelOptions opts = options;
  opts.canonical_lc = meta.canonical_lc;
  const RowSample sample = generate_row(n, dist, meta.solution_concept, meta.seed, row, opts,
                                        &solver_used, nullptr, nullptr);
  return sample.game;
}

void save_dataset(const GameDataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");

  json header;
  header["version"] = 1;
  header["concept"] = concept_name(ds.meta.solution_concept);
  header["layout"] = layout_name(ds.meta.layout);
  header["n_values"] = ds.meta.n_values;
  header["max_players"] = ds.meta.max_players;
  header["rows"] = ds.features.rows;
  header["feature_dim"] = ds.features.cols;
  header["label_dim"] = ds.labels.cols;
  header["seed"] = ds.meta.seed;
  header["distribution"] = distribution_json(ds.meta);
  header["solver"] = ds.meta.solver;
  header["canonical_lc"] = ds.meta.canonical_lc;
  header["banzhaf_normalized"] = ds.meta.banzhaf_normalized;
  header["mc_permutations"] = ds.meta.mc_permutations;
  header["mc_resamples"] = ds.meta.mc_resamples;
  header["regenerated_rows"] = ds.meta.regenerated_rows;
  out << header.dump() << '\n';

  std::string line;
  for (int r = 0; r < ds.features.rows; ++r) {
    line.clear();
    for (int c = 0; c < ds.features.cols; ++c) {
      if (c > 0) line += ',';
      line += format_g17(ds.features(r, c));
    }
    for (int c = 0; c < ds.labels.cols; ++c) {
      line += ',';
      line += format_g17(ds.labels(r, c));
    }
    line += '\n';
    out << line;
  }
  if (!out) throw IoError("failed while writing '" + path.string() + "'");
}

GameDataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty dataset file");

  json header = json::parse(line, nullptr, false);
  if (header.is_discarded()) throw IoError("malformed dataset header");

  GameDataset ds;
  ds.meta.solution_concept = parse_concept(header.at("concept").get<std::string>());
  ds.meta.layout = parse_layout(header.at("layout").get<std::string>());
  ds.meta.n_values = header.at("n_values").get<std::vector<int>>();
  ds.meta.max_players = header.at("max_players").get<int>();
  ds.meta.seed = header.at("seed").get<std::uint64_t>();
  const json& dist = header.at("distribution");
  ds.meta.distribution = dist.at("name").get<std::string>();
  if (dist.contains("alpha")) {
    ds.meta.dist.alpha = dist.at("alpha").get<double>();
    ds.meta.dist.beta = dist.at("beta").get<double>();
    ds.meta.dist.location = dist.at("location").get<double>();
    ds.meta.dist.width = dist.at("width").get<double>();
  }
  ds.meta.solver = header.at("solver").get<std::string>();
  ds.meta.canonical_lc = header.at("canonical_lc").get<bool>();
  ds.meta.banzhaf_normalized = header.at("banzhaf_normalized").get<bool>();
  ds.meta.mc_permutations = header.at("mc_permutations").get<int>();
  ds.meta.mc_resamples = header.at("mc_resamples").get<int>();
  ds.meta.regenerated_rows = header.at("regenerated_rows").get<int>();

  const int rows = header.at("rows").get<int>();
  const int feature_dim = header.at("feature_dim").get<int>();
  const int label_dim = header.at("label_dim").get<int>();
  ds.features = Matrix(rows, feature_dim);
  ds.labels = Matrix(rows, label_dim);

  for (int r = 0; r < rows; ++r) {
    if (!std::getline(in, line)) {
      throw IoError("dataset truncated at row " + std::to_string(r));
    }
    std::size_t start = 0;
    for (int c = 0; c < feature_dim + label_dim; ++c) {
      std::size_t comma = line.find(',', start);
      if (comma == std::string::npos) comma = line.size();
      if (start >= line.size() && c < feature_dim + label_dim) {
        throw IoError("dataset row " + std::to_string(r) + " has too few columns");
      }
      const double v = parse_double(std::string_view(line).substr(start, comma - start));
      if (c < feature_dim) {
        ds.features(r, c) = v;
      } else {
        ds.labels(r, c - feature_dim) = v;
      }
      start = comma + 1;
    }
  }
  return ds;
}

}  // namespace coopsolve
