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

#include "coopsolve/xai.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "json.hpp"

namespace coopsolve {

namespace {

using nlohmann::json;

bool is_missing(const std::string& field) {
  if (field.empty()) return true;
  static const char* kMarkers[] = {"NA", "N/A", "NaN", "nan", "null", "?"};
  for (const char* m : kMarkers) {
    if (field == m) return true;
  }
  return false;
}

bool parse_number(const std::string& field, double* out) {
  const char* begin = field.data();
  const char* end = begin + field.size();
  const auto res = std::from_chars(begin, end, *out);
  return res.ec == std::errc() && res.ptr == end;
}

// Quote-aware CSV field splitter ("" escapes a quote inside a quoted field).
std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        current += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(std::move(current));
      current.clear();
    } else if (ch != '\r') {
      current += ch;
    }
  }
  fields.push_back(std::move(current));
  return fields;
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() && in.eof()) break;
    rows.push_back(split_csv_line(line));
  }
  if (rows.empty()) throw IoError("'" + path.string() + "' has no header row");
  const std::size_t width = rows.front().size();
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != width) {
      throw IoError(path.string() + ": line " + std::to_string(r + 1) + " has " +
                    std::to_string(rows[r].size()) + " fields, expected " +
                    std::to_string(width));
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------
// CART
// ---------------------------------------------------------------------------

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  double value = 0.0;
  int left = -1;
  int right = -1;
};

class DecisionTree : public TargetModel {
 public:
  DecisionTree(const Matrix& x, std::span<const double> y,
               std::span<const int> rows, const TreeFitConfig& cfg) {
    std::vector<int> indices(rows.begin(), rows.end());
    build(x, y, indices, cfg, 0);
  }

  double predict(std::span<const double> x) const override {
    int node = 0;
    while (nodes_[static_cast<std::size_t>(node)].feature >= 0) {
      const TreeNode& n = nodes_[static_cast<std::size_t>(node)];
      node = x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left
                                                                   : n.right;
    }
    return nodes_[static_cast<std::size_t>(node)].value;
  }

 private:
  // Returns the node index. Split criterion: sum of squared errors for
  // regression; for binary classification targets the Gini impurity, which
  // shares the same prefix-sum machinery.
  int build(const Matrix& x, std::span<const double> y, std::vector<int>& rows,
            const TreeFitConfig& cfg, int depth) {
    const int node_index = static_cast<int>(nodes_.size());
    nodes_.emplace_back();

    double sum = 0.0;
    for (int r : rows) sum += y[static_cast<std::size_t>(r)];
    const double mean = sum / static_cast<double>(rows.size());
    nodes_[static_cast<std::size_t>(node_index)].value = mean;

    if (depth >= cfg.max_depth ||
        static_cast<int>(rows.size()) < 2 * cfg.min_leaf) {
      return node_index;
    }

    int best_feature = -1;
    double best_threshold = 0.0;
    double best_score = std::numeric_limits<double>::infinity();
    std::vector<int> sorted = rows;
    for (int f = 0; f < x.cols; ++f) {
      std::sort(sorted.begin(), sorted.end(), [&](int a, int b) {
        const double xa = x(a, f);
        const double xb = x(b, f);
        return xa != xb ? xa < xb : a < b;
      });
      double left_sum = 0.0;
      double left_sq = 0.0;
      double total_sq = 0.0;
      for (int r : sorted) {
        const double v = y[static_cast<std::size_t>(r)];
        total_sq += v * v;
      }
      const int count = static_cast<int>(sorted.size());
      for (int i = 0; i + 1 < count; ++i) {
        const double v = y[static_cast<std::size_t>(sorted[static_cast<std::size_t>(i)])];
        left_sum += v;
        left_sq += v * v;
        const double xl = x(sorted[static_cast<std::size_t>(i)], f);
        const double xr = x(sorted[static_cast<std::size_t>(i + 1)], f);
        if (xl == xr) continue;
        const int nl = i + 1;
        const int nr = count - nl;
        if (nl < cfg.min_leaf || nr < cfg.min_leaf) continue;
        double score;
        if (cfg.task == Task::Classification) {
          const double pl = left_sum / nl;
          const double pr = (sum - left_sum) / nr;
          score = nl * pl * (1.0 - pl) + nr * pr * (1.0 - pr);  // weighted Gini/2
        } else {
          const double sse_l = left_sq - left_sum * left_sum / nl;
          const double sse_r = (total_sq - left_sq) -
                               (sum - left_sum) * (sum - left_sum) / nr;
          score = sse_l + sse_r;
        }
        if (score < best_score - 1e-12) {
          best_score = score;
          best_feature = f;
          best_threshold = 0.5 * (xl + xr);
        }
      }
    }
    if (best_feature < 0) return node_index;

    // No-gain guard: a pure node never splits.
    double sse = 0.0;
    for (int r : rows) {
      const double d = y[static_cast<std::size_t>(r)] - mean;
      sse += d * d;
    }
    if (sse <= 1e-12) return node_index;

    std::vector<int> left;
    std::vector<int> right;
    for (int r : rows) {
      (x(r, best_feature) <= best_threshold ? left : right).push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();

    const int left_index = build(x, y, left, cfg, depth + 1);
    const int right_index = build(x, y, right, cfg, depth + 1);
    nodes_[static_cast<std::size_t>(node_index)].feature = best_feature;
    nodes_[static_cast<std::size_t>(node_index)].threshold = best_threshold;
    nodes_[static_cast<std::size_t>(node_index)].left = left_index;
    nodes_[static_cast<std::size_t>(node_index)].right = right_index;
    return node_index;
  }

  std::vector<TreeNode> nodes_;
};

class TreeEnsemble : public TargetModel {
 public:
  explicit TreeEnsemble(std::vector<std::unique_ptr<DecisionTree>> trees)
      : trees_(std::move(trees)) {}

  double predict(std::span<const double> x) const override {
    double sum = 0.0;
    for (const auto& tree : trees_) sum += tree->predict(x);
    return sum / static_cast<double>(trees_.size());
  }

 private:
  std::vector<std::unique_ptr<DecisionTree>> trees_;
};

}  // namespace

std::string task_name(Task t) {
  return t == Task::Regression ? "regression" : "classification";
}

Task parse_task(const std::string& name) {
  if (name == "regression") return Task::Regression;
  if (name == "classification") return Task::Classification;
  throw IoError("unknown task '" + name + "'");
}

TabularDataset ingest(const std::filesystem::path& csv, const IngestConfig& cfg) {
  const auto rows = read_csv(csv);
  const auto& header = rows.front();
  const int raw_rows = static_cast<int>(rows.size()) - 1;
  if (raw_rows < 1) throw IoError("'" + csv.string() + "' holds only a header");

  int target_col = -1;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == cfg.target) target_col = static_cast<int>(c);
  }
  if (target_col < 0) {
    throw IoError("target column '" + cfg.target + "' not found");
  }

  TabularDataset ds;
  ds.target_name = cfg.target;
  ds.task = cfg.task;

  std::vector<int> feature_cols;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (static_cast<int>(c) == target_col) continue;
    feature_cols.push_back(static_cast<int>(c));
    ColumnSchema schema;
    schema.name = header[c];
    const auto it = cfg.column_kinds.find(header[c]);
    if (it != cfg.column_kinds.end()) {
      schema.kind = it->second;
    } else {
      schema.kind = ColumnKind::Numeric;
      for (int r = 1; r <= raw_rows; ++r) {
        const auto& field = rows[static_cast<std::size_t>(r)][c];
        double unused;
        if (!is_missing(field) && !parse_number(field, &unused)) {
          schema.kind = ColumnKind::Categorical;
          break;
        }
      }
    }
    ds.schema.push_back(std::move(schema));
  }

  const int features = static_cast<int>(feature_cols.size());
  ds.x = Matrix(raw_rows, features);
  ds.encodings.resize(static_cast<std::size_t>(features));
  ds.mean.assign(static_cast<std::size_t>(features), 0.0);
  ds.stddev.assign(static_cast<std::size_t>(features), 1.0);

  for (int f = 0; f < features; ++f) {
    const int c = feature_cols[static_cast<std::size_t>(f)];
    if (ds.schema[static_cast<std::size_t>(f)].kind == ColumnKind::Numeric) {
      double sum = 0.0;
      double sq = 0.0;
      int present = 0;
      for (int r = 1; r <= raw_rows; ++r) {
        const auto& field = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
        if (is_missing(field)) continue;
        double v;
        if (!parse_number(field, &v)) {
          throw IoError(csv.string() + ": line " + std::to_string(r + 1) +
                        ": '" + field + "' is not numeric");
        }
        sum += v;
        sq += v * v;
        ++present;
      }
      double mean = 0.0;
      double std_dev = 1.0;
      if (present > 0) {
        mean = sum / present;
        const double var = std::max(0.0, sq / present - mean * mean);
        std_dev = std::sqrt(var);
      }
      ds.mean[static_cast<std::size_t>(f)] = mean;
      ds.stddev[static_cast<std::size_t>(f)] = std_dev;
      for (int r = 1; r <= raw_rows; ++r) {
        const auto& field = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
        double v;
        if (is_missing(field)) {
          ds.x(r - 1, f) = 0.0;  // missing encodes as zero
        } else {
          parse_number(field, &v);
          ds.x(r - 1, f) = std_dev > 0.0 ? (v - mean) / std_dev : 0.0;
        }
      }
    } else {
      auto& labels = ds.encodings[static_cast<std::size_t>(f)];
      for (int r = 1; r <= raw_rows; ++r) {
        const auto& field = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
        if (is_missing(field)) {
          ds.x(r - 1, f) = 0.0;
          continue;
        }
        const auto it = std::find(labels.begin(), labels.end(), field);
        int code;
        if (it == labels.end()) {
          code = static_cast<int>(labels.size());
          labels.push_back(field);
        } else {
          code = static_cast<int>(it - labels.begin());
        }
        ds.x(r - 1, f) = static_cast<double>(code);
      }
    }
  }

  ds.y.assign(static_cast<std::size_t>(raw_rows), 0.0);
  std::vector<std::string> target_labels;
  for (int r = 1; r <= raw_rows; ++r) {
    const auto& field =
        rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(target_col)];
    if (is_missing(field)) {
      throw IoError(csv.string() + ": line " + std::to_string(r + 1) +
                    ": missing target value");
    }
    double v;
    if (parse_number(field, &v)) {
      ds.y[static_cast<std::size_t>(r - 1)] = v;
    } else {
      const auto it = std::find(target_labels.begin(), target_labels.end(), field);
      int code;
      if (it == target_labels.end()) {
        code = static_cast<int>(target_labels.size());
        target_labels.push_back(field);
      } else {
        code = static_cast<int>(it - target_labels.begin());
      }
      ds.y[static_cast<std::size_t>(r - 1)] = static_cast<double>(code);
    }
  }
  if (cfg.task == Task::Classification) {
    for (double v : ds.y) {
      if (v != 0.0 && v != 1.0) {
        throw IoError("classification target must be binary (0/1)");
      }
    }
  }
  return ds;
}

void save_preprocessing(const TabularDataset& ds,
                        const std::filesystem::path& path) {
  json doc;
  doc["version"] = 1;
  doc["target"] = ds.target_name;
  doc["task"] = task_name(ds.task);
  json columns = json::array();
  for (std::size_t f = 0; f < ds.schema.size(); ++f) {
    json col;
    col["name"] = ds.schema[f].name;
    col["kind"] =
        ds.schema[f].kind == ColumnKind::Numeric ? "numeric" : "categorical";
    col["mean"] = ds.mean[f];
    col["stddev"] = ds.stddev[f];
    col["categories"] = ds.encodings[f];
    columns.push_back(std::move(col));
  }
  doc["columns"] = columns;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << doc.dump(2) << '\n';
}

TabularDataset reapply_preprocessing(const std::filesystem::path& preprocessing,
                                     const std::filesystem::path& csv) {
  std::ifstream in(preprocessing, std::ios::binary);
  if (!in) throw IoError("cannot open '" + preprocessing.string() + "'");
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw IoError("malformed preprocessing file");

  const auto rows = read_csv(csv);
  const auto& header = rows.front();
  const int raw_rows = static_cast<int>(rows.size()) - 1;

  TabularDataset ds;
  ds.target_name = doc.at("target").get<std::string>();
  ds.task = parse_task(doc.at("task").get<std::string>());

  int target_col = -1;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == ds.target_name) target_col = static_cast<int>(c);
  }

  const json& columns = doc.at("columns");
  const int features = static_cast<int>(columns.size());
  ds.x = Matrix(raw_rows, features);
  for (int f = 0; f < features; ++f) {
    const json& col = columns[static_cast<std::size_t>(f)];
    ColumnSchema schema;
    schema.name = col.at("name").get<std::string>();
    schema.kind = col.at("kind").get<std::string>() == "numeric"
                      ? ColumnKind::Numeric
                      : ColumnKind::Categorical;
    ds.schema.push_back(schema);
    ds.mean.push_back(col.at("mean").get<double>());
    ds.stddev.push_back(col.at("stddev").get<double>());
    ds.encodings.push_back(col.at("categories").get<std::vector<std::string>>());

    int src = -1;
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (header[c] == schema.name) src = static_cast<int>(c);
    }
    if (src < 0) throw IoError("column '" + schema.name + "' missing from CSV");

    for (int r = 1; r <= raw_rows; ++r) {
      const auto& field =
          rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(src)];
      if (is_missing(field)) {
        ds.x(r - 1, f) = 0.0;
        continue;
      }
      if (schema.kind == ColumnKind::Numeric) {
        double v;
        if (!parse_number(field, &v)) {
          throw IoError(csv.string() + ": line " + std::to_string(r + 1) +
                        ": '" + field + "' is not numeric");
        }
        ds.x(r - 1, f) = ds.stddev[static_cast<std::size_t>(f)] > 0.0
                             ? (v - ds.mean[static_cast<std::size_t>(f)]) /
                                   ds.stddev[static_cast<std::size_t>(f)]
                             : 0.0;
      } else {
        const auto& labels = ds.encodings[static_cast<std::size_t>(f)];
        const auto it = std::find(labels.begin(), labels.end(), field);
        // Unseen categories coincide with the missing code.
        ds.x(r - 1, f) = it == labels.end()
                             ? 0.0
                             : static_cast<double>(it - labels.begin());
      }
    }
  }

  if (target_col >= 0) {
    ds.y.assign(static_cast<std::size_t>(raw_rows), 0.0);
    for (int r = 1; r <= raw_rows; ++r) {
      const auto& field =
          rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(target_col)];
      double v = 0.0;
      parse_number(field, &v);
      ds.y[static_cast<std::size_t>(r - 1)] = v;
    }
  }
  return ds;
}

namespace {

double fit_score(const TargetModel& model, const TabularDataset& ds,
                 std::span<const int> rows, Task task) {
  if (rows.empty()) return std::numeric_limits<double>::quiet_NaN();
  double accum = 0.0;
  for (int r : rows) {
    const double pred = model.predict(ds.x.row(r));
    const double truth = ds.y[static_cast<std::size_t>(r)];
    if (task == Task::Classification) {
      accum += (pred >= 0.5 ? 1.0 : 0.0) == truth ? 1.0 : 0.0;
    } else {
      accum += (pred - truth) * (pred - truth);
    }
  }
  return accum / static_cast<double>(rows.size());
}

}  // namespace

std::unique_ptr<TargetModel> fit_target_model(const TabularDataset& ds,
                                              const TreeFitConfig& cfg,
                                              TargetFitReport* report) {
  const int rows = ds.x.rows;
  if (rows < 2) throw InvalidGameError("fit_target_model needs at least 2 rows");
  if (cfg.trees < 1) throw InvalidGameError("fit_target_model needs trees >= 1");
  if (cfg.holdout_fraction < 0.0 || cfg.holdout_fraction >= 1.0) {
    throw InvalidGameError("holdout fraction must lie in [0, 1)");
  }

  std::vector<int> order(static_cast<std::size_t>(rows));
  std::iota(order.begin(), order.end(), 0);
  int train_rows = rows;
  if (cfg.holdout_fraction > 0.0) {
    Rng rng = Rng::substream(cfg.seed, {0x5147ULL});
    rng.shuffle(order);
    train_rows = std::max(2, rows - static_cast<int>(std::lround(
                                       cfg.holdout_fraction * rows)));
  }
  const std::span<const int> train(order.data(), static_cast<std::size_t>(train_rows));
  const std::span<const int> holdout(order.data() + train_rows,
                                     static_cast<std::size_t>(rows - train_rows));

  std::unique_ptr<TargetModel> model;
  if (cfg.trees == 1) {
    model = std::make_unique<DecisionTree>(ds.x, ds.y, train, cfg);
  } else {
    std::vector<std::unique_ptr<DecisionTree>> trees;
    for (int t = 0; t < cfg.trees; ++t) {
      Rng rng = Rng::substream(cfg.seed, {static_cast<std::uint64_t>(t), 0xF0});
      std::vector<int> sample(static_cast<std::size_t>(train_rows));
      for (int& idx : sample) {
        idx = train[rng.below(static_cast<std::uint64_t>(train_rows))];
      }
      trees.push_back(std::make_unique<DecisionTree>(ds.x, ds.y, sample, cfg));
    }
    model = std::make_unique<TreeEnsemble>(std::move(trees));
  }

  if (report != nullptr) {
    report->train_rows = train_rows;
    report->holdout_rows = rows - train_rows;
    report->train_score = fit_score(*model, ds, train, cfg.task);
    report->holdout_score = fit_score(*model, ds, holdout, cfg.task);
  }
  return model;
}

CharacteristicFn make_feature_game(const TargetModel& model,
                                   std::span<const double> x,
                                   const Matrix& background) {
  if (background.rows < 1 || background.cols != static_cast<int>(x.size())) {
    throw DimensionError("feature game needs a background matching the instance");
  }
  std::vector<double> instance(x.begin(), x.end());
  return [&model, instance, background](Coalition c) {
    std::vector<double> composite(instance.size());
    double sum = 0.0;
    for (int b = 0; b < background.rows; ++b) {
      const auto row = background.row(b);
      for (std::size_t j = 0; j < instance.size(); ++j) {
        composite[j] = c.contains(static_cast<int>(j)) ? instance[j] : row[j];
      }
      sum += model.predict(composite);
    }
    return sum / background.rows;
  };
}

Attribution attribute_instance(const TargetModel& model, std::span<const double> x,
                               const Matrix& background, const McConfig& cfg) {
  if (background.rows < 1) {
    throw InvalidGameError("attribute_instance needs a non-empty background");
  }
  if (background.cols != static_cast<int>(x.size())) {
    throw DimensionError("background width does not match the instance");
  }
  if (cfg.permutations < 1 || cfg.resamples < 1) {
    throw InvalidGameError("mc config requires P >= 1 and R >= 1");
  }

  const int features = static_cast<int>(x.size());
  const int b_rows = background.rows;
  double base = 0.0;
  for (int b = 0; b < b_rows; ++b) base += model.predict(background.row(b));
  base /= b_rows;

  std::vector<double> phi(static_cast<std::size_t>(features), 0.0);
  std::vector<int> order(static_cast<std::size_t>(features));
  std::vector<std::vector<double>> composite(static_cast<std::size_t>(b_rows));

  for (int r = 0; r < cfg.resamples; ++r) {
    Rng rng = Rng::substream(cfg.seed, {static_cast<std::uint64_t>(r), 0xA77});
    for (int p = 0; p < cfg.permutations; ++p) {
      std::iota(order.begin(), order.end(), 0);
      rng.shuffle(order);
      for (int b = 0; b < b_rows; ++b) {
        const auto row = background.row(b);
        composite[static_cast<std::size_t>(b)].assign(row.begin(), row.end());
      }
      double prev = base;
      for (int j : order) {
        double value = 0.0;
        for (int b = 0; b < b_rows; ++b) {
          composite[static_cast<std::size_t>(b)][static_cast<std::size_t>(j)] =
              x[static_cast<std::size_t>(j)];
          value += model.predict(composite[static_cast<std::size_t>(b)]);
        }
        value /= b_rows;
        phi[static_cast<std::size_t>(j)] += value - prev;
        prev = value;
      }
    }
  }
  const double samples = static_cast<double>(cfg.resamples) * cfg.permutations;
  for (double& p : phi) p /= samples;
  return {std::move(phi), base};
}

AttributionDataset build_attribution_dataset(
    const TabularDataset& ds, const TargetModel& model, int background_size,
    const McConfig& cfg, const std::optional<std::filesystem::path>& resume_file) {
  const int rows = ds.x.rows;
  const int features = ds.x.cols;
  if (background_size < 1) {
    throw InvalidGameError("background size must be at least 1");
  }

  // Background: uniform sample without replacement, fixed by the seed.
  const int b_rows = std::min(background_size, rows);
  std::vector<int> pick(static_cast<std::size_t>(rows));
  std::iota(pick.begin(), pick.end(), 0);
  Rng bg_rng = Rng::substream(cfg.seed, {0xB6ULL});
  bg_rng.shuffle(pick);
  Matrix background(b_rows, features);
  for (int b = 0; b < b_rows; ++b) {
    const auto src = ds.x.row(pick[static_cast<std::size_t>(b)]);
    std::copy(src.begin(), src.end(), background.row(b).begin());
  }

  AttributionDataset result;
  result.phi = Matrix(rows, features);
  result.row_seconds.assign(static_cast<std::size_t>(rows), 0.0);

  int start_row = 0;
  if (resume_file && std::filesystem::exists(*resume_file)) {
    std::ifstream in(*resume_file, std::ios::binary);
    std::string line;
    std::getline(in, line);  // header
    int r = 0;
    while (r < rows && std::getline(in, line) && !line.empty()) {
      std::size_t start = 0;
      for (int c = 0; c < features; ++c) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) comma = line.size();
        result.phi(r, c) =
            parse_double(std::string_view(line).substr(start, comma - start));
        start = comma + 1;
      }
      ++r;
    }
    start_row = r;
    result.resumed_rows = r;
  }

  std::ofstream out;
  if (resume_file) {
    const bool fresh = start_row == 0;
    out.open(*resume_file, fresh ? std::ios::binary
                                 : (std::ios::binary | std::ios::app));
    if (!out) throw IoError("cannot open '" + resume_file->string() + "'");
    if (fresh) {
      json header;
      header["rows"] = rows;
      header["features"] = features;
      header["seed"] = cfg.seed;
      header["permutations"] = cfg.permutations;
      header["resamples"] = cfg.resamples;
      header["background"] = b_rows;
      out << header.dump() << '\n';
    }
  }

  std::vector<double> instance(static_cast<std::size_t>(features));
  for (int r = start_row; r < rows; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto row = ds.x.row(r);
    std::copy(row.begin(), row.end(), instance.begin());
    McConfig row_cfg = cfg;
    row_cfg.seed = Rng::substream(cfg.seed, {0xF1ULL, static_cast<std::uint64_t>(r)})
                       .next_u64();
    const Attribution attribution =
        attribute_instance(model, instance, background, row_cfg);
    for (int c = 0; c < features; ++c) {
      result.phi(r, c) = attribution.phi[static_cast<std::size_t>(c)];
    }
    result.base = attribution.base;
    result.row_seconds[static_cast<std::size_t>(r)] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    if (out.is_open()) {
      std::string line;
      for (int c = 0; c < features; ++c) {
        if (c > 0) line += ',';
        line += format_g17(result.phi(r, c));
      }
      out << line << '\n';
      out.flush();
    }
  }
  if (result.base == 0.0 && rows > 0) {
    // All rows restored from file: recompute the base for the report.
    double base = 0.0;
    for (int b = 0; b < b_rows; ++b) base += model.predict(background.row(b));
    result.base = base / b_rows;
  }
  return result;
}

MlpArchitecture distillation_architecture(int features) {
  MlpArchitecture arch;
  arch.input_dim = features;
  arch.hidden = {128, 128, 128};
  arch.dropout = 0.1;
  arch.payoff_dim = features;
  arch.head = OutputHead::Linear;  // attributions are signed
  return arch;
}

std::vector<FractionPoint> fraction_sweep(const Matrix& x, const Matrix& phi,
                                          const std::vector<double>& fractions,
                                          const MlpArchitecture& arch,
                                          const TrainConfig& cfg) {
  if (x.rows != phi.rows) throw DimensionError("x and phi row counts differ");
  const int rows = x.rows;

  std::vector<int> order(static_cast<std::size_t>(rows));
  std::iota(order.begin(), order.end(), 0);
  Rng rng = Rng::substream(cfg.seed, {0x5F1ULL});
  rng.shuffle(order);

  std::vector<FractionPoint> curve;
  for (double fraction : fractions) {
    if (!(fraction > 0.0) || !(fraction < 1.0)) {
      throw DimensionError("fractions must lie in (0, 1)");
    }
    const int train_rows = static_cast<int>(std::lround(fraction * rows));
    if (train_rows < 1) {
      throw DimensionError("fraction " + format_g17(fraction) +
                           " yields no training rows");
    }
    if (train_rows >= rows) {
      throw DimensionError("fraction " + format_g17(fraction) +
                           " leaves no evaluation rows");
    }

    Matrix x_train(train_rows, x.cols);
    Matrix y_train(train_rows, phi.cols);
    for (int i = 0; i < train_rows; ++i) {
      const int src = order[static_cast<std::size_t>(i)];
      std::copy(x.row(src).begin(), x.row(src).end(), x_train.row(i).begin());
      std::copy(phi.row(src).begin(), phi.row(src).end(), y_train.row(i).begin());
    }
    const TrainResult trained = train(x_train, y_train, arch, cfg);

    double sq_sum = 0.0;
    std::int64_t count = 0;
    for (int i = train_rows; i < rows; ++i) {
      const int src = order[static_cast<std::size_t>(i)];
      const auto pred = forward(trained.model, x.row(src));
      for (int c = 0; c < phi.cols; ++c) {
        const double d = pred[static_cast<std::size_t>(c)] - phi(src, c);
        sq_sum += d * d;
        ++count;
      }
    }
    curve.push_back({fraction, train_rows,
                     std::sqrt(sq_sum / static_cast<double>(count))});
  }
  return curve;
}

SpeedupReport speedup_report(const SpeedupTimings& timings, double fraction) {
  if (timings.label_seconds_per_row.empty()) {
    throw DimensionError("speedup_report: no attribution timings recorded");
  }
  if (!(fraction > 0.0) || fraction > 1.0) {
    throw DimensionError("speedup_report: fraction must lie in (0, 1]");
  }
  const int rows = static_cast<int>(timings.label_seconds_per_row.size());
  const int labeled =
      std::max(1, static_cast<int>(std::lround(fraction * rows)));

  SpeedupReport report;
  report.fraction = fraction;
  report.label_all_seconds =
      std::accumulate(timings.label_seconds_per_row.begin(),
                      timings.label_seconds_per_row.end(), 0.0);
  report.label_fraction_seconds =
      std::accumulate(timings.label_seconds_per_row.begin(),
                      timings.label_seconds_per_row.begin() + labeled, 0.0);
  report.pipeline_seconds = report.label_fraction_seconds +
                            timings.train_seconds + timings.predict_seconds;
  report.speedup = report.label_all_seconds / report.pipeline_seconds;
  report.distilled_mse = timings.distilled_mse;
  return report;
}

}  // namespace coopsolve
