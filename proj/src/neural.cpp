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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numeric>

#include "json.hpp"

namespace coopsolve {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using nlohmann::json;

std::vector<int> layer_dims(const MlpArchitecture& arch) {
  std::vector<int> dims;
  dims.push_back(arch.input_dim);
  for (int h : arch.hidden) dims.push_back(h);
  dims.push_back(arch.output_dim());
  return dims;
}

// Softmax over the payoff block; epsilon unit (if any) through a sigmoid.
void apply_head(const MlpArchitecture& arch, MatrixXd& z) {
  if (arch.head == OutputHead::Linear) return;
  const int k = arch.payoff_dim;
  for (Eigen::Index r = 0; r < z.rows(); ++r) {
    double max_logit = z(r, 0);
    for (int c = 1; c < k; ++c) max_logit = std::max(max_logit, z(r, c));
    double sum = 0.0;
    for (int c = 0; c < k; ++c) {
      const double e = std::exp(z(r, c) - max_logit);
      z(r, c) = e;
      sum += e;
    }
    for (int c = 0; c < k; ++c) z(r, c) /= sum;
    if (arch.head == OutputHead::SimplexWithEpsilon) {
      z(r, k) = 1.0 / (1.0 + std::exp(-z(r, k)));
    }
  }
}

// d(loss)/d(logits) given d(loss)/d(outputs), in place.
void head_backward(const MlpArchitecture& arch, const MatrixXd& out, MatrixXd& grad) {
  if (arch.head == OutputHead::Linear) return;
  const int k = arch.payoff_dim;
  for (Eigen::Index r = 0; r < grad.rows(); ++r) {
    double dot = 0.0;
    for (int c = 0; c < k; ++c) dot += grad(r, c) * out(r, c);
    for (int c = 0; c < k; ++c) grad(r, c) = out(r, c) * (grad(r, c) - dot);
    if (arch.head == OutputHead::SimplexWithEpsilon) {
      const double s = out(r, k);
      grad(r, k) *= s * (1.0 - s);
    }
  }
}

struct Workspace {
  std::vector<MatrixXd> activations;  // activations[0] = input batch
  std::vector<MatrixXd> pre;          // preactivations per layer
  std::vector<MatrixXd> masks;        // dropout masks (scaled), hidden layers
};

// Forward over a batch. In training mode dropout masks are sampled from rng
// with inverted scaling; in eval mode masks stay empty.
MatrixXd forward_batch(const PayoffModel& model, const MatrixXd& x, Rng* rng,
                       Workspace* ws) {
  const auto& arch = model.arch;
  const int layers = static_cast<int>(model.weights.size());
  const double keep = 1.0 - arch.dropout;
  MatrixXd a = x;
  if (ws != nullptr) {
    ws->activations.assign(1, a);
    ws->pre.clear();
    ws->masks.clear();
  }
  for (int l = 0; l < layers; ++l) {
    MatrixXd z = (a * model.weights[static_cast<std::size_t>(l)]).rowwise() +
                 model.biases[static_cast<std::size_t>(l)].transpose();
    if (l + 1 < layers) {
      if (ws != nullptr) ws->pre.push_back(z);
      a = z.cwiseMax(0.0);
      if (rng != nullptr && arch.dropout > 0.0) {
        MatrixXd mask(a.rows(), a.cols());
        for (Eigen::Index r = 0; r < mask.rows(); ++r) {
          for (Eigen::Index c = 0; c < mask.cols(); ++c) {
            mask(r, c) = rng->uniform01() < keep ? 1.0 / keep : 0.0;
          }
        }
        a = a.cwiseProduct(mask);
        if (ws != nullptr) ws->masks.push_back(std::move(mask));
      } else if (ws != nullptr) {
        ws->masks.emplace_back();
      }
      if (ws != nullptr) ws->activations.push_back(a);
    } else {
      if (ws != nullptr) ws->pre.push_back(z);
      a = z;
    }
  }
  apply_head(arch, a);
  return a;
}

double mse(const MatrixXd& out, const MatrixXd& target) {
  const double n = static_cast<double>(out.rows()) * out.cols();
  return (out - target).squaredNorm() / n;
}

struct Gradients {
  std::vector<MatrixXd> weights;
  std::vector<VectorXd> biases;
};

// Backpropagation of the mean squared error over all outputs.
double backward_batch(const PayoffModel& model, const Workspace& ws,
                      const MatrixXd& out, const MatrixXd& target,
                      Gradients* grads) {
  const auto& arch = model.arch;
  const int layers = static_cast<int>(model.weights.size());
  const double denom = static_cast<double>(out.rows()) * out.cols();
  const double loss = (out - target).squaredNorm() / denom;

  MatrixXd delta = 2.0 * (out - target) / denom;
  head_backward(arch, out, delta);

  for (int l = layers - 1; l >= 0; --l) {
    grads->weights[static_cast<std::size_t>(l)].noalias() =
        ws.activations[static_cast<std::size_t>(l)].transpose() * delta;
    grads->biases[static_cast<std::size_t>(l)] = delta.colwise().sum();
    if (l == 0) break;
    MatrixXd prev = delta * model.weights[static_cast<std::size_t>(l)].transpose();
    const MatrixXd& z = ws.pre[static_cast<std::size_t>(l - 1)];
    prev = prev.cwiseProduct((z.array() > 0.0).cast<double>().matrix());
    const MatrixXd& mask = ws.masks[static_cast<std::size_t>(l - 1)];
    if (mask.size() != 0) prev = prev.cwiseProduct(mask);
    delta = std::move(prev);
  }
  return loss;
}

struct AdamState {
  std::vector<MatrixXd> mw, vw;
  std::vector<VectorXd> mb, vb;
  long step = 0;
};

void adam_update(PayoffModel* model, const Gradients& grads, AdamState* state,
                 const TrainConfig& cfg) {
  ++state->step;
  const double b1 = cfg.adam_beta1;
  const double b2 = cfg.adam_beta2;
  const double correct1 = 1.0 - std::pow(b1, static_cast<double>(state->step));
  const double correct2 = 1.0 - std::pow(b2, static_cast<double>(state->step));
  for (std::size_t l = 0; l < model->weights.size(); ++l) {
    MatrixXd g = grads.weights[l];
    if (cfg.weight_decay > 0.0) g += cfg.weight_decay * model->weights[l];
    state->mw[l] = b1 * state->mw[l] + (1.0 - b1) * g;
    state->vw[l] = b2 * state->vw[l] + (1.0 - b2) * g.cwiseProduct(g);
    model->weights[l].array() -=
        cfg.learning_rate * (state->mw[l].array() / correct1) /
        ((state->vw[l].array() / correct2).sqrt() + cfg.adam_eps);

    VectorXd gb = grads.biases[l];
    if (cfg.weight_decay > 0.0) gb += cfg.weight_decay * model->biases[l];
    state->mb[l] = b1 * state->mb[l] + (1.0 - b1) * gb;
    state->vb[l] = b2 * state->vb[l] + (1.0 - b2) * gb.cwiseProduct(gb);
    model->biases[l].array() -=
        cfg.learning_rate * (state->mb[l].array() / correct1) /
        ((state->vb[l].array() / correct2).sqrt() + cfg.adam_eps);
  }
}

MatrixXd to_eigen(const Matrix& m) {
  return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                        Eigen::RowMajor>>(m.data.data(), m.rows,
                                                          m.cols);
}

TrainResult train_single_run(const MatrixXd& x, const MatrixXd& y,
                             const MlpArchitecture& arch, const TrainConfig& cfg,
                             int run_index) {
  Rng rng = Rng::substream(cfg.seed, {static_cast<std::uint64_t>(run_index), 17});
  PayoffModel model =
      init_model(arch, Rng::substream(cfg.seed,
                                      {static_cast<std::uint64_t>(run_index), 23})
                           .next_u64());
  model.meta.seed = cfg.seed;
  model.meta.run_index = run_index;

  const int rows = static_cast<int>(x.rows());
  std::vector<int> order(static_cast<std::size_t>(rows));
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  int train_rows = static_cast<int>(cfg.train_fraction * rows);
  train_rows = std::clamp(train_rows, 1, rows - 1);

  MatrixXd x_train(train_rows, x.cols());
  MatrixXd y_train(train_rows, y.cols());
  MatrixXd x_val(rows - train_rows, x.cols());
  MatrixXd y_val(rows - train_rows, y.cols());
  for (int i = 0; i < rows; ++i) {
    const int src = order[static_cast<std::size_t>(i)];
    if (i < train_rows) {
      x_train.row(i) = x.row(src);
      y_train.row(i) = y.row(src);
    } else {
      x_val.row(i - train_rows) = x.row(src);
      y_val.row(i - train_rows) = y.row(src);
    }
  }

  Gradients grads;
  AdamState adam;
  for (const auto& w : model.weights) {
    grads.weights.emplace_back(MatrixXd::Zero(w.rows(), w.cols()));
    adam.mw.emplace_back(MatrixXd::Zero(w.rows(), w.cols()));
    adam.vw.emplace_back(MatrixXd::Zero(w.rows(), w.cols()));
  }
  for (const auto& b : model.biases) {
    grads.biases.emplace_back(VectorXd::Zero(b.size()));
    adam.mb.emplace_back(VectorXd::Zero(b.size()));
    adam.vb.emplace_back(VectorXd::Zero(b.size()));
  }

  const int batch = cfg.batch_size <= 0
                        ? train_rows
                        : std::min(cfg.batch_size, train_rows);
  std::vector<int> batch_order(static_cast<std::size_t>(train_rows));
  std::iota(batch_order.begin(), batch_order.end(), 0);

  TrainResult result;
  result.model = model;
  double best_val = std::numeric_limits<double>::infinity();
  int best_epoch = -1;
  Workspace ws;

  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    rng.shuffle(batch_order);
    double epoch_loss = 0.0;
    for (int start = 0; start < train_rows; start += batch) {
      const int size = std::min(batch, train_rows - start);
      MatrixXd xb(size, x.cols());
      MatrixXd yb(size, y.cols());
      for (int i = 0; i < size; ++i) {
        const int src = batch_order[static_cast<std::size_t>(start + i)];
        xb.row(i) = x_train.row(src);
        yb.row(i) = y_train.row(src);
      }
      const MatrixXd out = forward_batch(model, xb, &rng, &ws);
      const double loss = backward_batch(model, ws, out, yb, &grads);
      adam_update(&model, grads, &adam, cfg);
      epoch_loss += loss * size;
    }
    epoch_loss /= train_rows;

    const MatrixXd val_out = forward_batch(model, x_val, nullptr, nullptr);
    const double val_loss = mse(val_out, y_val);
    if (!std::isfinite(epoch_loss) || !std::isfinite(val_loss)) {
      throw TrainingError("training diverged at epoch " + std::to_string(epoch));
    }
    result.curve.train_loss.push_back(epoch_loss);
    result.curve.val_loss.push_back(val_loss);

    if (val_loss < best_val) {
      best_val = val_loss;
      best_epoch = epoch;
      result.model.weights = model.weights;
      result.model.biases = model.biases;
    }
    if (cfg.log_every > 0 && (epoch + 1) % cfg.log_every == 0) {
      std::cerr << "epoch " << (epoch + 1) << " train " << epoch_loss << " val "
                << val_loss << " best " << best_val << '\n';
    }
    result.model.meta.epochs_run = epoch + 1;
    if (cfg.early_stopping && epoch + 1 >= cfg.baseline_epochs &&
        epoch - best_epoch >= cfg.patience) {
      break;
    }
  }
  result.model.meta.best_val_loss = best_val;
  return result;
}

}  // namespace

void MlpArchitecture::validate() const {
  if (input_dim < 1) throw DimensionError("architecture needs input_dim >= 1");
  if (payoff_dim < 1) throw DimensionError("architecture needs payoff_dim >= 1");
  for (int h : hidden) {
    if (h < 1) throw DimensionError("hidden layer sizes must be >= 1");
  }
  if (dropout < 0.0 || dropout >= 1.0) {
    throw DimensionError("dropout must lie in [0, 1)");
  }
}

std::string head_name(OutputHead head) {
  switch (head) {
    case OutputHead::Simplex: return "simplex";
    case OutputHead::SimplexWithEpsilon: return "simplex+epsilon";
    case OutputHead::Linear: return "linear";
  }
  return "unknown";
}

OutputHead parse_head(const std::string& name) {
  if (name == "simplex") return OutputHead::Simplex;
  if (name == "simplex+epsilon") return OutputHead::SimplexWithEpsilon;
  if (name == "linear") return OutputHead::Linear;
  throw IoError("unknown output head '" + name + "'");
}

PayoffModel init_model(const MlpArchitecture& arch, std::uint64_t seed) {
  arch.validate();
  Rng rng(seed);
  PayoffModel model;
  model.arch = arch;
  const auto dims = layer_dims(arch);
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const int fan_in = dims[l];
    const int fan_out = dims[l + 1];
    const double bound = std::sqrt(6.0 / fan_in);
    MatrixXd w(fan_in, fan_out);
    for (int r = 0; r < fan_in; ++r) {
      for (int c = 0; c < fan_out; ++c) w(r, c) = rng.uniform(-bound, bound);
    }
    model.weights.push_back(std::move(w));
    model.biases.emplace_back(VectorXd::Zero(fan_out));
  }
  return model;
}

std::vector<double> forward(const PayoffModel& model, std::span<const double> x,
                            Rng* dropout_rng) {
  if (static_cast<int>(x.size()) != model.arch.input_dim) {
    throw DimensionError("forward: input length " + std::to_string(x.size()) +
                         " does not match input_dim " +
                         std::to_string(model.arch.input_dim));
  }
  for (double v : x) {
    if (!std::isfinite(v)) throw DimensionError("forward: non-finite input");
  }
  MatrixXd xb(1, model.arch.input_dim);
  for (int c = 0; c < model.arch.input_dim; ++c) {
    xb(0, c) = x[static_cast<std::size_t>(c)];
  }
  const MatrixXd out = forward_batch(model, xb, dropout_rng, nullptr);
  std::vector<double> result(static_cast<std::size_t>(out.cols()));
  for (Eigen::Index c = 0; c < out.cols(); ++c) {
    result[static_cast<std::size_t>(c)] = out(0, c);
  }
  return result;
}

TrainResult train(const Matrix& features, const Matrix& labels,
                  const MlpArchitecture& arch, const TrainConfig& cfg) {
  arch.validate();
  if (features.rows != labels.rows) {
    throw DimensionError("feature and label row counts differ");
  }
  if (features.cols != arch.input_dim) {
    throw DimensionError("dataset feature dim does not match architecture");
  }
  if (labels.cols != arch.output_dim()) {
    throw DimensionError("dataset label dim does not match architecture");
  }
  if (features.rows < 2) throw TrainingError("need at least two rows to split");

  const MatrixXd x = to_eigen(features);
  const MatrixXd y = to_eigen(labels);

  std::vector<TrainResult> runs(static_cast<std::size_t>(cfg.runs));
  parallel_for(
      cfg.runs,
      [&](std::int64_t begin, std::int64_t end) {
        for (std::int64_t r = begin; r < end; ++r) {
          runs[static_cast<std::size_t>(r)] =
              train_single_run(x, y, arch, cfg, static_cast<int>(r));
        }
      },
      cfg.threads);

  int best = 0;
  for (int r = 1; r < cfg.runs; ++r) {
    if (runs[static_cast<std::size_t>(r)].model.meta.best_val_loss <
        runs[static_cast<std::size_t>(best)].model.meta.best_val_loss) {
      best = r;
    }
  }
  return std::move(runs[static_cast<std::size_t>(best)]);
}

MlpArchitecture architecture_for(const GameDataset& dataset,
                                 std::vector<int> hidden, double dropout) {
  MlpArchitecture arch;
  arch.input_dim = dataset.features.cols;
  arch.hidden = std::move(hidden);
  arch.dropout = dropout;
  if (dataset.meta.solution_concept == Concept::LeastCore) {
    arch.head = OutputHead::SimplexWithEpsilon;
    arch.payoff_dim = dataset.labels.cols - 1;
  } else {
    arch.head = OutputHead::Simplex;
    arch.payoff_dim = dataset.labels.cols;
  }
  return arch;
}

TrainResult train(const GameDataset& dataset, MlpArchitecture arch,
                  const TrainConfig& cfg) {
  TrainResult result = train(dataset.features, dataset.labels, arch, cfg);
  result.model.meta.concept_label = concept_name(dataset.meta.solution_concept);
  result.model.meta.layout = layout_name(dataset.meta.layout);
  return result;
}

double grad_check(const MlpArchitecture& requested, std::uint64_t seed) {
  MlpArchitecture arch = requested;
  arch.dropout = 0.0;  // finite differences need a deterministic forward pass
  arch.validate();

  constexpr double kH = 1e-5;
  constexpr int kBatch = 8;

  // Probe batches that place a preactivation within the finite-difference
  // window of a ReLU kink would measure the kink, not the gradient; redraw
  // until the probe is clean.
  for (int probe = 0;; ++probe) {
    if (probe >= 32) {
      throw TrainingError("grad_check: no kink-free probe found");
    }
    Rng rng = Rng::substream(seed, {static_cast<std::uint64_t>(probe)});
    PayoffModel model = init_model(arch, rng.next_u64());

    MatrixXd x(kBatch, arch.input_dim);
    for (int r = 0; r < kBatch; ++r) {
      for (int c = 0; c < arch.input_dim; ++c) x(r, c) = rng.normal();
    }
    MatrixXd y(kBatch, arch.output_dim());
    if (arch.head == OutputHead::Linear) {
      for (int r = 0; r < kBatch; ++r) {
        for (int c = 0; c < arch.output_dim(); ++c) y(r, c) = rng.normal();
      }
    } else {
      for (int r = 0; r < kBatch; ++r) {
        double sum = 0.0;
        for (int c = 0; c < arch.payoff_dim; ++c) {
          y(r, c) = rng.uniform01_open();
          sum += y(r, c);
        }
        for (int c = 0; c < arch.payoff_dim; ++c) y(r, c) /= sum;
        if (arch.head == OutputHead::SimplexWithEpsilon) {
          y(r, arch.payoff_dim) = rng.uniform01();
        }
      }
    }

    Workspace ws;
    const MatrixXd out = forward_batch(model, x, nullptr, &ws);
    bool near_kink = false;
    for (std::size_t l = 0; l + 1 < ws.pre.size(); ++l) {  // hidden layers only
      if ((ws.pre[l].array().abs() < 1e-4).any()) {
        near_kink = true;
        break;
      }
    }
    if (near_kink) continue;

    Gradients grads;
    for (const auto& w : model.weights) {
      grads.weights.emplace_back(MatrixXd::Zero(w.rows(), w.cols()));
    }
    for (const auto& b : model.biases) {
      grads.biases.emplace_back(VectorXd::Zero(b.size()));
    }
    backward_batch(model, ws, out, y, &grads);

    const auto loss_at = [&]() {
      return mse(forward_batch(model, x, nullptr, nullptr), y);
    };
    double max_rel = 0.0;
    const auto check = [&](double* param, double analytic) {
      const double saved = *param;
      *param = saved + kH;
      const double up = loss_at();
      *param = saved - kH;
      const double down = loss_at();
      *param = saved;
      const double numeric = (up - down) / (2.0 * kH);
      const double rel = std::abs(analytic - numeric) /
                         std::max({1e-6, std::abs(analytic), std::abs(numeric)});
      max_rel = std::max(max_rel, rel);
    };
    for (std::size_t l = 0; l < model.weights.size(); ++l) {
      for (Eigen::Index i = 0; i < model.weights[l].size(); ++i) {
        check(model.weights[l].data() + i, grads.weights[l](i));
      }
      for (Eigen::Index i = 0; i < model.biases[l].size(); ++i) {
        check(model.biases[l].data() + i, grads.biases[l](i));
      }
    }
    return max_rel;
  }
}

SolutionVector predict_payoffs(const PayoffModel& model,
                               const WeightedVotingGame& game, Layout layout) {
  const int n = game.num_players();
  const auto x = normalize_weights(game);
  SolutionVector result;

  if (layout == Layout::Fixed) {
    if (n != model.arch.input_dim) {
      throw DimensionError("fixed model expects n=" +
                           std::to_string(model.arch.input_dim) + ", got n=" +
                           std::to_string(n));
    }
    const auto out = forward(model, x);
    result.payoffs.assign(out.begin(), out.begin() + model.arch.payoff_dim);
    if (model.arch.head == OutputHead::SimplexWithEpsilon) {
      result.lcv = out.back();
    }
    return result;
  }

  if (n > model.arch.input_dim) {
    throw CapacityError("game has n=" + std::to_string(n) +
                        " players but the variable model caps at M=" +
                        std::to_string(model.arch.input_dim));
  }
  std::vector<double> padded(static_cast<std::size_t>(model.arch.input_dim), 0.0);
  std::copy(x.begin(), x.end(), padded.begin());
  const auto out = forward(model, padded);

  double real_mass = 0.0;
  for (int i = 0; i < n; ++i) real_mass += out[static_cast<std::size_t>(i)];
  if (!(real_mass > 0.0)) {
    throw SolverError("variable-model payoff mass on real players vanished");
  }
  result.payoffs.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    result.payoffs[static_cast<std::size_t>(i)] =
        out[static_cast<std::size_t>(i)] / real_mass;
  }
  if (model.arch.head == OutputHead::SimplexWithEpsilon) {
    result.lcv = out.back();
  }
  return result;
}

void save_model(const PayoffModel& model, const std::filesystem::path& path) {
  json doc;
  doc["schema_version"] = 1;
  json arch;
  arch["input_dim"] = model.arch.input_dim;
  arch["hidden"] = model.arch.hidden;
  arch["dropout"] = model.arch.dropout;
  arch["payoff_dim"] = model.arch.payoff_dim;
  arch["head"] = head_name(model.arch.head);
  doc["architecture"] = arch;

  json layers = json::array();
  for (std::size_t l = 0; l < model.weights.size(); ++l) {
    json layer;
    const auto& w = model.weights[l];
    layer["rows"] = w.rows();
    layer["cols"] = w.cols();
    std::vector<double> flat;
    flat.reserve(static_cast<std::size_t>(w.size()));
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) flat.push_back(w(r, c));
    }
    layer["weights"] = flat;
    layer["bias"] = std::vector<double>(model.biases[l].data(),
                                        model.biases[l].data() +
                                            model.biases[l].size());
    layers.push_back(std::move(layer));
  }
  doc["layers"] = layers;

  json meta;
  meta["seed"] = model.meta.seed;
  meta["run_index"] = model.meta.run_index;
  meta["epochs_run"] = model.meta.epochs_run;
  meta["best_val_loss"] = model.meta.best_val_loss;
  meta["concept"] = model.meta.concept_label;
  meta["layout"] = model.meta.layout;
  doc["metadata"] = meta;

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("failed while writing '" + path.string() + "'");
}

PayoffModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw IoError("malformed model file");

  PayoffModel model;
  const json& arch = doc.at("architecture");
  model.arch.input_dim = arch.at("input_dim").get<int>();
  model.arch.hidden = arch.at("hidden").get<std::vector<int>>();
  model.arch.dropout = arch.at("dropout").get<double>();
  model.arch.payoff_dim = arch.at("payoff_dim").get<int>();
  model.arch.head = parse_head(arch.at("head").get<std::string>());

  for (const json& layer : doc.at("layers")) {
    const auto rows = layer.at("rows").get<Eigen::Index>();
    const auto cols = layer.at("cols").get<Eigen::Index>();
    const auto flat = layer.at("weights").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(flat.size()) != rows * cols) {
      throw IoError("layer weight count mismatch");
    }
    MatrixXd w(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < cols; ++c) {
        w(r, c) = flat[static_cast<std::size_t>(r * cols + c)];
      }
    }
    model.weights.push_back(std::move(w));
    const auto bias = layer.at("bias").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(bias.size()) != cols) {
      throw IoError("layer bias count mismatch");
    }
    model.biases.emplace_back(
        Eigen::Map<const VectorXd>(bias.data(), static_cast<Eigen::Index>(bias.size())));
  }

  const json& meta = doc.at("metadata");
  model.meta.seed = meta.at("seed").get<std::uint64_t>();
  model.meta.run_index = meta.at("run_index").get<int>();
  model.meta.epochs_run = meta.at("epochs_run").get<int>();
  model.meta.best_val_loss = meta.at("best_val_loss").get<double>();
  model.meta.concept_label = meta.at("concept").get<std::string>();
  model.meta.layout = meta.at("layout").get<std::string>();

  model.arch.validate();
  return model;
}

}  // namespace coopsolve
