#include "crashbound/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <string>

#include <omp.h>

#include "crashbound/detail/propagate.hpp"
#include "crashbound/error.hpp"
#include "crashbound/forward.hpp"
#include "crashbound/rng.hpp"

namespace crashbound {

LabeledDataset LabeledDataset::slice(std::size_t begin, std::size_t count) const {
  if (begin > size() || count > size() - begin) throw DomainError("dataset slice out of range");
  std::vector<std::size_t> rows(count);
  std::iota(rows.begin(), rows.end(), begin);
  return select(rows);
}

LabeledDataset LabeledDataset::select(std::span<const std::size_t> rows) const {
  LabeledDataset out;
  out.inputs = Matrix(rows.size(), inputs.cols());
  out.labels.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto src = inputs.row(rows[r]);
    std::copy(src.begin(), src.end(), out.inputs.row(r).begin());
    out.labels.push_back(labels.at(rows[r]));
  }
  return out;
}

LabeledDataset xor_dataset() {
  LabeledDataset d;
  d.inputs = Matrix(4, 2, {0, 0, 0, 1, 1, 0, 1, 1});
  d.labels = {0, 1, 1, 0};
  return d;
}

void check_config(const TrainConfig& cfg) {
  if (!(cfg.learning_rate > 0.0)) throw DomainError("learning_rate must be > 0");
  if (cfg.epochs < 1) throw DomainError("epochs must be >= 1");
  if (cfg.batch_size < 1) throw DomainError("batch_size must be >= 1");
  if (!(cfg.dropout_rate >= 0.0 && cfg.dropout_rate < 1.0)) throw DomainError("dropout_rate must be in [0, 1)");
}

namespace {

void check_batch(const Network& net, const LabeledDataset& data) {
  if (data.size() == 0) throw DomainError("dataset is empty");
  if (data.inputs.rows() != data.size()) throw ShapeError("dataset has mismatched input and label counts");
  if (data.inputs.cols() != net.input_dim)
    throw ShapeError("dataset inputs have dimension " + std::to_string(data.inputs.cols()) + ", network expects " +
                     std::to_string(net.input_dim));
  for (auto label : data.labels)
    if (label >= net.output_dim())
      throw ShapeError("label " + std::to_string(label) + " has no matching output component");
}

Gradients zero_gradients(const Network& net) {
  Gradients g;
  for (const auto& l : net.layers) {
    g.weights.emplace_back(l.weights.rows(), l.weights.cols());
    g.biases.emplace_back(l.width(), 0.0);
  }
  g.output_weights = Matrix(net.output_weights.rows(), net.output_weights.cols());
  return g;
}

// Per-example scratch for backpropagation.
struct Workspace {
  std::vector<std::vector<double>> pre;
  std::vector<std::vector<double>> act;
  std::vector<double> out;
  std::vector<double> grad;
  std::vector<double> grad_prev;

  explicit Workspace(const Network& net) : out(net.output_dim()) {
    for (const auto& l : net.layers) {
      pre.emplace_back(l.width());
      act.emplace_back(l.width());
    }
  }
};

void accumulate_example(const Network& net, std::span<const double> x, std::size_t label,
                        const DropoutMask* mask, Workspace& ws, Gradients& g) {
  const std::size_t depth = net.depth();
  std::span<const double> prev = x;
  for (std::size_t l = 0; l < depth; ++l) {
    const auto& layer = net.layers[l];
    for (std::size_t j = 0; j < layer.width(); ++j) {
      ws.pre[l][j] = detail::dot(layer.weights.row(j), prev) + layer.biases[j];
      const bool kept = !mask || mask->keep[l][j];
      ws.act[l][j] = kept ? activate(net.activation, ws.pre[l][j]) * (mask ? mask->keep_scale : 1.0) : 0.0;
    }
    prev = ws.act[l];
  }
  detail::output_layer(net.output_weights, prev, ws.out);

  // d loss / d output
  ws.grad.assign(ws.out.size(), 0.0);
  for (std::size_t k = 0; k < ws.out.size(); ++k) ws.grad[k] = ws.out[k] - (k == label ? 1.0 : 0.0);

  ws.grad_prev.assign(net.width(depth - 1), 0.0);
  for (std::size_t k = 0; k < ws.out.size(); ++k) {
    auto gw = g.output_weights.row(k);
    const auto w = net.output_weights.row(k);
    for (std::size_t i = 0; i < gw.size(); ++i) {
      gw[i] += ws.grad[k] * prev[i];
      ws.grad_prev[i] += w[i] * ws.grad[k];
    }
  }

  for (std::size_t l = depth; l-- > 0;) {
    const auto& layer = net.layers[l];
    std::swap(ws.grad, ws.grad_prev);  // ws.grad = d loss / d act[l]
    for (std::size_t j = 0; j < layer.width(); ++j) {
      const bool kept = !mask || mask->keep[l][j];
      ws.grad[j] = kept ? ws.grad[j] * activate_derivative(net.activation, ws.pre[l][j]) * (mask ? mask->keep_scale : 1.0)
                        : 0.0;
    }
    const std::span<const double> below = l == 0 ? x : std::span<const double>(ws.act[l - 1]);
    ws.grad_prev.assign(below.size(), 0.0);
    for (std::size_t j = 0; j < layer.width(); ++j) {
      const double d = ws.grad[j];
      g.biases[l][j] += d;
      if (d == 0.0) continue;
      auto gw = g.weights[l].row(j);
      const auto w = layer.weights.row(j);
      for (std::size_t i = 0; i < gw.size(); ++i) {
        gw[i] += d * below[i];
        ws.grad_prev[i] += w[i] * d;
      }
    }
  }
}

void scale(Gradients& g, double s) {
  for (auto& m : g.weights)
    for (double& v : m.values()) v *= s;
  for (auto& b : g.biases)
    for (double& v : b) v *= s;
  for (double& v : g.output_weights.values()) v *= s;
}

Gradients backward_rows(const Network& net, const LabeledDataset& data, std::span<const std::size_t> rows,
                        const DropoutMask* mask) {
  Gradients g = zero_gradients(net);
  Workspace ws(net);
  for (std::size_t r : rows) accumulate_example(net, data.inputs.row(r), data.labels[r], mask, ws, g);
  scale(g, 1.0 / static_cast<double>(rows.size()));
  return g;
}

void apply(Network& net, const Gradients& g, double lr) {
  for (std::size_t l = 0; l < net.depth(); ++l) {
    auto w = net.layers[l].weights.values();
    const auto gw = g.weights[l].values();
    for (std::size_t i = 0; i < w.size(); ++i) w[i] -= lr * gw[i];
    for (std::size_t j = 0; j < net.layers[l].biases.size(); ++j) net.layers[l].biases[j] -= lr * g.biases[l][j];
  }
  auto w = net.output_weights.values();
  const auto gw = g.output_weights.values();
  for (std::size_t i = 0; i < w.size(); ++i) w[i] -= lr * gw[i];
}

std::size_t argmax(std::span<const double> v) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < v.size(); ++k)
    if (v[k] > v[best]) best = k;
  return best;
}

}  // namespace

double loss(const Network& net, const LabeledDataset& batch) {
  check_batch(net, batch);
  double total = 0.0;
  for (std::size_t r = 0; r < batch.size(); ++r) {
    const auto out = forward(net, batch.inputs.row(r)).output;
    double e = 0.0;
    for (std::size_t k = 0; k < out.size(); ++k) {
      const double d = out[k] - (k == batch.labels[r] ? 1.0 : 0.0);
      e += d * d;
    }
    total += 0.5 * e;
  }
  return total / static_cast<double>(batch.size());
}

Gradients backward(const Network& net, const LabeledDataset& batch, const DropoutMask* mask) {
  require_valid(net);
  check_batch(net, batch);
  if (mask) {
    if (mask->keep.size() != net.depth()) throw ShapeError("dropout mask depth does not match the network");
    for (std::size_t l = 0; l < net.depth(); ++l)
      if (mask->keep[l].size() != net.width(l))
        throw ShapeError("dropout mask for layer " + std::to_string(l) + " has the wrong width");
  }
  std::vector<std::size_t> rows(batch.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return backward_rows(net, batch, rows, mask);
}

double accuracy(const Network& net, const LabeledDataset& data) {
  check_batch(net, data);
  std::size_t correct = 0;
  for (std::size_t r = 0; r < data.size(); ++r)
    if (argmax(forward(net, data.inputs.row(r)).output) == data.labels[r]) ++correct;
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

Network init_for_training(const TopologySpec& spec, std::uint64_t seed) {
  check_topology(spec);
  SplitMix64 rng(seed);
  auto fill = [&](Matrix& m) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(m.cols()));
    for (double& w : m.values()) w = (2.0 * rng.uniform() - 1.0) * bound;
  };
  Network net;
  net.input_dim = spec.input_dim;
  net.activation = spec.activation;
  std::size_t fan_in = spec.input_dim;
  for (auto width : spec.layer_widths) {
    Layer layer{Matrix(width, fan_in), std::vector<double>(width, 0.0)};
    fill(layer.weights);
    net.layers.push_back(std::move(layer));
    fan_in = width;
  }
  net.output_weights = Matrix(spec.output_dim, fan_in);
  fill(net.output_weights);
  return net;
}

TrainResult train(const Network& net, const LabeledDataset& data, const TrainConfig& cfg,
                  const std::function<void(const BatchEvent&)>& on_batch) {
  check_config(cfg);
  require_valid(net);
  check_batch(net, data);

  TrainResult result{net, {}, 0, false};
  Network& cur = result.trained;
  SplitMix64 rng(cfg.seed);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  DropoutMask mask;
  const bool dropout = cfg.dropout_rate > 0.0;
  if (dropout) {
    mask.keep_scale = 1.0 / (1.0 - cfg.dropout_rate);
    for (std::size_t l = 0; l < cur.depth(); ++l) mask.keep.emplace_back(cur.width(l), 1);
  }

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    for (std::size_t begin = 0; begin < order.size(); begin += cfg.batch_size) {
      const std::span<const std::size_t> rows(order.data() + begin, std::min(cfg.batch_size, order.size() - begin));
      if (dropout)
        for (auto& layer : mask.keep)
          for (auto& k : layer) k = rng.uniform() >= cfg.dropout_rate ? 1 : 0;
      const Gradients g = backward_rows(cur, data, rows, dropout ? &mask : nullptr);
      if (on_batch) on_batch(BatchEvent{epoch, rows, cur, g});
      apply(cur, g, cfg.learning_rate);
    }

    const double epoch_loss = loss(cur, data);
    if (!std::isfinite(epoch_loss)) throw TrainingError("training diverged (non-finite loss)", epoch);
    result.history.push_back({epoch_loss, accuracy(cur, data)});
    result.epochs_used = epoch;
    if (cfg.target_loss && epoch_loss <= *cfg.target_loss) {
      result.reached_target = true;
      break;
    }
  }
  return result;
}

std::vector<LearningCostRow> learning_cost_sweep(const TopologySpec& spec, const LabeledDataset& data,
                                                 std::span<const double> k_grid,
                                                 std::span<const std::uint64_t> seeds, const TrainConfig& cfg,
                                                 int workers) {
  if (seeds.size() < 2) throw DomainError("learning cost sweep needs at least 2 runs per K");
  check_config(cfg);
  if (workers <= 0) workers = omp_get_max_threads();

  const std::size_t runs = seeds.size();
  const auto jobs = static_cast<std::int64_t>(k_grid.size() * runs);
  std::vector<int> epochs(static_cast<std::size_t>(jobs), 0);
  std::vector<unsigned char> reached(static_cast<std::size_t>(jobs), 0);
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(jobs));

#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
  for (std::int64_t job = 0; job < jobs; ++job) {
    const auto j = static_cast<std::size_t>(job);
    try {
      TopologySpec s = spec;
      s.activation.lipschitz = k_grid[j / runs];
      TrainConfig c = cfg;
      c.seed = seeds[j % runs];
      const TrainResult r = train(init_for_training(s, c.seed), data, c);
      epochs[j] = r.epochs_used;
      reached[j] = r.reached_target ? 1 : 0;
    } catch (...) {
      errors[j] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::vector<LearningCostRow> rows;
  for (std::size_t ki = 0; ki < k_grid.size(); ++ki) {
    LearningCostRow row;
    row.lipschitz = k_grid[ki];
    row.runs = runs;
    double sum = 0.0;
    for (std::size_t r = 0; r < runs; ++r) {
      sum += epochs[ki * runs + r];
      if (!reached[ki * runs + r]) ++row.censored;
    }
    row.mean_epochs = sum / static_cast<double>(runs);
    double ss = 0.0;
    for (std::size_t r = 0; r < runs; ++r) {
      const double d = epochs[ki * runs + r] - row.mean_epochs;
      ss += d * d;
    }
    row.std_epochs = std::sqrt(ss / static_cast<double>(runs - 1));
    rows.push_back(row);
  }
  return rows;
}

std::vector<LearningCostRow> learning_cost_sweep(const TopologySpec& spec, const LabeledDataset& data,
                                                 std::span<const double> k_grid, std::size_t runs_per_k,
                                                 const TrainConfig& cfg, int workers) {
  if (runs_per_k < 2) throw DomainError("learning cost sweep needs at least 2 runs per K");
  std::vector<std::uint64_t> seeds(runs_per_k);
  for (std::size_t r = 0; r < runs_per_k; ++r) seeds[r] = derive_seed(cfg.seed, r);
  return learning_cost_sweep(spec, data, k_grid, seeds, cfg, workers);
}

}  // namespace crashbound
