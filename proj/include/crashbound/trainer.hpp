#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "crashbound/matrix.hpp"
#include "crashbound/netgen.hpp"
#include "crashbound/network.hpp"

namespace crashbound {

/// Inputs (one row per example, values in [0,1]) with class labels.
struct LabeledDataset {
  Matrix inputs;
  std::vector<std::uint8_t> labels;

  std::size_t size() const noexcept { return labels.size(); }
  /// Rows [begin, begin + count) as a new dataset.
  LabeledDataset slice(std::size_t begin, std::size_t count) const;
  LabeledDataset select(std::span<const std::size_t> rows) const;
};

/// The four-point XOR problem as a two-class dataset.
LabeledDataset xor_dataset();

struct TrainConfig {
  double learning_rate = 0.05;
  int epochs = 10;
  std::size_t batch_size = 32;
  double dropout_rate = 0.0;
  std::uint64_t seed = 0;
  /// Stop once the end-of-epoch training loss is at or below this value.
  std::optional<double> target_loss;
};

/// Throws DomainError for a non-positive learning rate, epochs < 1,
/// batch_size < 1 or a dropout rate outside [0, 1).
void check_config(const TrainConfig& cfg);

/// Same shapes as the network's parameters.
struct Gradients {
  std::vector<Matrix> weights;
  std::vector<std::vector<double>> biases;
  Matrix output_weights;

  bool operator==(const Gradients&) const = default;
};

/// Neurons with keep == 0 emit 0 and receive no gradient; kept neurons'
/// activations are multiplied by `keep_scale`.
struct DropoutMask {
  std::vector<std::vector<unsigned char>> keep;
  double keep_scale = 1.0;
};

/// Mean over examples of 1/2 * sum_k (output_k - onehot_k)^2.
double loss(const Network& net, const LabeledDataset& batch);

/// Exact gradient of loss() by reverse accumulation.
Gradients backward(const Network& net, const LabeledDataset& batch, const DropoutMask* mask = nullptr);

/// Fraction of examples whose argmax output (lowest index on ties) equals the label.
double accuracy(const Network& net, const LabeledDataset& data);

/// Network for training: weights uniform in +-1/sqrt(fan_in), biases 0.
Network init_for_training(const TopologySpec& spec, std::uint64_t seed);

struct EpochStats {
  double loss = 0.0;
  double accuracy = 0.0;
};

struct TrainResult {
  Network trained;
  std::vector<EpochStats> history;
  int epochs_used = 0;
  bool reached_target = false;
};

/// Observes each SGD step before the update is applied.
struct BatchEvent {
  int epoch;
  std::span<const std::size_t> rows;
  const Network& before;
  const Gradients& gradients;
};

/// Mini-batch SGD. Examples are reshuffled every epoch and, when
/// dropout_rate > 0, a fresh mask is drawn per batch; both come from
/// SplitMix64(cfg.seed). Throws TrainingError if the loss becomes non-finite.
TrainResult train(const Network& net, const LabeledDataset& data, const TrainConfig& cfg,
                  const std::function<void(const BatchEvent&)>& on_batch = {});

struct LearningCostRow {
  double lipschitz = 0.0;
  double mean_epochs = 0.0;
  double std_epochs = 0.0;  ///< sample standard deviation
  std::size_t runs = 0;
  std::size_t censored = 0;  ///< runs that hit the epoch cap before target_loss
};

/// For each K, trains one fresh network per seed to cfg.target_loss and
/// summarizes the epochs needed. Runs that never reach the target count as
/// cfg.epochs.
std::vector<LearningCostRow> learning_cost_sweep(const TopologySpec& spec, const LabeledDataset& data,
                                                 std::span<const double> k_grid,
                                                 std::span<const std::uint64_t> seeds, const TrainConfig& cfg,
                                                 int workers = 0);

/// Seeds derived from cfg.seed, runs_per_k of them. Requires runs_per_k >= 2.
std::vector<LearningCostRow> learning_cost_sweep(const TopologySpec& spec, const LabeledDataset& data,
                                                 std::span<const double> k_grid, std::size_t runs_per_k,
                                                 const TrainConfig& cfg, int workers = 0);

}  // namespace crashbound
