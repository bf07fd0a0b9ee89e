#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "crashbound/activation.hpp"
#include "crashbound/matrix.hpp"

namespace crashbound {

/// One hidden layer: `weights` is N_l x N_{l-1}, `biases` has N_l entries.
struct Layer {
  Matrix weights;
  std::vector<double> biases;

  std::size_t width() const noexcept { return weights.rows(); }
  bool operator==(const Layer&) const = default;
};

/// Fully connected feed-forward network with a linear, bias-free output layer.
///
/// Hidden layers are indexed 0..depth()-1 in code. `output_weights` is
/// N_out x N_L. A Network is a plain value; use validate() before trusting
/// one built by hand.
struct Network {
  std::size_t input_dim = 0;
  std::vector<Layer> layers;
  Matrix output_weights;
  Activation activation;

  std::size_t depth() const noexcept { return layers.size(); }
  std::size_t width(std::size_t layer) const { return layers.at(layer).width(); }
  std::size_t output_dim() const noexcept { return output_weights.rows(); }
  /// Total number of hidden neurons, i.e. the crashable population.
  std::size_t hidden_count() const noexcept;
  std::vector<std::size_t> widths() const;

  bool operator==(const Network&) const = default;
};

struct Violation {
  enum class Kind { Shape, NonFinite, Activation };
  Kind kind;
  /// Hidden layer index, depth() for the output layer, -1 when not layer-specific.
  long layer;
  std::string message;
};

/// Every shape and finite-value problem found in `net`. Empty means usable.
std::vector<Violation> validate(const Network& net);

/// Throws ShapeError listing the violations if validate() is non-empty.
void require_valid(const Network& net);

struct WeightStats {
  double max_abs = 0.0;
  double mean_abs = 0.0;
};

/// Per-layer statistics over absolute incoming weights. Entry l < depth()
/// covers hidden layer l; the last entry covers the output weights.
std::vector<WeightStats> layer_weight_stats(const Network& net);

}  // namespace crashbound
