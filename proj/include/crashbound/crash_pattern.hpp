#pragma once

#include <compare>
#include <cstddef>
#include <span>
#include <vector>

namespace crashbound {

struct Network;

/// A hidden neuron, addressed by 0-based layer and 0-based position.
struct NeuronRef {
  std::size_t layer = 0;
  std::size_t index = 0;

  auto operator<=>(const NeuronRef&) const = default;
};

/// Set of crashed hidden neurons for a given topology.
///
/// Input and output nodes are clients of the network and can never crash, so
/// only hidden neurons are addressable. Neurons are kept sorted by
/// (layer, index); flat ids number hidden neurons consecutively in that order.
class CrashPattern {
 public:
  /// Validates ranges and duplicates, throws PatternError.
  CrashPattern(std::span<const std::size_t> widths, std::vector<NeuronRef> crashed);
  CrashPattern(const Network& net, std::vector<NeuronRef> crashed);

  static CrashPattern none(std::span<const std::size_t> widths);
  static CrashPattern from_flat(std::span<const std::size_t> widths,
                                std::span<const std::size_t> flat_ids);

  const std::vector<NeuronRef>& crashed() const noexcept { return crashed_; }
  const std::vector<std::size_t>& widths() const noexcept { return widths_; }
  std::size_t size() const noexcept { return crashed_.size(); }
  bool empty() const noexcept { return crashed_.empty(); }
  bool contains(NeuronRef n) const;

  /// (f_1, ..., f_L): number of crashed neurons per hidden layer.
  std::vector<std::size_t> per_layer_counts() const;
  std::vector<std::size_t> flat_ids() const;

  bool operator==(const CrashPattern&) const = default;

 private:
  std::vector<std::size_t> widths_;
  std::vector<NeuronRef> crashed_;
};

}  // namespace crashbound
