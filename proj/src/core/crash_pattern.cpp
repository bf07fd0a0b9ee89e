#include "crashbound/crash_pattern.hpp"

#include <algorithm>
#include <string>

#include "crashbound/error.hpp"
#include "crashbound/network.hpp"

namespace crashbound {

CrashPattern::CrashPattern(std::span<const std::size_t> widths, std::vector<NeuronRef> crashed)
    : widths_(widths.begin(), widths.end()), crashed_(std::move(crashed)) {
  for (const auto& n : crashed_) {
    if (n.layer >= widths_.size())
      throw PatternError("crashed neuron references layer " + std::to_string(n.layer) + " of " +
                         std::to_string(widths_.size()));
    if (n.index >= widths_[n.layer])
      throw PatternError("crashed neuron " + std::to_string(n.index) + " out of range in layer " +
                         std::to_string(n.layer) + " (width " + std::to_string(widths_[n.layer]) + ")");
  }
  std::sort(crashed_.begin(), crashed_.end());
  if (std::adjacent_find(crashed_.begin(), crashed_.end()) != crashed_.end())
    throw PatternError("crash pattern lists a neuron twice");
}

CrashPattern::CrashPattern(const Network& net, std::vector<NeuronRef> crashed)
    : CrashPattern(net.widths(), std::move(crashed)) {}

CrashPattern CrashPattern::none(std::span<const std::size_t> widths) { return CrashPattern(widths, {}); }

CrashPattern CrashPattern::from_flat(std::span<const std::size_t> widths,
                                     std::span<const std::size_t> flat_ids) {
  std::vector<NeuronRef> refs;
  refs.reserve(flat_ids.size());
  for (std::size_t id : flat_ids) {
    std::size_t rest = id;
    std::size_t layer = 0;
    while (layer < widths.size() && rest >= widths[layer]) rest -= widths[layer++];
    if (layer == widths.size()) throw PatternError("flat neuron id " + std::to_string(id) + " out of range");
    refs.push_back({layer, rest});
  }
  return CrashPattern(widths, std::move(refs));
}

bool CrashPattern::contains(NeuronRef n) const {
  return std::binary_search(crashed_.begin(), crashed_.end(), n);
}

std::vector<std::size_t> CrashPattern::per_layer_counts() const {
  std::vector<std::size_t> counts(widths_.size(), 0);
  for (const auto& n : crashed_) ++counts[n.layer];
  return counts;
}

std::vector<std::size_t> CrashPattern::flat_ids() const {
  std::vector<std::size_t> offset(widths_.size(), 0);
  for (std::size_t l = 1; l < widths_.size(); ++l) offset[l] = offset[l - 1] + widths_[l - 1];
  std::vector<std::size_t> ids;
  ids.reserve(crashed_.size());
  for (const auto& n : crashed_) ids.push_back(offset[n.layer] + n.index);
  return ids;
}

}  // namespace crashbound
