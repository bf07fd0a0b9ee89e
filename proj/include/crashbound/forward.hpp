#pragma once

#include <span>
#include <vector>

#include "crashbound/crash_pattern.hpp"
#include "crashbound/network.hpp"

namespace crashbound {

/// Intermediate values of one forward pass. `activations[l][j]` is exactly
/// 0 for a crashed neuron, whatever its pre-activation.
struct LayerTrace {
  std::vector<std::vector<double>> pre_activations;
  std::vector<std::vector<double>> activations;
  std::vector<double> output;
};

/// Nominal evaluation. Each bias is added once per neuron, after the
/// weighted sum; the output layer is linear with no bias.
LayerTrace forward(const Network& net, std::span<const double> input);

/// Evaluation where every crashed neuron emits 0 to its consumers.
std::vector<double> forward_failed(const Network& net, std::span<const double> input,
                                   const CrashPattern& pattern);

/// Full trace of a crashed evaluation.
LayerTrace forward_trace(const Network& net, std::span<const double> input,
                         const CrashPattern& pattern);

}  // namespace crashbound
