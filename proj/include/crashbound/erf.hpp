#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "crashbound/network.hpp"

namespace crashbound {

/// Input-independent caps C_l on any neuron output in each hidden layer, for
/// inputs in [0,1]^d.
struct LayerBounds {
  std::vector<double> caps;
};

/// Sigmoid: every cap is 1. Relu: interval propagation of the input box
/// through the nominal network; each layer's interval is widened to include 0
/// so the caps stay valid when upstream neurons crash.
LayerBounds layer_output_bounds(const Network& net);

/// The Erf estimator for a fixed per-layer crash allocation, evaluated with
/// per-layer max |w| (erf_max) and mean |w| (erf_av).
struct ErfReport {
  std::vector<std::size_t> f_per_layer;
  double erf_max = 0.0;
  double erf_av = 0.0;
  /// Contribution of crashes in each hidden layer; they sum to erf_max / erf_av.
  std::vector<double> terms_max;
  std::vector<double> terms_av;
};

/// Throws PatternError if f_per_layer has the wrong length or f_l > N_l.
ErfReport erf_fixed(const Network& net, std::span<const std::size_t> f_per_layer);

/// Erf for a total crash budget spread over all hidden layers.
struct ErfTotal {
  double erf_max_worst = 0.0;
  /// Hypergeometric expectation of erf_av over the allocation induced by a
  /// uniformly random crashed subset of size f_total.
  double erf_av_expected = 0.0;
  std::vector<std::size_t> worst_allocation;
  std::size_t allocations = 0;
};

ErfTotal erf_total(const Network& net, std::size_t f_total);

/// Calls `visit` with every (f_1..f_L), 0 <= f_l <= widths[l], summing to
/// `total`, in lexicographic order.
void for_each_allocation(std::span<const std::size_t> widths, std::size_t total,
                         const std::function<void(std::span<const std::size_t>)>& visit);

/// Probability that a uniform random `sum(allocation)`-subset of the hidden
/// neurons splits across layers as `allocation`.
double allocation_probability(std::span<const std::size_t> widths, std::span<const std::size_t> allocation);

struct RobustnessQuery {
  double epsilon = 0.0;        ///< target accuracy
  double epsilon_prime = 0.0;  ///< accuracy the network achieves without crashes
};

/// Largest crash count a single-hidden-layer network tolerates on average
/// while staying within `q.epsilon`. Throws UnsupportedError for L > 1 and
/// DomainError unless 0 <= epsilon_prime <= epsilon.
std::size_t tolerable_crashes_single_layer(const Network& net, const RobustnessQuery& q);

}  // namespace crashbound
