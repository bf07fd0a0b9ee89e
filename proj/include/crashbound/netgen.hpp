#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "crashbound/network.hpp"

namespace crashbound {

struct TopologySpec {
  std::size_t input_dim = 1;
  std::vector<std::size_t> layer_widths;
  std::size_t output_dim = 1;
  Activation activation;
};

/// Throws DomainError if any dimension is 0 or there are no hidden layers.
void check_topology(const TopologySpec& spec);

struct WeightDistribution {
  double mean = 1.0;
  double stddev = 5.0;
};

/// Random network whose hidden and output weights are i.i.d. Normal(mean,
/// stddev), drawn from SplitMix64(seed) with Box-Muller in layer order,
/// row-major, output weights last. Biases are 0.
Network random_network(const TopologySpec& spec, std::uint64_t seed, const WeightDistribution& dist = {});

/// Copy of `net` with every weight, output weights included, multiplied by
/// `s`. Biases are unchanged.
Network scale_weights(const Network& net, double s);

/// Copy of `net` with a different Lipschitz coefficient.
Network with_lipschitz(const Network& net, double k);

/// Uniform random points of [0,1]^dim, one per row.
Matrix uniform_inputs(std::size_t count, std::size_t dim, std::uint64_t seed);

}  // namespace crashbound
