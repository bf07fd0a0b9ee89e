#include "crashbound/netgen.hpp"

#include <cmath>

#include "crashbound/error.hpp"
#include "crashbound/rng.hpp"

namespace crashbound {

void check_topology(const TopologySpec& spec) {
  if (spec.input_dim == 0 || spec.output_dim == 0) throw DomainError("topology dimensions must be >= 1");
  if (spec.layer_widths.empty()) throw DomainError("topology needs at least one hidden layer");
  for (auto w : spec.layer_widths)
    if (w == 0) throw DomainError("hidden layer widths must be >= 1");
  if (!(spec.activation.lipschitz > 0.0) || !std::isfinite(spec.activation.lipschitz))
    throw DomainError("lipschitz coefficient must be finite and > 0");
}

Network random_network(const TopologySpec& spec, std::uint64_t seed, const WeightDistribution& dist) {
  check_topology(spec);
  SplitMix64 rng(seed);
  NormalSampler normal(dist.mean, dist.stddev);
  auto fill = [&](Matrix& m) {
    for (double& w : m.values()) w = normal(rng);
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

Network scale_weights(const Network& net, double s) {
  if (!std::isfinite(s)) throw DomainError("scale factor must be finite");
  Network out = net;
  for (auto& layer : out.layers)
    for (double& w : layer.weights.values()) w *= s;
  for (double& w : out.output_weights.values()) w *= s;
  return out;
}

Network with_lipschitz(const Network& net, double k) {
  Network out = net;
  out.activation.lipschitz = k;
  return out;
}

Matrix uniform_inputs(std::size_t count, std::size_t dim, std::uint64_t seed) {
  SplitMix64 rng(seed);
  Matrix m(count, dim);
  for (double& x : m.values()) x = rng.uniform();
  return m;
}

}  // namespace crashbound
