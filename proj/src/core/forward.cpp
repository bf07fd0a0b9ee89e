#include "crashbound/forward.hpp"

#include <string>

#include "crashbound/detail/propagate.hpp"
#include "crashbound/error.hpp"

namespace crashbound {

namespace {

LayerTrace run(const Network& net, std::span<const double> input, const CrashPattern* pattern) {
  if (input.size() != net.input_dim)
    throw ShapeError("input has length " + std::to_string(input.size()) + ", network expects " +
                     std::to_string(net.input_dim));
  if (pattern && pattern->widths() != net.widths())
    throw PatternError("crash pattern was built for a different topology");

  const std::size_t depth = net.depth();
  LayerTrace t;
  t.pre_activations.resize(depth);
  t.activations.resize(depth);
  std::vector<unsigned char> mask;
  std::span<const double> prev = input;
  for (std::size_t l = 0; l < depth; ++l) {
    const std::size_t n = net.layers[l].width();
    if (net.layers[l].weights.cols() != prev.size() || net.layers[l].biases.size() != n)
      throw ShapeError("layer " + std::to_string(l) + " does not chain with its input");
    t.pre_activations[l].resize(n);
    t.activations[l].resize(n);
    mask.assign(pattern ? n : 0, 0);
    if (pattern)
      for (const auto& c : pattern->crashed())
        if (c.layer == l) mask[c.index] = 1;
    detail::hidden_layer(net.layers[l], net.activation, prev, mask, t.pre_activations[l],
                         t.activations[l]);
    prev = t.activations[l];
  }
  if (net.output_weights.cols() != prev.size())
    throw ShapeError("output weights do not chain with the last hidden layer");
  t.output.resize(net.output_dim());
  detail::output_layer(net.output_weights, prev, t.output);
  return t;
}

}  // namespace

LayerTrace forward(const Network& net, std::span<const double> input) { return run(net, input, nullptr); }

LayerTrace forward_trace(const Network& net, std::span<const double> input, const CrashPattern& pattern) {
  return run(net, input, &pattern);
}

std::vector<double> forward_failed(const Network& net, std::span<const double> input,
                                   const CrashPattern& pattern) {
  return run(net, input, &pattern).output;
}

}  // namespace crashbound
