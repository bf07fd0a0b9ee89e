#pragma once

#include <vector>

#include "crashbound/matrix.hpp"
#include "crashbound/network.hpp"

namespace fixtures {

using namespace crashbound;

inline Layer layer(std::size_t rows, std::size_t cols, std::vector<double> w, std::vector<double> b) {
  return {Matrix(rows, cols, std::move(w)), std::move(b)};
}

/// d=1, one hidden layer of two zero-weight sigmoid neurons (y = 0.5 each),
/// output weights (0.3, 0.7).
inline Network two_neuron_net() {
  Network net;
  net.input_dim = 1;
  net.layers.push_back(layer(2, 1, {0, 0}, {0, 0}));
  net.output_weights = Matrix(1, 2, {0.3, 0.7});
  net.activation = {ActivationKind::Sigmoid, 1.0};
  return net;
}

inline Matrix rows(std::vector<std::vector<double>> r) {
  const std::size_t cols = r.empty() ? 0 : r.front().size();
  std::vector<double> flat;
  for (auto& v : r) flat.insert(flat.end(), v.begin(), v.end());
  return Matrix(r.size(), cols, std::move(flat));
}

inline std::vector<std::vector<double>> to_vectors(const Matrix& m) {
  std::vector<std::vector<double>> out;
  for (std::size_t r = 0; r < m.rows(); ++r) out.emplace_back(m.row(r).begin(), m.row(r).end());
  return out;
}

}  // namespace fixtures
