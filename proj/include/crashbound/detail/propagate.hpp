#pragma once

// Shared inner loops. forward(), forward_failed() and the omega kernels all go
// through these so that every route sums in the same order and produces
// bit-identical values.

#include <cstddef>
#include <span>

#include "crashbound/activation.hpp"
#include "crashbound/matrix.hpp"
#include "crashbound/network.hpp"

namespace crashbound::detail {

inline double dot(std::span<const double> w, std::span<const double> x) {
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * x[i];
  return s;
}

/// pre[j] = (sum_i W(j,i) * prev[i]) + b[j]; act[j] = phi(pre[j]), or 0 when
/// `crashed` (may be empty) flags neuron j.
inline void hidden_layer(const Layer& layer, const Activation& phi, std::span<const double> prev,
                         std::span<const unsigned char> crashed, std::span<double> pre,
                         std::span<double> act) {
  const std::size_t n = layer.width();
  for (std::size_t j = 0; j < n; ++j) {
    pre[j] = dot(layer.weights.row(j), prev) + layer.biases[j];
    act[j] = (!crashed.empty() && crashed[j]) ? 0.0 : activate(phi, pre[j]);
  }
}

inline void output_layer(const Matrix& w, std::span<const double> prev, std::span<double> out) {
  for (std::size_t k = 0; k < w.rows(); ++k) out[k] = dot(w.row(k), prev);
}

}  // namespace crashbound::detail
