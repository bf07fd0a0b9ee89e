#pragma once

#include <algorithm>
#include <cmath>
#include <string_view>

namespace crashbound {

enum class ActivationKind { Sigmoid, Relu };

/// Activation function with an explicit Lipschitz coefficient K.
///
/// Sigmoid is parameterized as 1 / (1 + exp(-4 K x)), so its steepest slope
/// (at x = 0) is exactly K. Relu is K * max(0, x).
struct Activation {
  ActivationKind kind = ActivationKind::Sigmoid;
  double lipschitz = 1.0;

  bool operator==(const Activation&) const = default;
};

/// Sigmoid output is kept strictly inside (0, 1): far from the origin the
/// exact value rounds to 0 or 1, and 0 would be indistinguishable from a crash.
inline double activate(const Activation& a, double x) {
  if (a.kind == ActivationKind::Sigmoid) {
    constexpr double lo = 0x1p-1074;
    constexpr double hi = 1.0 - 0x1p-53;
    return std::clamp(1.0 / (1.0 + std::exp(-4.0 * a.lipschitz * x)), lo, hi);
  }
  return a.lipschitz * std::max(0.0, x);
}

/// Derivative used by backpropagation. The Relu subgradient at 0 is 0.
inline double activate_derivative(const Activation& a, double x) {
  if (a.kind == ActivationKind::Sigmoid) {
    const double y = activate(a, x);
    return 4.0 * a.lipschitz * y * (1.0 - y);
  }
  return x > 0.0 ? a.lipschitz : 0.0;
}

std::string_view to_string(ActivationKind kind);
/// Accepts "sigmoid" or "relu"; throws DomainError otherwise.
ActivationKind parse_activation_kind(std::string_view name);

}  // namespace crashbound
