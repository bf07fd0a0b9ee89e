#pragma once

namespace crashbound {

/// Kahan compensated accumulator. Merging two accumulators is not
/// associative, so callers that need reproducible results must merge in a
/// fixed order.
struct KahanSum {
  double sum = 0.0;
  double comp = 0.0;

  void add(double x) noexcept {
    const double y = x - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }

  void merge(const KahanSum& other) noexcept {
    add(other.sum);
    add(-other.comp);
  }

  double value() const noexcept { return sum - comp; }
};

}  // namespace crashbound
