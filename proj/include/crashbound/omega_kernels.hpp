#pragma once

// The two implementations of crash-pattern enumeration. The OpenMP kernel is
// what the public omega_* functions use; the serial reference is kept as an
// independent check for tests and the benchmark.

#include <cstdint>

#include "crashbound/detail/pattern_source.hpp"
#include "crashbound/kahan.hpp"
#include "crashbound/matrix.hpp"
#include "crashbound/network.hpp"
#include "crashbound/omega.hpp"

namespace crashbound {

struct OmegaTotals {
  KahanSum sum;            ///< over all pattern x input values
  KahanSum sum_sq;
  KahanSum sum_input_max;  ///< over inputs of the per-input max
  double max = 0.0;
  std::uint64_t patterns = 0;
  std::uint64_t inputs = 0;
};

/// Parallel over (input, pattern-chunk) tiles. Chunk boundaries do not
/// depend on the worker count and partial sums are merged in tile order, so
/// the totals are bit-identical for any `workers`.
OmegaTotals omega_kernel_parallel(const Network& net, const Matrix& inputs,
                                  const detail::PatternSource& patterns, OutputNorm norm, int workers);

/// Straightforward loop over patterns then inputs using forward() and
/// forward_failed().
OmegaTotals omega_kernel_reference(const Network& net, const Matrix& inputs,
                                   const detail::PatternSource& patterns, OutputNorm norm);

/// Aggregates totals into a report (mode-specific fields left default).
OmegaReport finalize(const OmegaTotals& t, std::size_t f_total);

/// Output deviation between two output vectors under `norm`.
double output_deviation(std::span<const double> nominal, std::span<const double> failed, OutputNorm norm);

}  // namespace crashbound
