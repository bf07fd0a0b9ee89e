#include <algorithm>
#include <vector>

#include "crashbound/crash_pattern.hpp"
#include "crashbound/forward.hpp"
#include "crashbound/omega_kernels.hpp"

namespace crashbound {

OmegaTotals omega_kernel_reference(const Network& net, const Matrix& inputs,
                                   const detail::PatternSource& patterns, OutputNorm norm) {
  const auto widths = net.widths();
  const std::size_t n_inputs = inputs.rows();
  std::vector<std::vector<double>> nominal(n_inputs);
  for (std::size_t i = 0; i < n_inputs; ++i) nominal[i] = forward(net, inputs.row(i)).output;

  OmegaTotals totals;
  totals.patterns = patterns.count();
  totals.inputs = n_inputs;
  std::vector<double> input_max(n_inputs, 0.0);
  std::vector<std::size_t> ids(patterns.pattern_size());
  for (std::uint64_t r = 0; r < patterns.count(); ++r) {
    if (r == 0)
      patterns.seek(0, ids);
    else
      patterns.advance(r - 1, ids);
    const CrashPattern pattern = CrashPattern::from_flat(widths, ids);
    for (std::size_t i = 0; i < n_inputs; ++i) {
      const double omega = output_deviation(nominal[i], forward_failed(net, inputs.row(i), pattern), norm);
      totals.sum.add(omega);
      totals.sum_sq.add(omega * omega);
      input_max[i] = std::max(input_max[i], omega);
    }
  }
  for (double m : input_max) {
    totals.sum_input_max.add(m);
    totals.max = std::max(totals.max, m);
  }
  return totals;
}

}  // namespace crashbound
