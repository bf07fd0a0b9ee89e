#include <algorithm>
#include <cstdint>
#include <vector>

#include <omp.h>

#include "crashbound/detail/propagate.hpp"
#include "crashbound/forward.hpp"
#include "crashbound/omega_kernels.hpp"

namespace crashbound {

namespace {

// Patterns per tile. Fixed so that tile boundaries, and therefore the
// summation tree, never depend on the number of workers.
constexpr std::uint64_t kChunk = 512;

struct TileStats {
  KahanSum sum;
  KahanSum sum_sq;
  double max = 0.0;
};

}  // namespace

OmegaTotals omega_kernel_parallel(const Network& net, const Matrix& inputs,
                                  const detail::PatternSource& patterns, OutputNorm norm, int workers) {
  const std::size_t n_inputs = inputs.rows();
  const std::size_t depth = net.depth();
  const std::size_t hidden = net.hidden_count();
  const std::size_t n_out = net.output_dim();
  const std::size_t k = patterns.pattern_size();
  const std::uint64_t n_patterns = patterns.count();
  if (workers <= 0) workers = omp_get_max_threads();

  std::vector<std::size_t> offset(depth + 1, 0);
  std::vector<std::size_t> layer_of(hidden);
  for (std::size_t l = 0; l < depth; ++l) {
    offset[l + 1] = offset[l] + net.width(l);
    std::fill(layer_of.begin() + static_cast<std::ptrdiff_t>(offset[l]),
              layer_of.begin() + static_cast<std::ptrdiff_t>(offset[l + 1]), l);
  }

  // Nominal activations and outputs, computed once per input.
  std::vector<double> nominal_act(n_inputs * hidden);
  std::vector<double> nominal_out(n_inputs * n_out);
  const auto n_in = static_cast<std::int64_t>(n_inputs);
#pragma omp parallel for schedule(static) num_threads(workers)
  for (std::int64_t i = 0; i < n_in; ++i) {
    const LayerTrace t = forward(net, inputs.row(static_cast<std::size_t>(i)));
    double* act = nominal_act.data() + static_cast<std::size_t>(i) * hidden;
    for (std::size_t l = 0; l < depth; ++l) std::copy(t.activations[l].begin(), t.activations[l].end(), act + offset[l]);
    std::copy(t.output.begin(), t.output.end(), nominal_out.data() + static_cast<std::size_t>(i) * n_out);
  }

  const std::uint64_t chunks = (n_patterns + kChunk - 1) / kChunk;
  const auto n_tiles = static_cast<std::int64_t>(chunks * n_inputs);
  std::vector<TileStats> tiles(static_cast<std::size_t>(n_tiles));

#pragma omp parallel num_threads(workers)
  {
    std::vector<unsigned char> mask(hidden, 0);
    std::vector<double> act(hidden);
    std::vector<double> pre(hidden);
    std::vector<double> out(n_out);
    std::vector<std::size_t> ids(k);

#pragma omp for schedule(dynamic, 4)
    for (std::int64_t t = 0; t < n_tiles; ++t) {
      const std::size_t input = static_cast<std::size_t>(t) / chunks;
      const std::uint64_t begin = (static_cast<std::uint64_t>(t) % chunks) * kChunk;
      const std::uint64_t end = std::min(n_patterns, begin + kChunk);
      const double* nom_act = nominal_act.data() + input * hidden;
      const std::span<const double> nom_out(nominal_out.data() + input * n_out, n_out);
      TileStats st;

      for (std::uint64_t r = begin; r < end; ++r) {
        if (r == begin)
          patterns.seek(r, ids);
        else
          patterns.advance(r - 1, ids);

        // Layers before the first crashed one are unchanged, so start from
        // the nominal activations there.
        const std::size_t first = k == 0 ? depth : layer_of[ids[0]];
        for (std::size_t id : ids) mask[id] = 1;
        std::span<const double> prev;
        if (first == depth) {
          prev = {nom_act + offset[depth - 1], net.width(depth - 1)};
        } else {
          std::copy(nom_act + offset[first], nom_act + offset[first + 1], act.begin() + static_cast<std::ptrdiff_t>(offset[first]));
          for (std::size_t id : ids)
            if (layer_of[id] == first) act[id] = 0.0;
          for (std::size_t l = first + 1; l < depth; ++l) {
            const std::size_t w = net.width(l);
            detail::hidden_layer(net.layers[l], net.activation,
                                 std::span<const double>(act.data() + offset[l - 1], net.width(l - 1)),
                                 std::span<const unsigned char>(mask.data() + offset[l], w),
                                 std::span<double>(pre.data() + offset[l], w),
                                 std::span<double>(act.data() + offset[l], w));
          }
          prev = {act.data() + offset[depth - 1], net.width(depth - 1)};
        }
        detail::output_layer(net.output_weights, prev, out);
        for (std::size_t id : ids) mask[id] = 0;

        const double omega = output_deviation(nom_out, out, norm);
        st.sum.add(omega);
        st.sum_sq.add(omega * omega);
        st.max = std::max(st.max, omega);
      }
      tiles[static_cast<std::size_t>(t)] = st;
    }
  }

  OmegaTotals totals;
  totals.patterns = n_patterns;
  totals.inputs = n_inputs;
  for (std::size_t i = 0; i < n_inputs; ++i) {
    double input_max = 0.0;
    for (std::uint64_t c = 0; c < chunks; ++c) {
      const TileStats& st = tiles[i * chunks + c];
      totals.sum.merge(st.sum);
      totals.sum_sq.merge(st.sum_sq);
      input_max = std::max(input_max, st.max);
    }
    totals.sum_input_max.add(input_max);
    totals.max = std::max(totals.max, input_max);
  }
  return totals;
}

}  // namespace crashbound
