#include "crashbound/erf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

#include "crashbound/combinatorics.hpp"
#include "crashbound/error.hpp"

namespace crashbound {

LayerBounds layer_output_bounds(const Network& net) {
  require_valid(net);
  LayerBounds out;
  out.caps.assign(net.depth(), 1.0);
  if (net.activation.kind == ActivationKind::Sigmoid) return out;

  const double k = net.activation.lipschitz;
  std::vector<double> lo(net.input_dim, 0.0);
  std::vector<double> hi(net.input_dim, 1.0);
  for (std::size_t l = 0; l < net.depth(); ++l) {
    const Layer& layer = net.layers[l];
    std::vector<double> next_hi(layer.width());
    double cap = 0.0;
    for (std::size_t j = 0; j < layer.width(); ++j) {
      const auto w = layer.weights.row(j);
      double upper = 0.0;
      for (std::size_t i = 0; i < w.size(); ++i) upper += w[i] * (w[i] >= 0.0 ? hi[i] : lo[i]);
      upper += layer.biases[j];
      next_hi[j] = k * std::max(0.0, upper);
      cap = std::max(cap, next_hi[j]);
    }
    out.caps[l] = cap;
    lo.assign(layer.width(), 0.0);
    hi = std::move(next_hi);
  }
  return out;
}

namespace {

struct ErfInputs {
  std::vector<std::size_t> widths;
  std::vector<double> caps;
  std::vector<WeightStats> stats;
  double k;
};

ErfInputs gather(const Network& net) {
  return {net.widths(), layer_output_bounds(net).caps, layer_weight_stats(net), net.activation.lipschitz};
}

void check_allocation(const std::vector<std::size_t>& widths, std::span<const std::size_t> f) {
  if (f.size() != widths.size())
    throw PatternError("allocation has " + std::to_string(f.size()) + " entries for " +
                       std::to_string(widths.size()) + " layers");
  for (std::size_t l = 0; l < f.size(); ++l)
    if (f[l] > widths[l])
      throw PatternError("allocation crashes " + std::to_string(f[l]) + " neurons in layer " +
                         std::to_string(l) + " of width " + std::to_string(widths[l]));
}

ErfReport evaluate(const ErfInputs& in, std::span<const std::size_t> f) {
  const std::size_t depth = in.widths.size();
  ErfReport r;
  r.f_per_layer.assign(f.begin(), f.end());
  r.terms_max.assign(depth, 0.0);
  r.terms_av.assign(depth, 0.0);
  for (std::size_t l = 0; l < depth; ++l) {
    if (f[l] == 0) continue;
    const double base = in.caps[l] * static_cast<double>(f[l]) *
                        std::pow(in.k, static_cast<double>(depth - 1 - l));
    double tm = base * in.stats[depth].max_abs;
    double ta = base * in.stats[depth].mean_abs;
    for (std::size_t m = l + 1; m < depth; ++m) {
      const double survivors = static_cast<double>(in.widths[m] - f[m]);
      tm *= survivors * in.stats[m].max_abs;
      ta *= survivors * in.stats[m].mean_abs;
    }
    r.terms_max[l] = tm;
    r.terms_av[l] = ta;
    r.erf_max += tm;
    r.erf_av += ta;
  }
  return r;
}

void allocations_rec(std::span<const std::size_t> widths, std::size_t layer, std::size_t remaining,
                     std::size_t capacity_after, std::vector<std::size_t>& cur,
                     const std::function<void(std::span<const std::size_t>)>& visit) {
  if (layer == widths.size()) {
    if (remaining == 0) visit(cur);
    return;
  }
  const std::size_t rest = capacity_after - widths[layer];
  const std::size_t lo = remaining > rest ? remaining - rest : 0;
  const std::size_t hi = std::min(widths[layer], remaining);
  for (std::size_t f = lo; f <= hi; ++f) {
    cur[layer] = f;
    allocations_rec(widths, layer + 1, remaining - f, rest, cur, visit);
  }
  cur[layer] = 0;
}

}  // namespace

ErfReport erf_fixed(const Network& net, std::span<const std::size_t> f_per_layer) {
  const ErfInputs in = gather(net);
  check_allocation(in.widths, f_per_layer);
  return evaluate(in, f_per_layer);
}

void for_each_allocation(std::span<const std::size_t> widths, std::size_t total,
                         const std::function<void(std::span<const std::size_t>)>& visit) {
  std::size_t capacity = 0;
  for (auto w : widths) capacity += w;
  if (total > capacity) return;
  std::vector<std::size_t> cur(widths.size(), 0);
  allocations_rec(widths, 0, total, capacity, cur, visit);
}

double allocation_probability(std::span<const std::size_t> widths, std::span<const std::size_t> allocation) {
  if (widths.size() != allocation.size()) throw PatternError("allocation length does not match depth");
  long long n = 0;
  long long f = 0;
  BigInt ways = 1;
  for (std::size_t l = 0; l < widths.size(); ++l) {
    if (allocation[l] > widths[l]) throw PatternError("allocation exceeds layer width");
    ways *= binomial(static_cast<long long>(widths[l]), static_cast<long long>(allocation[l]));
    n += static_cast<long long>(widths[l]);
    f += static_cast<long long>(allocation[l]);
  }
  using boost::multiprecision::cpp_rational;
  const cpp_rational p(ways, binomial(n, f));
  return p.convert_to<double>();
}

ErfTotal erf_total(const Network& net, std::size_t f_total) {
  const ErfInputs in = gather(net);
  std::size_t capacity = 0;
  for (auto w : in.widths) capacity += w;
  if (f_total > capacity)
    throw PatternError("cannot crash " + std::to_string(f_total) + " of " + std::to_string(capacity) +
                       " hidden neurons");

  ErfTotal out;
  bool first = true;
  for_each_allocation(in.widths, f_total, [&](std::span<const std::size_t> f) {
    const ErfReport r = evaluate(in, f);
    if (first || r.erf_max > out.erf_max_worst) {
      out.erf_max_worst = r.erf_max;
      out.worst_allocation.assign(f.begin(), f.end());
      first = false;
    }
    out.erf_av_expected += allocation_probability(in.widths, f) * r.erf_av;
    ++out.allocations;
  });
  return out;
}

std::size_t tolerable_crashes_single_layer(const Network& net, const RobustnessQuery& q) {
  if (net.depth() != 1)
    throw UnsupportedError("tolerable_crashes_single_layer needs exactly one hidden layer; use erf_total");
  if (!(q.epsilon_prime >= 0.0) || !(q.epsilon_prime <= q.epsilon))
    throw DomainError("robustness query needs 0 <= epsilon_prime <= epsilon");
  const std::size_t width = net.width(0);
  const double cap = layer_output_bounds(net).caps[0];
  const double w_av = layer_weight_stats(net).back().mean_abs;
  const double margin = q.epsilon - q.epsilon_prime;
  const double divisor = cap * w_av;
  if (divisor == 0.0) return margin > 0.0 ? width : 0;
  // A quotient within a few ulps of an integer is taken as that integer, so
  // decimal budgets such as 0.3 / 0.1 give 3 rather than 2.
  const double quotient = margin / divisor;
  const double nearest = std::round(quotient);
  const double n = std::abs(quotient - nearest) <= 8.0 * std::numeric_limits<double>::epsilon() * nearest
                       ? nearest
                       : std::floor(quotient);
  if (n >= static_cast<double>(width)) return width;
  return static_cast<std::size_t>(n);
}

}  // namespace crashbound
