#include "crashbound/omega.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "crashbound/forward.hpp"
#include "crashbound/omega_kernels.hpp"

namespace crashbound {

std::string_view to_string(OutputNorm n) { return n == OutputNorm::Max ? "max" : "mean"; }

OutputNorm parse_output_norm(std::string_view name) {
  if (name == "max") return OutputNorm::Max;
  if (name == "mean") return OutputNorm::Mean;
  throw DomainError("unknown output norm '" + std::string(name) + "' (expected max or mean)");
}

std::string_view to_string(OmegaMode m) {
  switch (m) {
    case OmegaMode::Exhaustive: return "exhaustive";
    case OmegaMode::Sampled: return "sampled";
    case OmegaMode::Allocation: return "allocation";
  }
  return "?";
}

BudgetExceeded::BudgetExceeded(BigInt required, std::uint64_t budget)
    : Error("evaluation requires " + to_decimal(required) + " crashed evaluations, budget is " +
            std::to_string(budget)),
      required_(std::move(required)),
      budget_(budget) {}

double output_deviation(std::span<const double> nominal, std::span<const double> failed, OutputNorm norm) {
  double acc = 0.0;
  for (std::size_t k = 0; k < nominal.size(); ++k) {
    const double d = std::abs(nominal[k] - failed[k]);
    acc = norm == OutputNorm::Max ? std::max(acc, d) : acc + d;
  }
  return norm == OutputNorm::Max ? acc : acc / static_cast<double>(nominal.size());
}

OmegaReport finalize(const OmegaTotals& t, std::size_t f_total) {
  OmegaReport r;
  r.f_total = f_total;
  r.patterns_evaluated = t.patterns;
  r.inputs_evaluated = t.inputs;
  const double n = static_cast<double>(t.patterns) * static_cast<double>(t.inputs);
  r.omega_av = t.sum.value() / n;
  r.omega_mav = t.sum_input_max.value() / static_cast<double>(t.inputs);
  r.omega_max = t.max;
  const double var = t.sum_sq.value() / n - r.omega_av * r.omega_av;
  r.std_dev = std::sqrt(std::max(0.0, var));
  // Rounding can push the means past the max by an ulp when every value is equal.
  r.omega_av = std::min(r.omega_av, r.omega_mav);
  r.omega_mav = std::min(r.omega_mav, r.omega_max);
  return r;
}

double omega_point(const Network& net, std::span<const double> input, const CrashPattern& pattern,
                   OutputNorm norm) {
  const auto nominal = forward(net, input).output;
  return output_deviation(nominal, forward_failed(net, input, pattern), norm);
}

BigInt required_evaluations(const Network& net, std::size_t f_total, std::uint64_t n_inputs) {
  return binomial(static_cast<long long>(net.hidden_count()), static_cast<long long>(f_total)) * n_inputs;
}

namespace {

void check_inputs(const Network& net, const Matrix& inputs) {
  require_valid(net);
  if (inputs.rows() == 0) throw DomainError("omega needs at least one input");
  if (inputs.cols() != net.input_dim)
    throw ShapeError("inputs have dimension " + std::to_string(inputs.cols()) + ", network expects " +
                     std::to_string(net.input_dim));
}

void check_budget(const BigInt& required, std::uint64_t budget) {
  if (required > BigInt(budget)) throw BudgetExceeded(required, budget);
}

}  // namespace

OmegaReport omega_exhaustive(const Network& net, const Matrix& inputs, std::size_t f_total,
                             const OmegaOptions& opts) {
  check_inputs(net, inputs);
  if (f_total > net.hidden_count())
    throw PatternError("cannot crash " + std::to_string(f_total) + " of " +
                       std::to_string(net.hidden_count()) + " hidden neurons");
  check_budget(required_evaluations(net, f_total, inputs.rows()), opts.budget);
  const detail::CombinationSource source(net.hidden_count(), f_total);
  OmegaReport r = finalize(omega_kernel_parallel(net, inputs, source, opts.norm, opts.workers), f_total);
  r.mode = OmegaMode::Exhaustive;
  return r;
}

OmegaReport omega_sampled(const Network& net, const Matrix& inputs, std::size_t f_total,
                          std::uint64_t n_samples, std::uint64_t seed, const OmegaOptions& opts) {
  check_inputs(net, inputs);
  if (n_samples == 0) throw DomainError("omega_sampled needs n_samples >= 1");
  if (f_total > net.hidden_count())
    throw PatternError("cannot crash " + std::to_string(f_total) + " of " +
                       std::to_string(net.hidden_count()) + " hidden neurons");
  if (binomial(static_cast<long long>(net.hidden_count()), static_cast<long long>(f_total)) <= n_samples)
    return omega_exhaustive(net, inputs, f_total, opts);
  check_budget(BigInt(n_samples) * inputs.rows(), opts.budget);

  const auto source = detail::sample_patterns(net.hidden_count(), f_total, n_samples, seed);
  OmegaReport r = finalize(omega_kernel_parallel(net, inputs, source, opts.norm, opts.workers), f_total);
  r.mode = OmegaMode::Sampled;
  r.seed = seed;
  r.n_samples = n_samples;
  r.std_err = r.std_dev / std::sqrt(static_cast<double>(n_samples) * static_cast<double>(inputs.rows()));
  return r;
}

OmegaReport omega_allocation(const Network& net, const Matrix& inputs, std::span<const std::size_t> f_per_layer,
                             const OmegaOptions& opts) {
  check_inputs(net, inputs);
  const auto widths = net.widths();
  if (f_per_layer.size() != widths.size()) throw PatternError("allocation length does not match depth");
  BigInt patterns = 1;
  std::size_t f_total = 0;
  for (std::size_t l = 0; l < widths.size(); ++l) {
    if (f_per_layer[l] > widths[l]) throw PatternError("allocation exceeds width of layer " + std::to_string(l));
    patterns *= binomial(static_cast<long long>(widths[l]), static_cast<long long>(f_per_layer[l]));
    f_total += f_per_layer[l];
  }
  check_budget(patterns * inputs.rows(), opts.budget);
  const detail::AllocationSource source(widths, f_per_layer);
  OmegaReport r = finalize(omega_kernel_parallel(net, inputs, source, opts.norm, opts.workers), f_total);
  r.mode = OmegaMode::Allocation;
  return r;
}

double single_layer_expected_exact(const Network& net, std::size_t f_total, const Matrix& inputs) {
  check_inputs(net, inputs);
  if (net.depth() != 1) throw UnsupportedError("closed form needs exactly one hidden layer");
  if (net.output_dim() != 1) throw UnsupportedError("closed form needs a scalar output");
  for (double w : net.output_weights.values())
    if (w < 0.0) throw UnsupportedError("closed form needs nonnegative output weights");
  const std::size_t width = net.width(0);
  if (f_total > width) throw PatternError("f_total exceeds the layer width");

  std::vector<KahanSum> mean_y(width);
  for (std::size_t i = 0; i < inputs.rows(); ++i) {
    const auto t = forward(net, inputs.row(i));
    for (std::size_t j = 0; j < width; ++j) mean_y[j].add(t.activations[0][j]);
  }
  KahanSum total;
  for (std::size_t j = 0; j < width; ++j)
    total.add(net.output_weights(0, j) * (mean_y[j].value() / static_cast<double>(inputs.rows())));
  return static_cast<double>(f_total) / static_cast<double>(width) * total.value();
}

}  // namespace crashbound
