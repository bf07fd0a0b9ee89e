#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

#include "crashbound/combinatorics.hpp"
#include "crashbound/crash_pattern.hpp"
#include "crashbound/error.hpp"
#include "crashbound/matrix.hpp"
#include "crashbound/network.hpp"

namespace crashbound {

/// How a multi-dimensional output deviation collapses to one number.
enum class OutputNorm { Max, Mean };

std::string_view to_string(OutputNorm n);
OutputNorm parse_output_norm(std::string_view name);

inline constexpr std::uint64_t kDefaultBudget = 100'000'000;

struct OmegaOptions {
  OutputNorm norm = OutputNorm::Max;
  /// OpenMP worker count; <= 0 uses the runtime default. Results do not
  /// depend on it.
  int workers = 0;
  /// Maximum number of crashed (pattern, input) evaluations one call may run.
  std::uint64_t budget = kDefaultBudget;
};

enum class OmegaMode { Exhaustive, Sampled, Allocation };
std::string_view to_string(OmegaMode m);

/// Aggregates of the crash-induced output deviation over patterns x inputs.
/// omega_av is the mean over every pair, omega_mav the mean over inputs of
/// the worst pattern, omega_max the global worst.
struct OmegaReport {
  std::size_t f_total = 0;
  double omega_av = 0.0;
  double omega_mav = 0.0;
  double omega_max = 0.0;
  double std_dev = 0.0;  ///< population std over all pattern x input values
  double std_err = 0.0;  ///< sampled mode only
  std::uint64_t patterns_evaluated = 0;
  std::uint64_t inputs_evaluated = 0;
  OmegaMode mode = OmegaMode::Exhaustive;
  std::uint64_t seed = 0;
  std::uint64_t n_samples = 0;

  bool operator==(const OmegaReport&) const = default;
};

/// Thrown before any work starts when a computation would exceed its budget.
class BudgetExceeded : public Error {
 public:
  BudgetExceeded(BigInt required, std::uint64_t budget);
  const BigInt& required() const noexcept { return required_; }
  std::uint64_t budget() const noexcept { return budget_; }

 private:
  BigInt required_;
  std::uint64_t budget_;
};

/// Deviation between nominal and crashed output for one input.
double omega_point(const Network& net, std::span<const double> input, const CrashPattern& pattern,
                   OutputNorm norm = OutputNorm::Max);

/// Number of crashed evaluations an exhaustive run at `f_total` needs:
/// C(hidden_count, f_total) * n_inputs.
BigInt required_evaluations(const Network& net, std::size_t f_total, std::uint64_t n_inputs);

/// Every size-f_total subset of hidden neurons (all layers jointly, in
/// lexicographic order of flat ids) against every row of `inputs`.
OmegaReport omega_exhaustive(const Network& net, const Matrix& inputs, std::size_t f_total,
                             const OmegaOptions& opts = {});

/// n_samples independent uniform size-f_total subsets drawn from `seed`.
/// Falls back to omega_exhaustive when n_samples >= C(N, f_total).
OmegaReport omega_sampled(const Network& net, const Matrix& inputs, std::size_t f_total,
                          std::uint64_t n_samples, std::uint64_t seed, const OmegaOptions& opts = {});

/// Every pattern with exactly f_per_layer[l] crashes in layer l.
OmegaReport omega_allocation(const Network& net, const Matrix& inputs,
                             std::span<const std::size_t> f_per_layer, const OmegaOptions& opts = {});

/// Closed-form expectation of omega_av for a single hidden layer with
/// nonnegative output weights and scalar output:
/// (f / N) * sum_i w_i * mean_X y_i(X).
double single_layer_expected_exact(const Network& net, std::size_t f_total, const Matrix& inputs);

}  // namespace crashbound
