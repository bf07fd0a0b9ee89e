#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "crashbound/activation.hpp"
#include "crashbound/omega.hpp"
#include "crashbound/trainer.hpp"

namespace crashbound {

enum class ExperimentKind { SweepK, SweepScale, DepthInversion, DropoutStudy, LearningCost, ErfReport, OmegaReport };

std::string_view to_string(ExperimentKind k);
ExperimentKind parse_experiment_kind(std::string_view name);

/// Everything one experiment run needs. default_spec() fills in the grids
/// appropriate to each kind.
struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::SweepK;

  std::uint64_t seed = 1;
  std::size_t n_seeds = 3;  ///< random networks per grid point
  int workers = 0;
  std::uint64_t budget = kDefaultBudget;
  std::optional<std::uint64_t> sample;  ///< allow sampled omega with this many patterns
  std::size_t n_inputs = 1000;
  OutputNorm norm = OutputNorm::Max;

  // Random network topology.
  ActivationKind activation = ActivationKind::Relu;
  std::size_t input_dim = 4;
  std::vector<std::size_t> widths{4, 4, 4, 4};
  double lipschitz = 1.0;  ///< used where K is not swept

  std::vector<double> k_grid{0.25, 0.5, 1.0, 2.0, 4.0};
  std::vector<double> scale_grid{0.01, 0.1, 1.0, 10.0, 100.0};
  std::vector<std::size_t> f_list{1, 2, 3, 4};
  std::vector<double> dropout_grid{0.0, 0.1, 0.2, 0.3};

  /// ErfReport / OmegaReport input.
  std::filesystem::path network;
  /// OmegaReport: use the MNIST test images instead of random inputs.
  bool dataset_inputs = false;

  /// Empty means $MNIST_DIR.
  std::filesystem::path mnist_dir;
  std::size_t train_size = 10000;
  std::size_t test_size = 1000;
  TrainConfig train;

  std::size_t runs_per_k = 10;
  std::string task = "xor";  ///< LearningCost dataset: xor or mnist
};

ExperimentSpec default_spec(ExperimentKind kind);

/// Throws DomainError when a grid is empty or the budget is 0.
void check_spec(const ExperimentSpec& spec);

enum ExitCode : int { kExitOk = 0, kExitError = 1, kExitIo = 2, kExitBudget = 3 };

struct ExperimentOutcome {
  int exit_code = kExitOk;
  /// Crashed forward evaluations performed; never exceeds spec.budget.
  std::uint64_t evaluations = 0;
  std::size_t rows = 0;
};

/// Runs one experiment, writing CSV to `csv` and progress / diagnostics to
/// `log`. Errors are reported on `log` and mapped to a nonzero exit code.
ExperimentOutcome run_experiment(const ExperimentSpec& spec, std::ostream& csv, std::ostream& log);

}  // namespace crashbound
