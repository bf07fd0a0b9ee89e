#include "crashbound/harness.hpp"

#include <sstream>

#include "crashbound/dataio.hpp"
#include "crashbound/erf.hpp"
#include "crashbound/error.hpp"
#include "crashbound/netgen.hpp"
#include "crashbound/rng.hpp"

namespace crashbound {

namespace {

constexpr std::pair<ExperimentKind, std::string_view> kNames[] = {
    {ExperimentKind::SweepK, "sweep-k"},
    {ExperimentKind::SweepScale, "sweep-scale"},
    {ExperimentKind::DepthInversion, "depth-inversion"},
    {ExperimentKind::DropoutStudy, "dropout-study"},
    {ExperimentKind::LearningCost, "learning-cost"},
    {ExperimentKind::ErfReport, "erf-report"},
    {ExperimentKind::OmegaReport, "omega-report"},
};

class MissingData : public Error {
 public:
  using Error::Error;
};

// Tracks crashed evaluations against the experiment-wide budget and decides
// between exhaustive and sampled omega.
class Runner {
 public:
  Runner(const ExperimentSpec& spec, std::ostream& log) : spec_(spec), log_(log) {}

  OmegaReport omega(const Network& net, const Matrix& inputs, std::size_t f, std::uint64_t seed) {
    const BigInt exhaustive = required_evaluations(net, f, inputs.rows());
    const BigInt remaining = BigInt(spec_.budget - used_);
    OmegaOptions opts{spec_.norm, spec_.workers, spec_.budget - used_};
    OmegaReport r;
    if (exhaustive <= remaining) {
      r = omega_exhaustive(net, inputs, f, opts);
    } else if (spec_.sample && BigInt(*spec_.sample) * inputs.rows() <= remaining) {
      r = omega_sampled(net, inputs, f, *spec_.sample, seed, opts);
    } else {
      throw BudgetExceeded(exhaustive, spec_.budget);
    }
    used_ += r.patterns_evaluated * r.inputs_evaluated;
    return r;
  }

  OmegaReport omega_allocation(const Network& net, const Matrix& inputs, std::span<const std::size_t> alloc) {
    OmegaOptions opts{spec_.norm, spec_.workers, spec_.budget - used_};
    OmegaReport r = crashbound::omega_allocation(net, inputs, alloc, opts);
    used_ += r.patterns_evaluated * r.inputs_evaluated;
    return r;
  }

  void emit(std::ostream& csv, const ResultRow& row) {
    csv << result_line(row) << '\n';
    ++rows_;
  }

  std::uint64_t used() const { return used_; }
  std::size_t rows() const { return rows_; }

 private:
  const ExperimentSpec& spec_;
  std::ostream& log_;
  std::uint64_t used_ = 0;
  std::size_t rows_ = 0;
};

ResultRow base_row(const std::string& experiment, std::uint64_t seed, const Network& net, std::size_t f) {
  ResultRow row;
  row.experiment = experiment;
  row.seed = seed;
  row.activation = std::string(to_string(net.activation.kind));
  row.lipschitz = net.activation.lipschitz;
  row.depth = net.depth();
  row.widths = net.widths();
  row.f = f;
  return row;
}

void fill_omega(ResultRow& row, const OmegaReport& r) {
  row.omega_av = r.omega_av;
  row.omega_mav = r.omega_mav;
  row.omega_max = r.omega_max;
  row.omega_std = r.std_dev;
  row.patterns = r.patterns_evaluated;
  row.inputs = r.inputs_evaluated;
  row.mode = std::string(to_string(r.mode));
}

void fill_erf(ResultRow& row, const ErfTotal& e) {
  row.erf_av = e.erf_av_expected;
  row.erf_max = e.erf_max_worst;
}

std::string tag(std::string_view name, std::string_view key, double value) {
  return std::string(name) + ":" + std::string(key) + "=" + format_double(value);
}

TopologySpec random_topology(const ExperimentSpec& spec, double k) {
  return {spec.input_dim, spec.widths, 1, {spec.activation, k}};
}

std::uint64_t net_seed(const ExperimentSpec& spec, std::size_t i) { return derive_seed(spec.seed, i); }
std::uint64_t input_seed(const ExperimentSpec& spec, std::size_t i) { return derive_seed(spec.seed, 1'000'000 + i); }
std::uint64_t pattern_seed(const ExperimentSpec& spec, std::size_t i) { return derive_seed(spec.seed, 2'000'000 + i); }

void sweep_k(const ExperimentSpec& spec, Runner& run, std::ostream& csv) {
  for (std::size_t s = 0; s < spec.n_seeds; ++s) {
    const Network base = random_network(random_topology(spec, 1.0), net_seed(spec, s));
    const Matrix inputs = uniform_inputs(spec.n_inputs, spec.input_dim, input_seed(spec, s));
    for (double k : spec.k_grid) {
      const Network net = with_lipschitz(base, k);
      for (std::size_t f : spec.f_list) {
        ResultRow row = base_row("sweep-k", net_seed(spec, s), net, f);
        fill_omega(row, run.omega(net, inputs, f, pattern_seed(spec, s)));
        fill_erf(row, erf_total(net, f));
        run.emit(csv, row);
      }
    }
  }
}

void sweep_scale(const ExperimentSpec& spec, Runner& run, std::ostream& csv) {
  for (std::size_t s = 0; s < spec.n_seeds; ++s) {
    const Network base = random_network(random_topology(spec, spec.lipschitz), net_seed(spec, s));
    const Matrix inputs = uniform_inputs(spec.n_inputs, spec.input_dim, input_seed(spec, s));
    for (double scale : spec.scale_grid) {
      const Network net = scale_weights(base, scale);
      for (std::size_t f : spec.f_list) {
        ResultRow row = base_row(tag("sweep-scale", "s", scale), net_seed(spec, s), net, f);
        fill_omega(row, run.omega(net, inputs, f, pattern_seed(spec, s)));
        fill_erf(row, erf_total(net, f));
        run.emit(csv, row);
      }
    }
  }
}

void depth_inversion(const ExperimentSpec& spec, Runner& run, std::ostream& csv) {
  for (std::size_t s = 0; s < spec.n_seeds; ++s) {
    const Network base = random_network(random_topology(spec, 1.0), net_seed(spec, s));
    const Matrix inputs = uniform_inputs(spec.n_inputs, spec.input_dim, input_seed(spec, s));
    for (double k : spec.k_grid) {
      const Network net = with_lipschitz(base, k);
      for (std::size_t l = 0; l < net.depth(); ++l) {
        std::vector<std::size_t> alloc(net.depth(), 0);
        alloc[l] = 1;
        ResultRow row = base_row("depth-inversion:layer=" + std::to_string(l + 1), net_seed(spec, s), net, 1);
        fill_omega(row, run.omega_allocation(net, inputs, alloc));
        const ErfReport e = erf_fixed(net, alloc);
        row.erf_av = e.erf_av;
        row.erf_max = e.erf_max;
        run.emit(csv, row);
      }
    }
  }
}

MnistPaths require_mnist(const ExperimentSpec& spec) {
  auto paths = find_mnist(spec.mnist_dir);
  if (!paths) throw MissingData("MNIST files not found; set MNIST_DIR or pass --mnist-dir");
  return *paths;
}

void dropout_study(const ExperimentSpec& spec, Runner& run, std::ostream& csv, std::ostream& log) {
  const MnistPaths paths = require_mnist(spec);
  const LabeledDataset train_set = load_idx(paths.train_images, paths.train_labels, spec.train_size);
  const LabeledDataset test_set = load_idx(paths.test_images, paths.test_labels, spec.test_size);
  const TopologySpec topo{train_set.inputs.cols(), spec.widths, 10, {ActivationKind::Relu, spec.lipschitz}};
  const std::uint64_t seed = net_seed(spec, 0);
  for (double p : spec.dropout_grid) {
    TrainConfig cfg = spec.train;
    cfg.dropout_rate = p;
    cfg.seed = seed;
    const TrainResult trained = train(init_for_training(topo, seed), train_set, cfg);
    log << "dropout " << p << ": " << trained.epochs_used << " epochs, test accuracy "
        << accuracy(trained.trained, test_set) << '\n';
    for (std::size_t f : spec.f_list) {
      ResultRow row = base_row(tag("dropout-study", "p", p), seed, trained.trained, f);
      fill_omega(row, run.omega(trained.trained, test_set.inputs, f, pattern_seed(spec, 0)));
      fill_erf(row, erf_total(trained.trained, f));
      run.emit(csv, row);
    }
  }
}

void learning_cost(const ExperimentSpec& spec, std::ostream& csv, Runner& run) {
  LabeledDataset data;
  TopologySpec topo;
  if (spec.task == "xor") {
    data = xor_dataset();
    topo = {2, spec.widths, 2, {spec.activation, 1.0}};
  } else if (spec.task == "mnist") {
    const MnistPaths paths = require_mnist(spec);
    data = load_idx(paths.train_images, paths.train_labels, spec.train_size);
    topo = {data.inputs.cols(), spec.widths, 10, {spec.activation, 1.0}};
  } else {
    throw DomainError("unknown learning-cost task '" + spec.task + "' (expected xor or mnist)");
  }
  TrainConfig cfg = spec.train;
  cfg.seed = spec.seed;
  const auto rows = learning_cost_sweep(topo, data, spec.k_grid, spec.runs_per_k, cfg, spec.workers);
  const std::vector<std::string> header{"K", "mean_epochs", "std_epochs", "runs", "censored"};
  std::vector<std::vector<std::string>> cells;
  for (const auto& r : rows)
    cells.push_back({format_double(r.lipschitz), format_double(r.mean_epochs), format_double(r.std_epochs),
                     std::to_string(r.runs), std::to_string(r.censored)});
  write_table(csv, header, cells);
  (void)run;
}

}  // namespace

std::string_view to_string(ExperimentKind k) {
  for (const auto& [kind, name] : kNames)
    if (kind == k) return name;
  return "?";
}

ExperimentKind parse_experiment_kind(std::string_view name) {
  for (const auto& [kind, n] : kNames)
    if (n == name) return kind;
  throw DomainError("unknown experiment '" + std::string(name) + "'");
}

ExperimentSpec default_spec(ExperimentKind kind) {
  ExperimentSpec s;
  s.kind = kind;
  switch (kind) {
    case ExperimentKind::DepthInversion:
      s.activation = ActivationKind::Sigmoid;
      s.widths = {4, 4, 4};
      s.k_grid = {0.25, 0.5, 1.0, 2.0, 4.0};
      break;
    case ExperimentKind::DropoutStudy:
      s.widths = {48};
      s.f_list = {1, 2, 3};
      s.sample = 10'000;
      s.train.epochs = 20;
      break;
    case ExperimentKind::LearningCost:
      s.activation = ActivationKind::Sigmoid;
      s.widths = {4};
      s.k_grid = {0.5, 1.0, 2.0};
      s.train.learning_rate = 0.5;
      s.train.batch_size = 4;
      s.train.epochs = 10'000;
      s.train.target_loss = 0.05;
      break;
    case ExperimentKind::ErfReport:
    case ExperimentKind::OmegaReport:
      s.f_list = {1, 2, 3};
      break;
    default:
      break;
  }
  return s;
}

void check_spec(const ExperimentSpec& spec) {
  if (spec.budget == 0) throw DomainError("budget must be > 0");
  if (spec.f_list.empty()) throw DomainError("f list must not be empty");
  if (spec.k_grid.empty()) throw DomainError("K grid must not be empty");
  if (spec.scale_grid.empty()) throw DomainError("scale grid must not be empty");
  if (spec.dropout_grid.empty()) throw DomainError("dropout grid must not be empty");
  if (spec.n_seeds == 0) throw DomainError("at least one seed is required");
  if (spec.n_inputs == 0) throw DomainError("at least one input is required");
  if (spec.sample && *spec.sample == 0) throw DomainError("--sample must be >= 1");
}

ExperimentOutcome run_experiment(const ExperimentSpec& spec, std::ostream& csv, std::ostream& log) {
  ExperimentOutcome outcome;
  Runner run(spec, log);
  try {
    check_spec(spec);
    switch (spec.kind) {
      case ExperimentKind::SweepK:
        write_results(csv, {});
        sweep_k(spec, run, csv);
        break;
      case ExperimentKind::SweepScale:
        write_results(csv, {});
        sweep_scale(spec, run, csv);
        break;
      case ExperimentKind::DepthInversion:
        write_results(csv, {});
        depth_inversion(spec, run, csv);
        break;
      case ExperimentKind::DropoutStudy:
        write_results(csv, {});
        dropout_study(spec, run, csv, log);
        break;
      case ExperimentKind::LearningCost:
        learning_cost(spec, csv, run);
        break;
      case ExperimentKind::ErfReport: {
        const Network net = load_network_file(spec.network);
        write_results(csv, {});
        for (std::size_t f : spec.f_list) {
          ResultRow row = base_row("erf-report", spec.seed, net, f);
          fill_erf(row, erf_total(net, f));
          row.mode = "erf";
          run.emit(csv, row);
        }
        break;
      }
      case ExperimentKind::OmegaReport: {
        const Network net = load_network_file(spec.network);
        // Check the largest request before materializing inputs.
        std::size_t n_inputs = spec.n_inputs;
        std::optional<LabeledDataset> test_set;
        if (spec.dataset_inputs) {
          const MnistPaths paths = require_mnist(spec);
          test_set = load_idx(paths.test_images, paths.test_labels, spec.test_size);
          n_inputs = test_set->size();
        }
        for (std::size_t f : spec.f_list) {
          const BigInt need = required_evaluations(net, f, n_inputs);
          if (need > BigInt(spec.budget) &&
              !(spec.sample && BigInt(*spec.sample) * n_inputs <= BigInt(spec.budget)))
            throw BudgetExceeded(need, spec.budget);
        }
        const Matrix inputs =
            test_set ? test_set->inputs : uniform_inputs(n_inputs, net.input_dim, input_seed(spec, 0));
        write_results(csv, {});
        for (std::size_t f : spec.f_list) {
          ResultRow row = base_row("omega-report", spec.seed, net, f);
          fill_omega(row, run.omega(net, inputs, f, pattern_seed(spec, 0)));
          fill_erf(row, erf_total(net, f));
          run.emit(csv, row);
        }
        break;
      }
    }
  } catch (const BudgetExceeded& e) {
    log << "refused: " << e.what() << " (pass --sample N or raise --budget)\n";
    outcome.exit_code = kExitBudget;
  } catch (const MissingData& e) {
    log << "error: " << e.what() << '\n';
    outcome.exit_code = kExitIo;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    outcome.exit_code = kExitError;
  }
  outcome.evaluations = run.used();
  outcome.rows = run.rows();
  return outcome;
}

}  // namespace crashbound
