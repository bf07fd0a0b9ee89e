// crashbound: crash-robustness experiments for feedforward networks.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "crashbound/dataio.hpp"
#include "crashbound/harness.hpp"
#include "crashbound/netgen.hpp"

using namespace crashbound;

namespace {

struct CommonFlags {
  std::string out;
  std::string format = "csv";
  std::string norm = "max";
  std::string activation;
  std::uint64_t sample = 0;
  double lipschitz = 0;
  double target_loss = 0;
};

void add_common(CLI::App& sub, ExperimentSpec& spec, CommonFlags& flags) {
  sub.add_option("--seed", spec.seed, "Base seed")->capture_default_str();
  sub.add_option("--workers", spec.workers, "Worker threads (0 = OpenMP default)")->capture_default_str();
  sub.add_option("--budget", spec.budget, "Maximum crashed evaluations for the whole run")->capture_default_str();
  sub.add_option("--sample", flags.sample, "Fall back to N sampled patterns when exhaustive exceeds the budget");
  sub.add_option("--inputs", spec.n_inputs, "Number of random inputs M")->capture_default_str();
  sub.add_option("--norm", flags.norm, "Output deviation norm")->check(CLI::IsMember({"max", "mean"}))->capture_default_str();
  sub.add_option("--format", flags.format, "Output format")->check(CLI::IsMember({"csv"}))->capture_default_str();
  sub.add_option("--out", flags.out, "Write CSV here instead of stdout");
  sub.add_option("--f", spec.f_list, "Crash counts to evaluate");
}

void add_topology(CLI::App& sub, ExperimentSpec& spec, CommonFlags& flags) {
  sub.add_option("--seeds", spec.n_seeds, "Random networks per grid point")->capture_default_str();
  sub.add_option("--input-dim", spec.input_dim, "Input dimension")->capture_default_str();
  sub.add_option("--widths", spec.widths, "Hidden layer widths");
  sub.add_option("--activation", flags.activation, "sigmoid or relu")->check(CLI::IsMember({"sigmoid", "relu"}));
}

void add_mnist(CLI::App& sub, ExperimentSpec& spec) {
  sub.add_option("--mnist-dir", spec.mnist_dir, "Directory with the MNIST IDX files (default $MNIST_DIR)");
  sub.add_option("--train-size", spec.train_size, "Training examples to load")->capture_default_str();
  sub.add_option("--test-size", spec.test_size, "Test examples to load")->capture_default_str();
  sub.add_option("--epochs", spec.train.epochs, "Training epochs")->capture_default_str();
  sub.add_option("--learning-rate", spec.train.learning_rate, "SGD step size")->capture_default_str();
  sub.add_option("--batch-size", spec.train.batch_size, "Mini-batch size")->capture_default_str();
}

int run(const ExperimentSpec& spec, const CommonFlags& flags) {
  if (flags.out.empty()) return run_experiment(spec, std::cout, std::cerr).exit_code;
  std::ofstream out(flags.out, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot open " << flags.out << " for writing\n";
    return kExitIo;
  }
  const int code = run_experiment(spec, out, std::cerr).exit_code;
  out.flush();
  if (!out) {
    std::cerr << "error: write to " << flags.out << " failed\n";
    return kExitIo;
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Crash-robustness bounds and measurements for feedforward networks"};
  app.require_subcommand(1);

  constexpr ExperimentKind kinds[] = {ExperimentKind::SweepK,       ExperimentKind::SweepScale,
                                      ExperimentKind::DepthInversion, ExperimentKind::DropoutStudy,
                                      ExperimentKind::LearningCost, ExperimentKind::ErfReport,
                                      ExperimentKind::OmegaReport};
  std::vector<ExperimentSpec> specs;
  std::vector<CommonFlags> flags(std::size(kinds));
  for (ExperimentKind k : kinds) specs.push_back(default_spec(k));

  std::vector<CLI::App*> subs;
  for (std::size_t i = 0; i < std::size(kinds); ++i) {
    ExperimentSpec& spec = specs[i];
    CommonFlags& fl = flags[i];
    CLI::App* sub = app.add_subcommand(std::string(to_string(kinds[i])));
    subs.push_back(sub);
    add_common(*sub, spec, fl);
    switch (kinds[i]) {
      case ExperimentKind::SweepK:
        sub->description("Omega and Erf over a grid of Lipschitz coefficients");
        add_topology(*sub, spec, fl);
        sub->add_option("--k", spec.k_grid, "K grid");
        break;
      case ExperimentKind::SweepScale:
        sub->description("Omega and Erf as all weights are scaled");
        add_topology(*sub, spec, fl);
        sub->add_option("--scale", spec.scale_grid, "Scale grid");
        sub->add_option("--lipschitz", fl.lipschitz, "Fixed K");
        break;
      case ExperimentKind::DepthInversion:
        sub->description("Single-crash Omega per layer for each K");
        add_topology(*sub, spec, fl);
        sub->add_option("--k", spec.k_grid, "K grid");
        break;
      case ExperimentKind::DropoutStudy:
        sub->description("Train MNIST nets with dropout, then measure crash robustness");
        add_mnist(*sub, spec);
        sub->add_option("--widths", spec.widths, "Hidden layer widths");
        sub->add_option("--dropout", spec.dropout_grid, "Dropout grid");
        break;
      case ExperimentKind::LearningCost:
        sub->description("Epochs to reach a target loss as a function of K");
        add_topology(*sub, spec, fl);
        add_mnist(*sub, spec);
        sub->add_option("--k", spec.k_grid, "K grid");
        sub->add_option("--runs", spec.runs_per_k, "Training runs per K")->capture_default_str();
        sub->add_option("--task", spec.task, "xor or mnist")->check(CLI::IsMember({"xor", "mnist"}));
        sub->add_option("--target-loss", fl.target_loss, "Stop when the mean loss drops below this");
        break;
      case ExperimentKind::ErfReport:
        sub->description("Erf bounds for a saved network");
        sub->add_option("network", spec.network, "Network JSON document")->required()->check(CLI::ExistingFile);
        break;
      case ExperimentKind::OmegaReport:
        sub->description("Measured Omega and Erf for a saved network");
        sub->add_option("network", spec.network, "Network JSON document")->required()->check(CLI::ExistingFile);
        sub->add_flag("--mnist", spec.dataset_inputs, "Use MNIST test images as inputs");
        sub->add_option("--mnist-dir", spec.mnist_dir, "Directory with the MNIST IDX files (default $MNIST_DIR)");
        sub->add_option("--test-size", spec.test_size, "Test images to use with --mnist");
        break;
    }
  }

  TopologySpec gen_topo{4, {4, 4, 4, 4}, 1, {}};
  std::string gen_activation = "relu";
  std::uint64_t gen_seed = 1;
  std::string gen_out;
  WeightDistribution gen_dist;
  CLI::App* gen = app.add_subcommand("generate", "Write a seeded random network as JSON");
  gen->add_option("--seed", gen_seed)->capture_default_str();
  gen->add_option("--input-dim", gen_topo.input_dim)->capture_default_str();
  gen->add_option("--widths", gen_topo.layer_widths);
  gen->add_option("--output-dim", gen_topo.output_dim)->capture_default_str();
  gen->add_option("--activation", gen_activation)->check(CLI::IsMember({"sigmoid", "relu"}));
  gen->add_option("--lipschitz", gen_topo.activation.lipschitz)->capture_default_str();
  gen->add_option("--mean", gen_dist.mean)->capture_default_str();
  gen->add_option("--stddev", gen_dist.stddev)->capture_default_str();
  gen->add_option("--out", gen_out, "Output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (gen->parsed()) {
      gen_topo.activation.kind = parse_activation_kind(gen_activation);
      const Network net = random_network(gen_topo, gen_seed, gen_dist);
      if (gen_out.empty()) {
        std::cout << save_network(net).dump(1) << '\n';
      } else {
        save_network_file(net, gen_out);
      }
      return kExitOk;
    }
    for (std::size_t i = 0; i < subs.size(); ++i) {
      if (!subs[i]->parsed()) continue;
      ExperimentSpec& spec = specs[i];
      const CommonFlags& fl = flags[i];
      spec.norm = parse_output_norm(fl.norm);
      if (!fl.activation.empty()) spec.activation = parse_activation_kind(fl.activation);
      auto given = [&](const char* name) {
        const CLI::Option* opt = subs[i]->get_option_no_throw(name);
        return opt != nullptr && opt->count() > 0;
      };
      if (given("--sample")) spec.sample = fl.sample;
      if (given("--lipschitz")) spec.lipschitz = fl.lipschitz;
      if (given("--target-loss")) spec.train.target_loss = fl.target_loss;
      return run(spec, fl);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
