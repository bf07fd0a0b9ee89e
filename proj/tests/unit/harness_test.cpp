#include <gtest/gtest.h>

#include <chrono>
#include <filesystem>
#include <sstream>

#include "crashbound/dataio.hpp"
#include "crashbound/harness.hpp"
#include "crashbound/netgen.hpp"

using namespace crashbound;

namespace {

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

struct Captured {
  ExperimentOutcome outcome;
  std::string csv;
  std::string log;
};

Captured run(const ExperimentSpec& spec) {
  std::ostringstream csv, log;
  Captured r;
  r.outcome = run_experiment(spec, csv, log);
  r.csv = csv.str();
  r.log = log.str();
  return r;
}

std::filesystem::path saved_net(const TopologySpec& topo, const std::string& name) {
  const auto path = std::filesystem::temp_directory_path() / name;
  save_network_file(random_network(topo, 5), path);
  return path;
}

}  // namespace

TEST(Harness, ErfReportRows) {
  auto spec = default_spec(ExperimentKind::ErfReport);
  spec.network = saved_net({3, {4, 4}, 1, {ActivationKind::Relu, 1.0}}, "crashbound_harness_erf.json");
  spec.f_list = {1, 2, 3};
  const Captured r = run(spec);
  ASSERT_EQ(r.outcome.exit_code, kExitOk) << r.log;
  const auto ls = lines(r.csv);
  ASSERT_EQ(ls.size(), 4u);
  EXPECT_EQ(ls[0], kResultsHeader);
  for (std::size_t i = 1; i < ls.size(); ++i) {
    const auto f = split_csv_line(ls[i]);
    ASSERT_EQ(f.size(), 16u);
    for (int c = 7; c <= 10; ++c) EXPECT_TRUE(f[c].empty());
    EXPECT_FALSE(f[11].empty());
  }
  EXPECT_EQ(r.outcome.evaluations, 0u);
}

TEST(Harness, SweepKGridProduct) {
  const auto spec = default_spec(ExperimentKind::SweepK);
  ASSERT_EQ(spec.n_seeds, 3u);
  ASSERT_EQ(spec.k_grid.size(), 5u);
  ASSERT_EQ(spec.f_list.size(), 4u);
  const Captured r = run(spec);
  ASSERT_EQ(r.outcome.exit_code, kExitOk) << r.log;
  EXPECT_EQ(lines(r.csv).size(), 61u);
  EXPECT_EQ(r.outcome.rows, 60u);
  EXPECT_LE(r.outcome.evaluations, spec.budget);
}

TEST(Harness, OmegaReportRefusesBeforeWork) {
  auto spec = default_spec(ExperimentKind::OmegaReport);
  spec.network = saved_net({784, {48}, 10, {ActivationKind::Relu, 1.0}}, "crashbound_harness_48.json");
  spec.f_list = {5};
  spec.n_inputs = 60000;
  const auto start = std::chrono::steady_clock::now();
  const Captured r = run(spec);
  EXPECT_LT(std::chrono::steady_clock::now() - start, std::chrono::seconds(5));
  EXPECT_EQ(r.outcome.exit_code, kExitBudget);
  EXPECT_NE(r.log.find("102738240000"), std::string::npos) << r.log;
  EXPECT_EQ(r.outcome.evaluations, 0u);
  EXPECT_TRUE(r.csv.empty());
}

TEST(Harness, SampleFlagStaysInBudget) {
  auto spec = default_spec(ExperimentKind::OmegaReport);
  spec.network = saved_net({4, {6, 6}, 1, {ActivationKind::Relu, 1.0}}, "crashbound_harness_small.json");
  spec.f_list = {3, 4};
  spec.n_inputs = 100;
  spec.budget = 50'000;
  EXPECT_EQ(run(spec).outcome.exit_code, kExitBudget);
  spec.sample = 200;
  const Captured r = run(spec);
  ASSERT_EQ(r.outcome.exit_code, kExitOk) << r.log;
  EXPECT_LE(r.outcome.evaluations, spec.budget);
  EXPECT_NE(r.csv.find("sampled"), std::string::npos);
}

TEST(Harness, DeterministicAcrossWorkers) {
  auto spec = default_spec(ExperimentKind::SweepScale);
  spec.n_seeds = 2;
  spec.n_inputs = 200;
  spec.f_list = {1, 3};
  spec.workers = 1;
  const Captured a = run(spec);
  const Captured b = run(spec);
  spec.workers = 4;
  const Captured c = run(spec);
  ASSERT_EQ(a.outcome.exit_code, kExitOk);
  EXPECT_EQ(a.csv, b.csv);
  EXPECT_EQ(a.csv, c.csv);
  EXPECT_NE(a.csv.find("sweep-scale:s=10,"), std::string::npos);
}

TEST(Harness, DepthInversionRows) {
  auto spec = default_spec(ExperimentKind::DepthInversion);
  spec.n_seeds = 2;
  spec.n_inputs = 50;
  spec.k_grid = {0.5, 2.0};
  const Captured r = run(spec);
  ASSERT_EQ(r.outcome.exit_code, kExitOk) << r.log;
  EXPECT_EQ(r.outcome.rows, 2u * 2u * 3u);
  EXPECT_NE(r.csv.find("depth-inversion:layer=3"), std::string::npos);
}

TEST(Harness, LearningCostTable) {
  auto spec = default_spec(ExperimentKind::LearningCost);
  spec.runs_per_k = 2;
  const Captured r = run(spec);
  ASSERT_EQ(r.outcome.exit_code, kExitOk) << r.log;
  const auto ls = lines(r.csv);
  ASSERT_EQ(ls.size(), 1 + spec.k_grid.size());
  EXPECT_EQ(ls[0], "K,mean_epochs,std_epochs,runs,censored");
}

TEST(Harness, MissingData) {
  auto spec = default_spec(ExperimentKind::DropoutStudy);
  spec.mnist_dir = "/nonexistent/mnist";
  EXPECT_EQ(run(spec).outcome.exit_code, kExitIo);
}

TEST(Harness, InvalidSpec) {
  auto spec = default_spec(ExperimentKind::SweepK);
  spec.k_grid.clear();
  EXPECT_EQ(run(spec).outcome.exit_code, kExitError);
  spec = default_spec(ExperimentKind::SweepK);
  spec.budget = 0;
  EXPECT_EQ(run(spec).outcome.exit_code, kExitError);
  EXPECT_EQ(parse_experiment_kind("sweep-k"), ExperimentKind::SweepK);
}
