#include <gtest/gtest.h>

#include <array>
#include <cmath>

#include "crashbound/error.hpp"
#include "crashbound/forward.hpp"
#include "crashbound/netgen.hpp"
#include "crashbound/trainer.hpp"
#include "fixtures.hpp"
#include "gradcheck.hpp"

using namespace crashbound;
using fixtures::layer;

namespace {

// Hidden layer ignored; output weights hand-set so outputs are constant.
Network constant_output(std::vector<double> out) {
  Network net;
  net.input_dim = 1;
  net.layers.push_back(layer(1, 1, {0}, {0}));
  const std::size_t k = out.size();
  // Sigmoid(0) = 0.5, so output_k = 2 * out_k * 0.5.
  for (double& v : out) v *= 2;
  net.output_weights = Matrix(k, 1, std::move(out));
  net.activation = {ActivationKind::Sigmoid, 1.0};
  return net;
}

LabeledDataset single(double x, std::uint8_t label) {
  LabeledDataset d;
  d.inputs = Matrix(1, 1, std::vector<double>{x});
  d.labels = {label};
  return d;
}

}  // namespace

TEST(Loss, Examples) {
  const Network exact = constant_output({0, 1, 0});
  EXPECT_EQ(loss(exact, single(0.3, 1)), 0.0);
  const Network first = constant_output({1, 0, 0});
  EXPECT_DOUBLE_EQ(loss(first, single(0.3, 1)), 1.0);

  const auto data = gradcheck::random_dataset(20, 3, 4, 1);
  const Network net = init_for_training({3, {5}, 4, {ActivationKind::Sigmoid, 1.0}}, 2);
  std::vector<std::size_t> rev(20);
  for (std::size_t i = 0; i < 20; ++i) rev[i] = 19 - i;
  EXPECT_NEAR(loss(net, data), loss(net, data.select(rev)), 1e-15);
  EXPECT_NEAR(loss(net, data), gradcheck::oracle_loss(net, data), 1e-14);
  EXPECT_THROW(loss(net, LabeledDataset{Matrix(0, 3), {}}), DomainError);
}

TEST(Backward, HandGradient) {
  Network net;
  net.input_dim = 1;
  net.layers.push_back(layer(1, 1, {1}, {0}));
  net.output_weights = Matrix(2, 1, {1, 0});
  net.activation = {ActivationKind::Relu, 1.0};
  // label 1 makes the target for output 0 equal to 0.
  const Gradients g = backward(net, single(1.0, 1));
  EXPECT_DOUBLE_EQ(g.output_weights(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(g.weights[0](0, 0), 1.0);
  EXPECT_DOUBLE_EQ(g.biases[0][0], 1.0);
}

TEST(Backward, ReluKinkIsZero) {
  Network net;
  net.input_dim = 1;
  net.layers.push_back(layer(1, 1, {0}, {0}));
  net.output_weights = Matrix(2, 1, {1, 1});
  net.activation = {ActivationKind::Relu, 1.0};
  const Gradients g = backward(net, single(0.5, 1));
  EXPECT_EQ(g.weights[0](0, 0), 0.0);
  EXPECT_EQ(g.biases[0][0], 0.0);
}

TEST(Backward, MaskedLayerHasNoGradient) {
  const Network net = init_for_training({3, {4, 5}, 3, {ActivationKind::Sigmoid, 1.0}}, 3);
  const auto data = gradcheck::random_dataset(8, 3, 3, 4);
  DropoutMask mask;
  mask.keep = {std::vector<unsigned char>(4, 1), std::vector<unsigned char>(5, 0)};
  const Gradients g = backward(net, data, &mask);
  for (double w : g.weights[1].values()) EXPECT_EQ(w, 0.0);
  for (double b : g.biases[1]) EXPECT_EQ(b, 0.0);
  for (double w : g.output_weights.values()) EXPECT_EQ(w, 0.0);

  DropoutMask bad;
  bad.keep = {std::vector<unsigned char>(3, 1)};
  EXPECT_THROW(backward(net, data, &bad), ShapeError);
}

TEST(Backward, FiniteDifferences) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto kind = seed % 2 ? ActivationKind::Relu : ActivationKind::Sigmoid;
    const double k = std::array{0.5, 1.0, 2.0}[seed % 3];
    Network net = init_for_training({3, {4, 3}, 3, {kind, k}}, seed);
    for (auto& l : net.layers)
      for (auto& b : l.biases) b = 0.05;
    const auto data = gradcheck::random_dataset(6, 3, 3, seed + 50);
    EXPECT_LT(gradcheck::max_relative_deviation(net, data), 1e-4) << "seed " << seed;
  }
}

TEST(Accuracy, Examples) {
  LabeledDataset d;
  d.inputs = Matrix(3, 1, {0.1, 0.5, 0.9});
  d.labels = {2, 2, 2};
  EXPECT_EQ(accuracy(constant_output({0, 0.1, 0.9}), d), 1.0);

  std::vector<double> tie(10, 0.0);
  tie[3] = tie[7] = 0.5;
  EXPECT_EQ(accuracy(constant_output(tie), single(0.2, 3)), 1.0);
  EXPECT_EQ(accuracy(constant_output(tie), single(0.2, 7)), 0.0);
  EXPECT_THROW(accuracy(constant_output(tie), LabeledDataset{Matrix(0, 1), {}}), DomainError);
}

TEST(Train, Deterministic) {
  const auto data = gradcheck::random_dataset(64, 4, 3, 9);
  const Network init = init_for_training({4, {6}, 3, {ActivationKind::Relu, 1.0}}, 9);
  TrainConfig cfg;
  cfg.epochs = 5;
  cfg.batch_size = 8;
  cfg.seed = 33;
  const auto a = train(init, data, cfg);
  const auto b = train(init, data, cfg);
  EXPECT_EQ(a.trained, b.trained);
  EXPECT_EQ(a.epochs_used, 5);
  ASSERT_EQ(a.history.size(), 5u);
  cfg.dropout_rate = 0.2;
  EXPECT_EQ(train(init, data, cfg).trained, train(init, data, cfg).trained);
}

TEST(Train, DropoutOffMatchesUnmaskedBackward) {
  const auto data = gradcheck::random_dataset(40, 3, 3, 10);
  const Network init = init_for_training({3, {5, 4}, 3, {ActivationKind::Sigmoid, 1.0}}, 10);
  TrainConfig cfg;
  cfg.epochs = 2;
  cfg.batch_size = 16;
  int batches = 0;
  train(init, data, cfg, [&](const BatchEvent& ev) {
    EXPECT_EQ(ev.gradients, backward(ev.before, data.select(ev.rows)));
    ++batches;
  });
  EXPECT_EQ(batches, 6);
}

TEST(Train, XorConverges) {
  const TopologySpec spec{2, {4}, 2, {ActivationKind::Sigmoid, 1.0}};
  TrainConfig cfg;
  cfg.learning_rate = 0.5;
  cfg.batch_size = 4;
  cfg.epochs = 10000;
  cfg.target_loss = 0.05;
  const auto r = train(init_for_training(spec, 1), xor_dataset(), cfg);
  EXPECT_TRUE(r.reached_target);
  EXPECT_LT(loss(r.trained, xor_dataset()), 0.05);
  EXPECT_LE(r.epochs_used, 10000);
  EXPECT_EQ(accuracy(r.trained, xor_dataset()), 1.0);
}

TEST(Train, Divergence) {
  auto data = gradcheck::random_dataset(32, 3, 3, 11);
  for (double& v : data.inputs.values()) v *= 1e160;
  const Network init = init_for_training({3, {8}, 3, {ActivationKind::Relu, 1.0}}, 11);
  TrainConfig cfg;
  cfg.epochs = 5;
  try {
    train(init, data, cfg);
    FAIL() << "expected TrainingError";
  } catch (const TrainingError& e) {
    EXPECT_GE(e.epoch(), 1);
  }
}

TEST(Train, EvaluationIsPure) {
  const auto data = gradcheck::random_dataset(10, 3, 3, 12);
  const Network net = init_for_training({3, {4}, 3, {ActivationKind::Relu, 1.0}}, 12);
  const Network copy = net;
  const double l = loss(net, data);
  const double a = accuracy(net, data);
  EXPECT_EQ(loss(net, data), l);
  EXPECT_EQ(accuracy(net, data), a);
  EXPECT_EQ(net, copy);
}

TEST(Train, InitRange) {
  const Network net = init_for_training({16, {9}, 4, {}}, 1);
  for (double w : net.layers[0].weights.values()) EXPECT_LE(std::abs(w), 0.25);
  for (double w : net.output_weights.values()) EXPECT_LE(std::abs(w), 1.0 / 3.0);
}

TEST(LearningCost, Examples) {
  const TopologySpec spec{2, {4}, 2, {ActivationKind::Sigmoid, 1.0}};
  TrainConfig cfg;
  cfg.learning_rate = 0.5;
  cfg.batch_size = 4;
  cfg.epochs = 10000;
  cfg.target_loss = 0.05;
  const std::vector<double> ks{0.5, 1.0, 2.0};
  const std::vector<std::uint64_t> same{7, 7};
  const auto same_rows = learning_cost_sweep(spec, xor_dataset(), std::span(ks).first(1), same, cfg);
  ASSERT_EQ(same_rows.size(), 1u);
  EXPECT_EQ(same_rows[0].std_epochs, 0.0);

  const auto rows = learning_cost_sweep(spec, xor_dataset(), ks, 3, cfg);
  ASSERT_EQ(rows.size(), ks.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].lipschitz, ks[i]);
    EXPECT_TRUE(std::isfinite(rows[i].mean_epochs));
    EXPECT_GT(rows[i].mean_epochs, 0.0);
    EXPECT_EQ(rows[i].runs, 3u);
  }
  EXPECT_THROW(learning_cost_sweep(spec, xor_dataset(), ks, 1, cfg), DomainError);
}

TEST(Config, Rejects) {
  TrainConfig cfg;
  cfg.dropout_rate = 1.0;
  EXPECT_THROW(check_config(cfg), DomainError);
  cfg = {};
  cfg.epochs = 0;
  EXPECT_THROW(check_config(cfg), DomainError);
  cfg = {};
  cfg.learning_rate = 0;
  EXPECT_THROW(check_config(cfg), DomainError);
}
