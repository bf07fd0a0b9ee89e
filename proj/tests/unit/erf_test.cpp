#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "crashbound/erf.hpp"
#include "crashbound/error.hpp"
#include "crashbound/forward.hpp"
#include "crashbound/netgen.hpp"
#include "fixtures.hpp"

using namespace crashbound;
using fixtures::layer;

namespace {

Network single(ActivationKind kind, double k, double w, double v) {
  Network net;
  net.input_dim = 1;
  net.layers.push_back(layer(1, 1, {w}, {0}));
  net.output_weights = Matrix(1, 1, std::vector<double>{v});
  net.activation = {kind, k};
  return net;
}

// Bound written out directly from the layer statistics.
double erf_direct(const Network& net, const std::vector<std::size_t>& f, bool use_max) {
  const auto caps = layer_output_bounds(net).caps;
  const auto stats = layer_weight_stats(net);
  auto w = [&](std::size_t l) { return use_max ? stats[l].max_abs : stats[l].mean_abs; };
  const std::size_t depth = net.depth();
  double total = 0;
  for (std::size_t l = 0; l < depth; ++l) {
    double term = caps[l] * static_cast<double>(f[l]) * std::pow(net.activation.lipschitz, depth - 1 - l) * w(depth);
    for (std::size_t m = l + 1; m < depth; ++m) term *= static_cast<double>(net.width(m) - f[m]) * w(m);
    total += term;
  }
  return total;
}

}  // namespace

TEST(Bounds, Examples) {
  const Network sig = random_network({3, {4, 2, 5}, 2, {ActivationKind::Sigmoid, 2.0}}, 1);
  EXPECT_EQ(layer_output_bounds(sig).caps, (std::vector<double>{1.0, 1.0, 1.0}));
  EXPECT_EQ(layer_output_bounds(single(ActivationKind::Relu, 1.0, 2.0, 1.0)).caps, std::vector<double>{2.0});
  EXPECT_EQ(layer_output_bounds(single(ActivationKind::Relu, 3.0, 2.0, 1.0)).caps, std::vector<double>{6.0});
  EXPECT_EQ(layer_output_bounds(single(ActivationKind::Relu, 1.0, -2.0, 1.0)).caps, std::vector<double>{0.0});
}

TEST(Bounds, ReluCapsHoldOnSamples) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Network net = random_network({3, {4, 4, 3}, 1, {ActivationKind::Relu, 0.5 + 0.1 * seed}}, seed);
    for (auto& l : net.layers)
      for (auto& b : l.biases) b = (seed % 3) - 1.0;
    const auto caps = layer_output_bounds(net).caps;
    const Matrix xs = uniform_inputs(500, 3, seed);
    for (std::size_t r = 0; r < xs.rows(); ++r) {
      const auto t = forward(net, xs.row(r));
      for (std::size_t l = 0; l < caps.size(); ++l) {
        EXPECT_GE(caps[l], 0.0);
        for (double y : t.activations[l]) EXPECT_LE(std::abs(y), caps[l] * (1 + 1e-12));
      }
    }
  }
}

TEST(ErfFixed, Examples) {
  const Network net = random_network({3, {4, 4}, 1, {ActivationKind::Sigmoid, 1.0}}, 2);
  const std::vector<std::size_t> none{0, 0};
  const auto r0 = erf_fixed(net, none);
  EXPECT_EQ(r0.erf_max, 0.0);
  EXPECT_EQ(r0.erf_av, 0.0);

  Network two;
  two.input_dim = 1;
  two.layers.push_back(layer(2, 1, {1, -1}, {0, 0}));
  two.layers.push_back(layer(2, 2, {0.5, 0.5, 0.5, 0.5}, {0, 0}));
  two.output_weights = Matrix(1, 2, {2, 2});
  two.activation = {ActivationKind::Sigmoid, 1.0};
  const std::vector<std::size_t> f10{1, 0};
  EXPECT_DOUBLE_EQ(erf_fixed(two, f10).erf_max, 2.0);

  Network wide;
  wide.input_dim = 1;
  wide.layers.push_back(layer(3, 1, {1, 1, 1}, {0, 0, 0}));
  wide.output_weights = Matrix(1, 3, {0.7, -0.3, 0.5});
  wide.activation = {ActivationKind::Sigmoid, 1.0};
  const std::vector<std::size_t> f2{2};
  const auto r = erf_fixed(wide, f2);
  EXPECT_DOUBLE_EQ(r.erf_max, 1.4);
  EXPECT_DOUBLE_EQ(r.erf_av, 1.0);

  const std::vector<std::size_t> bad{4};
  EXPECT_THROW(erf_fixed(wide, bad), PatternError);
  const std::vector<std::size_t> wrong_len{1, 1};
  EXPECT_THROW(erf_fixed(wide, wrong_len), PatternError);
}

TEST(ErfFixed, MatchesDirectFormula) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto kind = seed % 2 ? ActivationKind::Relu : ActivationKind::Sigmoid;
    const Network net = random_network({2, {4, 3, 4}, 3, {kind, 0.5 + 0.5 * (seed % 4)}}, seed);
    for_each_allocation(net.widths(), 3, [&](std::span<const std::size_t> a) {
      const std::vector<std::size_t> f(a.begin(), a.end());
      const auto r = erf_fixed(net, f);
      EXPECT_NEAR(r.erf_max, erf_direct(net, f, true), 1e-12 * r.erf_max);
      EXPECT_NEAR(r.erf_av, erf_direct(net, f, false), 1e-12 * r.erf_max);
      EXPECT_LE(r.erf_av, r.erf_max);
    });
  }
}

TEST(ErfFixed, ReluScalingLaws) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Network base = random_network({3, {4, 4, 4, 4}, 1, {ActivationKind::Relu, 1.0}}, seed);
    for_each_allocation(base.widths(), 2, [&](std::span<const std::size_t> f) {
      const auto e1 = erf_fixed(base, f);
      for (double k : {0.5, 2.0, 4.0}) {
        const auto ek = erf_fixed(with_lipschitz(base, k), f);
        EXPECT_NEAR(ek.erf_max, std::pow(k, 4) * e1.erf_max, 1e-12 * ek.erf_max);
        EXPECT_NEAR(ek.erf_av, std::pow(k, 4) * e1.erf_av, 1e-12 * ek.erf_av);
      }
      const auto es = erf_fixed(scale_weights(base, 10.0), f);
      EXPECT_NEAR(es.erf_max, 1e5 * e1.erf_max, 1e-12 * es.erf_max);
      EXPECT_NEAR(es.erf_av, 1e5 * e1.erf_av, 1e-12 * es.erf_av);
      EXPECT_EQ(erf_fixed(scale_weights(base, 0.0), f).erf_max, 0.0);
    });
  }
}

TEST(ErfTotal, Examples) {
  const Network net = random_network({2, {2, 2}, 1, {ActivationKind::Sigmoid, 1.0}}, 4);
  const auto t0 = erf_total(net, 0);
  EXPECT_EQ(t0.erf_max_worst, 0.0);
  EXPECT_EQ(t0.erf_av_expected, 0.0);

  const Network one = random_network({2, {5}, 1, {ActivationKind::Relu, 1.0}}, 4);
  const std::vector<std::size_t> f3{3};
  const auto t1 = erf_total(one, 3);
  EXPECT_EQ(t1.erf_max_worst, erf_fixed(one, f3).erf_max);
  EXPECT_EQ(t1.erf_av_expected, erf_fixed(one, f3).erf_av);
  EXPECT_EQ(t1.allocations, 1u);

  const std::vector<std::size_t> a{1, 0}, b{0, 1};
  const auto t = erf_total(net, 1);
  EXPECT_EQ(t.allocations, 2u);
  EXPECT_DOUBLE_EQ(t.erf_av_expected, 0.5 * (erf_fixed(net, a).erf_av + erf_fixed(net, b).erf_av));
  EXPECT_EQ(t.erf_max_worst, std::max(erf_fixed(net, a).erf_max, erf_fixed(net, b).erf_max));

  EXPECT_THROW(erf_total(net, 5), PatternError);
}

TEST(ErfTotal, ExpectationBetweenExtremes) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Network net = random_network({2, {4, 3, 4}, 1, {ActivationKind::Relu, 1.0}}, seed);
    for (std::size_t f = 1; f <= 4; ++f) {
      double lo = INFINITY, hi = 0, psum = 0;
      for_each_allocation(net.widths(), f, [&](std::span<const std::size_t> a) {
        const double av = erf_fixed(net, a).erf_av;
        lo = std::min(lo, av);
        hi = std::max(hi, av);
        psum += allocation_probability(net.widths(), a);
      });
      const auto t = erf_total(net, f);
      EXPECT_GE(t.erf_av_expected, lo * (1 - 1e-12));
      EXPECT_LE(t.erf_av_expected, hi * (1 + 1e-12));
      EXPECT_NEAR(psum, 1.0, 1e-12);
      EXPECT_LE(t.erf_av_expected, t.erf_max_worst);
    }
  }
}

TEST(ErfTotal, HypergeometricWeights) {
  const std::vector<std::size_t> widths{4, 3, 4};
  const std::vector<std::size_t> alloc{2, 0, 1};
  // C(4,2) C(3,0) C(4,1) / C(11,3) = 24 / 165
  EXPECT_DOUBLE_EQ(allocation_probability(widths, alloc), 24.0 / 165.0);
  std::size_t count = 0;
  for_each_allocation(widths, 3, [&](std::span<const std::size_t>) { ++count; });
  // compositions of 3 into 3 parts with caps 4,3,4: all 10 fit
  EXPECT_EQ(count, 10u);
}

TEST(Tolerable, Examples) {
  Network net;
  net.input_dim = 1;
  net.layers.push_back(layer(5, 1, {1, 1, 1, 1, 1}, {0, 0, 0, 0, 0}));
  net.output_weights = Matrix(1, 5, {0.1, -0.1, 0.1, 0.1, -0.1});
  net.activation = {ActivationKind::Sigmoid, 1.0};
  EXPECT_EQ(tolerable_crashes_single_layer(net, {0.5, 0.5}), 0u);
  EXPECT_EQ(tolerable_crashes_single_layer(net, {0.3, 0.0}), 3u);
  EXPECT_EQ(tolerable_crashes_single_layer(net, {0.5, 0.2}), 3u);
  EXPECT_EQ(tolerable_crashes_single_layer(net, {100.0, 0.0}), 5u);

  Network zero = net;
  zero.output_weights = Matrix(1, 5, 0.0);
  EXPECT_EQ(tolerable_crashes_single_layer(zero, {1.0, 0.0}), 5u);
  EXPECT_EQ(tolerable_crashes_single_layer(zero, {1.0, 1.0}), 0u);

  EXPECT_THROW(tolerable_crashes_single_layer(net, {0.1, 0.2}), DomainError);
  const Network deep = random_network({1, {2, 2}, 1, {}}, 1);
  EXPECT_THROW(tolerable_crashes_single_layer(deep, {1.0, 0.0}), UnsupportedError);
}
