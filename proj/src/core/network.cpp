#include "crashbound/network.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <utility>

#include "crashbound/error.hpp"

namespace crashbound {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) {
    throw ShapeError("matrix data has " + std::to_string(data_.size()) + " entries, expected " +
                     std::to_string(rows) + "x" + std::to_string(cols));
  }
}

std::size_t Network::hidden_count() const noexcept {
  std::size_t n = 0;
  for (const auto& l : layers) n += l.width();
  return n;
}

std::vector<std::size_t> Network::widths() const {
  std::vector<std::size_t> w;
  w.reserve(layers.size());
  for (const auto& l : layers) w.push_back(l.width());
  return w;
}

namespace {

bool all_finite(std::span<const double> v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace

std::vector<Violation> validate(const Network& net) {
  std::vector<Violation> out;
  auto add = [&](Violation::Kind k, long layer, std::string msg) {
    out.push_back({k, layer, std::move(msg)});
  };

  if (!(net.activation.lipschitz > 0.0) || !std::isfinite(net.activation.lipschitz))
    add(Violation::Kind::Activation, -1, "lipschitz coefficient must be finite and > 0");
  if (net.input_dim == 0) add(Violation::Kind::Shape, -1, "input_dim must be >= 1");
  if (net.layers.empty()) add(Violation::Kind::Shape, -1, "network needs at least one hidden layer");

  std::size_t fan_in = net.input_dim;
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const Layer& layer = net.layers[l];
    const long li = static_cast<long>(l);
    if (layer.weights.rows() == 0) add(Violation::Kind::Shape, li, "layer " + std::to_string(l) + " has width 0");
    if (layer.weights.cols() != fan_in) {
      std::ostringstream msg;
      msg << "layer " << l << " weights are " << layer.weights.rows() << "x" << layer.weights.cols()
          << ", expected " << layer.weights.rows() << "x" << fan_in;
      add(Violation::Kind::Shape, li, msg.str());
    }
    if (layer.biases.size() != layer.weights.rows()) {
      std::ostringstream msg;
      msg << "layer " << l << " has " << layer.biases.size() << " biases for width "
          << layer.weights.rows();
      add(Violation::Kind::Shape, li, msg.str());
    }
    if (!all_finite(layer.weights.values()))
      add(Violation::Kind::NonFinite, li, "layer " + std::to_string(l) + " has a non-finite weight");
    if (!all_finite(layer.biases))
      add(Violation::Kind::NonFinite, li, "layer " + std::to_string(l) + " has a non-finite bias");
    fan_in = layer.weights.rows();
  }

  const long out_layer = static_cast<long>(net.layers.size());
  if (net.output_weights.rows() == 0) add(Violation::Kind::Shape, out_layer, "output dimension must be >= 1");
  if (net.output_weights.cols() != fan_in) {
    std::ostringstream msg;
    msg << "output weights are " << net.output_weights.rows() << "x" << net.output_weights.cols()
        << ", expected " << net.output_weights.rows() << "x" << fan_in;
    add(Violation::Kind::Shape, out_layer, msg.str());
  }
  if (!all_finite(net.output_weights.values()))
    add(Violation::Kind::NonFinite, out_layer, "output layer has a non-finite weight");
  return out;
}

void require_valid(const Network& net) {
  const auto violations = validate(net);
  if (violations.empty()) return;
  std::string msg = "invalid network:";
  for (const auto& v : violations) msg += "\n  " + v.message;
  throw ShapeError(msg);
}

std::vector<WeightStats> layer_weight_stats(const Network& net) {
  auto stats_of = [](const Matrix& w) {
    WeightStats s;
    if (w.empty()) return s;
    double sum = 0.0;
    for (double x : w.values()) {
      const double a = std::abs(x);
      s.max_abs = std::max(s.max_abs, a);
      sum += a;
    }
    s.mean_abs = sum / static_cast<double>(w.size());
    return s;
  };
  std::vector<WeightStats> out;
  out.reserve(net.layers.size() + 1);
  for (const auto& l : net.layers) out.push_back(stats_of(l.weights));
  out.push_back(stats_of(net.output_weights));
  return out;
}

}  // namespace crashbound
