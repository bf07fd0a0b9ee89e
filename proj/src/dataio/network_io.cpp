#include <fstream>
#include <set>
#include <string>

#include "crashbound/dataio.hpp"
#include "crashbound/error.hpp"

namespace crashbound {

using nlohmann::json;

namespace {

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    rows.push_back(json(std::vector<double>(row.begin(), row.end())));
  }
  return rows;
}

void require_keys(const json& obj, const std::set<std::string>& allowed, const std::set<std::string>& required,
                  const std::string& where) {
  if (!obj.is_object()) throw SchemaError(where + " must be an object");
  for (const auto& [key, _] : obj.items())
    if (!allowed.count(key)) throw SchemaError("unknown field '" + key + "' in " + where);
  for (const auto& key : required)
    if (!obj.contains(key)) throw SchemaError("missing field '" + key + "' in " + where);
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) throw SchemaError(where + " must be a number");
  return v.get<double>();
}

std::vector<double> number_array(const json& v, const std::string& where) {
  if (!v.is_array()) throw SchemaError(where + " must be an array");
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& x : v) out.push_back(number(x, where));
  return out;
}

Matrix matrix_from_json(const json& v, const std::string& where) {
  if (!v.is_array()) throw SchemaError(where + " must be a 2-D array");
  std::vector<double> flat;
  std::size_t cols = 0;
  for (std::size_t r = 0; r < v.size(); ++r) {
    const auto row = number_array(v[r], where + " row " + std::to_string(r));
    if (r == 0) cols = row.size();
    if (row.size() != cols) throw SchemaError(where + " has ragged rows");
    flat.insert(flat.end(), row.begin(), row.end());
  }
  return Matrix(v.size(), cols, std::move(flat));
}

}  // namespace

json save_network(const Network& net) {
  json doc;
  doc["version"] = kNetworkDocumentVersion;
  doc["activation"] = {{"kind", std::string(to_string(net.activation.kind))},
                       {"lipschitz", net.activation.lipschitz}};
  doc["input_dim"] = net.input_dim;
  json layers = json::array();
  for (const auto& l : net.layers) layers.push_back({{"weights", matrix_to_json(l.weights)}, {"biases", l.biases}});
  doc["layers"] = std::move(layers);
  doc["output_weights"] = matrix_to_json(net.output_weights);
  return doc;
}

Network load_network(const json& doc) {
  require_keys(doc, {"version", "activation", "input_dim", "layers", "output_weights"},
               {"version", "activation", "input_dim", "layers", "output_weights"}, "network document");
  if (!doc["version"].is_number_integer()) throw SchemaError("version must be an integer");
  if (doc["version"].get<long long>() != kNetworkDocumentVersion)
    throw SchemaError("unsupported network document version " + doc["version"].dump());

  Network net;
  const json& act = doc["activation"];
  require_keys(act, {"kind", "lipschitz"}, {"kind", "lipschitz"}, "activation");
  if (!act["kind"].is_string()) throw SchemaError("activation.kind must be a string");
  try {
    net.activation.kind = parse_activation_kind(act["kind"].get<std::string>());
  } catch (const DomainError& e) {
    throw SchemaError(e.what());
  }
  net.activation.lipschitz = number(act["lipschitz"], "activation.lipschitz");

  if (!doc["input_dim"].is_number_unsigned()) throw SchemaError("input_dim must be a nonnegative integer");
  net.input_dim = doc["input_dim"].get<std::size_t>();

  if (!doc["layers"].is_array()) throw SchemaError("layers must be an array");
  for (std::size_t l = 0; l < doc["layers"].size(); ++l) {
    const json& layer = doc["layers"][l];
    const std::string where = "layers[" + std::to_string(l) + "]";
    require_keys(layer, {"weights", "biases"}, {"weights", "biases"}, where);
    net.layers.push_back({matrix_from_json(layer["weights"], where + ".weights"),
                          number_array(layer["biases"], where + ".biases")});
  }
  net.output_weights = matrix_from_json(doc["output_weights"], "output_weights");

  const auto violations = validate(net);
  if (!violations.empty()) {
    std::string msg = "network document fails validation:";
    for (const auto& v : violations) msg += "\n  " + v.message;
    throw SchemaError(msg);
  }
  return net;
}

void save_network_file(const Network& net, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out << save_network(net).dump(1) << '\n';
}

Network load_network_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path.string() + "' for reading");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("malformed network document: ") + e.what());
  }
  return load_network(doc);
}

}  // namespace crashbound
