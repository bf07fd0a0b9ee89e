#include "crashbound/activation.hpp"

#include <string>

#include "crashbound/error.hpp"

namespace crashbound {

std::string_view to_string(ActivationKind kind) {
  return kind == ActivationKind::Sigmoid ? "sigmoid" : "relu";
}

ActivationKind parse_activation_kind(std::string_view name) {
  if (name == "sigmoid") return ActivationKind::Sigmoid;
  if (name == "relu") return ActivationKind::Relu;
  throw DomainError("unknown activation '" + std::string(name) + "'");
}

}  // namespace crashbound
