// Copyright 2026 The Prober Authors
// SPDX-License-Identifier: Apache-2.0

#include "prober/runtime/operator_registry.hpp"

#include "prober/error.hpp"
#include "prober/harness/synthetic_ops.hpp"
#include "prober/runtime/external_operator.hpp"

namespace prober::runtime {

PropertyClass declared_properties(const NodeConfig& node) {
  PropertyClass p;
  if (node.declared_shape) {
    p.shape = *node.declared_shape;
    p.shape_evidence = p.shape == Shape::kArbitrary ? EvidenceSource::kNone : EvidenceSource::kDeclared;
  }
  return p;
}

OperatorHandle make_node_operator(const NodeConfig& node, std::size_t arity, const PropertyClass* properties) {
  PropertyClass props = properties != nullptr ? *properties : declared_properties(node);
  if (node.kind == "external") {
    ExternalSpec spec;
    try {
      spec.command = node.params.at("command").get<std::string>();
      if (node.params.contains("args")) spec.args = node.params.at("args").get<std::vector<std::string>>();
      if (node.params.contains("timeout_ms")) {
        spec.timeout = std::chrono::milliseconds(node.params.at("timeout_ms").get<long long>());
      }
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kInvalidPipeline, "bad params for '" + node.id + "': " + e.what());
    }
    return make_external_operator(node.id, arity, std::move(spec), node.spec_level, std::move(props));
  }
  OperatorHandle op = harness::make_synthetic_operator(node.id, node.kind, node.params, node.spec_level, props);
  if (op.arity() != arity) {
    throw Error(ErrorCode::kInvalidPipeline, "node '" + node.id + "' of kind " + node.kind + " takes " +
                                                 std::to_string(op.arity()) + " ports, graph wires " +
                                                 std::to_string(arity));
  }
  return op;
}

std::map<std::string, OperatorHandle> build_operators(const PipelineGraph& g,
                                                      const std::map<std::string, PropertyClass>& properties) {
  std::map<std::string, OperatorHandle> out;
  for (const auto& n : g.nodes) {
    auto it = properties.find(n.id);
    out.emplace(n.id, make_node_operator(n, g.arity(n.id), it == properties.end() ? nullptr : &it->second));
  }
  return out;
}

}  // namespace prober::runtime
