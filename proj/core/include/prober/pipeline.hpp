// Copyright 2026 The Prober Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "prober/operator.hpp"

namespace prober {

struct NodeConfig {
  std::string id;
  std::string kind;
  nlohmann::json params = nlohmann::json::object();
  SpecLevel spec_level;
  std::optional<Shape> declared_shape;
};

struct Edge {
  std::string from;
  std::string to;
  std::uint32_t port = 0;
};

/// Operator DAG. The source node (no incoming edges) reads the run inputs on
/// port 0; the sink (no outgoing edges) produces the pipeline output.
struct PipelineGraph {
  std::vector<NodeConfig> nodes;
  std::vector<Edge> edges;

  const NodeConfig* node(const std::string& id) const;
  const NodeConfig& require_node(const std::string& id) const;
  /// Incoming edges of `id`, ordered by port.
  std::vector<Edge> incoming(const std::string& id) const;
  std::vector<std::string> successors(const std::string& id) const;
  /// Number of input ports of `id` (1 for the source).
  std::size_t arity(const std::string& id) const;

  /// Throw kInvalidPipeline unless validate_pipeline() is empty.
  std::string source() const;
  std::string sink() const;
  std::vector<std::string> topological_order() const;

  /// Node ids on a path source -> `id`, when the path is unique (a chain).
  std::optional<std::vector<std::string>> chain_to(const std::string& id) const;
};

/// Every violated invariant, as short messages ("cycle", "multiple sinks", ...).
std::vector<std::string> validate_pipeline(const PipelineGraph& g);

PipelineGraph pipeline_from_json(const nlohmann::json& j);
nlohmann::json pipeline_to_json(const PipelineGraph& g);
nlohmann::json spec_level_to_json(const SpecLevel& s);
SpecLevel spec_level_from_json(const nlohmann::json& j);

}  // namespace prober
