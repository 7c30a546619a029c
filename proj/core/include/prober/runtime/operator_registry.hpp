// Copyright 2026 The Prober Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <string>

#include "prober/operator.hpp"
#include "prober/pipeline.hpp"

namespace prober::runtime {

/// Properties a node's configuration licenses: a declared shape yields
/// declared evidence; otherwise the shape is arbitrary.
PropertyClass declared_properties(const NodeConfig& node);

/// Builds the operator for `node`. Kinds are the synthetic ones plus
/// "external" (params.command, params.args, params.timeout_ms). `properties`
/// overrides the declared ones when given.
OperatorHandle make_node_operator(const NodeConfig& node, std::size_t arity,
                                  const PropertyClass* properties = nullptr);

/// Operators for every node of `g`, keyed by node id.
std::map<std::string, OperatorHandle> build_operators(const PipelineGraph& g,
                                                      const std::map<std::string, PropertyClass>& properties = {});

}  // namespace prober::runtime
