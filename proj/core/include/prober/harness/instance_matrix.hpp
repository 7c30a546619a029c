// Copyright 2026 The Prober Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "prober/operator.hpp"
#include "prober/record.hpp"

namespace prober::harness {

/// One (operator, input, output record) triple. Multi-port inputs are flat.
struct Instance {
  std::string name;
  std::string kind;
  nlohmann::json params = nlohmann::json::object();
  RecordSet input;
  Record target;

  OperatorHandle op() const;
  Shape true_shape() const;
};

/// Every operator kind and shape class, all with |input| <= 12.
std::vector<Instance> builtin_instance_matrix();

/// Golden form: name, kind, params, input, target, and the oracle's P_all as id lists.
nlohmann::json matrix_to_json(const std::vector<Instance>& instances);
std::vector<Instance> matrix_from_json(const nlohmann::json& j);

/// Two operators run back to back on `input` (documents).
struct TwoChain {
  std::string name;
  std::string kind1;
  nlohmann::json params1 = nlohmann::json::object();
  std::string kind2;
  nlohmann::json params2 = nlohmann::json::object();
  RecordSet input;

  OperatorHandle first() const;
  OperatorHandle second() const;
  /// The real composite, executed end to end.
  OperatorHandle composite() const;
  Shape shape1() const;
  Shape shape2() const;
};

std::vector<TwoChain> builtin_two_chains();

}  // namespace prober::harness
