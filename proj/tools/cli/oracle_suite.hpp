// Copyright 2026 The Prober Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "prober/harness/instance_matrix.hpp"

namespace prober::cli {

struct OracleOutcome {
  std::size_t instances = 0;
  /// One line per disagreement, "<instance>: <what differs>".
  std::vector<std::string> disagreements;
};

/// Runs exhaustive enumeration, P_int, P_uni and P_imp against the
/// brute-force oracle on every instance.
OracleOutcome run_oracle_suite(const std::vector<harness::Instance>& instances);

}  // namespace prober::cli
