// Copyright 2026 The Prober Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "prober/budget.hpp"
#include "prober/operator.hpp"
#include "prober/pipeline.hpp"
#include "prober/record.hpp"

namespace prober::runtime {

/// $PROBER_DATA_DIR, or ./.prober when unset.
std::filesystem::path data_dir();

/// Directory of run `run_id` under a store root.
std::filesystem::path run_dir(const std::filesystem::path& root, const std::string& run_id);

/// Ids of persisted runs under `root`, sorted.
std::vector<std::string> list_runs(const std::filesystem::path& root);

struct RunTrace {
  std::string run_id;
  PipelineGraph graph;
  RecordSet source;
  /// Output of every node, keyed by node id.
  std::map<std::string, RecordSet> outputs;
  /// Cost of producing each node's output.
  std::map<std::string, BudgetSnapshot> budgets;
  /// Inferred property classes; nodes without one use their declared shape.
  std::map<std::string, PropertyClass> properties;
  std::string config_hash;
  std::string started_at;
  std::string finished_at;

  /// Per-port inputs of `node` (the source input for the source node).
  std::vector<RecordSet> inputs_of(const std::string& node) const;
  /// inputs_of(node) with port-tagged ids.
  RecordSet flat_input(const std::string& node) const;
  /// Throws kUnknownNode.
  const RecordSet& output(const std::string& node) const;
  BudgetSnapshot total_budget() const;
  /// Inferred properties when present, else declared ones.
  PropertyClass properties_of(const std::string& node) const;
  /// An output record of `node` named by record digest, value digest, or id.
  /// Throws kUnknownRecord.
  const Record& resolve_output(const std::string& node, const std::string& ref) const;
};

/// SHA-256 of the canonical pipeline JSON.
std::string config_hash(const PipelineGraph& g);

/// "r" followed by 12 hex digits derived from the config and the source input.
std::string default_run_id(const PipelineGraph& g, const RecordSet& source);

/// Executes every node once in topological order. Node failures surface as
/// kOperatorFailure naming the node; kBudgetExhausted and kCancelled pass through.
RunTrace run_pipeline(const PipelineGraph& g, const RecordSet& source, ExecutionBudget& budget,
                      std::string run_id = "");

/// Writes config.json, source.jsonl, edges/<node>.jsonl, budgets.json,
/// properties.json, timestamps.json, and the trace.json manifest of hashes.
void persist_trace(const RunTrace& t, const std::filesystem::path& dir);

/// Throws kCorruptTrace on a missing, truncated, or altered file; an edited
/// config.json is reported as configDrift.
RunTrace load_trace(const std::filesystem::path& dir);

/// Whole-file helpers. write_file_atomic writes a temp file then renames it.
std::string read_file(const std::filesystem::path& p);
void write_file_atomic(const std::filesystem::path& p, const std::string& bytes);

}  // namespace prober::runtime
