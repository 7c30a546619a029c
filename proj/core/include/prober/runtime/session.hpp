// Copyright 2026 The Prober Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>

#include "prober/budget.hpp"
#include "prober/composition.hpp"
#include "prober/miset.hpp"
#include "prober/runtime/run_trace.hpp"

namespace prober::runtime {

inline constexpr std::uint64_t kDefaultRequestBudget = 10000;

struct ProvenanceRequest {
  std::string node;  // empty: the sink
  /// Answer over the source input by composing stored provenance.
  bool chain = false;
  std::string record;  // record digest, value digest, or id
  ProvenanceKind kind = ProvenanceKind::kAll;
  std::optional<std::size_t> k;      // Any only; unset asks for every MISet
  std::optional<std::size_t> bound;  // All only
  std::optional<std::uint64_t> budget;
  bool allow_unsound = false;
};

/// Throws kInvalidArgument for parameter combinations that make no sense.
void validate_request(const ProvenanceRequest& req);

/// How a response was produced.
enum class Route { kCache, kWitness, kDirectScan, kUnique, kEngine, kComposition, kSimulation };
std::string_view to_string(Route r);

struct ProvenanceResponse {
  ProvenanceResult result;
  /// Serialized result; identical bytes for every cache hit.
  std::string body;
  Route route = Route::kEngine;
  bool cache_hit = false;
};

struct SessionStats {
  std::uint64_t requests = 0;
  std::uint64_t cache_hits = 0;
  std::uint64_t audits = 0;
  std::uint64_t audit_mismatches = 0;
  BudgetSnapshot spent;
};

nlohmann::json to_json(const SessionStats& s);

/// Loaded traces, operators, and the provenance cache for one store root.
/// Safe for concurrent use.
class Session {
 public:
  explicit Session(std::filesystem::path root = data_dir());

  const std::filesystem::path& root() const { return root_; }
  std::vector<std::string> runs() const { return list_runs(root_); }

  /// Loaded once, then shared. Throws kUnknownRun.
  std::shared_ptr<const RunTrace> trace(const std::string& run_id);

  /// Cache hit, else witness -> direct scan -> unique -> engine for one node,
  /// or composition from the source when req.chain. `on_miset` sees All/Any
  /// MISets as they are found; returning false cancels the search.
  ProvenanceResponse provenance(const std::string& run_id, const ProvenanceRequest& req,
                                CancelToken cancel = nullptr, const MISetCallback& on_miset = nullptr);

  /// Recompute every 20th cache hit and compare it with the stored bytes.
  void set_audit(bool on) { audit_ = on; }
  SessionStats stats() const;

 private:
  struct RunState {
    std::shared_ptr<const RunTrace> trace;
    std::map<std::string, OperatorHandle> ops;
    ExecutionCache exec_cache;
    std::mutex mu;
    std::map<std::string, std::shared_ptr<const StoredProvenance>> stored;
    std::set<std::string> downgraded;
  };

  std::shared_ptr<RunState> state(const std::string& run_id);
  ProvenanceResult compute(RunState& st, const ProvenanceRequest& req, const std::string& node, const Record& target,
                           ExecutionBudget& budget, ExecutionCache& cache, const MISetCallback& on_miset,
                           Route& route);
  ProvenanceResult compute_node(RunState& st, const ProvenanceRequest& req, const std::string& node,
                                const Record& target, ExecutionBudget& budget, ExecutionCache& cache,
                                const MISetCallback& on_miset, Route& route, bool& streamed);
  ProvenanceResult compute_chain(RunState& st, const ProvenanceRequest& req, const std::string& node,
                                 const Record& target, ExecutionBudget& budget, Route& route);
  std::shared_ptr<const StoredProvenance> stored(RunState& st, const std::string& node, ExecutionBudget& budget);
  std::string cache_file(const RunTrace& t, const ProvenanceRequest& req, const std::string& node,
                         const Record& target) const;

  std::filesystem::path root_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<RunState>> runs_;
  std::atomic<bool> audit_{false};
  std::atomic<std::uint64_t> requests_{0};
  std::atomic<std::uint64_t> hits_{0};
  std::atomic<std::uint64_t> audits_{0};
  std::atomic<std::uint64_t> mismatches_{0};
  BudgetSnapshot spent_;  // guarded by mu_
};

}  // namespace prober::runtime
