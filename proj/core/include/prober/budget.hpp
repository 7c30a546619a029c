// Copyright 2026 The Prober Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <span>
#include <string>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "prober/operator.hpp"
#include "prober/record.hpp"

namespace prober {

struct BudgetSnapshot {
  std::uint64_t executions = 0;
  std::uint64_t cached_hits = 0;
  std::uint64_t records_fetched = 0;
  std::uint64_t virtual_evaluations = 0;

  BudgetSnapshot& operator+=(const BudgetSnapshot& o);
  /// Counter-wise difference; `o` must be an earlier snapshot of the same budget.
  BudgetSnapshot operator-(const BudgetSnapshot& o) const;
  friend bool operator==(const BudgetSnapshot&, const BudgetSnapshot&) = default;
};

nlohmann::json to_json(const BudgetSnapshot& s);
BudgetSnapshot budget_from_json(const nlohmann::json& j);

/// Shared flag a consumer sets to stop a running query.
using CancelToken = std::shared_ptr<std::atomic<bool>>;
CancelToken make_cancel_token();

/// Per-query accumulator. `limit` caps true applications (real executions plus
/// virtual-composite evaluations); the request that would exceed it throws
/// kBudgetExhausted instead of running.
class ExecutionBudget {
 public:
  explicit ExecutionBudget(std::optional<std::uint64_t> limit = std::nullopt,
                           CancelToken cancel = nullptr);

  std::uint64_t executions() const { return spent_.executions; }
  std::uint64_t cached_hits() const { return spent_.cached_hits; }
  std::uint64_t records_fetched() const { return spent_.records_fetched; }
  std::uint64_t virtual_evaluations() const { return spent_.virtual_evaluations; }
  std::uint64_t requests() const { return spent_.executions + spent_.virtual_evaluations + spent_.cached_hits; }
  const std::optional<std::uint64_t>& limit() const { return limit_; }
  const BudgetSnapshot& snapshot() const { return spent_; }

  bool exhausted() const;
  bool cancelled() const { return cancel_ && cancel_->load(); }
  const CancelToken& cancel_token() const { return cancel_; }

  /// Throws kCancelled / kBudgetExhausted when another true application is not allowed.
  void check_can_execute() const;
  void check_not_cancelled() const;

  void record_execution(std::uint64_t fetched);
  void record_virtual(std::uint64_t fetched);
  void record_hit() { ++spent_.cached_hits; }

 private:
  std::optional<std::uint64_t> limit_;
  CancelToken cancel_;
  BudgetSnapshot spent_;
};

/// Memoization of operator outputs keyed by (operator name, input tuple
/// digest). Concurrent readers, serialized writers.
class ExecutionCache {
 public:
  std::shared_ptr<const RecordSet> lookup(const std::string& key) const;
  void store(const std::string& key, std::shared_ptr<const RecordSet> out);
  std::size_t size() const;
  void clear();

  /// When on, the first true execution of every operator is repeated and
  /// compared; a mismatch throws kNondeterministic.
  void set_watchdog(bool on) { watchdog_ = on; }
  bool watchdog() const { return watchdog_; }
  /// Returns true the first time it sees `op_name`.
  bool claim_watchdog_sample(const std::string& op_name);

  /// Running totals across every query that used this cache.
  std::uint64_t total_executions() const { return total_executions_.load(); }
  void note_execution() { total_executions_.fetch_add(1); }

 private:
  mutable std::shared_mutex mu_;
  std::unordered_map<std::string, std::shared_ptr<const RecordSet>> entries_;
  std::mutex watchdog_mu_;
  std::set<std::string> watchdog_seen_;
  std::atomic<bool> watchdog_{false};
  std::atomic<std::uint64_t> total_executions_{0};
};

std::string cache_key(const OperatorHandle& op, std::span<const RecordSet> inputs);

/// Applies `op`, consulting `cache` (may be null) and charging `budget`.
RecordSet apply_counted(const OperatorHandle& op, std::span<const RecordSet> inputs,
                        ExecutionBudget& budget, ExecutionCache* cache = nullptr);

/// The view of an operator the search algorithms use: a monotone function of
/// one flattened, port-tagged input set.
class OperatorProbe {
 public:
  OperatorProbe(const OperatorHandle& op, ExecutionBudget& budget, ExecutionCache* cache = nullptr)
      : op_(op), budget_(budget), cache_(cache) {}

  RecordSet apply(const RecordSet& flat) const;
  bool produces(const RecordSet& flat, const Record& target) const;

  const OperatorHandle& op() const { return op_; }
  ExecutionBudget& budget() const { return budget_; }
  ExecutionCache* cache() const { return cache_; }

 private:
  const OperatorHandle& op_;
  ExecutionBudget& budget_;
  ExecutionCache* cache_;
};

}  // namespace prober
