// Copyright 2026 The Prober Authors
// SPDX-License-Identifier: Apache-2.0

#include "prober/budget.hpp"

#include "prober/digest.hpp"
#include "prober/error.hpp"

namespace prober {

BudgetSnapshot& BudgetSnapshot::operator+=(const BudgetSnapshot& o) {
  executions += o.executions;
  cached_hits += o.cached_hits;
  records_fetched += o.records_fetched;
  virtual_evaluations += o.virtual_evaluations;
  return *this;
}

BudgetSnapshot BudgetSnapshot::operator-(const BudgetSnapshot& o) const {
  return BudgetSnapshot{executions - o.executions, cached_hits - o.cached_hits,
                        records_fetched - o.records_fetched, virtual_evaluations - o.virtual_evaluations};
}

nlohmann::json to_json(const BudgetSnapshot& s) {
  return nlohmann::json{{"executions", s.executions},
                        {"cachedHits", s.cached_hits},
                        {"recordsFetched", s.records_fetched},
                        {"virtualEvaluations", s.virtual_evaluations}};
}

BudgetSnapshot budget_from_json(const nlohmann::json& j) {
  BudgetSnapshot s;
  s.executions = j.value("executions", std::uint64_t{0});
  s.cached_hits = j.value("cachedHits", std::uint64_t{0});
  s.records_fetched = j.value("recordsFetched", std::uint64_t{0});
  s.virtual_evaluations = j.value("virtualEvaluations", std::uint64_t{0});
  return s;
}

CancelToken make_cancel_token() { return std::make_shared<std::atomic<bool>>(false); }

ExecutionBudget::ExecutionBudget(std::optional<std::uint64_t> limit, CancelToken cancel)
    : limit_(limit), cancel_(std::move(cancel)) {}

bool ExecutionBudget::exhausted() const {
  return limit_ && spent_.executions + spent_.virtual_evaluations >= *limit_;
}

void ExecutionBudget::check_not_cancelled() const {
  if (cancelled()) throw Error(ErrorCode::kCancelled, "query cancelled by consumer");
}

void ExecutionBudget::check_can_execute() const {
  check_not_cancelled();
  if (exhausted()) {
    throw Error(ErrorCode::kBudgetExhausted,
                "execution limit " + std::to_string(*limit_) + " reached");
  }
}

void ExecutionBudget::record_execution(std::uint64_t fetched) {
  ++spent_.executions;
  spent_.records_fetched += fetched;
}

void ExecutionBudget::record_virtual(std::uint64_t fetched) {
  ++spent_.virtual_evaluations;
  spent_.records_fetched += fetched;
}

std::shared_ptr<const RecordSet> ExecutionCache::lookup(const std::string& key) const {
  std::shared_lock lock(mu_);
  auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : it->second;
}

void ExecutionCache::store(const std::string& key, std::shared_ptr<const RecordSet> out) {
  std::unique_lock lock(mu_);
  entries_.emplace(key, std::move(out));
}

std::size_t ExecutionCache::size() const {
  std::shared_lock lock(mu_);
  return entries_.size();
}

void ExecutionCache::clear() {
  std::unique_lock lock(mu_);
  entries_.clear();
}

bool ExecutionCache::claim_watchdog_sample(const std::string& op_name) {
  std::lock_guard lock(watchdog_mu_);
  return watchdog_seen_.insert(op_name).second;
}

std::string cache_key(const OperatorHandle& op, std::span<const RecordSet> inputs) {
  Sha256 h;
  for (const auto& in : inputs) h.update(in.content_digest()).update("\x1d");
  return op.name() + "\x1f" + h.hex_digest();
}

RecordSet apply_counted(const OperatorHandle& op, std::span<const RecordSet> inputs,
                        ExecutionBudget& budget, ExecutionCache* cache) {
  if (inputs.size() != op.arity()) {
    throw Error(ErrorCode::kInvalidArgument, "operator '" + op.name() + "' expects " +
                                                 std::to_string(op.arity()) + " inputs, got " +
                                                 std::to_string(inputs.size()));
  }
  budget.check_not_cancelled();
  std::string key;
  if (cache != nullptr) {
    key = cache_key(op, inputs);
    if (auto hit = cache->lookup(key)) {
      budget.record_hit();
      return *hit;
    }
  }
  budget.check_can_execute();

  std::uint64_t fetched = 0;
  for (const auto& in : inputs) fetched += in.size();

  RecordSet out = op.invoke(inputs);
  if (op.backing() == Backing::kVirtualComposite) {
    budget.record_virtual(fetched);
  } else {
    budget.record_execution(fetched);
    if (cache != nullptr) cache->note_execution();
  }

  if (cache != nullptr) {
    if (cache->watchdog() && op.backing() != Backing::kVirtualComposite &&
        cache->claim_watchdog_sample(op.name())) {
      RecordSet again = op.invoke(inputs);
      bool same = again.size() == out.size();
      for (const auto& r : again) same = same && out.contains_value(r.value);
      if (!same) {
        throw Error(ErrorCode::kNondeterministic,
                    "operator '" + op.name() + "' returned different outputs for equal inputs");
      }
    }
    cache->store(key, std::make_shared<const RecordSet>(out));
  }
  return out;
}

RecordSet OperatorProbe::apply(const RecordSet& flat) const {
  if (op_.arity() == 1) {
    const RecordSet* one = &flat;
    return apply_counted(op_, std::span<const RecordSet>(one, 1), budget_, cache_);
  }
  auto parts = unflatten_ports(flat, op_.arity());
  return apply_counted(op_, parts, budget_, cache_);
}

bool OperatorProbe::produces(const RecordSet& flat, const Record& target) const {
  return contains_by_value(apply(flat), target);
}

}  // namespace prober
