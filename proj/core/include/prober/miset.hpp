// Copyright 2026 The Prober Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "prober/budget.hpp"
#include "prober/record.hpp"

namespace prober {

/// A minimal input subset producing a target record.
struct MISet {
  RecordSet members;

  friend bool operator==(const MISet& a, const MISet& b) { return a.members == b.members; }
};

enum class ProvenanceKind { kAll, kAny, kUni, kInt, kImp };
enum class Relation { kExact, kSupersetOfTruth, kSubsetOfTruth };

std::string_view to_string(ProvenanceKind k);
ProvenanceKind provenance_kind_from_string(std::string_view s);
std::string_view to_string(Relation r);
Relation relation_from_string(std::string_view s);

struct ImpactEntry {
  Record record;
  std::uint64_t count = 0;
};

struct AllProvenance {
  std::vector<MISet> misets;
};
struct AnyProvenance {
  std::vector<MISet> misets;
  std::size_t requested_k = 1;
};
struct UnionProvenance {
  RecordSet records;
};
struct IntersectionProvenance {
  RecordSet records;
};
struct ImpactProvenance {
  std::vector<ImpactEntry> entries;
};

using ProvenancePayload = std::variant<AllProvenance, AnyProvenance, UnionProvenance,
                                       IntersectionProvenance, ImpactProvenance>;

struct ProvenanceResult {
  ProvenancePayload payload;
  /// The payload equals the true value of its kind (for Any: a valid
  /// min(k, |P_all|)-sized selection).
  bool exact = true;
  /// All/Any: the search proved no further MISet exists.
  bool exhausted = false;
  /// Stopped early by the budget or by cancellation.
  bool truncated = false;
  /// How a set-valued payload relates to the true value when not exact.
  Relation relation = Relation::kExact;
  /// Derived from partial stored provenance in forced exploration mode.
  bool unsound = false;
  BudgetSnapshot budget_spent;

  ProvenanceKind kind() const;
  /// MISets carried by All/Any payloads; empty otherwise.
  const std::vector<MISet>& misets() const;
};

/// Union of the MISet members, in canonical order.
RecordSet union_of(const std::vector<MISet>& misets);
/// Intersection of the MISet members; empty for an empty list.
RecordSet intersection_of(const std::vector<MISet>& misets);
/// Membership counts sorted by count descending, then (port, local) ascending.
std::vector<ImpactEntry> impact_of(const std::vector<MISet>& misets);
/// Builds any kind of result from a list of MISets known to be all of P_all
/// (`complete`) or a prefix of it.
ProvenanceResult result_from_misets(std::vector<MISet> misets, ProvenanceKind kind,
                                    std::size_t k, bool complete, bool truncated);

/// Greedy single-MISet search over a frozen snapshot of `input`.
/// Costs at most |input| + 1 true executions. Throws kNotProduced.
MISet find_any_miset(const OperatorProbe& probe, const RecordSet& input, const Record& target);

struct UniqueCheck {
  bool unique = false;
  MISet miset;
};
/// find_any_miset plus one probe per member; at most 2|input| + 1 executions.
UniqueCheck is_unique_miset(const OperatorProbe& probe, const RecordSet& input, const Record& target);

/// True iff target ∈ O(subset) and no single-element removal keeps it.
bool is_miset(const OperatorProbe& probe, const RecordSet& input, const RecordSet& subset,
              const Record& target);

enum class NextStatus { kFound, kNoneLeft, kTruncated };
struct NextResult {
  NextStatus status = NextStatus::kNoneLeft;
  std::optional<MISet> miset;
};
/// An MISet distinct from every element of `found`, searched over removal
/// sets hitting every found MISet in canonical order.
NextResult find_next_miset(const OperatorProbe& probe, const RecordSet& input, const Record& target,
                           const std::vector<MISet>& found);

enum class EnumerationEnd { kExhausted, kLimitReached, kTruncated, kCancelled };
std::string_view to_string(EnumerationEnd e);

struct EnumerationOutcome {
  std::vector<MISet> misets;
  EnumerationEnd end = EnumerationEnd::kExhausted;
};

/// Called once per discovered MISet; returning false stops the search.
using MISetCallback = std::function<bool(const MISet&)>;

/// Incremental enumeration: a greedy first MISet, then repeated next
/// searches. Budget exhaustion and cancellation end the stream instead of
/// throwing. Throws kNotProduced when target ∉ O(input).
EnumerationOutcome enumerate_misets(const OperatorProbe& probe, const RecordSet& input,
                                    const Record& target, std::optional<std::size_t> k = std::nullopt,
                                    const MISetCallback& on_miset = nullptr);

ProvenanceResult compute_p_all(const OperatorProbe& probe, const RecordSet& input, const Record& target);
ProvenanceResult compute_p_any(const OperatorProbe& probe, const RecordSet& input, const Record& target,
                               std::size_t k);
/// {i : target ∉ O(input − {i})}. With `known` set, only its members are
/// probed (the intersection lies inside every MISet).
ProvenanceResult compute_p_int(const OperatorProbe& probe, const RecordSet& input, const Record& target,
                               const MISet* known = nullptr);
ProvenanceResult compute_p_uni(const OperatorProbe& probe, const RecordSet& input, const Record& target);
ProvenanceResult compute_p_imp(const OperatorProbe& probe, const RecordSet& input, const Record& target);

/// Exhaustive search over subsets of size <= bound in canonical order.
/// Throws kBoundViolated when target ∈ O(input) but no such MISet exists.
ProvenanceResult enumerate_bounded(const OperatorProbe& probe, const RecordSet& input,
                                   const Record& target, std::size_t bound);

}  // namespace prober
