// Copyright 2026 The Prober Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "prober/operator.hpp"
#include "prober/record.hpp"

namespace prober::harness {

inline constexpr std::size_t kOracleMaxN = 12;

/// Every MISet of `target`, by exhaustion over all 2^|input| subsets with
/// uncounted, uncached applications. Shares no search code with the engine.
/// Sorted by member ids. Throws kTooLarge when |input| > max_n.
std::vector<RecordSet> brute_force_pall(const OperatorHandle& op, const RecordSet& input,
                                        const Record& target, std::size_t max_n = kOracleMaxN);

/// Derived oracle values.
RecordSet oracle_union(const std::vector<RecordSet>& pall);
RecordSet oracle_intersection(const std::vector<RecordSet>& pall);
/// (record id, count) sorted by count descending, then id ascending.
std::vector<std::pair<RecordId, std::uint64_t>> oracle_impact(const std::vector<RecordSet>& pall);

/// Canonical form for set-of-sets comparisons.
std::vector<std::vector<RecordId>> canonical_sets(const std::vector<RecordSet>& sets);

}  // namespace prober::harness
