// Copyright 2026 The Prober Authors
// SPDX-License-Identifier: Apache-2.0

#include "prober/harness/oracle.hpp"

#include <algorithm>
#include <cstdint>
#include <map>

#include "prober/error.hpp"

namespace prober::harness {
namespace {

RecordSet subset_of(const RecordSet& input, std::uint32_t mask) {
  std::vector<Record> out;
  for (std::size_t i = 0; i < input.size(); ++i) {
    if (mask & (1u << i)) out.push_back(input[i]);
  }
  return RecordSet(std::move(out));
}

}  // namespace

std::vector<RecordSet> brute_force_pall(const OperatorHandle& op, const RecordSet& input,
                                        const Record& target, std::size_t max_n) {
  const std::size_t n = input.size();
  if (n > max_n || n > 20) {
    throw Error(ErrorCode::kTooLarge, "oracle limited to " + std::to_string(max_n) + " inputs, got " +
                                          std::to_string(n));
  }
  const std::uint32_t full = (1u << n);
  std::vector<char> produces(full, 0);
  for (std::uint32_t mask = 0; mask < full; ++mask) {
    RecordSet sub = subset_of(input, mask);
    RecordSet out = op.arity() == 1 ? op.invoke(std::span<const RecordSet>(&sub, 1))
                                    : [&] {
                                        auto parts = unflatten_ports(sub, op.arity());
                                        return op.invoke(parts);
                                      }();
    produces[mask] = out.contains_value(target.value) ? 1 : 0;
  }
  std::vector<RecordSet> out;
  for (std::uint32_t mask = 0; mask < full; ++mask) {
    if (!produces[mask]) continue;
    // Minimal: no proper subset produces the target.
    bool minimal = true;
    for (std::uint32_t sub = (mask - 1) & mask; minimal; sub = (sub - 1) & mask) {
      if (sub != mask && produces[sub]) minimal = false;
      if (sub == 0) break;
    }
    if (minimal) out.push_back(subset_of(input, mask));
  }
  std::sort(out.begin(), out.end(), [](const RecordSet& a, const RecordSet& b) { return a.ids() < b.ids(); });
  return out;
}

RecordSet oracle_union(const std::vector<RecordSet>& pall) {
  std::map<RecordId, Record> all;
  for (const auto& s : pall) {
    for (const auto& r : s) all.emplace(r.id, r);
  }
  std::vector<Record> out;
  for (auto& [id, r] : all) out.push_back(r);
  return RecordSet(std::move(out));
}

RecordSet oracle_intersection(const std::vector<RecordSet>& pall) {
  if (pall.empty()) return {};
  std::vector<Record> out;
  for (const auto& r : pall.front()) {
    if (std::all_of(pall.begin(), pall.end(), [&](const RecordSet& s) { return s.contains_id(r.id); })) {
      out.push_back(r);
    }
  }
  return RecordSet(std::move(out));
}

std::vector<std::pair<RecordId, std::uint64_t>> oracle_impact(const std::vector<RecordSet>& pall) {
  std::map<RecordId, std::uint64_t> counts;
  for (const auto& s : pall) {
    for (const auto& r : s) ++counts[r.id];
  }
  std::vector<std::pair<RecordId, std::uint64_t>> out(counts.begin(), counts.end());
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  return out;
}

std::vector<std::vector<RecordId>> canonical_sets(const std::vector<RecordSet>& sets) {
  std::vector<std::vector<RecordId>> out;
  out.reserve(sets.size());
  for (const auto& s : sets) out.push_back(s.ids());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace prober::harness
