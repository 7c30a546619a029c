// Copyright 2026 The Prober Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "prober/budget.hpp"
#include "prober/operator.hpp"

namespace prober {

inline constexpr std::size_t kDefaultTrials = 32;
/// Sampled subsets have between 1 and this many records.
inline constexpr std::size_t kMaxSampleSize = 8;

enum class Verdict { kConsistent, kViolated };
std::string_view to_string(Verdict v);

enum class CheckKind { kMonotonicity, kAdditivity };

/// Concrete inputs on which a property failed. Monotonicity: `smaller` ⊆
/// `larger` and `record` ∈ O(smaller) \ O(larger). Additivity: `record` is in
/// exactly one of O(larger) and the union of its singleton outputs.
struct Counterexample {
  CheckKind check = CheckKind::kMonotonicity;
  RecordSet smaller;
  RecordSet larger;
  Record record;
};

struct CheckReport {
  std::size_t trials = 0;
  Verdict verdict = Verdict::kConsistent;
  std::optional<Counterexample> counterexample;
};

struct EvidenceReport {
  std::uint64_t seed = 0;
  CheckReport monotonicity;
  CheckReport additivity;
  /// Largest |O({i})| seen during the additivity check.
  std::size_t max_singleton_outputs = 0;
  /// Trials of the disjoint-partition heuristic, and whether it held.
  std::size_t partition_trials = 0;
  bool partition_consistent = false;
  bool budget_exhausted = false;
};

/// Draws nested pairs smaller ⊆ larger from `pool` and checks output containment by value.
CheckReport check_monotonicity_sample(const OperatorProbe& probe, const RecordSet& pool,
                                      std::size_t trials, std::uint64_t seed);

/// Compares O(I) with the union of singleton outputs on sampled I.
/// `max_singleton` receives the largest singleton output size seen.
CheckReport check_additivity(const OperatorProbe& probe, const RecordSet& pool, std::size_t trials,
                             std::uint64_t seed, std::size_t* max_singleton = nullptr);

struct InferenceResult {
  PropertyClass properties;
  EvidenceReport report;
};

/// Arbitrary unless sampling supports something narrower. `pool` is a
/// flattened, port-tagged record set.
InferenceResult infer_properties(const OperatorProbe& probe, const RecordSet& pool,
                                 std::size_t trials = kDefaultTrials, std::uint64_t seed = 1);

/// Re-executes a counterexample; true when the violation reproduces.
bool replay(const OperatorProbe& probe, const Counterexample& cx);

nlohmann::json to_json(const EvidenceReport& r);
nlohmann::json to_json(const PropertyClass& p);
PropertyClass property_class_from_json(const nlohmann::json& j);

}  // namespace prober
