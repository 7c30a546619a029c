// Copyright 2026 The Prober Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "prober/budget.hpp"
#include "prober/miset.hpp"

namespace prober::harness {

/// |p| / |uni|. Throws kDivisionUndefined when uni is empty.
double coverage(std::size_t p_size, std::size_t uni_size);

/// Coverage of the union of the first k MISets of `any`.
double any_k_coverage(const std::vector<MISet>& any, std::size_t k, const RecordSet& uni);

/// Impact entries ordered by count descending, ties by id.
std::vector<ImpactEntry> impact_ranking(std::vector<ImpactEntry> imp);

/// Element k-1 is (sum of the top-k counts) / (sum of all counts).
/// Throws kDivisionUndefined when every count is zero.
std::vector<double> record_coverage_curve(const std::vector<ImpactEntry>& ranked);

/// Element k-1 is the fraction of `pall` meeting the top-k records.
/// Throws kDivisionUndefined when pall is empty.
std::vector<double> miset_coverage_curve(const std::vector<ImpactEntry>& ranked, const std::vector<MISet>& pall);

struct MetricInputs {
  std::vector<MISet> pall;
  /// MISets in the order an Any request returned them.
  std::vector<MISet> any;
  RecordSet puni;
  RecordSet pint;
  std::vector<ImpactEntry> imp;
  std::vector<std::size_t> any_ks{1, 3, 5};
  BudgetSnapshot cost;
};

/// Ratios that are undefined (empty P_uni) are nullopt, never 0.
struct MetricReport {
  std::optional<double> coverage_int;
  std::optional<double> coverage_uni;
  std::map<std::size_t, double> coverage_any;
  std::vector<double> record_coverage;
  std::vector<double> miset_coverage;
  std::size_t pall_size = 0;
  std::size_t puni_size = 0;
  std::size_t pint_size = 0;
  BudgetSnapshot cost;
};

MetricReport compute_metrics(const MetricInputs& in);

nlohmann::json to_json(const MetricReport& m);

}  // namespace prober::harness
