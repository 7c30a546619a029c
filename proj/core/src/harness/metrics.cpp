// Copyright 2026 The Prober Authors
// SPDX-License-Identifier: Apache-2.0

#include "prober/harness/metrics.hpp"

#include <algorithm>
#include <set>

#include "prober/error.hpp"

namespace prober::harness {

double coverage(std::size_t p_size, std::size_t uni_size) {
  if (uni_size == 0) throw Error(ErrorCode::kDivisionUndefined, "coverage undefined: P_uni is empty");
  return static_cast<double>(p_size) / static_cast<double>(uni_size);
}

double any_k_coverage(const std::vector<MISet>& any, std::size_t k, const RecordSet& uni) {
  std::vector<MISet> head(any.begin(), any.begin() + static_cast<std::ptrdiff_t>(std::min(k, any.size())));
  return coverage(union_of(head).size(), uni.size());
}

std::vector<ImpactEntry> impact_ranking(std::vector<ImpactEntry> imp) {
  std::stable_sort(imp.begin(), imp.end(), [](const ImpactEntry& a, const ImpactEntry& b) {
    if (a.count != b.count) return a.count > b.count;
    return a.record.id < b.record.id;
  });
  return imp;
}

std::vector<double> record_coverage_curve(const std::vector<ImpactEntry>& ranked) {
  std::uint64_t total = 0;
  for (const auto& e : ranked) total += e.count;
  if (total == 0) throw Error(ErrorCode::kDivisionUndefined, "record coverage undefined: no appearances");
  std::vector<double> out;
  std::uint64_t acc = 0;
  for (const auto& e : ranked) {
    acc += e.count;
    out.push_back(static_cast<double>(acc) / static_cast<double>(total));
  }
  return out;
}

std::vector<double> miset_coverage_curve(const std::vector<ImpactEntry>& ranked, const std::vector<MISet>& pall) {
  if (pall.empty()) throw Error(ErrorCode::kDivisionUndefined, "MISet coverage undefined: P_all is empty");
  std::vector<bool> hit(pall.size(), false);
  std::size_t hits = 0;
  std::vector<double> out;
  for (const auto& e : ranked) {
    for (std::size_t i = 0; i < pall.size(); ++i) {
      if (!hit[i] && pall[i].members.contains_id(e.record.id)) {
        hit[i] = true;
        ++hits;
      }
    }
    out.push_back(static_cast<double>(hits) / static_cast<double>(pall.size()));
  }
  return out;
}

MetricReport compute_metrics(const MetricInputs& in) {
  MetricReport m;
  m.pall_size = in.pall.size();
  m.puni_size = in.puni.size();
  m.pint_size = in.pint.size();
  m.cost = in.cost;
  if (!in.puni.empty()) {
    m.coverage_int = coverage(in.pint.size(), in.puni.size());
    m.coverage_uni = 1.0;
    for (std::size_t k : in.any_ks) m.coverage_any[k] = any_k_coverage(in.any, k, in.puni);
  }
  auto ranked = impact_ranking(in.imp);
  bool any_count = std::any_of(ranked.begin(), ranked.end(), [](const ImpactEntry& e) { return e.count > 0; });
  if (any_count) m.record_coverage = record_coverage_curve(ranked);
  if (!in.pall.empty()) m.miset_coverage = miset_coverage_curve(ranked, in.pall);
  return m;
}

nlohmann::json to_json(const MetricReport& m) {
  auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
  auto any = nlohmann::json::object();
  for (const auto& [k, v] : m.coverage_any) any[std::to_string(k)] = v;
  return nlohmann::json{{"coverage", {{"int", opt(m.coverage_int)}, {"uni", opt(m.coverage_uni)}, {"any", any}}},
                        {"recordCoverage", m.record_coverage},
                        {"misetCoverage", m.miset_coverage},
                        {"sizes", {{"all", m.pall_size}, {"uni", m.puni_size}, {"int", m.pint_size}}},
                        {"cost", to_json(m.cost)}};
}

}  // namespace prober::harness
