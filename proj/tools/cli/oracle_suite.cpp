// Copyright 2026 The Prober Authors
// SPDX-License-Identifier: Apache-2.0

#include "cli/oracle_suite.hpp"

#include "prober/error.hpp"
#include "prober/harness/oracle.hpp"
#include "prober/miset.hpp"

namespace prober::cli {
namespace {

std::vector<RecordSet> members(const std::vector<MISet>& ms) {
  std::vector<RecordSet> out;
  for (const auto& m : ms) out.push_back(m.members);
  return out;
}

void check_instance(const harness::Instance& inst, std::vector<std::string>& bad) {
  auto op = inst.op();
  auto truth = harness::brute_force_pall(op, inst.input, inst.target);
  auto note = [&](const std::string& what) { bad.push_back(inst.name + ": " + what); };

  ExecutionBudget budget;
  OperatorProbe probe(op, budget);
  auto all = enumerate_misets(probe, inst.input, inst.target);
  if (all.end != EnumerationEnd::kExhausted) note("enumeration ended " + std::string(to_string(all.end)));
  if (harness::canonical_sets(members(all.misets)) != harness::canonical_sets(truth)) note("P_all differs");

  ExecutionBudget b2;
  OperatorProbe p2(op, b2);
  auto inter = compute_p_int(p2, inst.input, inst.target);
  if (std::get<IntersectionProvenance>(inter.payload).records != harness::oracle_intersection(truth)) {
    note("P_int differs");
  }
  auto uni = compute_p_uni(p2, inst.input, inst.target);
  if (std::get<UnionProvenance>(uni.payload).records != harness::oracle_union(truth)) note("P_uni differs");
  auto imp = compute_p_imp(p2, inst.input, inst.target);
  const auto& got = std::get<ImpactProvenance>(imp.payload).entries;
  auto want = harness::oracle_impact(truth);
  bool same = got.size() == want.size();
  for (std::size_t i = 0; same && i < got.size(); ++i) {
    same = got[i].record.id == want[i].first && got[i].count == want[i].second;
  }
  if (!same) note("P_imp differs");
}

}  // namespace

OracleOutcome run_oracle_suite(const std::vector<harness::Instance>& instances) {
  OracleOutcome out;
  for (const auto& inst : instances) {
    ++out.instances;
    try {
      check_instance(inst, out.disagreements);
    } catch (const Error& e) {
      out.disagreements.push_back(inst.name + ": " + e.what());
    }
  }
  return out;
}

}  // namespace prober::cli
