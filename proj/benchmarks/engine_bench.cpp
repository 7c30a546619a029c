// Copyright 2026 The Prober Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "prober/composition.hpp"
#include "prober/fast_paths.hpp"
#include "prober/harness/instance_matrix.hpp"
#include "prober/harness/oracle.hpp"
#include "prober/harness/synthetic_ops.hpp"
#include "prober/miset.hpp"

namespace prober {
namespace {

RecordSet supporters(std::size_t n) {
  std::vector<Record> recs;
  for (std::size_t i = 0; i < n; ++i) recs.push_back(make_text_record("s" + std::to_string(i), "yes"));
  return RecordSet(std::move(recs));
}

OperatorHandle threshold(std::size_t t) {
  return harness::make_synthetic_operator("th", "support_threshold", {{"threshold", t}, {"claim", "yes"}});
}

const Record kClaim = make_text_record("claim:yes", "yes");

// Counters report true executions per iteration next to wall time.
void report(benchmark::State& state, const ExecutionBudget& budget) {
  state.counters["executions"] = static_cast<double>(budget.executions());
}

void BM_FindAnyMiset(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  auto op = threshold(n / 2);
  RecordSet in = supporters(n);
  for (auto _ : state) {
    ExecutionBudget budget;
    benchmark::DoNotOptimize(find_any_miset(OperatorProbe(op, budget), in, kClaim));
    report(state, budget);
  }
}
BENCHMARK(BM_FindAnyMiset)->RangeMultiplier(4)->Range(4, 1024);

void BM_ComputePInt(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  auto op = threshold(n / 2);
  RecordSet in = supporters(n);
  for (auto _ : state) {
    ExecutionBudget budget;
    benchmark::DoNotOptimize(compute_p_int(OperatorProbe(op, budget), in, kClaim));
    report(state, budget);
  }
}
BENCHMARK(BM_ComputePInt)->RangeMultiplier(4)->Range(4, 1024);

// Full enumeration on T=2: N(N-1)/2 MISets.
void BM_EnumerateAll(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  auto op = threshold(2);
  RecordSet in = supporters(n);
  for (auto _ : state) {
    ExecutionBudget budget;
    ExecutionCache cache;
    auto out = enumerate_misets(OperatorProbe(op, budget, &cache), in, kClaim);
    benchmark::DoNotOptimize(out.misets.size());
    report(state, budget);
  }
}
BENCHMARK(BM_EnumerateAll)->DenseRange(4, 12, 4);

void BM_EnumerateBounded(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  auto op = threshold(3);
  RecordSet in = supporters(n);
  for (auto _ : state) {
    ExecutionBudget budget;
    benchmark::DoNotOptimize(enumerate_bounded(OperatorProbe(op, budget), in, kClaim, 3));
    report(state, budget);
  }
}
BENCHMARK(BM_EnumerateBounded)->DenseRange(5, 11, 3);

void BM_DirectScanSplitter(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  auto op = harness::make_synthetic_operator("sg", "splitter", {}, {}, harness::true_properties("splitter", {}));
  std::vector<Record> docs;
  for (std::size_t i = 0; i < n; ++i) docs.push_back(make_text_record("d" + std::to_string(i), "x|y" + std::to_string(i)));
  RecordSet in(std::move(docs));
  Record target = make_text_record("d0#0", "x");
  for (auto _ : state) {
    ExecutionBudget budget;
    benchmark::DoNotOptimize(provenance_direct_scan(OperatorProbe(op, budget), in, target, ProvenanceKind::kAll));
    report(state, budget);
  }
}
BENCHMARK(BM_DirectScanSplitter)->RangeMultiplier(4)->Range(4, 1024);

void BM_BruteForceOracle(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  auto op = threshold(n / 2);
  RecordSet in = supporters(n);
  for (auto _ : state) benchmark::DoNotOptimize(harness::brute_force_pall(op, in, kClaim));
}
BENCHMARK(BM_BruteForceOracle)->DenseRange(4, 12, 4);

// Membership via stored provenance, no operator calls.
void BM_SimulatedMember(benchmark::State& state) {
  const auto chains = harness::builtin_two_chains();
  const auto& chain = chains.at(static_cast<std::size_t>(state.range(0)) % chains.size());
  auto op1 = chain.first().with_properties(harness::true_properties(chain.kind1, chain.params1));
  auto op2 = chain.second().with_properties(harness::true_properties(chain.kind2, chain.params2));
  ExecutionBudget budget;
  RecordSet mid = op1.invoke(std::span<const RecordSet>(&chain.input, 1));
  RecordSet out = op2.invoke(std::span<const RecordSet>(&mid, 1));
  auto p1 = build_stored_provenance(OperatorProbe(op1, budget), chain.input, mid);
  auto p2 = build_stored_provenance(OperatorProbe(op2, budget), mid, out);
  if (out.empty()) {
    state.SkipWithError("chain has no output");
    return;
  }
  for (auto _ : state) benchmark::DoNotOptimize(simulated_member(p1, p2, chain.input, out[0]));
  state.SetLabel(chain.name);
}
BENCHMARK(BM_SimulatedMember)->DenseRange(0, 3);

}  // namespace
}  // namespace prober

BENCHMARK_MAIN();
