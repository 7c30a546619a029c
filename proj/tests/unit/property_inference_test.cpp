// Copyright 2026 The Prober Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "prober/harness/instance_matrix.hpp"
#include "prober/property_inference.hpp"
#include "test_support.hpp"

namespace prober {
namespace {

using testing::rec;

RecordSet docs(std::size_t n) {
  std::vector<Record> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(rec("d" + std::to_string(i), "k=v" + std::to_string(i % 4) + ";n=" + std::to_string(i) + "|k=w;n=x" +
                                                  std::to_string(i)));
  }
  return RecordSet(std::move(out));
}

InferenceResult infer(const OperatorHandle& op, const RecordSet& pool, std::size_t trials = 32,
                      std::uint64_t seed = 1) {
  ExecutionBudget budget;
  ExecutionCache cache;
  OperatorProbe probe(op, budget, &cache);
  return infer_properties(probe, pool, trials, seed);
}

TEST(Inference, IdentityIsOneToOne) {
  auto res = infer(testing::identity_op(), docs(12));
  EXPECT_EQ(res.properties.shape, Shape::kOneToOne);
  EXPECT_EQ(res.properties.shape_evidence, EvidenceSource::kSampled);
  EXPECT_EQ(res.properties.evidence_trials, 32u);
  EXPECT_TRUE(res.properties.licenses_direct_scan());
  EXPECT_EQ(res.properties.monotone, MonotoneVerdict::kSampledConsistent);
}

TEST(Inference, SplitterIsOneToMany) {
  auto res = infer(harness::make_synthetic_operator("sg", "splitter"), docs(12));
  EXPECT_EQ(res.properties.shape, Shape::kOneToMany);
  EXPECT_GE(res.report.max_singleton_outputs, 2u);
}

TEST(Inference, ThresholdIsArbitraryButMonotone) {
  auto res = infer(testing::threshold_op(2), testing::named({"a", "b", "c", "d", "e", "f"}));
  EXPECT_EQ(res.properties.shape, Shape::kArbitrary);
  EXPECT_EQ(res.report.monotonicity.verdict, Verdict::kConsistent);
  EXPECT_EQ(res.report.additivity.verdict, Verdict::kViolated);
  ASSERT_TRUE(res.report.additivity.counterexample.has_value());
  ExecutionBudget budget;
  auto op = testing::threshold_op(2);
  OperatorProbe probe(op, budget);
  EXPECT_TRUE(replay(probe, *res.report.additivity.counterexample));
}

TEST(Inference, TopOneViolatesMonotonicity) {
  auto op = harness::make_synthetic_operator("top", "top1_by_score");
  std::vector<Record> recs;
  for (int i = 0; i < 10; ++i) recs.push_back(rec("r" + std::to_string(i), std::string(1 + i % 5, 'a' + i)));
  RecordSet pool(std::move(recs));
  auto res = infer(op, pool);
  EXPECT_EQ(res.properties.monotone, MonotoneVerdict::kViolated);
  ASSERT_TRUE(res.report.monotonicity.counterexample.has_value());
  const auto& cx = *res.report.monotonicity.counterexample;
  EXPECT_TRUE(cx.smaller.is_subset_of(cx.larger));
  ExecutionBudget budget;
  OperatorProbe probe(op, budget);
  EXPECT_TRUE(replay(probe, cx));
}

TEST(Inference, ZeroTrials) {
  auto res = infer(testing::identity_op(), docs(4), 0);
  EXPECT_EQ(res.report.monotonicity.trials, 0u);
  EXPECT_EQ(res.report.monotonicity.verdict, Verdict::kConsistent);
  EXPECT_EQ(res.properties.shape, Shape::kArbitrary);
}

TEST(Additivity, DedupWithDuplicatesViolated) {
  auto op = harness::make_synthetic_operator("dd", "dedup", {{"key", "k"}, {"min_support", 2}});
  std::vector<Record> recs;
  for (int i = 0; i < 8; ++i) recs.push_back(rec("r" + std::to_string(i), "k=" + std::string(1, 'a' + i % 2)));
  RecordSet pool(std::move(recs));
  ExecutionBudget budget;
  OperatorProbe probe(op, budget);
  auto rep = check_additivity(probe, pool, 32, 1);
  EXPECT_EQ(rep.verdict, Verdict::kViolated);
}

TEST(Additivity, ThresholdViolated) {
  ExecutionBudget budget;
  auto op = testing::threshold_op(2);
  OperatorProbe probe(op, budget);
  EXPECT_EQ(check_additivity(probe, testing::named({"a", "b", "c", "d"}), 32, 1).verdict, Verdict::kViolated);
}

TEST(Inference, SameSeedSameReport) {
  auto pool = testing::named({"a", "b", "c", "d", "e", "f", "g"});
  auto a = infer(testing::threshold_op(3), pool, 32, 9);
  auto b = infer(testing::threshold_op(3), pool, 32, 9);
  EXPECT_EQ(to_json(a.report), to_json(b.report));
  EXPECT_EQ(to_json(a.properties), to_json(b.properties));
}

TEST(Inference, BudgetExhaustionIsReported) {
  ExecutionBudget budget(3);
  auto op = testing::identity_op();
  OperatorProbe probe(op, budget);
  auto res = infer_properties(probe, docs(10), 32, 1);
  EXPECT_TRUE(res.report.budget_exhausted);
}

TEST(PropertyClassJson, RoundTrip) {
  PropertyClass p;
  p.shape = Shape::kManyToOne;
  p.shape_evidence = EvidenceSource::kSampled;
  p.evidence_trials = 32;
  p.heuristic = true;
  p.unique_miset_outputs = {"abc"};
  EXPECT_EQ(to_json(property_class_from_json(to_json(p))), to_json(p));
}

// Inferred shapes never claim more than the true shape on matrix operators.
TEST(Inference, NeverNarrowerThanTruthProperty) {
  for (const auto& inst : harness::builtin_instance_matrix()) {
    if (inst.op().arity() != 1) continue;
    auto res = infer(inst.op(), inst.input);
    Shape truth = inst.true_shape();
    Shape got = res.properties.shape;
    if (got == Shape::kOneToOne || got == Shape::kOneToMany) {
      EXPECT_TRUE(truth == Shape::kOneToOne || truth == Shape::kOneToMany ||
                  res.properties.evidence_trials >= kMinSampledTrials)
          << inst.name;
    }
    EXPECT_NE(res.properties.monotone, MonotoneVerdict::kViolated) << inst.name;
  }
}

}  // namespace
}  // namespace prober
