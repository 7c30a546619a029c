// Copyright 2026 The Prober Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "prober/budget.hpp"
#include "prober/digest.hpp"
#include "prober/error.hpp"
#include "prober/harness/instance_matrix.hpp"
#include "prober/harness/synthetic_ops.hpp"
#include "prober/pipeline.hpp"
#include "test_support.hpp"

namespace prober {
namespace {

using testing::named;
using testing::rec;

TEST(Digest, KnownVector) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  Sha256 h;
  h.update("a").update("bc");
  EXPECT_EQ(h.hex_digest(), sha256_hex("abc"));
}

TEST(Value, CanonicalFormSortsKeysAndKeepsCase) {
  Value a = Value::object({{"b", 1}, {"a", "x"}});
  Value b = Value::object({{"a", "x"}, {"b", 1}});
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.digest(), b.digest());
  EXPECT_FALSE(Value::text("A") == Value::text("a"));
  EXPECT_FALSE(Value::text("1") == Value::object({{"v", 1}}));
  EXPECT_THROW(Value::object({{"nested", {{"x", 1}}}}), Error);
}

TEST(ApplyCounted, IdentityCountsOneExecution) {
  auto op = testing::identity_op();
  ExecutionBudget budget;
  ExecutionCache cache;
  RecordSet in = named({"a"});
  RecordSet out = apply_counted(op, std::span<const RecordSet>(&in, 1), budget, &cache);
  EXPECT_EQ(out, in);
  EXPECT_EQ(budget.executions(), 1u);
  EXPECT_EQ(budget.records_fetched(), 1u);
}

TEST(ApplyCounted, RepeatedCallHitsCache) {
  auto op = testing::identity_op();
  ExecutionBudget budget;
  ExecutionCache cache;
  RecordSet in = named({"a"});
  apply_counted(op, std::span<const RecordSet>(&in, 1), budget, &cache);
  RecordSet out = apply_counted(op, std::span<const RecordSet>(&in, 1), budget, &cache);
  EXPECT_EQ(out, in);
  EXPECT_EQ(budget.executions(), 1u);
  EXPECT_EQ(budget.cached_hits(), 1u);
}

TEST(ApplyCounted, ThresholdFiftyOfHundredProducesClaim) {
  auto op = testing::threshold_op(50, "yes");
  RecordSet in(testing::same_text("s", "yes", 100));
  ExecutionBudget budget;
  RecordSet out = apply_counted(op, std::span<const RecordSet>(&in, 1), budget);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].value, Value::text("yes"));
}

TEST(ApplyCounted, ArityMismatchIsRejected) {
  auto join = harness::make_synthetic_operator("j", "tagged_join");
  RecordSet in = named({"a"});
  ExecutionBudget budget;
  EXPECT_THROW(apply_counted(join, std::span<const RecordSet>(&in, 1), budget), Error);
}

TEST(Budget, ExhaustionRaisedBeforeLimitPlusOne) {
  auto op = testing::identity_op();
  ExecutionBudget budget(3);
  for (int i = 0; i < 3; ++i) {
    RecordSet in = named({"r" + std::to_string(i)});
    apply_counted(op, std::span<const RecordSet>(&in, 1), budget);
  }
  RecordSet in = named({"extra"});
  try {
    apply_counted(op, std::span<const RecordSet>(&in, 1), budget);
    FAIL() << "expected BudgetExhausted";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBudgetExhausted);
  }
  EXPECT_EQ(budget.executions(), 3u);
}

TEST(Budget, CacheHitsStillServedWhenExhausted) {
  auto op = testing::identity_op();
  ExecutionBudget budget(1);
  ExecutionCache cache;
  RecordSet in = named({"a"});
  apply_counted(op, std::span<const RecordSet>(&in, 1), budget, &cache);
  EXPECT_NO_THROW(apply_counted(op, std::span<const RecordSet>(&in, 1), budget, &cache));
}

TEST(Budget, CancelStopsExecution) {
  auto token = make_cancel_token();
  ExecutionBudget budget(std::nullopt, token);
  token->store(true);
  RecordSet in = named({"a"});
  try {
    apply_counted(testing::identity_op(), std::span<const RecordSet>(&in, 1), budget);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kCancelled);
  }
}

TEST(Budget, RequestsEqualExecutionsPlusHitsProperty) {
  std::mt19937_64 rng(7);
  auto op = testing::identity_op();
  RecordSet pool = named({"a", "b", "c", "d"});
  for (int round = 0; round < 20; ++round) {
    ExecutionBudget budget;
    ExecutionCache cache;
    std::size_t requests = 0;
    for (int i = 0; i < 30; ++i) {
      RecordSet in = testing::random_subset(rng, pool);
      apply_counted(op, std::span<const RecordSet>(&in, 1), budget, &cache);
      ++requests;
    }
    EXPECT_EQ(budget.executions() + budget.cached_hits(), requests);
  }
}

TEST(Budget, SnapshotJsonRoundTrip) {
  BudgetSnapshot s{4, 2, 9, 1};
  EXPECT_EQ(budget_from_json(to_json(s)), s);
  EXPECT_EQ(to_json(s).at("cachedHits"), 2);
}

TEST(Watchdog, FlagsNondeterministicOperator) {
  auto counter = std::make_shared<int>(0);
  auto op = make_function_operator("flaky", 1, [counter](std::span<const RecordSet>) {
    return RecordSet({make_text_record("o", std::to_string((*counter)++))});
  });
  ExecutionCache cache;
  cache.set_watchdog(true);
  ExecutionBudget budget;
  RecordSet in = named({"a"});
  try {
    apply_counted(op, std::span<const RecordSet>(&in, 1), budget, &cache);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNondeterministic);
  }
}

TEST(ContainsByValue, IgnoresIds) {
  RecordSet s({rec("x1", "A")});
  EXPECT_TRUE(contains_by_value(s, rec("y9", "A")));
}

TEST(ContainsByValue, EmptySet) { EXPECT_FALSE(contains_by_value(RecordSet{}, rec("z", "anything"))); }

TEST(ContainsByValue, CasePreserving) {
  RecordSet s({rec("x1", "A")});
  EXPECT_FALSE(contains_by_value(s, rec("x1", "a")));
  EXPECT_NE(Value::text("A").digest(), Value::text("a").digest());
}

TEST(RecordSet, OrderedByPortThenLocalAndRejectsDuplicateIds) {
  RecordSet s({rec("b", "1", 1), rec("z", "2"), rec("a", "3", 1)});
  EXPECT_EQ(testing::ids_of(s), (std::vector<std::string>{"z", "1:a", "1:b"}));
  EXPECT_THROW(RecordSet({rec("a", "1"), rec("a", "2")}), Error);
}

TEST(FlattenPorts, TagsPorts) {
  std::vector<RecordSet> in{named({"a"}), named({"b"})};
  RecordSet flat = flatten_ports(in);
  ASSERT_EQ(flat.size(), 2u);
  EXPECT_EQ(flat[0].id, (RecordId{0, "a"}));
  EXPECT_EQ(flat[1].id, (RecordId{1, "b"}));
}

TEST(FlattenPorts, EmptyFirstPort) {
  std::vector<RecordSet> in{RecordSet{}, named({"b"})};
  RecordSet flat = flatten_ports(in);
  ASSERT_EQ(flat.size(), 1u);
  EXPECT_EQ(flat[0].id, (RecordId{1, "b"}));
}

TEST(FlattenPorts, RoundTripProperty) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t arity = 1 + rng() % 4;
    std::vector<RecordSet> tuple;
    for (std::size_t p = 0; p < arity; ++p) {
      std::vector<Record> recs;
      std::size_t n = rng() % 5;
      for (std::size_t i = 0; i < n; ++i) recs.push_back(rec("r" + std::to_string(i), std::to_string(rng() % 3)));
      tuple.emplace_back(std::move(recs));
    }
    EXPECT_EQ(unflatten_ports(flatten_ports(tuple), arity), tuple);
  }
}

TEST(Jsonl, RoundTrip) {
  RecordSet s({rec("a", "x"), make_record("b", Value::object({{"k", 1}, {"t", "v"}})), rec("c", "y", 2)});
  std::stringstream ss;
  write_jsonl_records(ss, s);
  EXPECT_EQ(RecordSet(read_jsonl_records(ss)), s);
}

TEST(Jsonl, MalformedLineNamesLine) {
  std::stringstream ss("{\"id\":\"a\",\"value\":\"x\"}\nnot json\n");
  try {
    read_jsonl_records(ss);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
}

PipelineGraph fig1() {
  PipelineGraph g;
  for (const char* id : {"wb", "sg", "ad", "pn", "nm", "jn", "dp", "sc"}) g.nodes.push_back(NodeConfig{id, "identity"});
  g.edges = {{"wb", "sg", 0}, {"sg", "ad", 0}, {"sg", "pn", 0}, {"sg", "nm", 0}, {"ad", "jn", 0},
             {"pn", "jn", 1}, {"nm", "jn", 2}, {"jn", "dp", 0}, {"dp", "sc", 0}};
  return g;
}

TEST(ValidatePipeline, Figure1TopologyIsValid) {
  auto g = fig1();
  EXPECT_TRUE(validate_pipeline(g).empty());
  EXPECT_EQ(g.source(), "wb");
  EXPECT_EQ(g.sink(), "sc");
  EXPECT_EQ(g.arity("jn"), 3u);
  EXPECT_EQ(g.topological_order().front(), "wb");
  EXPECT_TRUE(g.chain_to("sg").has_value());
  EXPECT_FALSE(g.chain_to("sc").has_value());
}

TEST(ValidatePipeline, TwoSinks) {
  PipelineGraph g;
  g.nodes = {NodeConfig{"a", "identity"}, NodeConfig{"b", "identity"}, NodeConfig{"c", "identity"}};
  g.edges = {{"a", "b", 0}, {"a", "c", 0}};
  auto v = validate_pipeline(g);
  EXPECT_NE(std::find(v.begin(), v.end(), "multiple sinks"), v.end());
}

TEST(ValidatePipeline, SelfLoop) {
  PipelineGraph g;
  g.nodes = {NodeConfig{"a", "identity"}, NodeConfig{"b", "identity"}};
  g.edges = {{"a", "b", 0}, {"b", "b", 1}};
  auto v = validate_pipeline(g);
  EXPECT_NE(std::find(v.begin(), v.end(), "cycle"), v.end());
  EXPECT_THROW(g.topological_order(), Error);
}

TEST(ValidatePipeline, PortGap) {
  PipelineGraph g;
  g.nodes = {NodeConfig{"a", "identity"}, NodeConfig{"b", "tagged_join"}};
  g.edges = {{"a", "b", 1}};
  EXPECT_FALSE(validate_pipeline(g).empty());
}

TEST(PipelineJson, RoundTrip) {
  auto g = fig1();
  g.nodes[1].declared_shape = Shape::kOneToMany;
  g.nodes[2].params = {{"field", "addr"}};
  g.nodes[2].spec_level.kind = SpecKind::kIntegrityConstraint;
  g.nodes[2].spec_level.rules.push_back(FieldMappingRule{"src_id", "id", std::nullopt});
  auto j = pipeline_to_json(g);
  EXPECT_EQ(pipeline_to_json(pipeline_from_json(j)), j);
}

TEST(PropertyClass, NarrowShapeNeedsEvidence) {
  PropertyClass p;
  p.shape = Shape::kOneToOne;
  EXPECT_THROW(p.validate(), Error);
  p.shape_evidence = EvidenceSource::kSampled;
  p.evidence_trials = 8;
  EXPECT_NO_THROW(p.validate());
  EXPECT_FALSE(p.licenses_direct_scan());
  p.evidence_trials = kMinSampledTrials;
  EXPECT_TRUE(p.licenses_direct_scan());
}

TEST(ComposeShapes, Table) {
  EXPECT_EQ(compose_shapes(Shape::kOneToOne, Shape::kOneToOne), Shape::kOneToOne);
  EXPECT_EQ(compose_shapes(Shape::kOneToMany, Shape::kOneToOne), Shape::kOneToMany);
  EXPECT_EQ(compose_shapes(Shape::kOneToOne, Shape::kManyToOne), Shape::kArbitrary);
}

// Every synthetic kind applied twice on equal input gives value-equal output.
TEST(SyntheticOps, DeterministicProperty) {
  for (const auto& inst : harness::builtin_instance_matrix()) {
    auto op = inst.op();
    auto parts = unflatten_ports(inst.input, op.arity());
    RecordSet a = op.invoke(parts);
    RecordSet b = op.invoke(parts);
    EXPECT_EQ(a, b) << inst.name;
  }
}

// Monotone kinds keep O(I1) within O(I2) for sampled I1 within I2.
TEST(SyntheticOps, MonotoneProperty) {
  std::mt19937_64 rng(3);
  for (const auto& inst : harness::builtin_instance_matrix()) {
    auto op = inst.op();
    for (int trial = 0; trial < 30; ++trial) {
      RecordSet big = testing::random_subset(rng, inst.input);
      RecordSet small = testing::random_subset(rng, big);
      RecordSet ob = op.invoke(unflatten_ports(big, op.arity()));
      RecordSet os = op.invoke(unflatten_ports(small, op.arity()));
      for (const auto& r : os) EXPECT_TRUE(ob.contains_value(r.value)) << inst.name;
    }
  }
}

TEST(SyntheticOps, TopOneIsNotMonotone) {
  auto op = harness::make_synthetic_operator("top", "top1_by_score");
  RecordSet small({rec("a", "a")});
  RecordSet big({rec("a", "a"), rec("b", "zzzzzz")});
  RecordSet os = op.invoke(std::span<const RecordSet>(&small, 1));
  RecordSet ob = op.invoke(std::span<const RecordSet>(&big, 1));
  ASSERT_EQ(os.size(), 1u);
  EXPECT_FALSE(ob.contains_value(os[0].value));
}

TEST(SyntheticOps, UnknownKindAndMissingParams) {
  EXPECT_THROW(harness::make_synthetic_operator("x", "nope"), Error);
  EXPECT_THROW(harness::make_synthetic_operator("x", "keyed_extractor"), Error);
  EXPECT_THROW(harness::make_synthetic_operator("x", "support_threshold"), Error);
}

}  // namespace
}  // namespace prober
