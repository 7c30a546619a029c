// Copyright 2026 The Prober Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <random>

#include "prober/error.hpp"
#include "prober/harness/instance_matrix.hpp"
#include "prober/harness/oracle.hpp"
#include "prober/miset.hpp"
#include "test_support.hpp"

namespace prober {
namespace {

using testing::named;
using testing::sorted_id_sets;

using Sets = std::vector<std::vector<std::string>>;

Record only_output(const OperatorHandle& op, const RecordSet& in) {
  RecordSet out = op.invoke(std::span<const RecordSet>(&in, 1));
  EXPECT_EQ(out.size(), 1u);
  return out[0];
}

struct Fixture {
  OperatorHandle op;
  RecordSet input;
  Record target;
  ExecutionBudget budget;
  ExecutionCache cache;
  OperatorProbe probe;

  Fixture(OperatorHandle o, RecordSet in, std::optional<std::uint64_t> limit = std::nullopt)
      : op(std::move(o)), input(std::move(in)), target(only_output(op, input)), budget(limit),
        probe(op, budget, &cache) {}
};

Fixture threshold2_abc() { return Fixture(testing::threshold_op(2), named({"a", "b", "c"})); }

TEST(FindAny, ThresholdTwoOfThree) {
  auto f = threshold2_abc();
  MISet m = find_any_miset(f.probe, f.input, f.target);
  EXPECT_EQ(testing::ids_of(m.members), (std::vector<std::string>{"b", "c"}));
  EXPECT_LE(f.budget.executions(), f.input.size() + 1);
}

TEST(FindAny, TargetNotProduced) {
  auto f = threshold2_abc();
  RecordSet small = named({"a"});
  try {
    find_any_miset(f.probe, small, f.target);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotProduced);
  }
}

TEST(FindNext, SecondAndNone) {
  auto f = threshold2_abc();
  std::vector<MISet> found{MISet{RecordSet({testing::rec("b", "b"), testing::rec("c", "c")})}};
  auto next = find_next_miset(f.probe, f.input, f.target, found);
  ASSERT_EQ(next.status, NextStatus::kFound);
  EXPECT_EQ(testing::ids_of(next.miset->members), (std::vector<std::string>{"a", "c"}));

  std::vector<MISet> all{MISet{named({"a", "b"})}, MISet{named({"a", "c"})}, MISet{named({"b", "c"})}};
  auto none = find_next_miset(f.probe, f.input, f.target, all);
  EXPECT_EQ(none.status, NextStatus::kNoneLeft);
  EXPECT_FALSE(none.miset.has_value());
}

TEST(Enumerate, ThreeThenExhausted) {
  auto f = threshold2_abc();
  std::vector<std::string> seen;
  auto out = enumerate_misets(f.probe, f.input, f.target, std::nullopt, [&](const MISet& m) {
    seen.push_back(testing::ids_of(m.members)[0]);
    return true;
  });
  EXPECT_EQ(out.misets.size(), 3u);
  EXPECT_EQ(seen.size(), 3u);
  EXPECT_EQ(out.end, EnumerationEnd::kExhausted);
  EXPECT_EQ(sorted_id_sets(out.misets), (Sets{{"a", "b"}, {"a", "c"}, {"b", "c"}}));
}

TEST(Enumerate, KOneStopsAtLimit) {
  auto f = threshold2_abc();
  auto out = enumerate_misets(f.probe, f.input, f.target, 1);
  EXPECT_EQ(out.misets.size(), 1u);
  EXPECT_EQ(out.end, EnumerationEnd::kLimitReached);
}

TEST(Enumerate, UniqueOutputWithLargeK) {
  Fixture f(testing::identity_op(), named({"a"}));
  auto res = compute_p_any(f.probe, f.input, f.target, 5);
  EXPECT_EQ(res.misets().size(), 1u);
  EXPECT_TRUE(res.exhausted);
  EXPECT_TRUE(res.exact);
}

TEST(Enumerate, CallbackCancels) {
  auto f = threshold2_abc();
  auto out = enumerate_misets(f.probe, f.input, f.target, std::nullopt, [](const MISet&) { return false; });
  EXPECT_EQ(out.misets.size(), 1u);
  EXPECT_EQ(out.end, EnumerationEnd::kCancelled);
}

TEST(PInt, AllThreeOfThreeSupporters) {
  Fixture f(testing::threshold_op(3), named({"a", "b", "c"}));
  auto res = compute_p_int(f.probe, f.input, f.target);
  EXPECT_EQ(testing::ids_of(std::get<IntersectionProvenance>(res.payload).records),
            (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_LE(f.budget.executions(), 4u);
}

TEST(PInt, EmptyForFourSupporters) {
  Fixture f(testing::threshold_op(3), named({"a", "b", "c", "d"}));
  auto res = compute_p_int(f.probe, f.input, f.target);
  EXPECT_TRUE(std::get<IntersectionProvenance>(res.payload).records.empty());
}

TEST(PInt, EmptyForHundredSupporters) {
  Fixture f(testing::threshold_op(50), RecordSet(testing::same_text("s", "x", 100)));
  auto res = compute_p_int(f.probe, f.input, f.target);
  EXPECT_TRUE(std::get<IntersectionProvenance>(res.payload).records.empty());
  EXPECT_LE(f.budget.executions(), 101u);
}

TEST(PUni, ThresholdTwoOfThree) {
  auto f = threshold2_abc();
  auto res = compute_p_uni(f.probe, f.input, f.target);
  EXPECT_EQ(testing::ids_of(std::get<UnionProvenance>(res.payload).records),
            (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_TRUE(res.exact);
}

TEST(PUni, BudgetTwoTruncates) {
  Fixture f(testing::threshold_op(2), named({"a", "b", "c"}), 2);
  auto res = compute_p_uni(f.probe, f.input, f.target);
  EXPECT_FALSE(res.exact);
  EXPECT_TRUE(res.truncated);
  EXPECT_EQ(res.relation, Relation::kSubsetOfTruth);
  EXPECT_LE(f.budget.executions(), 2u);
}

TEST(PImp, ThresholdTwoOfThree) {
  auto f = threshold2_abc();
  auto res = compute_p_imp(f.probe, f.input, f.target);
  const auto& e = std::get<ImpactProvenance>(res.payload).entries;
  ASSERT_EQ(e.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(e[i].record.id.local, std::string(1, static_cast<char>('a' + i)));
    EXPECT_EQ(e[i].count, 2u);
  }
}

TEST(PImp, OneToOneTwoContributors) {
  auto op = testing::identity_op();
  RecordSet in({testing::rec("i1", "x"), testing::rec("i2", "x")});
  Record target = testing::rec("out", "x");
  ExecutionBudget budget;
  OperatorProbe probe(op, budget);
  auto res = compute_p_imp(probe, in, target);
  const auto& e = std::get<ImpactProvenance>(res.payload).entries;
  ASSERT_EQ(e.size(), 2u);
  EXPECT_EQ(e[0].record.id.local, "i1");
  EXPECT_EQ(e[0].count, 1u);
  EXPECT_EQ(e[1].record.id.local, "i2");
  EXPECT_EQ(e[1].count, 1u);
}

TEST(Bounded, BoundTwoFindsAllThree) {
  auto f = threshold2_abc();
  auto res = enumerate_bounded(f.probe, f.input, f.target, 2);
  EXPECT_EQ(sorted_id_sets(res.misets()), (Sets{{"a", "b"}, {"a", "c"}, {"b", "c"}}));
  EXPECT_TRUE(res.exhausted);
}

TEST(Bounded, BoundOneViolated) {
  auto f = threshold2_abc();
  try {
    enumerate_bounded(f.probe, f.input, f.target, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBoundViolated);
  }
}

TEST(Bounded, SplitterSingleton) {
  auto op = harness::make_synthetic_operator("sg", "splitter");
  RecordSet in({testing::rec("d1", "x|y"), testing::rec("d2", "z")});
  Record target = testing::rec("d1#1", "y");
  ExecutionBudget budget;
  OperatorProbe probe(op, budget);
  auto res = enumerate_bounded(probe, in, target, 1);
  EXPECT_EQ(sorted_id_sets(res.misets()), (Sets{{"d1"}}));
}

TEST(IsMiset, Examples) {
  auto f = threshold2_abc();
  EXPECT_TRUE(is_miset(f.probe, f.input, named({"b", "c"}), f.target));
  EXPECT_FALSE(is_miset(f.probe, f.input, named({"a", "b", "c"}), f.target));
  EXPECT_FALSE(is_miset(f.probe, f.input, RecordSet{}, f.target));
}

TEST(IsUnique, IdentityAndThreshold) {
  auto op = testing::identity_op();
  RecordSet in = named({"a", "b"});
  ExecutionBudget budget;
  OperatorProbe probe(op, budget);
  auto u = is_unique_miset(probe, in, testing::rec("a", "a"));
  EXPECT_TRUE(u.unique);
  EXPECT_LE(budget.executions(), 2 * in.size() + 1);

  auto t = threshold2_abc();
  EXPECT_FALSE(is_unique_miset(t.probe, t.input, t.target).unique);
}

TEST(ResultFromMisets, EmptyListGivesEmptyIntersection) {
  EXPECT_TRUE(intersection_of({}).empty());
  auto res = result_from_misets({}, ProvenanceKind::kInt, 1, true, false);
  EXPECT_TRUE(std::get<IntersectionProvenance>(res.payload).records.empty());
}

TEST(ResultFromMisets, PartialIntIsSuperset) {
  auto res = result_from_misets({MISet{named({"a"})}}, ProvenanceKind::kInt, 1, false, true);
  EXPECT_EQ(res.relation, Relation::kSupersetOfTruth);
  EXPECT_FALSE(res.exact);
}

// Properties checked against the brute-force oracle on every matrix instance.
class MatrixProperty : public ::testing::TestWithParam<harness::Instance> {};

TEST_P(MatrixProperty, EnumerationMatchesOracle) {
  const auto& inst = GetParam();
  auto op = inst.op();
  auto oracle = harness::brute_force_pall(op, inst.input, inst.target);
  ExecutionBudget budget;
  ExecutionCache cache;
  OperatorProbe probe(op, budget, &cache);
  auto out = enumerate_misets(probe, inst.input, inst.target);
  EXPECT_EQ(out.end, EnumerationEnd::kExhausted);
  std::vector<RecordSet> got;
  for (const auto& m : out.misets) got.push_back(m.members);
  EXPECT_EQ(harness::canonical_sets(got), harness::canonical_sets(oracle));
}

TEST_P(MatrixProperty, AntichainAndMinimality) {
  const auto& inst = GetParam();
  auto op = inst.op();
  ExecutionBudget budget;
  ExecutionCache cache;
  OperatorProbe probe(op, budget, &cache);
  auto out = enumerate_misets(probe, inst.input, inst.target);
  for (std::size_t i = 0; i < out.misets.size(); ++i) {
    EXPECT_TRUE(is_miset(probe, inst.input, out.misets[i].members, inst.target));
    for (std::size_t j = 0; j < out.misets.size(); ++j) {
      if (i != j) EXPECT_FALSE(out.misets[i].members.is_subset_of(out.misets[j].members));
    }
  }
}

TEST_P(MatrixProperty, IntWithinEveryMisetWithinUni) {
  const auto& inst = GetParam();
  auto op = inst.op();
  ExecutionBudget budget;
  ExecutionCache cache;
  OperatorProbe probe(op, budget, &cache);
  auto pall = compute_p_all(probe, inst.input, inst.target);
  auto pint = std::get<IntersectionProvenance>(compute_p_int(probe, inst.input, inst.target).payload).records;
  auto puni = std::get<UnionProvenance>(compute_p_uni(probe, inst.input, inst.target).payload).records;
  auto oracle = harness::brute_force_pall(op, inst.input, inst.target);
  EXPECT_EQ(pint, harness::oracle_intersection(oracle));
  EXPECT_EQ(puni, harness::oracle_union(oracle));
  for (const auto& m : pall.misets()) {
    EXPECT_TRUE(pint.is_subset_of(m.members));
    EXPECT_TRUE(m.members.is_subset_of(puni));
  }
  auto imp = std::get<ImpactProvenance>(compute_p_imp(probe, inst.input, inst.target).payload).entries;
  auto oimp = harness::oracle_impact(oracle);
  ASSERT_EQ(imp.size(), oimp.size());
  for (std::size_t i = 0; i < imp.size(); ++i) {
    EXPECT_EQ(imp[i].record.id, oimp[i].first);
    EXPECT_EQ(imp[i].count, oimp[i].second);
  }
}

TEST_P(MatrixProperty, AnyKIsPrefixOfAll) {
  const auto& inst = GetParam();
  auto op = inst.op();
  ExecutionBudget budget;
  OperatorProbe probe(op, budget);
  auto all = enumerate_misets(probe, inst.input, inst.target).misets;
  for (std::size_t k = 1; k <= 3; ++k) {
    ExecutionBudget b2;
    OperatorProbe p2(op, b2);
    auto res = compute_p_any(p2, inst.input, inst.target, k);
    ASSERT_EQ(res.misets().size(), std::min(k, all.size()));
    for (std::size_t i = 0; i < res.misets().size(); ++i) EXPECT_EQ(res.misets()[i], all[i]);
  }
}

TEST_P(MatrixProperty, UniqueCollapsesEveryKind) {
  const auto& inst = GetParam();
  auto op = inst.op();
  ExecutionBudget budget;
  OperatorProbe probe(op, budget);
  auto u = is_unique_miset(probe, inst.input, inst.target);
  auto oracle = harness::brute_force_pall(op, inst.input, inst.target);
  EXPECT_EQ(u.unique, oracle.size() == 1);
  if (u.unique) {
    EXPECT_EQ(u.miset.members, oracle[0]);
    EXPECT_EQ(harness::oracle_union(oracle), harness::oracle_intersection(oracle));
  }
}

TEST_P(MatrixProperty, CallBudgets) {
  const auto& inst = GetParam();
  auto op = inst.op();
  const std::size_t n = inst.input.size();
  {
    ExecutionBudget b;
    ExecutionCache c;
    OperatorProbe p(op, b, &c);
    find_any_miset(p, inst.input, inst.target);
    EXPECT_LE(b.executions(), n + 1);
  }
  {
    ExecutionBudget b;
    ExecutionCache c;
    OperatorProbe p(op, b, &c);
    is_unique_miset(p, inst.input, inst.target);
    EXPECT_LE(b.executions(), 2 * n + 1);
  }
  {
    ExecutionBudget b;
    ExecutionCache c;
    OperatorProbe p(op, b, &c);
    compute_p_int(p, inst.input, inst.target);
    EXPECT_LE(b.executions(), n + 1);
  }
}

std::string instance_name(const ::testing::TestParamInfo<harness::Instance>& info) {
  std::string out;
  for (char c : info.param.name) out += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
  return out;
}

INSTANTIATE_TEST_SUITE_P(Builtin, MatrixProperty, ::testing::ValuesIn(harness::builtin_instance_matrix()),
                         instance_name);

// Random threshold instances: enumeration agrees with the oracle on arbitrary
// supporter mixes.
TEST(RandomThreshold, AgreesWithOracle) {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 40; ++trial) {
    std::size_t n = 1 + rng() % 8;
    std::vector<Record> recs;
    std::size_t yes = 0;
    for (std::size_t i = 0; i < n; ++i) {
      bool y = rng() % 3 != 0;
      yes += y;
      recs.push_back(testing::rec("r" + std::to_string(i), y ? "yes" : "no"));
    }
    if (yes == 0) continue;
    std::size_t t = 1 + rng() % yes;
    auto op = testing::threshold_op(t, "yes");
    RecordSet in(std::move(recs));
    Record target = testing::rec("claim:yes", "yes");
    ExecutionBudget b;
    OperatorProbe p(op, b);
    auto got = enumerate_misets(p, in, target).misets;
    std::vector<RecordSet> sets;
    for (const auto& m : got) sets.push_back(m.members);
    EXPECT_EQ(harness::canonical_sets(sets), harness::canonical_sets(harness::brute_force_pall(op, in, target)));
  }
}

}  // namespace
}  // namespace prober
