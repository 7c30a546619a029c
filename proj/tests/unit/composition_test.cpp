// Copyright 2026 The Prober Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <random>

#include "prober/composition.hpp"
#include "prober/error.hpp"
#include "prober/harness/instance_matrix.hpp"
#include "prober/harness/oracle.hpp"
#include "test_support.hpp"

namespace prober {
namespace {

using harness::TwoChain;

bool really_produces(const OperatorHandle& composite, const RecordSet& subset, const Record& r) {
  return composite.invoke(std::span<const RecordSet>(&subset, 1)).contains_value(r.value);
}

class ChainProperty : public ::testing::TestWithParam<TwoChain> {};

TEST_P(ChainProperty, SimulationAgreesWithExecution) {
  const auto& chain = GetParam();
  auto cp = testing::stored_for_chain(chain);
  auto composite = chain.composite();
  const std::size_t n = chain.input.size();
  std::vector<RecordSet> subsets;
  if (n <= 6) {
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) subsets.push_back(testing::mask_subset(chain.input, mask));
  } else {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 200; ++i) subsets.push_back(testing::random_subset(rng, chain.input));
  }
  for (const auto& r2 : cp.out) {
    for (const auto& s : subsets) {
      EXPECT_EQ(simulated_member(*cp.first, *cp.second, s, r2), really_produces(composite, s, r2))
          << chain.name << " " << to_string(r2.id);
    }
  }
}

TEST_P(ChainProperty, ChainCompositionMatchesOracle) {
  const auto& chain = GetParam();
  auto cp = testing::stored_for_chain(chain);
  auto composite = chain.composite();
  std::vector<ChainStage> path{{cp.first, chain.shape1()}, {cp.second, chain.shape2()}};
  for (const auto& r2 : cp.out) {
    auto oracle = harness::brute_force_pall(composite, chain.input, r2);
    for (ProvenanceKind kind : {ProvenanceKind::kAll, ProvenanceKind::kUni, ProvenanceKind::kInt, ProvenanceKind::kImp}) {
      ExecutionBudget budget;
      auto res = compose_chain(path, r2, kind, 1, budget);
      EXPECT_TRUE(res.exact) << chain.name;
      EXPECT_FALSE(res.unsound);
      EXPECT_EQ(budget.executions(), 0u);
      switch (kind) {
        case ProvenanceKind::kAll: {
          std::vector<RecordSet> got;
          for (const auto& m : res.misets()) got.push_back(m.members);
          EXPECT_EQ(harness::canonical_sets(got), harness::canonical_sets(oracle)) << chain.name;
          break;
        }
        case ProvenanceKind::kUni:
          EXPECT_EQ(std::get<UnionProvenance>(res.payload).records, harness::oracle_union(oracle)) << chain.name;
          break;
        case ProvenanceKind::kInt:
          EXPECT_EQ(std::get<IntersectionProvenance>(res.payload).records, harness::oracle_intersection(oracle))
              << chain.name;
          break;
        case ProvenanceKind::kImp: {
          auto got = std::get<ImpactProvenance>(res.payload).entries;
          auto want = harness::oracle_impact(oracle);
          ASSERT_EQ(got.size(), want.size()) << chain.name;
          for (std::size_t i = 0; i < got.size(); ++i) {
            EXPECT_EQ(got[i].record.id, want[i].first);
            EXPECT_EQ(got[i].count, want[i].second);
          }
          break;
        }
        default: break;
      }
    }
  }
}

// Shortcut bounds: Uni over-approximates and Int under-approximates; exact
// whenever a stage is one-to-one or one-to-many.
TEST_P(ChainProperty, SpecialCompositionBounds) {
  const auto& chain = GetParam();
  auto cp = testing::stored_for_chain(chain);
  auto composite = chain.composite();
  bool additive = [&] {
    for (Shape s : {chain.shape1(), chain.shape2()}) {
      if (s == Shape::kOneToOne || s == Shape::kOneToMany) return true;
    }
    return false;
  }();
  for (const auto& r2 : cp.out) {
    auto oracle = harness::brute_force_pall(composite, chain.input, r2);
    auto uni = compose_special(chain.shape1(), chain.shape2(), *cp.first, *cp.second, r2, ProvenanceKind::kUni);
    auto inter = compose_special(chain.shape1(), chain.shape2(), *cp.first, *cp.second, r2, ProvenanceKind::kInt);
    const auto& u = std::get<UnionProvenance>(uni.payload).records;
    const auto& i = std::get<IntersectionProvenance>(inter.payload).records;
    EXPECT_TRUE(harness::oracle_union(oracle).is_subset_of(u)) << chain.name;
    EXPECT_TRUE(i.is_subset_of(harness::oracle_intersection(oracle))) << chain.name;
    if (additive) {
      EXPECT_TRUE(uni.exact);
      EXPECT_EQ(u, harness::oracle_union(oracle)) << chain.name;
      EXPECT_EQ(i, harness::oracle_intersection(oracle)) << chain.name;
    } else {
      EXPECT_EQ(uni.relation == Relation::kExact, uni.exact);
    }
  }
}

TEST_P(ChainProperty, StoredProvenanceJsonRoundTrip) {
  const auto& chain = GetParam();
  auto cp = testing::stored_for_chain(chain);
  auto j = to_json(*cp.second);
  auto back = stored_provenance_from_json(j, cp.mid, cp.out);
  EXPECT_EQ(to_json(back), j);
  EXPECT_TRUE(back.complete());
}

std::string chain_name(const ::testing::TestParamInfo<TwoChain>& info) { return info.param.name; }

INSTANTIATE_TEST_SUITE_P(Builtin, ChainProperty, ::testing::ValuesIn(harness::builtin_two_chains()), chain_name);

TEST(Composition, ImpactNeedsSimulation) {
  auto chains = harness::builtin_two_chains();
  auto cp = testing::stored_for_chain(chains[0]);
  EXPECT_THROW(compose_special(chains[0].shape1(), chains[0].shape2(), *cp.first, *cp.second, cp.out[0],
                               ProvenanceKind::kImp),
               Error);
}

TEST(Composition, PartialProvenanceIsInexact) {
  const auto chain = harness::builtin_two_chains()[0];
  auto cp = testing::stored_for_chain(chain);
  StoredProvenance partial = *cp.second;
  ProvenanceEntry e = *partial.find(cp.out[0].value);
  e.complete = false;
  partial.put(e);
  try {
    simulated_member(*cp.first, partial, chain.input, cp.out[0]);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::kInexactProvenance);
  }
  EXPECT_NO_THROW(simulated_member(*cp.first, partial, chain.input, cp.out[0], true));

  auto p2 = std::make_shared<StoredProvenance>(partial);
  std::vector<ChainStage> path{{cp.first, Shape::kArbitrary}, {p2, Shape::kArbitrary}};
  ExecutionBudget budget;
  EXPECT_THROW(compose_chain(path, cp.out[0], ProvenanceKind::kAll, 1, budget), Error);
  ExecutionBudget b2;
  auto res = compose_chain(path, cp.out[0], ProvenanceKind::kAll, 1, b2, true);
  EXPECT_TRUE(res.unsound);
}

TEST(Composition, VirtualCompositeCountsVirtualEvaluations) {
  const auto chain = harness::builtin_two_chains()[1];
  auto cp = testing::stored_for_chain(chain);
  auto composite = compose_as_operator(*cp.first, *cp.second);
  EXPECT_EQ(composite.backing(), Backing::kVirtualComposite);
  ExecutionBudget budget;
  OperatorProbe probe(composite, budget);
  auto res = compute_p_all(probe, chain.input, cp.out[0]);
  EXPECT_EQ(budget.executions(), 0u);
  EXPECT_GT(budget.virtual_evaluations(), 0u);
  std::vector<RecordSet> got;
  for (const auto& m : res.misets()) got.push_back(m.members);
  EXPECT_EQ(harness::canonical_sets(got),
            harness::canonical_sets(harness::brute_force_pall(chain.composite(), chain.input, cp.out[0])));
}

TEST(Composition, VirtualCompositeRespectsLimit) {
  const auto chain = harness::builtin_two_chains()[1];
  auto cp = testing::stored_for_chain(chain);
  auto composite = compose_as_operator(*cp.first, *cp.second);
  ExecutionBudget budget(3);
  OperatorProbe probe(composite, budget);
  auto res = compute_p_all(probe, chain.input, cp.out[0]);
  EXPECT_TRUE(res.truncated);
  EXPECT_LE(budget.virtual_evaluations(), 3u);
}

TEST(Composition, SingleStageChainReadsStoredEntry) {
  const auto chain = harness::builtin_two_chains()[0];
  auto cp = testing::stored_for_chain(chain);
  ExecutionBudget budget;
  auto res = compose_chain({{cp.first, chain.shape1()}}, cp.mid[0], ProvenanceKind::kAll, 1, budget);
  EXPECT_EQ(res.misets().size(), 1u);
}

TEST(EffectiveShape, NeedsUsableEvidence) {
  PropertyClass p;
  p.shape = Shape::kOneToOne;
  p.shape_evidence = EvidenceSource::kSampled;
  p.evidence_trials = 4;
  EXPECT_EQ(effective_shape(p), Shape::kArbitrary);
  p.evidence_trials = 32;
  EXPECT_EQ(effective_shape(p), Shape::kOneToOne);
}

}  // namespace
}  // namespace prober
