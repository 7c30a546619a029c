// Copyright 2026 The Prober Authors
// SPDX-License-Identifier: Apache-2.0

#include "prober/property_inference.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <random>

#include "prober/error.hpp"
#include "prober/miset.hpp"

namespace prober {

std::string_view to_string(Verdict v) { return v == Verdict::kConsistent ? "consistent" : "violated"; }

namespace {

std::mt19937_64 stream(std::uint64_t seed, std::uint64_t check) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(check)};
  return std::mt19937_64(seq);
}

std::size_t uniform(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

// `count` distinct positions out of `n`, ascending.
std::vector<std::size_t> draw_positions(std::mt19937_64& rng, std::size_t n, std::size_t count) {
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});
  for (std::size_t i = 0; i < count; ++i) std::swap(all[i], all[uniform(rng, i, n - 1)]);
  all.resize(count);
  std::sort(all.begin(), all.end());
  return all;
}

RecordSet draw_subset(std::mt19937_64& rng, const RecordSet& pool) {
  std::size_t size = uniform(rng, 1, std::min(pool.size(), kMaxSampleSize));
  return pool.subset(draw_positions(rng, pool.size(), size));
}

bool is_stop(const Error& e) {
  return e.code() == ErrorCode::kBudgetExhausted || e.code() == ErrorCode::kCancelled;
}

void require_pool(const RecordSet& pool) {
  if (pool.empty()) throw Error(ErrorCode::kInvalidArgument, "sampling pool is empty");
}

std::optional<Record> first_missing(const RecordSet& from, const RecordSet& in) {
  for (const auto& r : from) {
    if (!in.contains_value(r.value)) return r;
  }
  return std::nullopt;
}

std::vector<Record> singleton_union(const OperatorProbe& probe, const RecordSet& input, std::size_t* max_out) {
  std::vector<Record> out;
  std::map<std::string, bool> seen;
  for (const auto& i : input) {
    RecordSet o = probe.apply(RecordSet({i}));
    if (max_out != nullptr) *max_out = std::max(*max_out, o.size());
    for (const auto& r : o) {
      if (seen.emplace(r.value.digest(), true).second) out.push_back(r);
    }
  }
  return out;
}

// Union of `out` into a RecordSet tolerant of id clashes: ids are rewritten
// by position since only values matter for the comparison.
RecordSet as_value_set(const std::vector<Record>& records) {
  std::vector<Record> out;
  out.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    out.push_back(Record{RecordId{0, std::to_string(i)}, records[i].value});
  }
  return RecordSet(std::move(out));
}

std::optional<Record> additivity_gap(const RecordSet& whole, const RecordSet& unioned) {
  if (auto r = first_missing(whole, unioned)) return r;
  return first_missing(unioned, whole);
}

// Disjoint-partition evidence for many-to-one shapes: the MISets of all
// outputs, merged where they overlap, must each yield at most one output and
// together reproduce O(I). Only trials with two or more producing parts count.
struct PartitionOutcome {
  std::size_t trials = 0;
  bool consistent = true;
  bool informative = false;
};

PartitionOutcome check_partition(const OperatorProbe& probe, const RecordSet& pool, std::size_t trials,
                                 std::uint64_t seed) {
  PartitionOutcome out;
  auto rng = stream(seed, 3);
  for (std::size_t t = 0; t < trials; ++t) {
    RecordSet input = draw_subset(rng, pool);
    RecordSet outputs = probe.apply(input);
    ++out.trials;
    if (outputs.empty()) continue;
    // Union-find over input positions.
    std::vector<std::size_t> parent(input.size());
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    std::vector<bool> used(input.size(), false);
    for (const auto& r : outputs) {
      MISet m = find_any_miset(probe, input, r);
      std::optional<std::size_t> anchor;
      for (const auto& x : m.members) {
        std::size_t pos = *input.index_of(x.id);
        used[pos] = true;
        if (anchor) {
          parent[find(pos)] = find(*anchor);
        } else {
          anchor = pos;
        }
      }
    }
    std::map<std::size_t, std::vector<std::size_t>> parts;
    for (std::size_t i = 0; i < input.size(); ++i) {
      if (used[i]) parts[find(i)].push_back(i);
    }
    std::vector<Record> produced;
    std::size_t producing = 0;
    for (const auto& [root, members] : parts) {
      RecordSet o = probe.apply(input.subset(members));
      if (o.size() > 1) {
        out.consistent = false;
        return out;
      }
      if (!o.empty()) {
        ++producing;
        produced.push_back(o[0]);
      }
    }
    if (additivity_gap(outputs, as_value_set(produced))) {
      out.consistent = false;
      return out;
    }
    if (producing >= 2) out.informative = true;
  }
  return out;
}

}  // namespace

CheckReport check_monotonicity_sample(const OperatorProbe& probe, const RecordSet& pool,
                                      std::size_t trials, std::uint64_t seed) {
  CheckReport rep;
  if (trials == 0) return rep;
  require_pool(pool);
  auto rng = stream(seed, 1);
  for (std::size_t t = 0; t < trials; ++t) {
    RecordSet larger = draw_subset(rng, pool);
    std::size_t small_size = uniform(rng, 1, std::max<std::size_t>(1, larger.size() - 1));
    RecordSet smaller = larger.subset(draw_positions(rng, larger.size(), small_size));
    RecordSet out_small = probe.apply(smaller);
    RecordSet out_large = probe.apply(larger);
    ++rep.trials;
    if (auto r = first_missing(out_small, out_large)) {
      rep.verdict = Verdict::kViolated;
      rep.counterexample = Counterexample{CheckKind::kMonotonicity, smaller, larger, *r};
      return rep;
    }
  }
  return rep;
}

CheckReport check_additivity(const OperatorProbe& probe, const RecordSet& pool, std::size_t trials,
                             std::uint64_t seed, std::size_t* max_singleton) {
  CheckReport rep;
  if (trials == 0) return rep;
  require_pool(pool);
  auto rng = stream(seed, 2);
  for (std::size_t t = 0; t < trials; ++t) {
    RecordSet input = draw_subset(rng, pool);
    RecordSet whole = probe.apply(input);
    RecordSet unioned = as_value_set(singleton_union(probe, input, max_singleton));
    ++rep.trials;
    if (auto r = additivity_gap(whole, unioned)) {
      rep.verdict = Verdict::kViolated;
      rep.counterexample = Counterexample{CheckKind::kAdditivity, RecordSet{}, input, *r};
      return rep;
    }
  }
  return rep;
}

InferenceResult infer_properties(const OperatorProbe& probe, const RecordSet& pool, std::size_t trials,
                                 std::uint64_t seed) {
  InferenceResult res;
  EvidenceReport& rep = res.report;
  rep.seed = seed;
  PropertyClass& pc = res.properties;
  try {
    rep.monotonicity = check_monotonicity_sample(probe, pool, trials, seed);
    rep.additivity = check_additivity(probe, pool, trials, seed, &rep.max_singleton_outputs);
    if (rep.additivity.verdict == Verdict::kViolated &&
        rep.monotonicity.verdict == Verdict::kConsistent && trials > 0) {
      auto part = check_partition(probe, pool, trials, seed);
      rep.partition_trials = part.trials;
      rep.partition_consistent = part.consistent && part.informative;
    }
  } catch (const Error& e) {
    if (!is_stop(e)) throw;
    rep.budget_exhausted = true;
  }

  pc.monotone = rep.monotonicity.verdict == Verdict::kViolated ? MonotoneVerdict::kViolated
                                                               : MonotoneVerdict::kSampledConsistent;
  if (rep.additivity.verdict == Verdict::kConsistent && rep.additivity.trials > 0) {
    pc.shape = rep.max_singleton_outputs <= 1 ? Shape::kOneToOne : Shape::kOneToMany;
    pc.shape_evidence = EvidenceSource::kSampled;
    pc.evidence_trials = rep.additivity.trials;
  } else if (rep.partition_consistent) {
    pc.shape = Shape::kManyToOne;
    pc.shape_evidence = EvidenceSource::kSampled;
    pc.evidence_trials = rep.partition_trials;
    pc.heuristic = true;
  }
  return res;
}

bool replay(const OperatorProbe& probe, const Counterexample& cx) {
  switch (cx.check) {
    case CheckKind::kMonotonicity: {
      if (!cx.smaller.is_subset_of(cx.larger)) return false;
      return probe.apply(cx.smaller).contains_value(cx.record.value) &&
             !probe.apply(cx.larger).contains_value(cx.record.value);
    }
    case CheckKind::kAdditivity: {
      bool in_whole = probe.apply(cx.larger).contains_value(cx.record.value);
      bool in_union = as_value_set(singleton_union(probe, cx.larger, nullptr)).contains_value(cx.record.value);
      return in_whole != in_union;
    }
  }
  return false;
}

namespace {

nlohmann::json ids(const RecordSet& s) {
  auto a = nlohmann::json::array();
  for (const auto& r : s) a.push_back(id_to_json(r.id));
  return a;
}

nlohmann::json check_json(const CheckReport& c) {
  nlohmann::json j{{"trials", c.trials}, {"verdict", to_string(c.verdict)}};
  if (c.counterexample) {
    const auto& cx = *c.counterexample;
    nlohmann::json cj{{"larger", ids(cx.larger)}, {"record", record_to_json(cx.record)}};
    if (cx.check == CheckKind::kMonotonicity) cj["smaller"] = ids(cx.smaller);
    j["counterexample"] = cj;
  }
  return j;
}

}  // namespace

nlohmann::json to_json(const EvidenceReport& r) {
  return nlohmann::json{{"seed", r.seed},
                        {"monotonicity", check_json(r.monotonicity)},
                        {"additivity", check_json(r.additivity)},
                        {"maxSingletonOutputs", r.max_singleton_outputs},
                        {"partition", {{"trials", r.partition_trials}, {"consistent", r.partition_consistent}}},
                        {"budgetExhausted", r.budget_exhausted}};
}

nlohmann::json to_json(const PropertyClass& p) {
  auto unique = nlohmann::json::array();
  for (const auto& d : p.unique_miset_outputs) unique.push_back(d);
  return nlohmann::json{{"monotone", to_string(p.monotone)},
                        {"shape", to_string(p.shape)},
                        {"evidence", to_string(p.shape_evidence)},
                        {"evidenceTrials", p.evidence_trials},
                        {"heuristic", p.heuristic},
                        {"uniqueMISet", unique}};
}

PropertyClass property_class_from_json(const nlohmann::json& j) {
  PropertyClass p;
  auto monotone = j.value("monotone", std::string("asserted"));
  if (monotone == "sampled_consistent") p.monotone = MonotoneVerdict::kSampledConsistent;
  if (monotone == "violated") p.monotone = MonotoneVerdict::kViolated;
  p.shape = shape_from_string(j.value("shape", std::string("arbitrary")));
  auto ev = j.value("evidence", std::string("none"));
  if (ev == "declared") p.shape_evidence = EvidenceSource::kDeclared;
  if (ev == "spec_level") p.shape_evidence = EvidenceSource::kSpecLevel;
  if (ev == "sampled") p.shape_evidence = EvidenceSource::kSampled;
  p.evidence_trials = j.value("evidenceTrials", std::size_t{0});
  p.heuristic = j.value("heuristic", false);
  if (j.contains("uniqueMISet")) {
    for (const auto& d : j.at("uniqueMISet")) p.unique_miset_outputs.insert(d.get<std::string>());
  }
  p.validate();
  return p;
}

}  // namespace prober
