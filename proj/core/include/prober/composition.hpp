// Copyright 2026 The Prober Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "prober/budget.hpp"
#include "prober/miset.hpp"
#include "prober/operator.hpp"

namespace prober {

/// A record set together with how it relates to the value it stands for.
struct Bounded {
  RecordSet set;
  Relation relation = Relation::kExact;
};

/// Provenance of one output value of an operator, over that operator's
/// (flattened) input.
struct ProvenanceEntry {
  Record output;
  std::vector<MISet> misets;
  /// `misets` is all of P_all.
  bool complete = false;
  /// Bounds known without a complete P_all (from shortcut composition).
  std::optional<Bounded> uni;
  std::optional<Bounded> inter;

  std::optional<Bounded> union_bound() const;
  std::optional<Bounded> intersection_bound() const;
};

/// Per-output-value P_all of one operator over a recorded input.
class StoredProvenance {
 public:
  StoredProvenance() = default;
  StoredProvenance(std::string name, Shape shape, RecordSet input);

  const std::string& name() const { return name_; }
  Shape shape() const { return shape_; }
  const RecordSet& input() const { return input_; }
  const std::vector<ProvenanceEntry>& entries() const { return entries_; }

  /// Adds or replaces the entry for `e.output`'s value.
  void put(ProvenanceEntry e);
  const ProvenanceEntry* find(const Value& v) const;
  bool complete() const;

 private:
  std::string name_;
  Shape shape_ = Shape::kArbitrary;
  RecordSet input_;
  std::vector<ProvenanceEntry> entries_;
  std::unordered_map<std::string, std::size_t> by_value_;
};

/// Enumerates P_all for every distinct output value. Operators whose shape
/// licenses it are scanned singleton-wise; everything else goes through the
/// full enumeration. Entries are marked incomplete when the budget runs out.
StoredProvenance build_stored_provenance(const OperatorProbe& probe, const RecordSet& input,
                                         const RecordSet& outputs);

nlohmann::json to_json(const StoredProvenance& s);
/// `input` resolves MISet members; `outputs` resolves entry records.
StoredProvenance stored_provenance_from_json(const nlohmann::json& j, const RecordSet& input,
                                             const RecordSet& outputs);

/// Evaluates membership of records in a pipeline's outputs for any subset of
/// the source input using stored P_all only; no operator runs. Stages are
/// matched to upstream stages per input port: port-p members of a stage's
/// MISets are looked up, by value, among the outputs of the stage feeding p.
/// Source-stage MISets are matched to the source subset by id.
class SimulatedPipeline {
 public:
  /// `port_sources` names the stage feeding each input port; empty for the source stage.
  void add_stage(std::string node, std::shared_ptr<const StoredProvenance> prov,
                 std::vector<std::string> port_sources);

  /// Permit partial P_all; results are then flagged through used_partial().
  void set_allow_unsound(bool on) { allow_unsound_ = on; }
  bool used_partial() const { return used_partial_.load(); }

  bool member(const RecordSet& source_subset, const std::string& node, const Record& r) const;
  /// Records of `node`'s recorded output present for `source_subset`.
  RecordSet outputs(const RecordSet& source_subset, const std::string& node) const;

  const RecordSet& source_input() const;
  const std::string& source_node() const { return source_; }
  bool has_stage(const std::string& node) const { return stages_.count(node) > 0; }
  const StoredProvenance& stage(const std::string& node) const;

 private:
  struct Stage {
    std::shared_ptr<const StoredProvenance> prov;
    std::vector<std::string> port_sources;
  };
  using Memo = std::map<std::pair<std::string, std::string>, bool>;
  bool present(const RecordSet& source_subset, const std::string& node, const Value& v, Memo& memo) const;

  std::map<std::string, Stage> stages_;
  std::string source_;
  bool allow_unsound_ = false;
  mutable std::atomic<bool> used_partial_{false};
};

/// Membership in O2(O1(subset)) decided from stored P_all tables alone. Throws
/// kInexactProvenance when a needed P_all is partial, unless `allow_unsound`.
bool simulated_member(const StoredProvenance& pall1, const StoredProvenance& pall2,
                      const RecordSet& source_subset, const Record& r2, bool allow_unsound = false);

/// A virtual operator over the source input whose application simulates
/// `node`'s outputs. Each application counts as one virtual evaluation.
OperatorHandle compose_as_operator(std::shared_ptr<const SimulatedPipeline> sim, const std::string& node);
OperatorHandle compose_as_operator(const StoredProvenance& pall1, const StoredProvenance& pall2);

/// Shape used for routing: the declared/inferred shape when its evidence is
/// usable, Arbitrary otherwise.
Shape effective_shape(const PropertyClass& p);

/// Shortcut composition of O2 ∘ O1 for one stage-2 output without running
/// anything. Exact when O1 or O2 is one-to-one/one-to-many; union/intersection
/// bounds for arbitrary stages. Throws kUnsupportedCombination when the kind
/// needs the full simulation (impact always does).
ProvenanceResult compose_special(Shape shape1, Shape shape2, const StoredProvenance& prov1,
                                 const StoredProvenance& prov2, const Record& r2, ProvenanceKind kind,
                                 std::size_t k = 1);

/// Composes every entry of prov2 over prov1's input.
StoredProvenance compose_pair(Shape shape1, Shape shape2, const StoredProvenance& prov1,
                              const StoredProvenance& prov2);

struct ChainStage {
  std::shared_ptr<const StoredProvenance> prov;
  Shape shape = Shape::kArbitrary;
};

/// Provenance of `target` (an output of the last stage) over the first
/// stage's input. Folds shortcut composition left to right and falls back to
/// enumeration over the virtual composite.
ProvenanceResult compose_chain(const std::vector<ChainStage>& path, const Record& target,
                               ProvenanceKind kind, std::size_t k, ExecutionBudget& budget,
                               bool allow_unsound = false);

}  // namespace prober
