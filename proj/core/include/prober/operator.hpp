// Copyright 2026 The Prober Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "prober/record.hpp"

namespace prober {

enum class SpecKind { kBlackBox, kExact, kIOSpec, kIntegrityConstraint };

/// Key/foreign-key rule: an output's `output_field` equals an input's
/// `input_field`. `input_field == "id"` also matches the input's record id
/// when its value carries no such field. `port` restricts the match.
struct FieldMappingRule {
  std::string output_field;
  std::string input_field;
  std::optional<std::uint32_t> port;
};

/// What is known about an operator besides its behavior under execution.
struct SpecLevel {
  SpecKind kind = SpecKind::kBlackBox;
  /// IOSpec / Exact: output local id -> input local ids (matched on any port).
  std::map<std::string, std::vector<std::string>> witness_table;
  /// IntegrityConstraint rules.
  std::vector<FieldMappingRule> rules;
  /// Exact: opaque description of how outputs are formed. Shown, never interpreted.
  std::string annotation;
};

enum class Shape { kOneToOne, kOneToMany, kManyToOne, kArbitrary };
enum class MonotoneVerdict { kAsserted, kSampledConsistent, kViolated };
enum class EvidenceSource { kNone, kDeclared, kSpecLevel, kSampled };

std::string_view to_string(SpecKind k);
std::string_view to_string(Shape s);
std::string_view to_string(MonotoneVerdict m);
std::string_view to_string(EvidenceSource e);
SpecKind spec_kind_from_string(std::string_view s);
Shape shape_from_string(std::string_view s);

/// Sampled shape claims need at least this many trials before fast paths trust them.
inline constexpr std::size_t kMinSampledTrials = 32;

struct PropertyClass {
  MonotoneVerdict monotone = MonotoneVerdict::kAsserted;
  Shape shape = Shape::kArbitrary;
  EvidenceSource shape_evidence = EvidenceSource::kNone;
  std::size_t evidence_trials = 0;
  /// ManyToOne is only ever inferred heuristically.
  bool heuristic = false;
  /// Digests of output values known to have a unique MISet.
  std::set<std::string> unique_miset_outputs;

  /// Narrower-than-arbitrary shapes must name their evidence.
  void validate() const;
  /// One-to-one / one-to-many backed by usable evidence.
  bool licenses_direct_scan() const;
};

/// Shape of O2 ∘ O1 when only the stage shapes are known.
Shape compose_shapes(Shape first, Shape second);

enum class Backing { kSynthetic, kExternal, kVirtualComposite };

std::string_view to_string(Backing b);

/// Behavior of an operator: a deterministic function of its input tuple.
class OperatorImpl {
 public:
  virtual ~OperatorImpl() = default;
  virtual RecordSet apply(std::span<const RecordSet> inputs) const = 0;
};

/// Immutable, shareable description of a pipeline operator.
class OperatorHandle {
 public:
  OperatorHandle(std::string name, std::size_t arity, std::shared_ptr<const OperatorImpl> impl,
                 Backing backing = Backing::kSynthetic, SpecLevel spec = {},
                 PropertyClass properties = {});

  const std::string& name() const { return name_; }
  std::size_t arity() const { return arity_; }
  Backing backing() const { return backing_; }
  const SpecLevel& spec_level() const { return *spec_; }
  const PropertyClass& properties() const { return properties_; }

  OperatorHandle with_properties(PropertyClass properties) const;

  /// Uncounted, uncached application; checks arity.
  RecordSet invoke(std::span<const RecordSet> inputs) const;

 private:
  std::string name_;
  std::size_t arity_;
  std::shared_ptr<const OperatorImpl> impl_;
  Backing backing_;
  std::shared_ptr<const SpecLevel> spec_;
  PropertyClass properties_;
};

using OperatorFn = std::function<RecordSet(std::span<const RecordSet>)>;

/// Wraps a callable as a synthetic operator. Mostly useful in tests.
OperatorHandle make_function_operator(std::string name, std::size_t arity, OperatorFn fn,
                                      PropertyClass properties = {});

}  // namespace prober
