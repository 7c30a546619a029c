// Copyright 2026 The Prober Authors
// SPDX-License-Identifier: Apache-2.0

#include "prober/operator.hpp"

#include "prober/error.hpp"

namespace prober {

std::string_view to_string(SpecKind k) {
  switch (k) {
    case SpecKind::kBlackBox: return "black_box";
    case SpecKind::kExact: return "exact";
    case SpecKind::kIOSpec: return "io_spec";
    case SpecKind::kIntegrityConstraint: return "integrity_constraint";
  }
  return "black_box";
}

std::string_view to_string(Shape s) {
  switch (s) {
    case Shape::kOneToOne: return "one_to_one";
    case Shape::kOneToMany: return "one_to_many";
    case Shape::kManyToOne: return "many_to_one";
    case Shape::kArbitrary: return "arbitrary";
  }
  return "arbitrary";
}

std::string_view to_string(MonotoneVerdict m) {
  switch (m) {
    case MonotoneVerdict::kAsserted: return "asserted";
    case MonotoneVerdict::kSampledConsistent: return "sampled_consistent";
    case MonotoneVerdict::kViolated: return "violated";
  }
  return "asserted";
}

std::string_view to_string(EvidenceSource e) {
  switch (e) {
    case EvidenceSource::kNone: return "none";
    case EvidenceSource::kDeclared: return "declared";
    case EvidenceSource::kSpecLevel: return "spec_level";
    case EvidenceSource::kSampled: return "sampled";
  }
  return "none";
}

std::string_view to_string(Backing b) {
  switch (b) {
    case Backing::kSynthetic: return "synthetic";
    case Backing::kExternal: return "external";
    case Backing::kVirtualComposite: return "virtual_composite";
  }
  return "synthetic";
}

SpecKind spec_kind_from_string(std::string_view s) {
  if (s == "black_box" || s.empty()) return SpecKind::kBlackBox;
  if (s == "exact") return SpecKind::kExact;
  if (s == "io_spec") return SpecKind::kIOSpec;
  if (s == "integrity_constraint") return SpecKind::kIntegrityConstraint;
  throw Error(ErrorCode::kInvalidArgument, "unknown spec level '" + std::string(s) + "'");
}

Shape shape_from_string(std::string_view s) {
  if (s == "one_to_one") return Shape::kOneToOne;
  if (s == "one_to_many") return Shape::kOneToMany;
  if (s == "many_to_one") return Shape::kManyToOne;
  if (s == "arbitrary") return Shape::kArbitrary;
  throw Error(ErrorCode::kInvalidArgument, "unknown shape '" + std::string(s) + "'");
}

void PropertyClass::validate() const {
  if (shape != Shape::kArbitrary && shape_evidence == EvidenceSource::kNone) {
    throw Error(ErrorCode::kInvalidArgument,
                "shape " + std::string(to_string(shape)) + " claimed without evidence");
  }
}

bool PropertyClass::licenses_direct_scan() const {
  if (shape != Shape::kOneToOne && shape != Shape::kOneToMany) return false;
  switch (shape_evidence) {
    case EvidenceSource::kDeclared:
    case EvidenceSource::kSpecLevel:
      return true;
    case EvidenceSource::kSampled:
      return evidence_trials >= kMinSampledTrials;
    case EvidenceSource::kNone:
      return false;
  }
  return false;
}

Shape compose_shapes(Shape first, Shape second) {
  auto additive = [](Shape s) { return s == Shape::kOneToOne || s == Shape::kOneToMany; };
  if (first == Shape::kOneToOne && second == Shape::kOneToOne) return Shape::kOneToOne;
  if (additive(first) && additive(second)) return Shape::kOneToMany;
  return Shape::kArbitrary;
}

OperatorHandle::OperatorHandle(std::string name, std::size_t arity,
                               std::shared_ptr<const OperatorImpl> impl, Backing backing,
                               SpecLevel spec, PropertyClass properties)
    : name_(std::move(name)),
      arity_(arity),
      impl_(std::move(impl)),
      backing_(backing),
      spec_(std::make_shared<const SpecLevel>(std::move(spec))),
      properties_(std::move(properties)) {
  if (arity_ == 0) throw Error(ErrorCode::kInvalidArgument, "operator '" + name_ + "' needs arity >= 1");
  if (!impl_) throw Error(ErrorCode::kInvalidArgument, "operator '" + name_ + "' has no implementation");
  properties_.validate();
}

OperatorHandle OperatorHandle::with_properties(PropertyClass properties) const {
  OperatorHandle copy = *this;
  properties.validate();
  copy.properties_ = std::move(properties);
  return copy;
}

RecordSet OperatorHandle::invoke(std::span<const RecordSet> inputs) const {
  if (inputs.size() != arity_) {
    throw Error(ErrorCode::kInvalidArgument, "operator '" + name_ + "' expects " +
                                                 std::to_string(arity_) + " inputs, got " +
                                                 std::to_string(inputs.size()));
  }
  return impl_->apply(inputs);
}

namespace {

class FunctionOperator final : public OperatorImpl {
 public:
  explicit FunctionOperator(OperatorFn fn) : fn_(std::move(fn)) {}
  RecordSet apply(std::span<const RecordSet> inputs) const override { return fn_(inputs); }

 private:
  OperatorFn fn_;
};

}  // namespace

OperatorHandle make_function_operator(std::string name, std::size_t arity, OperatorFn fn,
                                      PropertyClass properties) {
  return OperatorHandle(std::move(name), arity, std::make_shared<FunctionOperator>(std::move(fn)),
                        Backing::kSynthetic, {}, std::move(properties));
}

}  // namespace prober
