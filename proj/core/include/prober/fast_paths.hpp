// Copyright 2026 The Prober Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>

#include "prober/budget.hpp"
#include "prober/miset.hpp"
#include "prober/operator.hpp"

namespace prober {

/// Provenance of an output of a one-to-one or one-to-many operator from
/// singleton applications alone: P_all = {{i} : target ∈ O({i})}. At most
/// |input| executions. Throws kShapeViolation when no singleton produces the
/// target (the shape evidence was wrong).
ProvenanceResult provenance_direct_scan(const OperatorProbe& probe, const RecordSet& input,
                                        const Record& target, ProvenanceKind kind, std::size_t k = 1);

/// When the target has a unique MISet, every kind collapses onto it.
/// Returns nullopt (not unique) so the caller can fall back.
std::optional<ProvenanceResult> provenance_unique(const OperatorProbe& probe, const RecordSet& input,
                                                  const Record& target, ProvenanceKind kind,
                                                  std::size_t k = 1);

/// Input records named by an operator's IO spec or key/foreign-key
/// rules as having produced an output. Not necessarily minimal.
struct WitnessSet {
  RecordSet members;
  SpecKind source = SpecKind::kIOSpec;
  bool minimal = false;
  bool verified = false;
};

/// Reads the witness of `output` from the operator's spec level, resolving ids
/// against the stored (flattened) input set. Throws kMissingWitness when the
/// table or rules name nothing, or name ids absent from the input.
WitnessSet witness_from_spec(const OperatorHandle& op, const RecordSet& stored_input, const Record& output);

/// One execution: does the witness still produce the target?
bool verify_witness(const OperatorProbe& probe, WitnessSet& witness, const Record& target);

/// Greedy minimization seeded with the witness; at most |witness| + 1
/// executions. Throws kNotProduced for a stale witness.
MISet minimize_witness(const OperatorProbe& probe, const WitnessSet& witness, const Record& target);

}  // namespace prober
