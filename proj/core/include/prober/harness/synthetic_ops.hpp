// Copyright 2026 The Prober Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "prober/operator.hpp"

namespace prober::harness {

/// Kinds understood by make_synthetic_operator:
///
///   identity          passes every record through unchanged
///   splitter          text split on params.sep (default "|"); ids "<doc>#<k>"
///   keyed_extractor   projects params.field from "k=v;k=v" text; keeps the id;
///                     params.emit_source adds a src_id field
///   dedup             one record per key (params.key field, or the whole text);
///                     params.min_support (default 1) copies required
///   support_threshold emits a claim once params.threshold records support it;
///                     params.claim / params.claim_field select supporters
///   tagged_join       arity 2; pairs records whose params.key fields agree
///   scorer            wraps text as {"text", "score"}
///   top1_by_score     keeps the highest-scoring record (not monotone)
///   cover             emits "covered" when the input hits every edge of params.edges
///
/// Every kind accepts params.delay_ms, slept once per application.
std::vector<std::string> synthetic_kinds();

std::size_t synthetic_arity(const std::string& kind, const nlohmann::json& params);

OperatorHandle make_synthetic_operator(const std::string& name, const std::string& kind,
                                       const nlohmann::json& params = nlohmann::json::object(),
                                       SpecLevel spec = {}, PropertyClass properties = {});

/// Known property class of a kind, with declared evidence.
PropertyClass true_properties(const std::string& kind, const nlohmann::json& params);

/// Runs `first` then feeds its output to `second` (arity 1); a real chain
/// used as ground truth for composition.
OperatorHandle chain_operator(const OperatorHandle& first, const OperatorHandle& second);

/// Score used by scorer and top1_by_score for text values.
long long text_score(const std::string& text);

/// Fields of a "k=v;k=v" text; later duplicates do not override earlier keys.
std::vector<std::pair<std::string, std::string>> parse_fields(const std::string& text);

}  // namespace prober::harness
