// Copyright 2026 The Prober Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <nlohmann/json.hpp>

#include "prober/miset.hpp"

namespace prober {

/// Wire form shared by the CLI, the HTTP service, and the provenance cache.
/// MISets and record lists are arrays of record ids.
nlohmann::json to_json(const ProvenanceResult& r);

/// Inverse of to_json; ids are resolved against `input`. Throws
/// kUnknownRecord for ids missing from it.
ProvenanceResult provenance_from_json(const nlohmann::json& j, const RecordSet& input);

nlohmann::json miset_to_json(const MISet& m);

}  // namespace prober
