// Copyright 2026 The Prober Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "prober/record.hpp"

namespace prober::harness {

enum class BaselineMode { kAllRecs, kWrdAnd, kWrdOr };

std::string_view to_string(BaselineMode m);
BaselineMode baseline_mode_from_string(std::string_view s);

/// Lowercased alphanumeric runs, in order, duplicates kept.
std::vector<std::string> tokenize(std::string_view text);

/// Searchable text of a value: the text itself, or the string forms of an
/// object's field values joined by spaces (sorted by key).
std::string value_terms(const Value& v);

/// Keyword retrieval of source documents for `r`. A record with no tokens
/// matches nothing under WrdAnd and WrdOr.
RecordSet baseline_retrieval(const RecordSet& corpus, const Record& r, BaselineMode mode);

}  // namespace prober::harness
