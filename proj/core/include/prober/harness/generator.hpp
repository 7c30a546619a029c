// Copyright 2026 The Prober Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "prober/pipeline.hpp"
#include "prober/record.hpp"

namespace prober::harness {

enum class PlantedKind {
  kMerged,     // the segment separator is lost, two segments come out as one
  kDropped,    // the second segment carries no address field
  kFieldSwap,  // name and address values trade places in the first segment
};

std::string_view to_string(PlantedKind k);
PlantedKind planted_kind_from_string(std::string_view s);

struct PlantedError {
  PlantedKind kind = PlantedKind::kMerged;
  std::size_t doc = 1;  // 1-based document number
};

struct GeneratorOptions {
  std::size_t n_docs = 3;
  std::uint64_t seed = 1;
  std::vector<PlantedError> planted;
  /// Single identity node instead of the page -> segment -> address chain.
  bool minimal = false;
};

/// A generated run: pipeline, source documents, and the true source
/// documents of every final record.
struct SyntheticRun {
  PipelineGraph graph;
  RecordSet source;
  std::map<std::string, std::vector<std::string>> truth;  // final output local -> doc locals
  std::set<std::string> invalid_outputs;                   // final output locals failing is_valid_address
  std::vector<PlantedError> planted;
};

/// Documents are "d<i>" with two "name=..;addr=.." segments joined by "|".
/// House numbers are unique across the corpus so every address is a
/// distinctive term set. Throws kInvalidArgument for n_docs == 0 or a planted
/// error naming a missing document.
SyntheticRun generate_synthetic_run(const GeneratorOptions& options);

/// "<digits> <Capitalized> <St|Ave|Rd|Blvd>".
bool is_valid_address(const std::string& text);

nlohmann::json to_json(const SyntheticRun& run);

}  // namespace prober::harness
