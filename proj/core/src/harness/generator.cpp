// Copyright 2026 The Prober Authors
// SPDX-License-Identifier: Apache-2.0

#include "prober/harness/generator.hpp"

#include <array>
#include <random>
#include <regex>

#include "prober/error.hpp"
#include "prober/harness/synthetic_ops.hpp"

namespace prober::harness {
namespace {

constexpr std::array<const char*, 8> kNames = {"Acme Shoes", "Bolt Boots",  "Cedar Sandals", "Dune Sneakers",
                                               "Elm Loafers", "Fern Clogs", "Grove Heels",   "Harbor Flats"};
constexpr std::array<const char*, 8> kStreets = {"Oak", "Pine", "Maple", "Birch", "Cedar", "Willow", "Aspen", "Spruce"};
constexpr std::array<const char*, 4> kSuffixes = {"St", "Ave", "Rd", "Blvd"};

struct Segment {
  std::string name;
  std::string addr;
};

std::string render(const Segment& s) { return "name=" + s.name + ";addr=" + s.addr; }

}  // namespace

std::string_view to_string(PlantedKind k) {
  switch (k) {
    case PlantedKind::kMerged: return "merged";
    case PlantedKind::kDropped: return "dropped";
    case PlantedKind::kFieldSwap: return "field_swap";
  }
  return "merged";
}

PlantedKind planted_kind_from_string(std::string_view s) {
  if (s == "merged") return PlantedKind::kMerged;
  if (s == "dropped") return PlantedKind::kDropped;
  if (s == "field_swap") return PlantedKind::kFieldSwap;
  throw Error(ErrorCode::kInvalidArgument, "unknown planted error '" + std::string(s) + "'");
}

bool is_valid_address(const std::string& text) {
  static const std::regex re("^[0-9]+ [A-Z][a-z]+ (St|Ave|Rd|Blvd)$");
  return std::regex_match(text, re);
}

SyntheticRun generate_synthetic_run(const GeneratorOptions& options) {
  if (options.n_docs == 0) throw Error(ErrorCode::kInvalidArgument, "n_docs must be at least 1");
  for (const auto& p : options.planted) {
    if (p.doc == 0 || p.doc > options.n_docs) {
      throw Error(ErrorCode::kInvalidArgument, "planted error names missing doc " + std::to_string(p.doc));
    }
  }
  SyntheticRun run;
  run.planted = options.planted;
  // Portable draws: reduce raw engine output rather than rely on distribution
  // implementations, which differ between standard libraries.
  std::mt19937_64 rng(options.seed);
  auto pick = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };

  std::vector<Record> docs;
  std::size_t segment_no = 0;
  for (std::size_t d = 1; d <= options.n_docs; ++d) {
    std::array<Segment, 2> segs;
    for (auto& s : segs) {
      s.name = kNames[pick(kNames.size())];
      s.addr = std::to_string(100 + 17 * segment_no++) + " " + kStreets[pick(kStreets.size())] + " " +
               kSuffixes[pick(kSuffixes.size())];
    }
    std::string sep = "|";
    std::string second = render(segs[1]);
    for (const auto& p : options.planted) {
      if (p.doc != d) continue;
      switch (p.kind) {
        case PlantedKind::kMerged: sep = " "; break;
        case PlantedKind::kDropped: second = "name=" + segs[1].name; break;
        case PlantedKind::kFieldSwap: std::swap(segs[0].name, segs[0].addr); break;
      }
    }
    docs.push_back(make_text_record("d" + std::to_string(d), render(segs[0]) + sep + second));
  }
  run.source = RecordSet(std::move(docs));

  if (options.minimal) {
    run.graph.nodes.push_back(NodeConfig{"wb", "identity", nlohmann::json::object(), {}, Shape::kOneToOne});
    for (const auto& r : run.source) run.truth[r.id.local] = {r.id.local};
    return run;
  }

  run.graph.nodes.push_back(NodeConfig{"wb", "identity", nlohmann::json::object(), {}, Shape::kOneToOne});
  run.graph.nodes.push_back(
      NodeConfig{"sg", "splitter", nlohmann::json{{"sep", "|"}}, {}, Shape::kOneToMany});
  run.graph.nodes.push_back(
      NodeConfig{"ad", "keyed_extractor", nlohmann::json{{"field", "addr"}}, {}, Shape::kOneToOne});
  run.graph.edges.push_back(Edge{"wb", "sg", 0});
  run.graph.edges.push_back(Edge{"sg", "ad", 0});

  // Ground truth by construction: every address descends from its own doc.
  auto sg = make_synthetic_operator("sg", "splitter", nlohmann::json{{"sep", "|"}});
  auto ad = make_synthetic_operator("ad", "keyed_extractor", nlohmann::json{{"field", "addr"}});
  for (const auto& doc : run.source) {
    RecordSet one({doc});
    RecordSet segs = sg.invoke(std::span<const RecordSet>(&one, 1));
    RecordSet addrs = ad.invoke(std::span<const RecordSet>(&segs, 1));
    for (const auto& a : addrs) {
      run.truth[a.id.local] = {doc.id.local};
      if (!is_valid_address(a.value.as_text())) run.invalid_outputs.insert(a.id.local);
    }
  }
  return run;
}

nlohmann::json to_json(const SyntheticRun& run) {
  auto source = nlohmann::json::array();
  for (const auto& r : run.source) source.push_back(record_to_json(r));
  auto planted = nlohmann::json::array();
  for (const auto& p : run.planted) planted.push_back({{"kind", to_string(p.kind)}, {"doc", p.doc}});
  return nlohmann::json{{"pipeline", pipeline_to_json(run.graph)},
                        {"source", source},
                        {"truth", run.truth},
                        {"invalid", run.invalid_outputs},
                        {"planted", planted}};
}

}  // namespace prober::harness
