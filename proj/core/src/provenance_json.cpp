// Copyright 2026 The Prober Authors
// SPDX-License-Identifier: Apache-2.0

#include "prober/provenance_json.hpp"

#include "prober/error.hpp"

namespace prober {
namespace {

nlohmann::json ids_of(const RecordSet& s) {
  auto out = nlohmann::json::array();
  for (const auto& r : s) out.push_back(id_to_json(r.id));
  return out;
}

RecordSet resolve(const nlohmann::json& ids, const RecordSet& input) {
  std::vector<Record> out;
  for (const auto& j : ids) {
    RecordId id = id_from_json(j);
    const Record* r = input.find(id);
    if (r == nullptr) throw Error(ErrorCode::kUnknownRecord, "unknown record " + to_string(id));
    out.push_back(*r);
  }
  return RecordSet(std::move(out));
}

std::vector<MISet> resolve_misets(const nlohmann::json& arr, const RecordSet& input) {
  std::vector<MISet> out;
  for (const auto& m : arr) out.push_back(MISet{resolve(m, input)});
  return out;
}

}  // namespace

nlohmann::json miset_to_json(const MISet& m) { return ids_of(m.members); }

nlohmann::json to_json(const ProvenanceResult& r) {
  nlohmann::json j;
  j["kind"] = to_string(r.kind());
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, AllProvenance> || std::is_same_v<T, AnyProvenance>) {
          auto arr = nlohmann::json::array();
          for (const auto& m : p.misets) arr.push_back(miset_to_json(m));
          j["misets"] = arr;
          if constexpr (std::is_same_v<T, AnyProvenance>) j["k"] = p.requested_k;
        } else if constexpr (std::is_same_v<T, ImpactProvenance>) {
          auto arr = nlohmann::json::array();
          for (const auto& e : p.entries) arr.push_back({{"id", id_to_json(e.record.id)}, {"count", e.count}});
          j["impact"] = arr;
        } else {
          j["records"] = ids_of(p.records);
        }
      },
      r.payload);
  j["exact"] = r.exact;
  j["exhausted"] = r.exhausted;
  j["truncated"] = r.truncated;
  j["relation"] = to_string(r.relation);
  if (r.unsound) j["unsound"] = true;
  j["budgetSpent"] = to_json(r.budget_spent);
  return j;
}

ProvenanceResult provenance_from_json(const nlohmann::json& j, const RecordSet& input) {
  try {
    ProvenanceResult r;
    auto kind = provenance_kind_from_string(j.at("kind").get<std::string>());
    switch (kind) {
      case ProvenanceKind::kAll:
        r.payload = AllProvenance{resolve_misets(j.at("misets"), input)};
        break;
      case ProvenanceKind::kAny:
        r.payload = AnyProvenance{resolve_misets(j.at("misets"), input), j.at("k").get<std::size_t>()};
        break;
      case ProvenanceKind::kUni:
        r.payload = UnionProvenance{resolve(j.at("records"), input)};
        break;
      case ProvenanceKind::kInt:
        r.payload = IntersectionProvenance{resolve(j.at("records"), input)};
        break;
      case ProvenanceKind::kImp: {
        ImpactProvenance imp;
        for (const auto& e : j.at("impact")) {
          RecordId id = id_from_json(e.at("id"));
          const Record* rec = input.find(id);
          if (rec == nullptr) throw Error(ErrorCode::kUnknownRecord, "unknown record " + to_string(id));
          imp.entries.push_back(ImpactEntry{*rec, e.at("count").get<std::uint64_t>()});
        }
        r.payload = std::move(imp);
        break;
      }
    }
    r.exact = j.at("exact").get<bool>();
    r.exhausted = j.value("exhausted", false);
    r.truncated = j.at("truncated").get<bool>();
    r.relation = relation_from_string(j.value("relation", std::string("exact")));
    r.unsound = j.value("unsound", false);
    if (j.contains("budgetSpent")) r.budget_spent = budget_from_json(j.at("budgetSpent"));
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("malformed provenance result: ") + e.what());
  }
}

}  // namespace prober
