// Copyright 2026 The Prober Authors
// SPDX-License-Identifier: Apache-2.0

#include "prober/fast_paths.hpp"

#include <map>

#include "prober/error.hpp"

namespace prober {
namespace {

// Matches "local" on any port, or "<port>:local" on that port.
std::vector<const Record*> lookup_input(const RecordSet& input, const std::string& ref) {
  std::vector<const Record*> out;
  for (const auto& r : input) {
    if (r.id.local == ref || to_string(r.id) == ref) out.push_back(&r);
  }
  return out;
}

bool rule_matches(const FieldMappingRule& rule, const nlohmann::json& wanted, const Record& in) {
  if (rule.port && in.id.port != *rule.port) return false;
  if (const auto* f = in.value.field(rule.input_field)) return *f == wanted;
  if (rule.input_field == "id") return wanted.is_string() && wanted.get<std::string>() == in.id.local;
  return false;
}

}  // namespace

ProvenanceResult provenance_direct_scan(const OperatorProbe& probe, const RecordSet& input,
                                        const Record& target, ProvenanceKind kind, std::size_t k) {
  BudgetSnapshot before = probe.budget().snapshot();
  std::vector<MISet> misets;
  for (const auto& i : input) {
    RecordSet single({i});
    if (probe.produces(single, target)) misets.push_back(MISet{std::move(single)});
  }
  if (misets.empty()) {
    throw Error(ErrorCode::kShapeViolation, "operator '" + probe.op().name() +
                                                "' produces the target from no single input record");
  }
  auto res = result_from_misets(std::move(misets), kind, k, true, false);
  res.budget_spent = probe.budget().snapshot() - before;
  return res;
}

std::optional<ProvenanceResult> provenance_unique(const OperatorProbe& probe, const RecordSet& input,
                                                  const Record& target, ProvenanceKind kind,
                                                  std::size_t k) {
  BudgetSnapshot before = probe.budget().snapshot();
  auto check = is_unique_miset(probe, input, target);
  if (!check.unique) return std::nullopt;
  auto res = result_from_misets({check.miset}, kind, k, true, false);
  res.budget_spent = probe.budget().snapshot() - before;
  return res;
}

WitnessSet witness_from_spec(const OperatorHandle& op, const RecordSet& stored_input, const Record& output) {
  const SpecLevel& spec = op.spec_level();
  WitnessSet w;
  w.source = spec.kind;
  std::map<RecordId, Record> picked;
  switch (spec.kind) {
    case SpecKind::kIOSpec:
    case SpecKind::kExact: {
      auto it = spec.witness_table.find(output.id.local);
      if (it == spec.witness_table.end() || it->second.empty()) {
        throw Error(ErrorCode::kMissingWitness, "no witness listed for output " + to_string(output.id));
      }
      for (const auto& ref : it->second) {
        auto hits = lookup_input(stored_input, ref);
        if (hits.empty()) {
          throw Error(ErrorCode::kMissingWitness,
                      "witness of " + to_string(output.id) + " names unknown input '" + ref + "'");
        }
        for (const Record* r : hits) picked.emplace(r->id, *r);
      }
      break;
    }
    case SpecKind::kIntegrityConstraint:
      for (const auto& rule : spec.rules) {
        const nlohmann::json* wanted = output.value.field(rule.output_field);
        if (wanted == nullptr) continue;
        for (const auto& in : stored_input) {
          if (rule_matches(rule, *wanted, in)) picked.emplace(in.id, in);
        }
      }
      if (picked.empty()) {
        throw Error(ErrorCode::kMissingWitness, "no integrity rule matches output " + to_string(output.id));
      }
      break;
    case SpecKind::kBlackBox:
      throw Error(ErrorCode::kInvalidArgument, "operator '" + op.name() + "' has no IO spec or integrity constraints");
  }
  std::vector<Record> members;
  members.reserve(picked.size());
  for (auto& [id, r] : picked) members.push_back(std::move(r));
  w.members = RecordSet(std::move(members));
  return w;
}

bool verify_witness(const OperatorProbe& probe, WitnessSet& witness, const Record& target) {
  witness.verified = probe.produces(witness.members, target);
  return witness.verified;
}

MISet minimize_witness(const OperatorProbe& probe, const WitnessSet& witness, const Record& target) {
  return find_any_miset(probe, witness.members, target);
}

}  // namespace prober
