// Copyright 2026 The Prober Authors
// SPDX-License-Identifier: Apache-2.0

#include "prober/composition.hpp"

#include <algorithm>
#include <set>

#include "prober/error.hpp"
#include "prober/fast_paths.hpp"

namespace prober {

std::optional<Bounded> ProvenanceEntry::union_bound() const {
  if (complete) return Bounded{union_of(misets), Relation::kExact};
  if (uni) return uni;
  if (!misets.empty()) return Bounded{union_of(misets), Relation::kSubsetOfTruth};
  return std::nullopt;
}

std::optional<Bounded> ProvenanceEntry::intersection_bound() const {
  if (complete) return Bounded{intersection_of(misets), Relation::kExact};
  if (inter) return inter;
  if (!misets.empty()) return Bounded{intersection_of(misets), Relation::kSupersetOfTruth};
  return std::nullopt;
}

StoredProvenance::StoredProvenance(std::string name, Shape shape, RecordSet input)
    : name_(std::move(name)), shape_(shape), input_(std::move(input)) {}

void StoredProvenance::put(ProvenanceEntry e) {
  const std::string& digest = e.output.value.digest();
  auto it = by_value_.find(digest);
  if (it != by_value_.end()) {
    entries_[it->second] = std::move(e);
    return;
  }
  by_value_.emplace(digest, entries_.size());
  entries_.push_back(std::move(e));
}

const ProvenanceEntry* StoredProvenance::find(const Value& v) const {
  auto it = by_value_.find(v.digest());
  if (it == by_value_.end() || !(entries_[it->second].output.value == v)) return nullptr;
  return &entries_[it->second];
}

bool StoredProvenance::complete() const {
  return std::all_of(entries_.begin(), entries_.end(), [](const ProvenanceEntry& e) { return e.complete; });
}

Shape effective_shape(const PropertyClass& p) {
  if (p.licenses_direct_scan()) return p.shape;
  return Shape::kArbitrary;
}

namespace {

bool additive(Shape s) { return s == Shape::kOneToOne || s == Shape::kOneToMany; }

bool upper(Relation r) { return r == Relation::kExact || r == Relation::kSupersetOfTruth; }
bool lower(Relation r) { return r == Relation::kExact || r == Relation::kSubsetOfTruth; }

RecordSet merge(const std::vector<RecordSet>& parts) {
  std::map<RecordId, Record> merged;
  for (const auto& p : parts) {
    for (const auto& r : p) merged.emplace(r.id, r);
  }
  std::vector<Record> out;
  for (auto& [id, r] : merged) out.push_back(std::move(r));
  return RecordSet(std::move(out));
}

// Keeps the inclusion-minimal sets, deduplicated, in canonical order.
std::vector<MISet> minimal_sets(std::vector<RecordSet> candidates) {
  std::sort(candidates.begin(), candidates.end(), [](const RecordSet& a, const RecordSet& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a.ids() < b.ids();
  });
  std::vector<MISet> out;
  for (auto& c : candidates) {
    bool dominated = std::any_of(out.begin(), out.end(),
                                 [&](const MISet& m) { return m.members.is_subset_of(c); });
    if (!dominated) out.push_back(MISet{std::move(c)});
  }
  std::sort(out.begin(), out.end(),
            [](const MISet& a, const MISet& b) { return a.members.ids() < b.members.ids(); });
  return out;
}

// Source records from which `r1` is produced on its own, when stage 1 is
// one-to-one or one-to-many.
std::optional<std::vector<RecordSet>> singleton_sources(const StoredProvenance& prov1, const Record& r1) {
  const ProvenanceEntry* e = prov1.find(r1.value);
  if (e == nullptr || !e->complete) return std::nullopt;
  std::vector<RecordSet> out;
  for (const auto& m : e->misets) {
    if (m.members.size() != 1) return std::nullopt;
    out.push_back(m.members);
  }
  return out;
}

std::optional<std::vector<MISet>> exact_compose(Shape shape1, Shape shape2, const StoredProvenance& prov1,
                                                const ProvenanceEntry& e2) {
  if (!e2.complete) return std::nullopt;
  if (additive(shape1)) {
    std::vector<RecordSet> candidates;
    for (const auto& m2 : e2.misets) {
      // Cross product of the alternative sources of every member.
      std::vector<std::vector<RecordSet>> choices;
      for (const auto& r1 : m2.members) {
        auto src = singleton_sources(prov1, r1);
        if (!src) return std::nullopt;
        choices.push_back(std::move(*src));
      }
      if (std::any_of(choices.begin(), choices.end(), [](const auto& c) { return c.empty(); })) continue;
      std::vector<std::size_t> pick(choices.size(), 0);
      while (true) {
        std::vector<RecordSet> parts;
        for (std::size_t j = 0; j < choices.size(); ++j) parts.push_back(choices[j][pick[j]]);
        candidates.push_back(merge(parts));
        std::size_t j = choices.size();
        while (j > 0 && ++pick[j - 1] == choices[j - 1].size()) pick[--j] = 0;
        if (j == 0) break;
      }
    }
    return minimal_sets(std::move(candidates));
  }
  if (additive(shape2)) {
    std::vector<RecordSet> candidates;
    for (const auto& m2 : e2.misets) {
      if (m2.members.size() != 1) return std::nullopt;
      const ProvenanceEntry* e1 = prov1.find(m2.members[0].value);
      if (e1 == nullptr) continue;
      if (!e1->complete) return std::nullopt;
      for (const auto& m1 : e1->misets) candidates.push_back(m1.members);
    }
    return minimal_sets(std::move(candidates));
  }
  return std::nullopt;
}

ProvenanceEntry compose_entry(Shape shape1, Shape shape2, const StoredProvenance& prov1,
                              const ProvenanceEntry& e2) {
  ProvenanceEntry out;
  out.output = e2.output;
  if (auto exact = exact_compose(shape1, shape2, prov1, e2)) {
    out.misets = std::move(*exact);
    out.complete = true;
    return out;
  }
  // Union over stage-2 union members of their stage-1 unions contains the
  // composite union; the same construction over intersections is contained
  // in the composite intersection.
  if (auto u2 = e2.union_bound(); u2 && upper(u2->relation)) {
    std::vector<RecordSet> parts;
    bool ok = true;
    for (const auto& r1 : u2->set) {
      const ProvenanceEntry* e1 = prov1.find(r1.value);
      if (e1 == nullptr) continue;
      auto u1 = e1->union_bound();
      if (!u1 || !upper(u1->relation)) {
        ok = false;
        break;
      }
      parts.push_back(u1->set);
    }
    if (ok) out.uni = Bounded{merge(parts), Relation::kSupersetOfTruth};
  }
  if (auto i2 = e2.intersection_bound(); i2 && lower(i2->relation)) {
    std::vector<RecordSet> parts;
    bool ok = true;
    for (const auto& r1 : i2->set) {
      const ProvenanceEntry* e1 = prov1.find(r1.value);
      if (e1 == nullptr) continue;
      auto i1 = e1->intersection_bound();
      if (!i1 || !lower(i1->relation)) {
        ok = false;
        break;
      }
      parts.push_back(i1->set);
    }
    if (ok) out.inter = Bounded{merge(parts), Relation::kSubsetOfTruth};
  }
  return out;
}

nlohmann::json ids_json(const RecordSet& s) {
  auto a = nlohmann::json::array();
  for (const auto& r : s) a.push_back(id_to_json(r.id));
  return a;
}

RecordSet resolve_ids(const nlohmann::json& ids, const RecordSet& universe) {
  std::vector<Record> out;
  for (const auto& j : ids) {
    RecordId id = id_from_json(j);
    const Record* r = universe.find(id);
    if (r == nullptr) throw Error(ErrorCode::kCorruptTrace, "stored provenance names unknown record " + to_string(id));
    out.push_back(*r);
  }
  return RecordSet(std::move(out));
}

nlohmann::json bounded_json(const Bounded& b) {
  return nlohmann::json{{"records", ids_json(b.set)}, {"relation", to_string(b.relation)}};
}

Bounded bounded_from_json(const nlohmann::json& j, const RecordSet& universe) {
  return Bounded{resolve_ids(j.at("records"), universe), relation_from_string(j.at("relation").get<std::string>())};
}

class VirtualComposite final : public OperatorImpl {
 public:
  VirtualComposite(std::shared_ptr<const SimulatedPipeline> sim, std::string node)
      : sim_(std::move(sim)), node_(std::move(node)) {}

  RecordSet apply(std::span<const RecordSet> inputs) const override {
    return sim_->outputs(inputs[0], node_);
  }

 private:
  std::shared_ptr<const SimulatedPipeline> sim_;
  std::string node_;
};

}  // namespace

StoredProvenance build_stored_provenance(const OperatorProbe& probe, const RecordSet& input,
                                         const RecordSet& outputs) {
  Shape shape = effective_shape(probe.op().properties());
  StoredProvenance out(probe.op().name(), shape, input);
  std::set<std::string> seen;
  for (const auto& r : outputs) {
    if (!seen.insert(r.value.digest()).second) continue;
    ProvenanceResult res;
    bool scanned = false;
    if (additive(shape)) {
      try {
        res = provenance_direct_scan(probe, input, r, ProvenanceKind::kAll);
        scanned = true;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kShapeViolation) throw;
      }
    }
    if (!scanned) res = compute_p_all(probe, input, r);
    ProvenanceEntry e;
    e.output = r;
    e.complete = res.exhausted && !res.truncated;
    e.misets = std::get<AllProvenance>(res.payload).misets;
    out.put(std::move(e));
  }
  return out;
}

nlohmann::json to_json(const StoredProvenance& s) {
  auto entries = nlohmann::json::array();
  for (const auto& e : s.entries()) {
    nlohmann::json ej{{"output", id_to_json(e.output.id)}, {"complete", e.complete}};
    auto ms = nlohmann::json::array();
    for (const auto& m : e.misets) ms.push_back(ids_json(m.members));
    ej["misets"] = ms;
    if (e.uni) ej["uni"] = bounded_json(*e.uni);
    if (e.inter) ej["inter"] = bounded_json(*e.inter);
    entries.push_back(ej);
  }
  return nlohmann::json{{"name", s.name()}, {"shape", to_string(s.shape())}, {"entries", entries}};
}

StoredProvenance stored_provenance_from_json(const nlohmann::json& j, const RecordSet& input,
                                             const RecordSet& outputs) {
  try {
    StoredProvenance s(j.at("name").get<std::string>(), shape_from_string(j.at("shape").get<std::string>()),
                       input);
    for (const auto& ej : j.at("entries")) {
      ProvenanceEntry e;
      RecordId id = id_from_json(ej.at("output"));
      const Record* out = outputs.find(id);
      if (out == nullptr) throw Error(ErrorCode::kCorruptTrace, "stored provenance names unknown output " + to_string(id));
      e.output = *out;
      e.complete = ej.at("complete").get<bool>();
      for (const auto& m : ej.at("misets")) e.misets.push_back(MISet{resolve_ids(m, input)});
      if (ej.contains("uni")) e.uni = bounded_from_json(ej.at("uni"), input);
      if (ej.contains("inter")) e.inter = bounded_from_json(ej.at("inter"), input);
      s.put(std::move(e));
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kCorruptTrace, std::string("malformed stored provenance: ") + e.what());
  }
}

void SimulatedPipeline::add_stage(std::string node, std::shared_ptr<const StoredProvenance> prov,
                                  std::vector<std::string> port_sources) {
  if (port_sources.empty()) {
    if (!source_.empty() && source_ != node) {
      throw Error(ErrorCode::kInvalidPipeline, "simulated pipeline has two source stages");
    }
    source_ = node;
  }
  stages_[std::move(node)] = Stage{std::move(prov), std::move(port_sources)};
}

const StoredProvenance& SimulatedPipeline::stage(const std::string& node) const {
  auto it = stages_.find(node);
  if (it == stages_.end()) throw Error(ErrorCode::kUnknownNode, "no stored provenance for node '" + node + "'");
  return *it->second.prov;
}

const RecordSet& SimulatedPipeline::source_input() const { return stage(source_).input(); }

bool SimulatedPipeline::present(const RecordSet& source_subset, const std::string& node, const Value& v,
                                Memo& memo) const {
  auto key = std::make_pair(node, v.digest());
  if (auto it = memo.find(key); it != memo.end()) return it->second;
  auto sit = stages_.find(node);
  if (sit == stages_.end()) throw Error(ErrorCode::kUnknownNode, "no stored provenance for node '" + node + "'");
  const Stage& st = sit->second;
  const ProvenanceEntry* e = st.prov->find(v);
  bool result = false;
  if (e != nullptr) {
    if (!e->complete) {
      if (!allow_unsound_) {
        throw Error(ErrorCode::kInexactProvenance,
                    "stored provenance of node '" + node + "' is partial for " + to_string(e->output.id));
      }
      used_partial_ = true;
    }
    for (const auto& m : e->misets) {
      bool all_in = std::all_of(m.members.begin(), m.members.end(), [&](const Record& x) {
        if (st.port_sources.empty()) return source_subset.contains_id(x.id);
        if (x.id.port >= st.port_sources.size()) return false;
        return present(source_subset, st.port_sources[x.id.port], x.value, memo);
      });
      if (all_in) {
        result = true;
        break;
      }
    }
  }
  memo.emplace(key, result);
  return result;
}

bool SimulatedPipeline::member(const RecordSet& source_subset, const std::string& node, const Record& r) const {
  Memo memo;
  return present(source_subset, node, r.value, memo);
}

RecordSet SimulatedPipeline::outputs(const RecordSet& source_subset, const std::string& node) const {
  Memo memo;
  std::vector<Record> out;
  for (const auto& e : stage(node).entries()) {
    if (present(source_subset, node, e.output.value, memo)) out.push_back(e.output);
  }
  return RecordSet(std::move(out));
}

bool simulated_member(const StoredProvenance& pall1, const StoredProvenance& pall2,
                      const RecordSet& source_subset, const Record& r2, bool allow_unsound) {
  SimulatedPipeline sim;
  sim.add_stage("1", std::shared_ptr<const StoredProvenance>(&pall1, [](const StoredProvenance*) {}), {});
  sim.add_stage("2", std::shared_ptr<const StoredProvenance>(&pall2, [](const StoredProvenance*) {}), {"1"});
  sim.set_allow_unsound(allow_unsound);
  return sim.member(source_subset, "2", r2);
}

OperatorHandle compose_as_operator(std::shared_ptr<const SimulatedPipeline> sim, const std::string& node) {
  std::string name = "virtual:" + sim->source_node() + ">" + node;
  return OperatorHandle(name, 1, std::make_shared<VirtualComposite>(std::move(sim), node),
                        Backing::kVirtualComposite);
}

OperatorHandle compose_as_operator(const StoredProvenance& pall1, const StoredProvenance& pall2) {
  if (!pall1.complete() || !pall2.complete()) {
    throw Error(ErrorCode::kInexactProvenance, "virtual composite needs complete stored provenance");
  }
  auto sim = std::make_shared<SimulatedPipeline>();
  sim->add_stage(pall1.name() + "#1", std::make_shared<const StoredProvenance>(pall1), {});
  sim->add_stage(pall2.name() + "#2", std::make_shared<const StoredProvenance>(pall2), {pall1.name() + "#1"});
  return compose_as_operator(std::move(sim), pall2.name() + "#2");
}

StoredProvenance compose_pair(Shape shape1, Shape shape2, const StoredProvenance& prov1,
                              const StoredProvenance& prov2) {
  StoredProvenance out(prov1.name() + ">" + prov2.name(), compose_shapes(shape1, shape2), prov1.input());
  for (const auto& e2 : prov2.entries()) out.put(compose_entry(shape1, shape2, prov1, e2));
  return out;
}

namespace {

ProvenanceResult from_entry(const ProvenanceEntry& e, ProvenanceKind kind, std::size_t k) {
  if (e.complete) return result_from_misets(e.misets, kind, k, true, false);
  ProvenanceResult res;
  res.exact = false;
  if (kind == ProvenanceKind::kUni && e.uni) {
    res.payload = UnionProvenance{e.uni->set};
    res.relation = e.uni->relation;
    return res;
  }
  if (kind == ProvenanceKind::kInt && e.inter) {
    res.payload = IntersectionProvenance{e.inter->set};
    res.relation = e.inter->relation;
    return res;
  }
  throw Error(ErrorCode::kUnsupportedCombination,
              "shortcut composition cannot produce " + std::string(to_string(kind)) + " for these shapes");
}

}  // namespace

ProvenanceResult compose_special(Shape shape1, Shape shape2, const StoredProvenance& prov1,
                                 const StoredProvenance& prov2, const Record& r2, ProvenanceKind kind,
                                 std::size_t k) {
  if (kind == ProvenanceKind::kImp) {
    throw Error(ErrorCode::kUnsupportedCombination, "impact composition needs the full simulation");
  }
  const ProvenanceEntry* e2 = prov2.find(r2.value);
  if (e2 == nullptr) throw Error(ErrorCode::kNotProduced, "record is not an output of the second stage");
  return from_entry(compose_entry(shape1, shape2, prov1, *e2), kind, k);
}

ProvenanceResult compose_chain(const std::vector<ChainStage>& path, const Record& target,
                               ProvenanceKind kind, std::size_t k, ExecutionBudget& budget,
                               bool allow_unsound) {
  if (path.empty()) throw Error(ErrorCode::kInvalidArgument, "empty operator chain");
  if (path.size() == 1) {
    const ProvenanceEntry* e = path[0].prov->find(target.value);
    if (e == nullptr) throw Error(ErrorCode::kNotProduced, "record is not an output of the chain");
    if (!e->complete && !allow_unsound) {
      throw Error(ErrorCode::kInexactProvenance, "stored provenance is partial for " + to_string(target.id));
    }
    auto res = result_from_misets(e->misets, kind, k, e->complete, false);
    res.unsound = !e->complete;
    return res;
  }

  if (kind != ProvenanceKind::kImp) {
    StoredProvenance acc = *path[0].prov;
    Shape shape = path[0].shape;
    for (std::size_t i = 1; i < path.size(); ++i) {
      acc = compose_pair(shape, path[i].shape, acc, *path[i].prov);
      shape = compose_shapes(shape, path[i].shape);
    }
    const ProvenanceEntry* e = acc.find(target.value);
    if (e == nullptr) throw Error(ErrorCode::kNotProduced, "record is not an output of the chain");
    // Bounds alone are not an answer here; only exact shortcuts return early.
    if (e->complete) return result_from_misets(e->misets, kind, k, true, false);
  }

  auto sim = std::make_shared<SimulatedPipeline>();
  std::string prev;
  for (std::size_t i = 0; i < path.size(); ++i) {
    std::string node = std::to_string(i) + ":" + path[i].prov->name();
    sim->add_stage(node, path[i].prov, i == 0 ? std::vector<std::string>{} : std::vector<std::string>{prev});
    prev = node;
  }
  sim->set_allow_unsound(allow_unsound);
  OperatorHandle composite = compose_as_operator(sim, prev);
  ExecutionCache cache;
  OperatorProbe probe(composite, budget, &cache);
  const RecordSet& input = sim->source_input();
  ProvenanceResult res;
  switch (kind) {
    case ProvenanceKind::kAll: res = compute_p_all(probe, input, target); break;
    case ProvenanceKind::kAny: res = compute_p_any(probe, input, target, k); break;
    case ProvenanceKind::kUni: res = compute_p_uni(probe, input, target); break;
    case ProvenanceKind::kInt: res = compute_p_int(probe, input, target); break;
    case ProvenanceKind::kImp: res = compute_p_imp(probe, input, target); break;
  }
  res.unsound = sim->used_partial();
  return res;
}

}  // namespace prober
