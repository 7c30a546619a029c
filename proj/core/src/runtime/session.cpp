// Copyright 2026 The Prober Authors
// SPDX-License-Identifier: Apache-2.0

#include "prober/runtime/session.hpp"

#include <algorithm>
#include <deque>
#include <limits>

#include "prober/digest.hpp"
#include "prober/error.hpp"
#include "prober/fast_paths.hpp"
#include "prober/provenance_json.hpp"
#include "prober/runtime/operator_registry.hpp"

namespace prober::runtime {

namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kAuditEvery = 20;  // 5% of hits

bool additive(Shape s) { return s == Shape::kOneToOne || s == Shape::kOneToMany; }

bool streams(ProvenanceKind k) { return k == ProvenanceKind::kAll || k == ProvenanceKind::kAny; }

// Any without k asks for every MISet.
std::size_t requested_k(const ProvenanceRequest& req) {
  if (req.k) return *req.k;
  return req.kind == ProvenanceKind::kAny ? std::numeric_limits<std::size_t>::max() : 1;
}

ProvenanceResult run_engine(const OperatorProbe& probe, const RecordSet& input, const Record& target,
                            const ProvenanceRequest& req, const MISetCallback& on_miset) {
  if (req.bound) return enumerate_bounded(probe, input, target, *req.bound);
  std::size_t k = requested_k(req);
  switch (req.kind) {
    case ProvenanceKind::kInt: return compute_p_int(probe, input, target);
    case ProvenanceKind::kUni: return compute_p_uni(probe, input, target);
    case ProvenanceKind::kImp: return compute_p_imp(probe, input, target);
    case ProvenanceKind::kAll:
    case ProvenanceKind::kAny: {
      BudgetSnapshot before = probe.budget().snapshot();
      std::optional<std::size_t> limit;
      if (req.kind == ProvenanceKind::kAny) limit = req.k;
      auto outcome = enumerate_misets(probe, input, target, limit, on_miset);
      bool complete = outcome.end == EnumerationEnd::kExhausted;
      bool truncated = outcome.end == EnumerationEnd::kTruncated || outcome.end == EnumerationEnd::kCancelled;
      auto res = result_from_misets(std::move(outcome.misets), req.kind, k, complete, truncated);
      res.budget_spent = probe.budget().snapshot() - before;
      return res;
    }
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown provenance kind");
}

nlohmann::json comparable(nlohmann::json j) {
  j.erase("budgetSpent");
  return j;
}

}  // namespace

void validate_request(const ProvenanceRequest& req) {
  if (req.k && req.kind != ProvenanceKind::kAny) {
    throw Error(ErrorCode::kInvalidArgument, "k applies only to kind any");
  }
  if (req.k && *req.k == 0) throw Error(ErrorCode::kInvalidArgument, "k must be positive");
  if (req.bound && req.kind != ProvenanceKind::kAll) {
    throw Error(ErrorCode::kInvalidArgument, "bound applies only to kind all");
  }
  if (req.bound && *req.bound == 0) throw Error(ErrorCode::kInvalidArgument, "bound must be positive");
  if (req.bound && req.chain) throw Error(ErrorCode::kInvalidArgument, "bound is not supported with chain");
  if (req.budget && *req.budget == 0) throw Error(ErrorCode::kInvalidArgument, "budget must be positive");
  if (req.record.empty()) throw Error(ErrorCode::kInvalidArgument, "record is required");
}

std::string_view to_string(Route r) {
  switch (r) {
    case Route::kCache: return "cache";
    case Route::kWitness: return "witness";
    case Route::kDirectScan: return "direct_scan";
    case Route::kUnique: return "unique";
    case Route::kEngine: return "engine";
    case Route::kComposition: return "composition";
    case Route::kSimulation: return "simulation";
  }
  return "engine";
}

nlohmann::json to_json(const SessionStats& s) {
  return nlohmann::json{{"requests", s.requests},
                        {"cacheHits", s.cache_hits},
                        {"audits", s.audits},
                        {"auditMismatches", s.audit_mismatches},
                        {"spent", to_json(s.spent)}};
}

Session::Session(fs::path root) : root_(std::move(root)) {}

std::shared_ptr<Session::RunState> Session::state(const std::string& run_id) {
  std::lock_guard lock(mu_);
  auto it = runs_.find(run_id);
  if (it != runs_.end()) return it->second;
  fs::path dir = run_dir(root_, run_id);
  if (!fs::exists(dir / "trace.json")) throw Error(ErrorCode::kUnknownRun, "unknown run '" + run_id + "'");
  auto st = std::make_shared<RunState>();
  auto trace = std::make_shared<RunTrace>(load_trace(dir));
  std::map<std::string, PropertyClass> props;
  for (const auto& n : trace->graph.nodes) props[n.id] = trace->properties_of(n.id);
  st->ops = build_operators(trace->graph, props);
  st->trace = std::move(trace);
  runs_.emplace(run_id, st);
  return st;
}

std::shared_ptr<const RunTrace> Session::trace(const std::string& run_id) { return state(run_id)->trace; }

SessionStats Session::stats() const {
  SessionStats s;
  s.requests = requests_.load();
  s.cache_hits = hits_.load();
  s.audits = audits_.load();
  s.audit_mismatches = mismatches_.load();
  std::lock_guard lock(mu_);
  s.spent = spent_;
  return s;
}

std::string Session::cache_file(const RunTrace& t, const ProvenanceRequest& req, const std::string& node,
                                const Record& target) const {
  std::string key = "v1|" + t.run_id + "|" + node + "|" + (req.chain ? "chain" : "node") + "|" + target.digest() +
                    "|" + std::string(prober::to_string(req.kind)) + "|k=" +
                    (req.k ? std::to_string(*req.k) : "-") + "|b=" + (req.bound ? std::to_string(*req.bound) : "-") +
                    "|u=" + (req.allow_unsound ? "1" : "0");
  return (run_dir(root_, t.run_id) / "provenance" / (sha256_hex(key).substr(0, 32) + ".json")).string();
}

ProvenanceResponse Session::provenance(const std::string& run_id, const ProvenanceRequest& req, CancelToken cancel,
                                       const MISetCallback& on_miset) {
  ++requests_;
  validate_request(req);
  auto st = state(run_id);
  const RunTrace& t = *st->trace;
  const std::string node = req.node.empty() ? t.graph.sink() : req.node;
  t.graph.require_node(node);
  const Record& target = t.resolve_output(node, req.record);
  const RecordSet& universe_src = t.source;
  RecordSet universe = req.chain ? universe_src : t.flat_input(node);
  const fs::path file = cache_file(t, req, node, target);

  ProvenanceResponse resp;
  if (fs::exists(file)) {
    resp.body = read_file(file);
    resp.result = provenance_from_json(nlohmann::json::parse(resp.body), universe);
    resp.route = Route::kCache;
    resp.cache_hit = true;
    std::uint64_t hit_no = hits_.fetch_add(1);
    if (on_miset && streams(req.kind)) {
      for (const auto& m : resp.result.misets()) {
        if (!on_miset(m)) break;
      }
    }
    if (audit_ && hit_no % kAuditEvery == 0) {
      ++audits_;
      ExecutionBudget fresh(req.budget.value_or(kDefaultRequestBudget));
      ExecutionCache local;
      Route r;
      auto again = compute(*st, req, node, target, fresh, local, nullptr, r);
      if (!again.truncated && comparable(to_json(again)) != comparable(nlohmann::json::parse(resp.body))) {
        ++mismatches_;
      }
    }
    return resp;
  }

  ExecutionBudget budget(req.budget.value_or(kDefaultRequestBudget), std::move(cancel));
  resp.result = compute(*st, req, node, target, budget, st->exec_cache, on_miset, resp.route);
  resp.result.budget_spent = budget.snapshot();
  resp.body = to_json(resp.result).dump();
  if (!resp.result.truncated) write_file_atomic(file, resp.body);
  {
    std::lock_guard lock(mu_);
    spent_ += budget.snapshot();
  }
  return resp;
}

ProvenanceResult Session::compute(RunState& st, const ProvenanceRequest& req, const std::string& node,
                                  const Record& target, ExecutionBudget& budget, ExecutionCache& cache,
                                  const MISetCallback& on_miset, Route& route) {
  bool streamed = false;
  ProvenanceResult res = req.chain ? compute_chain(st, req, node, target, budget, route)
                                   : compute_node(st, req, node, target, budget, cache, on_miset, route, streamed);
  if (on_miset && !streamed && streams(req.kind)) {
    for (const auto& m : res.misets()) {
      if (!on_miset(m)) break;
    }
  }
  if (auto* any = std::get_if<AnyProvenance>(&res.payload); any != nullptr && !req.k) {
    any->requested_k = any->misets.size();
  }
  return res;
}

ProvenanceResult Session::compute_node(RunState& st, const ProvenanceRequest& req, const std::string& node,
                                       const Record& target, ExecutionBudget& budget, ExecutionCache& cache,
                                       const MISetCallback& on_miset, Route& route, bool& streamed) {
  const RunTrace& t = *st.trace;
  const OperatorHandle& op = st.ops.at(node);
  RecordSet input = t.flat_input(node);
  OperatorProbe probe(op, budget, &cache);
  const PropertyClass& props = op.properties();
  const std::size_t k = requested_k(req);

  const bool witness_helps = (req.kind == ProvenanceKind::kAny && k == 1) || req.kind == ProvenanceKind::kInt;
  if (!req.bound && witness_helps && op.spec_level().kind != SpecKind::kBlackBox) {
    try {
      WitnessSet w = witness_from_spec(op, input, target);
      if (verify_witness(probe, w, target)) {
        BudgetSnapshot before = budget.snapshot();
        MISet m = minimize_witness(probe, w, target);
        route = Route::kWitness;
        if (req.kind == ProvenanceKind::kInt) return compute_p_int(probe, input, target, &m);
        auto res = result_from_misets({m}, ProvenanceKind::kAny, 1, false, false);
        res.budget_spent = budget.snapshot() - before;
        return res;
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kMissingWitness) throw;
    }
  }

  bool downgraded;
  {
    std::lock_guard lock(st.mu);
    downgraded = st.downgraded.count(node) > 0;
  }
  if (!req.bound && !downgraded && additive(effective_shape(props))) {
    try {
      route = Route::kDirectScan;
      return provenance_direct_scan(probe, input, target, req.kind, k);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kShapeViolation) throw;
      std::lock_guard lock(st.mu);
      st.downgraded.insert(node);
    }
  }

  if (!req.bound && props.unique_miset_outputs.count(target.value.digest()) > 0) {
    if (auto res = provenance_unique(probe, input, target, req.kind, k)) {
      route = Route::kUnique;
      return *res;
    }
  }

  route = Route::kEngine;
  streamed = on_miset != nullptr && streams(req.kind) && !req.bound;
  return run_engine(probe, input, target, req, streamed ? on_miset : MISetCallback());
}

std::shared_ptr<const StoredProvenance> Session::stored(RunState& st, const std::string& node,
                                                        ExecutionBudget& budget) {
  std::lock_guard lock(st.mu);
  auto it = st.stored.find(node);
  if (it != st.stored.end()) return it->second;
  const RunTrace& t = *st.trace;
  const fs::path file = run_dir(root_, t.run_id) / "provenance" / "stored" / (node + ".json");
  RecordSet input = t.flat_input(node);
  std::shared_ptr<const StoredProvenance> out;
  if (fs::exists(file)) {
    out = std::make_shared<StoredProvenance>(
        stored_provenance_from_json(nlohmann::json::parse(read_file(file)), input, t.output(node)));
  } else {
    OperatorProbe probe(st.ops.at(node), budget, &st.exec_cache);
    auto built = std::make_shared<StoredProvenance>(build_stored_provenance(probe, input, t.output(node)));
    if (!built->complete()) return built;
    write_file_atomic(file, to_json(*built).dump());
    out = built;
  }
  st.stored.emplace(node, out);
  return out;
}

ProvenanceResult Session::compute_chain(RunState& st, const ProvenanceRequest& req, const std::string& node,
                                        const Record& target, ExecutionBudget& budget, Route& route) {
  const RunTrace& t = *st.trace;
  const std::size_t k = requested_k(req);
  if (auto path = t.graph.chain_to(node)) {
    std::vector<ChainStage> stages;
    for (const auto& n : *path) stages.push_back(ChainStage{stored(st, n, budget), effective_shape(t.properties_of(n))});
    route = Route::kComposition;
    return compose_chain(stages, target, req.kind, k, budget, req.allow_unsound);
  }

  // Not a chain: simulate every ancestor of `node` from stored provenance.
  std::set<std::string> needed{node};
  std::deque<std::string> todo{node};
  while (!todo.empty()) {
    std::string cur = todo.front();
    todo.pop_front();
    for (const auto& e : t.graph.incoming(cur)) {
      if (needed.insert(e.from).second) todo.push_back(e.from);
    }
  }
  auto sim = std::make_shared<SimulatedPipeline>();
  for (const auto& n : t.graph.topological_order()) {
    if (!needed.count(n)) continue;
    std::vector<std::string> sources;
    for (const auto& e : t.graph.incoming(n)) sources.push_back(e.from);
    sim->add_stage(n, stored(st, n, budget), sources);
  }
  sim->set_allow_unsound(req.allow_unsound);
  OperatorHandle composite = compose_as_operator(sim, node);
  ExecutionCache local;
  OperatorProbe probe(composite, budget, &local);
  route = Route::kSimulation;
  ProvenanceRequest inner = req;
  auto res = run_engine(probe, t.source, target, inner, nullptr);
  res.unsound = sim->used_partial();
  return res;
}

}  // namespace prober::runtime
