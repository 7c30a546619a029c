// Copyright 2026 The Prober Authors
// SPDX-License-Identifier: Apache-2.0

#include "cli/cli.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <optional>

#include "cli/oracle_suite.hpp"
#include "cli/server.hpp"
#include "prober/error.hpp"
#include "prober/harness/generator.hpp"
#include "prober/harness/instance_matrix.hpp"
#include "prober/harness/metrics.hpp"
#include "prober/harness/synthetic_ops.hpp"
#include "prober/miset.hpp"
#include "prober/property_inference.hpp"
#include "prober/provenance_json.hpp"
#include "prober/runtime/operator_registry.hpp"
#include "prober/runtime/run_trace.hpp"
#include "prober/runtime/session.hpp"

namespace prober::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Globals {
  std::string store;
  bool json = false;
};

fs::path store_root(const Globals& g) { return g.store.empty() ? runtime::data_dir() : fs::path(g.store); }

std::string set_text(const RecordSet& s) {
  std::string out = "{";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ", ";
    out += to_string(s[i].id);
  }
  return out + "}";
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kInvalidArgument, "cannot read " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kInvalidArgument, path + ": " + e.what());
  }
}

RecordSet read_records(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kInvalidArgument, "cannot read " + path);
  try {
    return RecordSet(read_jsonl_records(in));
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

json parse_params(const std::string& text) {
  if (text.empty()) return json::object();
  try {
    json j = json::parse(text);
    if (!j.is_object()) throw Error(ErrorCode::kInvalidArgument, "--params must be a JSON object");
    return j;
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("--params: ") + e.what());
  }
}

// ---- run ----

struct RunOptions {
  std::string config;
  std::string inputs;
  std::string run_id;
  std::optional<std::uint64_t> budget;
  bool infer = false;
  std::size_t trials = kDefaultTrials;
  std::uint64_t seed = 1;
};

// Nodes with a declared shape keep it; the rest get sampled evidence over
// their recorded inputs.
void infer_nodes(runtime::RunTrace& t, std::size_t trials, std::uint64_t seed) {
  auto ops = runtime::build_operators(t.graph);
  for (const auto& n : t.graph.nodes) {
    if (n.declared_shape) continue;
    ExecutionBudget budget;
    ExecutionCache cache;
    OperatorProbe probe(ops.at(n.id), budget, &cache);
    t.properties[n.id] = infer_properties(probe, t.flat_input(n.id), trials, seed).properties;
  }
}

int cmd_run(const Globals& g, const RunOptions& o, std::ostream& out) {
  PipelineGraph graph = pipeline_from_json(read_json_file(o.config));
  RecordSet source = read_records(o.inputs);
  ExecutionBudget budget(o.budget);
  runtime::RunTrace t = runtime::run_pipeline(graph, source, budget, o.run_id);
  if (o.infer) infer_nodes(t, o.trials, o.seed);
  const fs::path dir = runtime::run_dir(store_root(g), t.run_id);
  runtime::persist_trace(t, dir);

  if (g.json) {
    json outputs = json::object();
    for (const auto& [node, recs] : t.outputs) outputs[node] = recs.size();
    out << json{{"runId", t.run_id}, {"dir", dir.string()}, {"outputs", outputs}, {"budget", to_json(t.total_budget())}}
               .dump(2)
        << "\n";
  } else {
    out << "run " << t.run_id << ": " << graph.nodes.size() << " nodes, " << t.total_budget().executions
        << " executions\n";
    for (const auto& n : graph.nodes) out << "  " << n.id << "  " << t.output(n.id).size() << " records\n";
    out << "stored in " << dir.string() << "\n";
  }
  return 0;
}

// ---- trace ----

struct TraceOptions {
  std::string run;
  std::string record;
  std::string node;
  std::string kind = "all";
  std::optional<std::size_t> k;
  std::optional<std::size_t> bound;
  std::optional<std::uint64_t> budget;
  bool chain = false;
  bool allow_unsound = false;
};

void print_payload(const ProvenanceResult& r, bool misets_printed, std::ostream& out) {
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, AllProvenance> || std::is_same_v<T, AnyProvenance>) {
          if (!misets_printed) {
            for (const auto& m : p.misets) out << set_text(m.members) << "\n";
          }
        } else if constexpr (std::is_same_v<T, ImpactProvenance>) {
          for (const auto& e : p.entries) out << to_string(e.record.id) << "  " << e.count << "\n";
        } else {
          out << set_text(p.records) << "\n";
        }
      },
      r.payload);
}

std::string status_line(const ProvenanceResult& r, runtime::Route route) {
  std::string s = r.exact ? "exact" : "bound (" + std::string(to_string(r.relation)) + ")";
  if (r.kind() == ProvenanceKind::kAll || r.kind() == ProvenanceKind::kAny) {
    s += ", " + std::to_string(r.misets().size()) + " MISets";
    if (r.exhausted) s += ", exhausted";
  }
  if (r.truncated) s += ", truncated";
  if (r.unsound) s += ", unsound";
  s += ", " + std::to_string(r.budget_spent.executions) + " executions";
  if (r.budget_spent.virtual_evaluations) {
    s += ", " + std::to_string(r.budget_spent.virtual_evaluations) + " virtual evaluations";
  }
  s += ", route " + std::string(runtime::to_string(route));
  return s;
}

int cmd_trace(const Globals& g, const TraceOptions& o, std::ostream& out, std::ostream& err) {
  runtime::ProvenanceRequest req;
  req.node = o.node;
  req.record = o.record;
  req.kind = provenance_kind_from_string(o.kind);
  req.k = o.k;
  req.bound = o.bound;
  req.budget = o.budget;
  req.chain = o.chain;
  req.allow_unsound = o.allow_unsound;
  runtime::validate_request(req);

  runtime::Session session(store_root(g));
  auto t = session.trace(o.run);
  const std::string node = req.node.empty() ? t->graph.sink() : req.node;
  const Record& target = t->resolve_output(node, req.record);

  const bool streams = !g.json && (req.kind == ProvenanceKind::kAll || req.kind == ProvenanceKind::kAny);
  if (!g.json) out << o.kind << " provenance of " << to_string(target.id) << " at " << node << "\n";
  MISetCallback print = [&](const MISet& m) {
    out << set_text(m.members) << "\n" << std::flush;
    return true;
  };
  auto resp = session.provenance(o.run, req, nullptr, streams ? print : MISetCallback{});

  if (g.json) {
    out << resp.body << "\n";
  } else {
    print_payload(resp.result, streams, out);
    out << status_line(resp.result, resp.route) << "\n";
  }
  if (resp.result.truncated) {
    err << "budget exhausted after " << resp.result.budget_spent.executions
        << " executions; the result is partial (raise --budget)\n";
    return 1;
  }
  return 0;
}

// ---- infer-props ----

struct InferOptions {
  std::string op;
  std::size_t trials = kDefaultTrials;
  std::uint64_t seed = 1;
  std::string run;
  std::string params;
  std::string pool;
  std::size_t pool_docs = 10;
};

int cmd_infer(const Globals& g, const InferOptions& o, std::ostream& out) {
  std::optional<OperatorHandle> op;
  RecordSet pool;
  if (!o.run.empty()) {
    runtime::Session session(store_root(g));
    auto t = session.trace(o.run);
    t->graph.require_node(o.op);
    op = runtime::build_operators(t->graph).at(o.op);
    pool = t->flat_input(o.op);
  } else {
    op = harness::make_synthetic_operator(o.op, o.op, parse_params(o.params));
    if (!o.pool.empty()) {
      pool = read_records(o.pool);
    } else {
      harness::GeneratorOptions gen;
      gen.n_docs = o.pool_docs;
      gen.seed = o.seed;
      pool = harness::generate_synthetic_run(gen).source;
    }
  }
  if (!o.pool.empty() && !o.run.empty()) pool = read_records(o.pool);

  ExecutionBudget budget;
  ExecutionCache cache;
  OperatorProbe probe(*op, budget, &cache);
  InferenceResult res = infer_properties(probe, pool, o.trials, o.seed);

  json replayed = json::object();
  if (res.report.monotonicity.counterexample) {
    replayed["monotonicity"] = replay(probe, *res.report.monotonicity.counterexample);
  }
  if (res.report.additivity.counterexample) {
    replayed["additivity"] = replay(probe, *res.report.additivity.counterexample);
  }
  json j{{"op", o.op},
         {"trials", o.trials},
         {"seed", o.seed},
         {"poolSize", pool.size()},
         {"properties", to_json(res.properties)},
         {"report", to_json(res.report)},
         {"replayed", replayed},
         {"budgetSpent", to_json(budget.snapshot())}};
  out << j.dump(2) << "\n";
  return 0;
}

// ---- oracle ----

struct OracleOptions {
  std::string emit_matrix;
  std::string matrix;
};

int cmd_oracle(const Globals& g, const OracleOptions& o, std::ostream& out) {
  std::vector<harness::Instance> instances =
      o.matrix.empty() ? harness::builtin_instance_matrix() : harness::matrix_from_json(read_json_file(o.matrix));
  if (!o.emit_matrix.empty()) {
    runtime::write_file_atomic(o.emit_matrix, harness::matrix_to_json(instances).dump(2) + "\n");
  }
  OracleOutcome res = run_oracle_suite(instances);
  const bool agree = res.disagreements.empty();
  if (g.json) {
    out << json{{"instances", res.instances}, {"agree", agree}, {"disagreements", res.disagreements}}.dump(2) << "\n";
  } else {
    for (const auto& d : res.disagreements) out << "DISAGREE " << d << "\n";
    if (agree) {
      out << "all instances agree (" << res.instances << " instances)\n";
    } else {
      out << res.disagreements.size() << " disagreements over " << res.instances << " instances\n";
    }
  }
  return agree ? 0 : 2;
}

// ---- bench ----

struct BenchOptions {
  std::size_t min_t = 3;
  std::size_t max_t = 5;
};

template <typename Fn>
json timed(Fn&& fn) {
  ExecutionBudget budget;
  ExecutionCache cache;
  auto start = std::chrono::steady_clock::now();
  fn(budget, cache);
  auto us = std::chrono::duration_cast<std::chrono::microseconds>(std::chrono::steady_clock::now() - start).count();
  return json{{"executions", budget.executions()}, {"micros", us}};
}

json bench_threshold(std::size_t t) {
  const std::size_t n = t + 2;
  auto op = harness::make_synthetic_operator("th", "support_threshold", {{"threshold", t}, {"claim", "yes"}});
  std::vector<Record> recs;
  for (std::size_t i = 0; i < n; ++i) recs.push_back(make_text_record("s" + std::to_string(i), "yes"));
  RecordSet input(std::move(recs));
  Record target = make_text_record("claim:yes", "yes");

  json j{{"t", t}, {"n", n}};
  j["findAny"] = timed([&](ExecutionBudget& b, ExecutionCache& c) { find_any_miset(OperatorProbe(op, b, &c), input, target); });
  j["pInt"] = timed([&](ExecutionBudget& b, ExecutionCache& c) { compute_p_int(OperatorProbe(op, b, &c), input, target); });
  harness::MetricInputs mi;
  j["pAll"] = timed([&](ExecutionBudget& b, ExecutionCache& c) {
    mi.pall = compute_p_all(OperatorProbe(op, b, &c), input, target).misets();
  });
  j["bounded"] = timed([&](ExecutionBudget& b, ExecutionCache& c) {
    enumerate_bounded(OperatorProbe(op, b, &c), input, target, t);
  });
  ExecutionBudget budget;
  OperatorProbe probe(op, budget);
  mi.any = compute_p_any(probe, input, target, 5).misets();
  mi.puni = union_of(mi.pall);
  mi.pint = intersection_of(mi.pall);
  mi.imp = impact_of(mi.pall);
  j["pAllSize"] = mi.pall.size();
  j["metrics"] = harness::to_json(harness::compute_metrics(mi));
  return j;
}

json bench_matrix() {
  auto instances = harness::builtin_instance_matrix();
  std::uint64_t executions = 0;
  auto start = std::chrono::steady_clock::now();
  for (const auto& inst : instances) {
    auto op = inst.op();
    ExecutionBudget budget;
    ExecutionCache cache;
    enumerate_misets(OperatorProbe(op, budget, &cache), inst.input, inst.target);
    executions += budget.executions();
  }
  auto us = std::chrono::duration_cast<std::chrono::microseconds>(std::chrono::steady_clock::now() - start).count();
  return json{{"instances", instances.size()}, {"executions", executions}, {"micros", us}};
}

int cmd_bench(const Globals& g, const BenchOptions& o, std::ostream& out) {
  if (o.min_t == 0 || o.min_t > o.max_t || o.max_t > 8) {
    throw Error(ErrorCode::kInvalidArgument, "need 1 <= --min-t <= --max-t <= 8");
  }
  json rows = json::array();
  for (std::size_t t = o.min_t; t <= o.max_t; ++t) rows.push_back(bench_threshold(t));
  json matrix = bench_matrix();
  if (g.json) {
    out << json{{"threshold", rows}, {"matrix", matrix}}.dump(2) << "\n";
    return 0;
  }
  out << "threshold family (N = T + 2), executions / microseconds\n";
  out << "  T  N  |P_all|  find_any    p_int       p_all       bounded\n";
  auto cell = [](const json& c) {
    std::string s = std::to_string(c["executions"].get<std::uint64_t>()) + "/" +
                    std::to_string(c["micros"].get<long long>());
    s.resize(std::max<std::size_t>(s.size(), 11), ' ');
    return s;
  };
  for (const auto& r : rows) {
    out << "  " << r["t"].get<std::size_t>() << "  " << r["n"].get<std::size_t>() << "  " << r["pAllSize"].get<std::size_t>()
        << "\t   " << cell(r["findAny"]) << " " << cell(r["pInt"]) << " " << cell(r["pAll"]) << " " << cell(r["bounded"])
        << "\n";
  }
  out << "instance matrix: " << matrix["instances"].get<std::size_t>() << " instances, "
      << matrix["executions"].get<std::uint64_t>() << " executions, " << matrix["micros"].get<long long>()
      << " microseconds\n";
  return 0;
}

// ---- serve ----

std::atomic<service::Server*> g_server{nullptr};

extern "C" void on_signal(int) {
  if (auto* s = g_server.load()) s->stop();
}

int cmd_serve(const Globals& g, const std::string& addr, bool audit, std::ostream& out) {
  auto [host, port] = service::parse_addr(addr);
  runtime::Session session(store_root(g));
  session.set_audit(audit);
  service::Server server(session);
  if (!server.bind(host, port)) throw Error(ErrorCode::kInvalidArgument, "cannot listen on " + addr);
  out << "listening on http://" << host << ":" << port << " (store " << session.root().string() << ")\n"
      << std::flush;
  g_server.store(&server);
  auto prev_int = std::signal(SIGINT, on_signal);
  auto prev_term = std::signal(SIGTERM, on_signal);
  server.listen_after_bind();
  std::signal(SIGINT, prev_int);
  std::signal(SIGTERM, prev_term);
  g_server.store(nullptr);
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Provenance for black-box monotonic operators", "prober"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--store", g.store, "Run store directory (default $PROBER_DATA_DIR or ./.prober)");
  app.add_flag("--json", g.json, "Machine-readable output");

  RunOptions run_o;
  auto* run = app.add_subcommand("run", "Execute a pipeline once and record its trace");
  run->add_option("config", run_o.config, "Pipeline JSON")->required();
  run->add_option("inputs", run_o.inputs, "Source records, JSON Lines")->required();
  run->add_option("--run-id", run_o.run_id, "Run id (default derived from config and inputs)");
  run->add_option("--budget", run_o.budget, "Execution limit");
  run->add_flag("--infer", run_o.infer, "Sample property classes of undeclared nodes");
  run->add_option("--trials", run_o.trials, "Trials per property check");
  run->add_option("--seed", run_o.seed, "Sampling seed");

  TraceOptions trace_o;
  auto* trace = app.add_subcommand("trace", "Provenance of one output record");
  trace->add_option("runId", trace_o.run, "Run id")->required();
  trace->add_option("record", trace_o.record, "Record id, record digest, or value digest")->required();
  trace->add_option("--node", trace_o.node, "Node (default the sink)");
  trace->add_option("--kind", trace_o.kind, "Provenance kind")
      ->check(CLI::IsMember({"all", "any", "uni", "int", "imp"}));
  trace->add_option("--k", trace_o.k, "Number of MISets (any)");
  trace->add_option("--bound", trace_o.bound, "MISet size bound (all)");
  trace->add_option("--budget", trace_o.budget, "Execution limit (default 10000)");
  trace->add_flag("--chain", trace_o.chain, "Compose stored provenance back to the source");
  trace->add_flag("--allow-unsound", trace_o.allow_unsound, "Compose over partial stored provenance");

  InferOptions infer_o;
  auto* infer = app.add_subcommand("infer-props", "Sample an operator's property class");
  infer->add_option("--op", infer_o.op, "Synthetic operator kind, or a node id with --run")->required();
  infer->add_option("--trials", infer_o.trials, "Trials per check");
  infer->add_option("--seed", infer_o.seed, "Sampling seed");
  infer->add_option("--run", infer_o.run, "Use a node of this run and its recorded inputs");
  infer->add_option("--params", infer_o.params, "Operator parameters as a JSON object");
  infer->add_option("--pool", infer_o.pool, "Sample pool, JSON Lines");
  infer->add_option("--pool-docs", infer_o.pool_docs, "Size of the generated pool when no --pool or --run");

  OracleOptions oracle_o;
  auto* oracle = app.add_subcommand("oracle", "Compare the engine with brute force on the instance matrix");
  oracle->add_option("--emit-matrix", oracle_o.emit_matrix, "Also write the matrix with expected P_all");
  oracle->add_option("--matrix", oracle_o.matrix, "Read instances from a matrix file");

  BenchOptions bench_o;
  auto* bench = app.add_subcommand("bench", "Execution counts and timings on built-in workloads");
  bench->add_option("--min-t", bench_o.min_t, "Smallest threshold");
  bench->add_option("--max-t", bench_o.max_t, "Largest threshold");

  std::string addr = service::kDefaultAddr;
  bool audit = false;
  auto* serve = app.add_subcommand("serve", "HTTP service for the explorer");
  serve->add_option("--addr", addr, "host:port");
  serve->add_flag("--audit", audit, "Recompute every 20th cache hit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*run) return cmd_run(g, run_o, out);
    if (*trace) return cmd_trace(g, trace_o, out, err);
    if (*infer) return cmd_infer(g, infer_o, out);
    if (*oracle) return cmd_oracle(g, oracle_o, out);
    if (*bench) return cmd_bench(g, bench_o, out);
    if (*serve) return cmd_serve(g, addr, audit, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return is_user_error(e.code()) ? 1 : 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace prober::cli
