// Copyright 2026 The Prober Authors
// SPDX-License-Identifier: Apache-2.0

#include "prober/runtime/run_trace.hpp"

#include <unistd.h>

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <algorithm>
#include <fstream>
#include <sstream>

#include "prober/digest.hpp"
#include "prober/error.hpp"
#include "prober/property_inference.hpp"
#include "prober/runtime/operator_registry.hpp"

namespace prober::runtime {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kTraceVersion = 1;

std::string now_utc() {
  auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void require_safe_id(const std::string& id) {
  if (id.empty() || id == "." || id == ".." || id.find('/') != std::string::npos || id.find('\0') != std::string::npos) {
    throw Error(ErrorCode::kInvalidPipeline, "node or run id '" + id + "' cannot be used as a file name");
  }
}

std::string jsonl(const RecordSet& s) {
  std::ostringstream out;
  write_jsonl_records(out, s);
  return out.str();
}

RecordSet parse_jsonl(const std::string& bytes, const std::string& name) {
  std::istringstream in(bytes);
  try {
    return RecordSet(read_jsonl_records(in));
  } catch (const Error& e) {
    throw Error(ErrorCode::kCorruptTrace, name + ": " + e.what());
  }
}

json parse_json(const std::string& bytes, const std::string& name) {
  try {
    return json::parse(bytes);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kCorruptTrace, name + " is truncated or malformed: " + e.what());
  }
}

std::string pretty(const json& j) { return j.dump(2) + "\n"; }

}  // namespace

fs::path data_dir() {
  const char* env = std::getenv("PROBER_DATA_DIR");
  if (env != nullptr && *env != '\0') return fs::path(env);
  return fs::path(".prober");
}

fs::path run_dir(const fs::path& root, const std::string& run_id) {
  require_safe_id(run_id);
  return root / "runs" / run_id;
}

std::vector<std::string> list_runs(const fs::path& root) {
  std::vector<std::string> out;
  std::error_code ec;
  for (const auto& e : fs::directory_iterator(root / "runs", ec)) {
    if (e.is_directory() && fs::exists(e.path() / "trace.json")) out.push_back(e.path().filename().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::kCorruptTrace, "missing file " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const fs::path& p, const std::string& bytes) {
  static std::atomic<std::uint64_t> counter{0};
  fs::create_directories(p.parent_path());
  fs::path tmp = p;
  tmp += ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter.fetch_add(1));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << bytes;
    out.flush();
    if (!out) throw Error(ErrorCode::kInvalidArgument, "cannot write " + tmp.string());
  }
  fs::rename(tmp, p);
}

std::vector<RecordSet> RunTrace::inputs_of(const std::string& node) const {
  graph.require_node(node);
  auto in = graph.incoming(node);
  if (in.empty()) return {source};
  std::vector<RecordSet> out;
  for (const auto& e : in) out.push_back(output(e.from));
  return out;
}

RecordSet RunTrace::flat_input(const std::string& node) const {
  auto in = inputs_of(node);
  if (in.size() == 1) return in[0];
  return flatten_ports(in);
}

const RecordSet& RunTrace::output(const std::string& node) const {
  auto it = outputs.find(node);
  if (it == outputs.end()) throw Error(ErrorCode::kUnknownNode, "unknown node '" + node + "'");
  return it->second;
}

BudgetSnapshot RunTrace::total_budget() const {
  BudgetSnapshot total;
  for (const auto& [node, b] : budgets) total += b;
  return total;
}

PropertyClass RunTrace::properties_of(const std::string& node) const {
  auto it = properties.find(node);
  if (it != properties.end()) return it->second;
  return declared_properties(graph.require_node(node));
}

const Record& RunTrace::resolve_output(const std::string& node, const std::string& ref) const {
  const RecordSet& out = output(node);
  for (const auto& r : out) {
    if (r.digest() == ref || r.value.digest() == ref || to_string(r.id) == ref) return r;
  }
  throw Error(ErrorCode::kUnknownRecord, "unknown record '" + ref + "' at node '" + node + "'");
}

std::string config_hash(const PipelineGraph& g) { return sha256_hex(pipeline_to_json(g).dump()); }

std::string default_run_id(const PipelineGraph& g, const RecordSet& source) {
  return "r" + sha256_hex(config_hash(g) + "|" + source.content_digest()).substr(0, 12);
}

RunTrace run_pipeline(const PipelineGraph& g, const RecordSet& source, ExecutionBudget& budget, std::string run_id) {
  auto order = g.topological_order();
  for (const auto& n : g.nodes) require_safe_id(n.id);
  RunTrace t;
  t.run_id = run_id.empty() ? default_run_id(g, source) : std::move(run_id);
  require_safe_id(t.run_id);
  t.graph = g;
  t.source = source;
  t.config_hash = config_hash(g);
  t.started_at = now_utc();
  auto ops = build_operators(g);
  for (const auto& node : order) {
    auto inputs = t.inputs_of(node);
    BudgetSnapshot before = budget.snapshot();
    try {
      t.outputs[node] = apply_counted(ops.at(node), inputs, budget);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kBudgetExhausted || e.code() == ErrorCode::kCancelled) throw;
      throw Error(ErrorCode::kOperatorFailure, "node '" + node + "': " + e.what());
    } catch (const std::exception& e) {
      throw Error(ErrorCode::kOperatorFailure, "node '" + node + "': " + e.what());
    }
    t.budgets[node] = budget.snapshot() - before;
  }
  t.finished_at = now_utc();
  return t;
}

void persist_trace(const RunTrace& t, const fs::path& dir) {
  require_safe_id(t.run_id);
  std::map<std::string, std::string> files;
  files["source.jsonl"] = jsonl(t.source);
  json budgets = json::object();
  for (const auto& [node, out] : t.outputs) {
    require_safe_id(node);
    files["edges/" + node + ".jsonl"] = jsonl(out);
  }
  for (const auto& [node, b] : t.budgets) budgets["nodes"][node] = to_json(b);
  budgets["total"] = to_json(t.total_budget());
  files["budgets.json"] = pretty(budgets);
  json props = json::object();
  for (const auto& [node, p] : t.properties) props[node] = to_json(p);
  files["properties.json"] = pretty(props);

  json hashes = json::object();
  for (const auto& [name, bytes] : files) hashes[name] = sha256_hex(bytes);
  json manifest{{"version", kTraceVersion},
                {"runId", t.run_id},
                {"configHash", t.config_hash},
                {"order", t.graph.topological_order()},
                {"files", hashes}};

  fs::create_directories(dir / "edges");
  write_file_atomic(dir / "config.json", pretty(pipeline_to_json(t.graph)));
  for (const auto& [name, bytes] : files) write_file_atomic(dir / name, bytes);
  write_file_atomic(dir / "timestamps.json",
                    pretty(json{{"startedAt", t.started_at}, {"finishedAt", t.finished_at}}));
  // The manifest goes last: a trace without one is not listed.
  write_file_atomic(dir / "trace.json", pretty(manifest));
}

RunTrace load_trace(const fs::path& dir) {
  if (!fs::exists(dir / "trace.json")) {
    throw Error(ErrorCode::kUnknownRun, "no trace at " + dir.string());
  }
  json manifest = parse_json(read_file(dir / "trace.json"), "trace.json");
  RunTrace t;
  try {
    if (manifest.at("version").get<int>() != kTraceVersion) {
      throw Error(ErrorCode::kCorruptTrace, "unsupported trace version");
    }
    t.run_id = manifest.at("runId").get<std::string>();
    t.config_hash = manifest.at("configHash").get<std::string>();
    try {
      t.graph = pipeline_from_json(parse_json(read_file(dir / "config.json"), "config.json"));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kCorruptTrace) throw;
      throw Error(ErrorCode::kCorruptTrace, std::string("configDrift: config.json no longer parses: ") + e.what());
    }
    if (config_hash(t.graph) != t.config_hash) {
      throw Error(ErrorCode::kCorruptTrace, "configDrift: config.json does not match the recorded config hash");
    }
    std::map<std::string, std::string> files;
    for (const auto& [name, hash] : manifest.at("files").items()) {
      std::string bytes = read_file(dir / name);
      if (sha256_hex(bytes) != hash.get<std::string>()) {
        throw Error(ErrorCode::kCorruptTrace, "hash mismatch in " + name);
      }
      files[name] = std::move(bytes);
    }
    auto need = [&](const std::string& name) -> const std::string& {
      auto it = files.find(name);
      if (it == files.end()) throw Error(ErrorCode::kCorruptTrace, "manifest lacks " + name);
      return it->second;
    };
    t.source = parse_jsonl(need("source.jsonl"), "source.jsonl");
    for (const auto& n : t.graph.nodes) {
      std::string name = "edges/" + n.id + ".jsonl";
      t.outputs[n.id] = parse_jsonl(need(name), name);
    }
    json budgets = parse_json(need("budgets.json"), "budgets.json");
    if (budgets.contains("nodes")) {
      for (const auto& [node, b] : budgets.at("nodes").items()) t.budgets[node] = budget_from_json(b);
    }
    json props = parse_json(need("properties.json"), "properties.json");
    for (const auto& [node, p] : props.items()) t.properties[node] = property_class_from_json(p);
    if (fs::exists(dir / "timestamps.json")) {
      json ts = parse_json(read_file(dir / "timestamps.json"), "timestamps.json");
      t.started_at = ts.value("startedAt", std::string());
      t.finished_at = ts.value("finishedAt", std::string());
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kCorruptTrace, std::string("malformed trace: ") + e.what());
  }
  return t;
}

}  // namespace prober::runtime
