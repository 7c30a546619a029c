// Copyright 2026 The Prober Authors
// SPDX-License-Identifier: Apache-2.0

#include "prober/pipeline.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <set>

#include "prober/error.hpp"

namespace prober {

const NodeConfig* PipelineGraph::node(const std::string& id) const {
  for (const auto& n : nodes) {
    if (n.id == id) return &n;
  }
  return nullptr;
}

const NodeConfig& PipelineGraph::require_node(const std::string& id) const {
  const NodeConfig* n = node(id);
  if (n == nullptr) throw Error(ErrorCode::kUnknownNode, "unknown node '" + id + "'");
  return *n;
}

std::vector<Edge> PipelineGraph::incoming(const std::string& id) const {
  std::vector<Edge> out;
  for (const auto& e : edges) {
    if (e.to == id) out.push_back(e);
  }
  std::stable_sort(out.begin(), out.end(), [](const Edge& a, const Edge& b) { return a.port < b.port; });
  return out;
}

std::vector<std::string> PipelineGraph::successors(const std::string& id) const {
  std::vector<std::string> out;
  for (const auto& e : edges) {
    if (e.from == id) out.push_back(e.to);
  }
  return out;
}

std::size_t PipelineGraph::arity(const std::string& id) const {
  auto in = incoming(id);
  if (in.empty()) return 1;
  return static_cast<std::size_t>(in.back().port) + 1;
}

namespace {

void require_valid(const PipelineGraph& g) {
  auto violations = validate_pipeline(g);
  if (!violations.empty()) {
    std::string msg;
    for (const auto& v : violations) msg += (msg.empty() ? "" : "; ") + v;
    throw Error(ErrorCode::kInvalidPipeline, msg);
  }
}

std::vector<std::string> nodes_without(const PipelineGraph& g, bool incoming_edges) {
  std::vector<std::string> out;
  for (const auto& n : g.nodes) {
    bool has = std::any_of(g.edges.begin(), g.edges.end(), [&](const Edge& e) {
      return (incoming_edges ? e.to : e.from) == n.id;
    });
    if (!has) out.push_back(n.id);
  }
  return out;
}

// Kahn's algorithm; ties broken by declaration order. Returns fewer ids than
// nodes when a cycle exists.
std::vector<std::string> kahn(const PipelineGraph& g) {
  std::map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) position.emplace(g.nodes[i].id, i);
  std::vector<std::size_t> indegree(g.nodes.size(), 0);
  for (const auto& e : g.edges) {
    auto it = position.find(e.to);
    if (it != position.end() && position.count(e.from)) ++indegree[it->second];
  }
  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
  for (std::size_t i = 0; i < indegree.size(); ++i) {
    if (indegree[i] == 0) ready.push(i);
  }
  std::vector<std::string> order;
  while (!ready.empty()) {
    std::size_t i = ready.top();
    ready.pop();
    order.push_back(g.nodes[i].id);
    for (const auto& e : g.edges) {
      if (e.from != g.nodes[i].id) continue;
      auto it = position.find(e.to);
      if (it != position.end() && --indegree[it->second] == 0) ready.push(it->second);
    }
  }
  return order;
}

}  // namespace

std::string PipelineGraph::source() const {
  require_valid(*this);
  return nodes_without(*this, true).front();
}

std::string PipelineGraph::sink() const {
  require_valid(*this);
  return nodes_without(*this, false).front();
}

std::vector<std::string> PipelineGraph::topological_order() const {
  require_valid(*this);
  return kahn(*this);
}

std::optional<std::vector<std::string>> PipelineGraph::chain_to(const std::string& id) const {
  require_node(id);
  std::vector<std::string> path{id};
  std::string cur = id;
  for (std::size_t guard = 0; guard <= nodes.size(); ++guard) {
    auto in = incoming(cur);
    if (in.empty()) {
      std::reverse(path.begin(), path.end());
      return path;
    }
    if (in.size() != 1) return std::nullopt;
    cur = in.front().from;
    path.push_back(cur);
  }
  return std::nullopt;
}

std::vector<std::string> validate_pipeline(const PipelineGraph& g) {
  std::vector<std::string> out;
  if (g.nodes.empty()) {
    out.push_back("empty pipeline");
    return out;
  }
  std::set<std::string> ids;
  for (const auto& n : g.nodes) {
    if (!ids.insert(n.id).second) out.push_back("duplicate node '" + n.id + "'");
  }
  for (const auto& e : g.edges) {
    if (!ids.count(e.from)) out.push_back("edge from unknown node '" + e.from + "'");
    if (!ids.count(e.to)) out.push_back("edge to unknown node '" + e.to + "'");
  }
  bool self_loop = std::any_of(g.edges.begin(), g.edges.end(),
                               [](const Edge& e) { return e.from == e.to; });
  if (self_loop || kahn(g).size() != g.nodes.size()) out.push_back("cycle");

  auto sources = nodes_without(g, true);
  auto sinks = nodes_without(g, false);
  if (sources.empty()) out.push_back("no source");
  if (sources.size() > 1) out.push_back("multiple sources");
  if (sinks.empty()) out.push_back("no sink");
  if (sinks.size() > 1) out.push_back("multiple sinks");

  for (const auto& n : g.nodes) {
    std::map<std::uint32_t, std::size_t> per_port;
    for (const auto& e : g.edges) {
      if (e.to == n.id) ++per_port[e.port];
    }
    if (per_port.empty()) continue;
    std::uint32_t max_port = per_port.rbegin()->first;
    for (std::uint32_t p = 0; p <= max_port; ++p) {
      auto it = per_port.find(p);
      if (it == per_port.end()) {
        out.push_back("node '" + n.id + "' port " + std::to_string(p) + " has no incoming edge");
      } else if (it->second > 1) {
        out.push_back("node '" + n.id + "' port " + std::to_string(p) + " has " +
                      std::to_string(it->second) + " incoming edges");
      }
    }
  }
  return out;
}

nlohmann::json spec_level_to_json(const SpecLevel& s) {
  nlohmann::json j{{"kind", to_string(s.kind)}};
  if (!s.witness_table.empty()) j["witness_table"] = s.witness_table;
  if (!s.rules.empty()) {
    auto rules = nlohmann::json::array();
    for (const auto& r : s.rules) {
      nlohmann::json rj{{"output_field", r.output_field}, {"input_field", r.input_field}};
      if (r.port) rj["port"] = *r.port;
      rules.push_back(rj);
    }
    j["rules"] = rules;
  }
  if (!s.annotation.empty()) j["annotation"] = s.annotation;
  return j;
}

SpecLevel spec_level_from_json(const nlohmann::json& j) {
  SpecLevel s;
  if (j.is_null()) return s;
  if (j.is_string()) {
    s.kind = spec_kind_from_string(j.get<std::string>());
    return s;
  }
  if (!j.is_object()) throw Error(ErrorCode::kInvalidPipeline, "spec_level must be a string or object");
  s.kind = spec_kind_from_string(j.value("kind", std::string("black_box")));
  if (j.contains("witness_table")) {
    for (const auto& [out, ins] : j.at("witness_table").items()) {
      s.witness_table[out] = ins.get<std::vector<std::string>>();
    }
  }
  if (j.contains("witnesses")) {
    for (const auto& w : j.at("witnesses")) {
      s.witness_table[w.at("output_id").get<std::string>()] =
          w.at("input_ids").get<std::vector<std::string>>();
    }
  }
  if (j.contains("rules")) {
    for (const auto& r : j.at("rules")) {
      FieldMappingRule rule{r.at("output_field").get<std::string>(),
                            r.at("input_field").get<std::string>(), std::nullopt};
      if (r.contains("port")) rule.port = r.at("port").get<std::uint32_t>();
      s.rules.push_back(std::move(rule));
    }
  }
  s.annotation = j.value("annotation", std::string());
  return s;
}

PipelineGraph pipeline_from_json(const nlohmann::json& j) {
  try {
    PipelineGraph g;
    for (const auto& n : j.at("nodes")) {
      NodeConfig cfg;
      cfg.id = n.at("id").get<std::string>();
      cfg.kind = n.at("kind").get<std::string>();
      if (n.contains("params")) cfg.params = n.at("params");
      if (n.contains("spec_level")) cfg.spec_level = spec_level_from_json(n.at("spec_level"));
      if (n.contains("declared_shape") && !n.at("declared_shape").is_null()) {
        cfg.declared_shape = shape_from_string(n.at("declared_shape").get<std::string>());
      }
      g.nodes.push_back(std::move(cfg));
    }
    if (j.contains("edges")) {
      for (const auto& e : j.at("edges")) {
        g.edges.push_back(Edge{e.at("from").get<std::string>(), e.at("to").get<std::string>(),
                               e.value("port", std::uint32_t{0})});
      }
    }
    return g;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidPipeline, std::string("malformed pipeline config: ") + e.what());
  }
}

nlohmann::json pipeline_to_json(const PipelineGraph& g) {
  auto nodes = nlohmann::json::array();
  for (const auto& n : g.nodes) {
    nlohmann::json nj{{"id", n.id}, {"kind", n.kind}, {"params", n.params},
                      {"spec_level", spec_level_to_json(n.spec_level)}};
    if (n.declared_shape) nj["declared_shape"] = to_string(*n.declared_shape);
    nodes.push_back(nj);
  }
  auto edges = nlohmann::json::array();
  for (const auto& e : g.edges) edges.push_back({{"from", e.from}, {"to", e.to}, {"port", e.port}});
  return nlohmann::json{{"nodes", nodes}, {"edges", edges}};
}

}  // namespace prober
