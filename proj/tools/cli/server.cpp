// Copyright 2026 The Prober Authors
// SPDX-License-Identifier: Apache-2.0

#include "cli/server.hpp"

#include <httplib.h>

#include <atomic>
#include <chrono>
#include <thread>

#include "prober/provenance_json.hpp"
#include "prober/property_inference.hpp"

namespace prober::service {
namespace {

using nlohmann::json;

constexpr std::size_t kMaxPageSize = 1000;
constexpr auto kDisconnectPoll = std::chrono::milliseconds(5);

json error_body(ErrorCode code, const std::string& message) {
  return json{{"error", std::string(to_string(code))}, {"message", message}};
}

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, const Error& e) {
  send_json(res, http_status(e.code()), error_body(e.code(), e.what()));
}

// Maps library errors onto status codes for every route.
template <typename Fn>
void guarded(httplib::Response& res, Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    send_error(res, e);
  } catch (const json::exception& e) {
    send_json(res, 400, error_body(ErrorCode::kInvalidArgument, e.what()));
  } catch (const std::exception& e) {
    send_json(res, 500, json{{"error", "internal"}, {"message", e.what()}});
  }
}

std::size_t query_size(const httplib::Request& req, const std::string& key, std::size_t fallback) {
  if (!req.has_param(key)) return fallback;
  const std::string v = req.get_param_value(key);
  std::size_t pos = 0;
  unsigned long long n = 0;
  try {
    n = std::stoull(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != v.size() || v[0] == '-') {
    throw Error(ErrorCode::kInvalidArgument, "query parameter " + key + " must be a non-negative integer");
  }
  return static_cast<std::size_t>(n);
}

json run_summary(runtime::Session& session, const std::string& id) {
  try {
    auto t = session.trace(id);
    return json{{"id", id},
                {"sink", t->graph.sink()},
                {"nodes", t->graph.nodes.size()},
                {"configHash", t->config_hash},
                {"startedAt", t->started_at},
                {"finishedAt", t->finished_at}};
  } catch (const Error& e) {
    return json{{"id", id}, {"error", std::string(to_string(e.code()))}, {"message", e.what()}};
  }
}

json graph_body(const runtime::RunTrace& t) {
  auto nodes = json::array();
  for (const auto& n : t.graph.nodes) {
    nodes.push_back(json{{"id", n.id},
                         {"outputs", t.output(n.id).size()},
                         {"properties", to_json(t.properties_of(n.id))},
                         {"budget", to_json(t.budgets.count(n.id) ? t.budgets.at(n.id) : BudgetSnapshot{})}});
  }
  return json{{"runId", t.run_id},
              {"source", t.graph.source()},
              {"sink", t.graph.sink()},
              {"graph", pipeline_to_json(t.graph)},
              {"nodes", nodes}};
}

json outputs_page(const runtime::RunTrace& t, const std::string& node, std::size_t page, std::size_t size) {
  const RecordSet& out = t.output(node);
  auto records = json::array();
  const std::size_t begin = page * size;
  for (std::size_t i = begin; i < out.size() && i < begin + size; ++i) {
    const Record& r = out[i];
    json j = record_to_json(r);
    j["digest"] = r.digest();
    records.push_back(std::move(j));
  }
  return json{{"runId", t.run_id}, {"node", node},     {"page", page},
              {"pageSize", size},  {"total", out.size()}, {"records", records}};
}

}  // namespace

std::pair<std::string, int> parse_addr(const std::string& addr) {
  auto colon = addr.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == addr.size()) {
    throw Error(ErrorCode::kInvalidArgument, "address must look like host:port, got '" + addr + "'");
  }
  const std::string port_text = addr.substr(colon + 1);
  int port = 0;
  std::size_t pos = 0;
  try {
    port = std::stoi(port_text, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != port_text.size() || port < 0 || port > 65535) {
    throw Error(ErrorCode::kInvalidArgument, "bad port '" + port_text + "'");
  }
  return {addr.substr(0, colon), port};
}

runtime::ProvenanceRequest request_from_json(const json& body) {
  if (!body.is_object()) throw Error(ErrorCode::kInvalidArgument, "request body must be a JSON object");
  static const std::set<std::string> known = {"node", "record", "kind", "k", "bound", "budget", "chain", "allowUnsound"};
  for (const auto& [key, _] : body.items()) {
    if (!known.count(key)) throw Error(ErrorCode::kInvalidArgument, "unknown request field '" + key + "'");
  }
  auto str = [&](const char* key) {
    const auto& v = body.at(key);
    if (!v.is_string()) throw Error(ErrorCode::kInvalidArgument, std::string(key) + " must be a string");
    return v.get<std::string>();
  };
  auto count = [&](const char* key) -> std::uint64_t {
    const auto& v = body.at(key);
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
      throw Error(ErrorCode::kInvalidArgument, std::string(key) + " must be a non-negative integer");
    }
    return v.get<std::uint64_t>();
  };
  auto flag = [&](const char* key) {
    const auto& v = body.at(key);
    if (!v.is_boolean()) throw Error(ErrorCode::kInvalidArgument, std::string(key) + " must be a boolean");
    return v.get<bool>();
  };
  if (!body.contains("record")) throw Error(ErrorCode::kInvalidArgument, "missing field 'record'");
  if (!body.contains("kind")) throw Error(ErrorCode::kInvalidArgument, "missing field 'kind'");

  runtime::ProvenanceRequest req;
  req.record = str("record");
  req.kind = provenance_kind_from_string(str("kind"));
  if (body.contains("node")) req.node = str("node");
  if (body.contains("k")) req.k = count("k");
  if (body.contains("bound")) req.bound = count("bound");
  if (body.contains("budget")) req.budget = count("budget");
  if (body.contains("chain")) req.chain = flag("chain");
  if (body.contains("allowUnsound")) req.allow_unsound = flag("allowUnsound");
  runtime::validate_request(req);
  return req;
}

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnknownRun:
    case ErrorCode::kUnknownRecord:
    case ErrorCode::kUnknownNode:
      return 404;
    case ErrorCode::kBudgetExhausted:
      return 409;
    default:
      return is_user_error(code) ? 400 : 500;
  }
}

std::string sse_event(const std::string& event, const std::string& data) {
  return "event: " + event + "\ndata: " + data + "\n\n";
}

struct Server::Impl {
  runtime::Session& session;
  httplib::Server http;

  explicit Impl(runtime::Session& s) : session(s) { routes(); }

  void routes() {
    http.set_default_headers({{"Access-Control-Allow-Origin", "*"}});

    http.Get("/runs", [this](const httplib::Request&, httplib::Response& res) {
      guarded(res, [&] {
        auto runs = json::array();
        for (const auto& id : session.runs()) runs.push_back(run_summary(session, id));
        send_json(res, 200, json{{"runs", runs}});
      });
    });

    http.Get("/runs/:id/graph", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] { send_json(res, 200, graph_body(*session.trace(req.path_params.at("id")))); });
    });

    http.Get("/runs/:id/nodes/:node/outputs", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        std::size_t page = query_size(req, "page", 0);
        std::size_t size = query_size(req, "pageSize", kDefaultPageSize);
        if (size == 0 || size > kMaxPageSize) {
          throw Error(ErrorCode::kInvalidArgument, "pageSize must be in 1.." + std::to_string(kMaxPageSize));
        }
        auto t = session.trace(req.path_params.at("id"));
        send_json(res, 200, outputs_page(*t, req.path_params.at("node"), page, size));
      });
    });

    http.Get("/stats", [this](const httplib::Request&, httplib::Response& res) {
      guarded(res, [&] { send_json(res, 200, runtime::to_json(session.stats())); });
    });

    http.Post("/runs/:id/provenance", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] { provenance(req.path_params.at("id"), req.body, res); });
    });
  }

  void provenance(const std::string& run, const std::string& raw, httplib::Response& res) {
    json body;
    try {
      body = json::parse(raw);
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::kInvalidArgument, std::string("request body is not JSON: ") + e.what());
    }
    runtime::ProvenanceRequest req = request_from_json(body);
    // Resolve up front so unknown runs and records fail before a stream opens.
    auto t = session.trace(run);
    t->resolve_output(req.node.empty() ? t->graph.sink() : req.node, req.record);

    if (req.kind != ProvenanceKind::kAll && req.kind != ProvenanceKind::kAny) {
      auto resp = session.provenance(run, req);
      res.status = resp.result.truncated ? 409 : 200;
      res.set_content(resp.body, "application/json");
      return;
    }

    res.set_header("Cache-Control", "no-cache");
    res.set_chunked_content_provider(
        "text/event-stream", [this, run, req](std::size_t, httplib::DataSink& sink) {
          stream(run, req, sink);
          return true;
        });
  }

  void stream(const std::string& run, const runtime::ProvenanceRequest& req, httplib::DataSink& sink) {
    CancelToken cancel = make_cancel_token();
    std::atomic<bool> finished{false};
    // Polls the socket so a closed client stops the search between executions.
    std::thread watcher([&] {
      while (!finished.load()) {
        if (!sink.is_writable()) {
          cancel->store(true);
          return;
        }
        std::this_thread::sleep_for(kDisconnectPoll);
      }
    });

    json done;
    try {
      auto resp = session.provenance(run, req, cancel, [&](const MISet& m) {
        if (cancel->load()) return false;
        std::string frame = sse_event("miset", miset_to_json(m).dump());
        if (!sink.write(frame.data(), frame.size())) {
          cancel->store(true);
          return false;
        }
        return true;
      });
      const ProvenanceResult& r = resp.result;
      done = json{{"exhausted", r.exhausted},
                  {"truncated", r.truncated},
                  {"count", r.misets().size()},
                  {"route", std::string(runtime::to_string(resp.route))},
                  {"budgetSpent", to_json(r.budget_spent)}};
      if (r.truncated && !cancel->load()) {
        done["status"] = 409;
        done["error"] = std::string(to_string(ErrorCode::kBudgetExhausted));
      }
    } catch (const Error& e) {
      done = json{{"exhausted", false}, {"truncated", true}, {"status", http_status(e.code())}};
      done.update(error_body(e.code(), e.what()));
    }
    finished.store(true);
    watcher.join();
    if (!cancel->load()) {
      std::string frame = sse_event("done", done.dump());
      sink.write(frame.data(), frame.size());
    }
    sink.done();
  }
};

Server::Server(runtime::Session& session) : impl_(std::make_unique<Impl>(session)) {}
Server::~Server() { stop(); }

bool Server::bind(const std::string& host, int port) { return impl_->http.bind_to_port(host, port); }
int Server::bind_any_port(const std::string& host) { return impl_->http.bind_to_any_port(host); }
bool Server::listen_after_bind() { return impl_->http.listen_after_bind(); }
void Server::stop() {
  if (impl_ && impl_->http.is_running()) impl_->http.stop();
}
void Server::wait_until_ready() const { impl_->http.wait_until_ready(); }

}  // namespace prober::service
