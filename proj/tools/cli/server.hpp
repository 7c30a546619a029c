// Copyright 2026 The Prober Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <string>
#include <utility>

#include <nlohmann/json.hpp>

#include "prober/error.hpp"
#include "prober/runtime/session.hpp"

namespace prober::service {

inline constexpr const char* kDefaultAddr = "127.0.0.1:7070";
inline constexpr std::size_t kDefaultPageSize = 50;

/// "host:port"; throws kInvalidArgument.
std::pair<std::string, int> parse_addr(const std::string& addr);

/// POST /runs/{id}/provenance body: record, kind, and optional node, k,
/// bound, budget, chain, allowUnsound. Throws kInvalidArgument.
runtime::ProvenanceRequest request_from_json(const nlohmann::json& body);

/// 404 for unknown runs, nodes and records, 400 for bad requests, 409 for
/// budget exhaustion, 500 otherwise.
int http_status(ErrorCode code);

/// One text/event-stream frame.
std::string sse_event(const std::string& event, const std::string& data);

/// HTTP front end over a Session.
///
///   GET  /runs
///   GET  /runs/{id}/graph
///   GET  /runs/{id}/nodes/{node}/outputs?page=P&pageSize=S
///   POST /runs/{id}/provenance
///   GET  /stats
///
/// Provenance requests for kind all/any answer with an event stream; a
/// dropped connection cancels the search.
class Server {
 public:
  explicit Server(runtime::Session& session);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  bool bind(const std::string& host, int port);
  /// Binds an ephemeral port and returns it, or -1.
  int bind_any_port(const std::string& host);
  /// Blocks until stop().
  bool listen_after_bind();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace prober::service
