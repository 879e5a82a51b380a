// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The Mondegreen Authors

#pragma once

#include <memory>
#include <string>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "mondegreen/errors.hpp"
#include "mondegreen/rewrite_table.hpp"
#include "mondegreen/serving.hpp"

namespace mondegreen {

inline nlohmann::json to_json(const CorrectionResponse& r) {
  nlohmann::json j;
  j["original"] = r.original;
  j["normalized"] = r.normalized.text();
  j["corrected"] = r.corrected ? nlohmann::json(r.corrected->text()) : nlohmann::json(nullptr);
  j["triggered"] = r.triggered;
  j["table_version"] = r.table_version;
  return j;
}

/// HTTP front end for a CorrectionService.
///
///   GET  /v1/correct?q=...   correction lookup (400 on empty q)
///   POST /v1/reload          {"path": ...} -> atomic snapshot swap (409 on failure)
///   GET  /healthz            200 once a table is loaded
///   GET  /v1/stats           lookup counters and trigger rate
class HttpApi {
 public:
  explicit HttpApi(CorrectionService& service) : service_(service) { wire_routes(); }

  /// Serves on host:port until stop() is called. Returns false if the port
  /// could not be bound.
  bool listen(const std::string& host, int port) { return server_.listen(host, port); }

  /// Binds an ephemeral port and serves from a background thread; returns the
  /// port. Test harness convenience.
  int start_background(const std::string& host) {
    int port = server_.bind_to_any_port(host);
    if (port < 0) throw Error("cannot bind HTTP port on " + host);
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
    return port;
  }

  void stop() {
    server_.stop();
    if (thread_.joinable()) thread_.join();
  }

  ~HttpApi() { stop(); }

 private:
  void wire_routes() {
    server_.Get("/v1/correct", [this](const httplib::Request& req, httplib::Response& res) {
      auto q = req.get_param_value("q");
      try {
        CorrectionResponse r = service_.correct(q);
        res.set_content(to_json(r).dump(), "application/json");
      } catch (const EmptyQueryError& e) {
        res.status = 400;
        res.set_content(nlohmann::json{{"error", e.what()}}.dump(), "application/json");
      } catch (const Error& e) {
        res.status = 503;
        res.set_content(nlohmann::json{{"error", e.what()}}.dump(), "application/json");
      }
    });

    server_.Post("/v1/reload", [this](const httplib::Request& req, httplib::Response& res) {
      try {
        auto body = nlohmann::json::parse(req.body);
        std::string path = body.at("path").get<std::string>();
        RewriteTable table = load_snapshot(path);
        service_.swap_snapshot(std::move(table));
        auto active = service_.active_table();
        res.set_content(nlohmann::json{{"table_version", active->version()},
                                       {"entries", active->size()}}
                            .dump(),
                        "application/json");
      } catch (const std::exception& e) {
        res.status = 409;
        res.set_content(nlohmann::json{{"error", e.what()}}.dump(), "application/json");
      }
    });

    server_.Get("/healthz", [this](const httplib::Request&, httplib::Response& res) {
      if (service_.has_table()) {
        res.set_content("ok", "text/plain");
      } else {
        res.status = 503;
        res.set_content("no table loaded", "text/plain");
      }
    });

    server_.Get("/v1/stats", [this](const httplib::Request&, httplib::Response& res) {
      ServingStats s = service_.stats();
      auto rate = trigger_rate(s);
      nlohmann::json j{{"total", s.total_lookups}, {"triggered", s.triggered_lookups}};
      j["trigger_rate_pct"] = rate ? nlohmann::json(*rate) : nlohmann::json(nullptr);
      res.set_content(j.dump(), "application/json");
    });
  }

  CorrectionService& service_;
  httplib::Server server_;
  std::thread thread_;
};

}  // namespace mondegreen
