#pragma once

#include <atomic>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "provis/error.hpp"
#include "provis/json.hpp"
#include "provis/session.hpp"

namespace provis {

struct ServerConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  /// Largest accepted request body, uploads included.
  std::size_t max_body_bytes = std::size_t{1} << 30;
  /// Largest accepted table in rows.
  std::size_t max_rows = 50'000'000;
  int request_timeout_seconds = 30;
};

/// HTTP status and machine code for an engine error. Codes come from
/// schema_mismatch, parse_error, unknown_relation, unknown_view,
/// unknown_event, type_error, bad_selection, empty_extent.
struct ApiError {
  int status = 400;
  std::string code;
  std::string message;
  Json detail;

  Json to_json() const;
};
ApiError api_error(const Error& e);

struct ApiResponse {
  int status = 200;
  Json body;
};

struct UploadedFile {
  /// Table name, taken from the file name without its extension.
  std::string table;
  std::string content;
};

/// Transport-free request handling shared by the HTTP server and tests.
/// Datasets and sessions live in registries guarded by a reader-writer lock;
/// each session serializes its own interactions.
class Api {
 public:
  explicit Api(ServerConfig config = {});

  const ServerConfig& config() const { return config_; }

  /// `schema` is {"tables": [{"name", "columns": [{"name", "type"}]}]}, or
  /// {"preset": "flights"} for the four flight tables.
  ApiResponse create_dataset(const std::string& name, const std::vector<UploadedFile>& files,
                             const Json& schema);
  /// Registers an already loaded catalog; returns the dataset id.
  std::string add_dataset(const std::string& name, Catalog catalog);
  ApiResponse list_datasets() const;

  /// {"dataset": id, "views": [view definition | preset name]}
  ApiResponse create_session(const Json& body);
  ApiResponse get_session(const std::string& id) const;
  /// {"source": view, "kind": "brush" | "hover" | "click", "selection": {...}}
  ApiResponse interact(const std::string& id, const Json& body);
  ApiResponse history(const std::string& id, const std::optional<std::string>& source) const;
  /// {"view", "selection", "attrs": [...]}
  ApiResponse tooltip(const std::string& id, const Json& body) const;
  /// {"view", "selection", "detail": view definition | preset name}
  ApiResponse details(const std::string& id, const Json& body) const;

  /// Digest of a session's mutable state (its event log).
  std::string digest(const std::string& id) const;

  /// Throws UnknownView (unknown session).
  std::shared_ptr<Session> session(const std::string& id) const;

 private:
  template <class F>
  ApiResponse guarded(F&& fn) const;

  ServerConfig config_;
  mutable std::shared_mutex mu_;
  std::map<std::string, std::shared_ptr<const Catalog>> datasets_;
  std::map<std::string, std::string> dataset_names_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::atomic<std::uint64_t> next_id_{1};
};

/// Encodings shared by responses and history.
Json outcome_to_json(const Outcome& outcome);
Json event_to_json(const InteractionEvent& ev);

/// View presets addressable by name in session and detail requests: map,
/// by_airline, by_delay, by_day, by_month, by_year, scatter, airports_detail,
/// city_detail. Throws ParseError for other names.
ViewDef preset_view(const std::string& name);

/// Blocking HTTP/1.1 server over an Api.
class HttpServer {
 public:
  explicit HttpServer(Api& api);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds config().host on config().port, or on a free port when it is 0;
  /// returns the port or -1.
  int bind();
  /// Serves until stop(); call after bind().
  bool listen();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace provis
