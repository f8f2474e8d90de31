#include "provis/server.hpp"

#include <condition_variable>
#include <cstdio>
#include <functional>
#include <mutex>

#include <httplib.h>

#include "provis/csv.hpp"
#include "provis/flights.hpp"
#include "provis/presets.hpp"

namespace provis {

Json ApiError::to_json() const {
  Json j{{"code", code}, {"message", message}};
  if (!detail.is_null()) j["detail"] = detail;
  return j;
}

ApiError api_error(const Error& e) {
  ApiError out;
  out.message = e.what();
  switch (e.code()) {
    case ErrorCode::SchemaMismatch:
    case ErrorCode::DuplicateRelationName: out.code = "schema_mismatch"; break;
    case ErrorCode::ParseError: out.code = "parse_error"; break;
    case ErrorCode::TypeError:
    case ErrorCode::UnknownColumn:
    case ErrorCode::UnreachableTarget:
    case ErrorCode::InvalidArgument: out.code = "type_error"; break;
    case ErrorCode::EmptyExtent: out.code = "empty_extent"; break;
    case ErrorCode::UnknownRelation:
      out.status = 404;
      out.code = "unknown_relation";
      break;
    case ErrorCode::UnknownView:
      out.status = 404;
      out.code = "unknown_view";
      break;
    case ErrorCode::UnknownEvent:
      out.status = 404;
      out.code = "unknown_event";
      break;
    case ErrorCode::RowIdOutOfRange:
    case ErrorCode::NotInvertible:
    case ErrorCode::SelectionOutOfViewport:
    case ErrorCode::BadSelection:
    case ErrorCode::NoSharedBase: out.code = "bad_selection"; break;
  }
  if (e.line()) out.detail = {{"line", *e.line()}};
  out.detail = out.detail.is_null() ? Json{{"error", std::string(to_string(e.code()))}}
                                    : (out.detail["error"] = std::string(to_string(e.code())), out.detail);
  return out;
}

ViewDef preset_view(const std::string& name) {
  if (name == "map") return state_map();
  if (name == "by_airline") return count_bars(name, "alid");
  if (name == "by_delay") return count_bars(name, "delay_bin");
  if (name == "by_day") return count_bars(name, "d");
  if (name == "by_month") return count_bars(name, "m");
  if (name == "by_year") return count_bars(name, "y");
  if (name == "scatter") return delay_scatter();
  if (name == "airports_detail") return airports_detail();
  if (name == "city_detail") return city_detail();
  throw Error(ErrorCode::ParseError, "unknown view preset '" + name + "'");
}

namespace {

Json view_payload(const EvaluatedView& v) {
  Json j{{"marks", marks_to_json(v.marks())}, {"rows", v.data()->row_count()}};
  if (v.def().mark) {
    j["kind"] = std::string(to_string(v.def().mark->kind));
    j["viewport"] = {{"width", v.def().viewport.width}, {"height", v.def().viewport.height}};
  }
  return j;
}

ViewDef view_from(const Json& j) {
  if (j.is_string()) return preset_view(j.get<std::string>());
  return view_def_from_json(j);
}

const std::string& string_field(const Json& body, const char* key) {
  if (!body.is_object() || !body.contains(key) || !body.at(key).is_string()) {
    throw Error(ErrorCode::ParseError, std::string("request needs a string field '") + key + "'");
  }
  return body.at(key).get_ref<const std::string&>();
}

std::vector<TableSchema> tables_of(const Json& schema) {
  if (schema.is_object() && schema.value("preset", "") == "flights") return flight_schemas();
  if (!schema.is_object() || !schema.contains("tables") || !schema.at("tables").is_array()) {
    throw Error(ErrorCode::SchemaMismatch, "schema document needs a 'tables' list");
  }
  std::vector<TableSchema> out;
  for (const auto& t : schema.at("tables")) {
    if (!t.is_object() || !t.contains("name") || !t.at("name").is_string() || !t.contains("columns")) {
      throw Error(ErrorCode::SchemaMismatch, "each table needs a name and columns");
    }
    out.push_back({t.at("name").get<std::string>(), schema_from_json(t.at("columns"))});
  }
  return out;
}

}  // namespace

Json outcome_to_json(const Outcome& outcome) {
  Json updates = Json::object();
  for (const auto& [id, r] : outcome.updates) {
    updates[id] = {{"marks", marks_to_json(r.marks)}, {"rows", r.data->row_count()}};
  }
  Json highlights = Json::object();
  for (const auto& [id, marks] : outcome.highlights) {
    Json ids = Json::array();
    for (auto m : marks) ids.push_back(m);
    highlights[id] = ids;
  }
  return {{"updates", updates}, {"highlights", highlights}};
}

Json event_to_json(const InteractionEvent& ev) {
  return {{"eid", ev.eid},
          {"timestamp", ev.timestamp},
          {"source", ev.source},
          {"kind", std::string(to_string(ev.kind))},
          {"selection", selection_to_json(ev.selection)}};
}

Api::Api(ServerConfig config) : config_(std::move(config)) {}

template <class F>
ApiResponse Api::guarded(F&& fn) const {
  try {
    return fn();
  } catch (const Error& e) {
    auto err = api_error(e);
    return {err.status, err.to_json()};
  } catch (const Json::exception& e) {
    return {400, ApiError{400, "parse_error", e.what(), nullptr}.to_json()};
  }
}

std::string Api::add_dataset(const std::string& name, Catalog catalog) {
  auto id = "d" + std::to_string(next_id_++);
  std::unique_lock lock(mu_);
  datasets_[id] = std::make_shared<const Catalog>(std::move(catalog));
  dataset_names_[id] = name;
  return id;
}

ApiResponse Api::create_dataset(const std::string& name, const std::vector<UploadedFile>& files,
                                const Json& schema) {
  return guarded([&]() -> ApiResponse {
    if (files.empty()) throw Error(ErrorCode::SchemaMismatch, "no files uploaded");
    const auto tables = tables_of(schema);
    auto declared = [&](const std::string& t) -> const TableSchema* {
      for (const auto& s : tables) {
        if (s.name == t) return &s;
      }
      return nullptr;
    };
    Catalog catalog;
    Json counts = Json::object();
    for (const auto& f : files) {
      const auto* ts = declared(f.table);
      if (ts == nullptr) {
        throw Error(ErrorCode::SchemaMismatch, "file for undeclared table '" + f.table + "'");
      }
      if (catalog.contains(f.table)) {
        throw Error(ErrorCode::SchemaMismatch, "two files for table '" + f.table + "'");
      }
      RelationPtr rel;
      try {
        rel = ingest_csv(f.content, ts->schema, f.table);
      } catch (const Error& e) {
        throw Error(e.code(), f.table + ": " + e.what(), e.line());
      }
      if (rel->row_count() > config_.max_rows) {
        throw Error(ErrorCode::SchemaMismatch, "table '" + f.table + "' exceeds the row limit");
      }
      counts[f.table] = rel->row_count();
      catalog.add(rel);
    }
    for (const auto& t : tables) {
      if (!catalog.contains(t.name)) {
        throw Error(ErrorCode::SchemaMismatch, "no file for declared table '" + t.name + "'");
      }
    }
    auto id = add_dataset(name, std::move(catalog));
    return {201, {{"dataset", id}, {"name", name}, {"tables", counts}}};
  });
}

ApiResponse Api::list_datasets() const {
  std::shared_lock lock(mu_);
  Json out = Json::array();
  for (const auto& [id, cat] : datasets_) {
    Json tables = Json::object();
    for (const auto& t : cat->names()) tables[t] = cat->get(t)->row_count();
    out.push_back({{"dataset", id}, {"name", dataset_names_.at(id)}, {"tables", tables}});
  }
  return {200, {{"datasets", out}}};
}

std::shared_ptr<Session> Api::session(const std::string& id) const {
  std::shared_lock lock(mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw Error(ErrorCode::UnknownView, "unknown session '" + id + "'");
  return it->second;
}

ApiResponse Api::create_session(const Json& body) {
  return guarded([&]() -> ApiResponse {
    const auto& dataset = string_field(body, "dataset");
    std::shared_ptr<const Catalog> catalog;
    {
      std::shared_lock lock(mu_);
      auto it = datasets_.find(dataset);
      if (it == datasets_.end()) throw Error(ErrorCode::UnknownRelation, "unknown dataset '" + dataset + "'");
      catalog = it->second;
    }
    std::vector<ViewDef> defs;
    if (body.contains("views")) {
      if (!body.at("views").is_array()) throw Error(ErrorCode::ParseError, "'views' must be a list");
      for (const auto& v : body.at("views")) defs.push_back(view_from(v));
    }
    auto id = "s" + std::to_string(next_id_++);
    auto s = std::make_shared<Session>(id, *catalog, std::move(defs));
    Json views = Json::object();
    for (const auto& v : s->views().views()) views[v.id()] = view_payload(v);
    {
      std::unique_lock lock(mu_);
      sessions_[id] = s;
    }
    return {201, {{"session", id}, {"dataset", dataset}, {"views", views}}};
  });
}

ApiResponse Api::get_session(const std::string& id) const {
  return guarded([&]() -> ApiResponse {
    auto s = session(id);
    Json views = Json::object();
    for (const auto& v : s->views().views()) views[v.id()] = view_payload(v);
    return {200, {{"session", id}, {"views", views}, {"events", s->events().size()}}};
  });
}

ApiResponse Api::interact(const std::string& id, const Json& body) {
  return guarded([&]() -> ApiResponse {
    auto s = session(id);
    const auto& source = string_field(body, "source");
    const auto kind = [&] {
      try {
        return parse_event_kind(string_field(body, "kind"));
      } catch (const Error& e) {
        throw Error(ErrorCode::BadSelection, e.what());
      }
    }();
    if (!body.contains("selection")) throw Error(ErrorCode::BadSelection, "request needs a selection");
    const auto sel = selection_from_json(body.at("selection"));
    s->view(source);
    auto [eid, outcome] = s->interact(source, kind, sel);
    auto j = outcome_to_json(outcome);
    j["eid"] = eid;
    return {200, j};
  });
}

ApiResponse Api::history(const std::string& id, const std::optional<std::string>& source) const {
  return guarded([&]() -> ApiResponse {
    auto s = session(id);
    Json events = Json::array();
    for (const auto& [ev, outcome] : s->history(source)) {
      auto j = outcome_to_json(outcome);
      j["eid"] = ev.eid;
      j["event"] = event_to_json(ev);
      events.push_back(std::move(j));
    }
    return {200, {{"events", events}}};
  });
}

ApiResponse Api::tooltip(const std::string& id, const Json& body) const {
  return guarded([&]() -> ApiResponse {
    auto s = session(id);
    const auto& view = string_field(body, "view");
    if (!body.contains("selection")) throw Error(ErrorCode::BadSelection, "request needs a selection");
    const auto sel = selection_from_json(body.at("selection"));
    const auto attrs = body.at("attrs").get<std::vector<std::string>>();
    Json rows = Json::array();
    for (const auto& r : s->tooltip(view, sel, attrs)) {
      Json row = Json::array();
      for (const auto& v : r) row.push_back(value_to_json(v));
      rows.push_back(std::move(row));
    }
    return {200, {{"attrs", attrs}, {"rows", rows}}};
  });
}

ApiResponse Api::details(const std::string& id, const Json& body) const {
  return guarded([&]() -> ApiResponse {
    auto s = session(id);
    const auto& view = string_field(body, "view");
    if (!body.contains("selection")) throw Error(ErrorCode::BadSelection, "request needs a selection");
    const auto sel = selection_from_json(body.at("selection"));
    const auto detail = view_from(body.at("detail"));
    return {200, relation_to_json(*s->details_on_demand(view, sel, detail))};
  });
}

std::string Api::digest(const std::string& id) const {
  auto s = session(id);
  const auto text = relation_to_json(*s->events_relation()).dump();
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016zx", std::hash<std::string>{}(text));
  return buf;
}

struct HttpServer::Impl {
  explicit Impl(Api& a) : api(a) {}
  Api& api;
  httplib::Server svr;
  int port = -1;
};

namespace {

void reply(httplib::Response& res, const ApiResponse& r) {
  res.status = r.status;
  res.set_content(r.body.dump(), "application/json");
}

Json parse_body(const httplib::Request& req) {
  try {
    return req.body.empty() ? Json::object() : Json::parse(req.body);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("request body is not JSON: ") + e.what());
  }
}

ApiResponse with_body(const httplib::Request& req, const std::function<ApiResponse(const Json&)>& fn) {
  try {
    return fn(parse_body(req));
  } catch (const Error& e) {
    auto err = api_error(e);
    return {err.status, err.to_json()};
  }
}

std::string stem(const std::string& filename) {
  auto slash = filename.find_last_of("/\\");
  auto base = slash == std::string::npos ? filename : filename.substr(slash + 1);
  auto dot = base.rfind('.');
  return dot == std::string::npos ? base : base.substr(0, dot);
}

}  // namespace

HttpServer::HttpServer(Api& api) : impl_(std::make_unique<Impl>(api)) {
  auto& svr = impl_->svr;
  const auto& cfg = api.config();
  svr.set_payload_max_length(cfg.max_body_bytes);
  svr.set_read_timeout(cfg.request_timeout_seconds, 0);
  svr.set_write_timeout(cfg.request_timeout_seconds, 0);
  svr.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
  Api* a = &api;

  svr.Get("/health", [](const httplib::Request&, httplib::Response& res) {
    res.set_content("{\"status\":\"ok\"}", "application/json");
  });
  svr.Get("/datasets", [a](const httplib::Request&, httplib::Response& res) {
    reply(res, a->list_datasets());
  });
  svr.Post("/datasets", [a](const httplib::Request& req, httplib::Response& res) {
    if (!req.is_multipart_form_data()) {
      reply(res, with_body(req, [&](const Json& body) {
              std::vector<UploadedFile> files;
              for (const auto& [table, text] : body.value("files", Json::object()).items()) {
                files.push_back({table, text.get<std::string>()});
              }
              return a->create_dataset(body.value("name", std::string("dataset")), files,
                                       body.value("schema", Json::object()));
            }));
      return;
    }
    std::string name = "dataset";
    Json schema = Json::object();
    std::vector<UploadedFile> files;
    try {
      for (const auto& [key, part] : req.files) {
        if (key == "name" && part.filename.empty()) {
          name = part.content;
        } else if (key == "schema" && part.filename.empty()) {
          schema = Json::parse(part.content);
        } else {
          files.push_back({part.filename.empty() ? key : stem(part.filename), part.content});
        }
      }
    } catch (const Json::exception& e) {
      reply(res, {400, ApiError{400, "schema_mismatch", std::string("schema is not JSON: ") + e.what(), nullptr}.to_json()});
      return;
    }
    reply(res, a->create_dataset(name, files, schema));
  });
  svr.Post("/sessions", [a](const httplib::Request& req, httplib::Response& res) {
    reply(res, with_body(req, [&](const Json& b) { return a->create_session(b); }));
  });
  svr.Get(R"(/sessions/([^/]+))", [a](const httplib::Request& req, httplib::Response& res) {
    reply(res, a->get_session(req.matches[1]));
  });
  svr.Post(R"(/sessions/([^/]+)/interactions)", [a](const httplib::Request& req, httplib::Response& res) {
    reply(res, with_body(req, [&](const Json& b) { return a->interact(req.matches[1], b); }));
  });
  svr.Get(R"(/sessions/([^/]+)/history)", [a](const httplib::Request& req, httplib::Response& res) {
    std::optional<std::string> source;
    if (req.has_param("source")) source = req.get_param_value("source");
    reply(res, a->history(req.matches[1], source));
  });
  svr.Post(R"(/sessions/([^/]+)/tooltip)", [a](const httplib::Request& req, httplib::Response& res) {
    reply(res, with_body(req, [&](const Json& b) { return a->tooltip(req.matches[1], b); }));
  });
  svr.Post(R"(/sessions/([^/]+)/details)", [a](const httplib::Request& req, httplib::Response& res) {
    reply(res, with_body(req, [&](const Json& b) { return a->details(req.matches[1], b); }));
  });
  svr.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    std::string what = "internal error";
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      what = e.what();
    } catch (...) {
    }
    res.status = 500;
    res.set_content(Json{{"code", "internal"}, {"message", what}}.dump(), "application/json");
  });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind() {
  const auto& cfg = impl_->api.config();
  if (cfg.port == 0) {
    impl_->port = impl_->svr.bind_to_any_port(cfg.host);
  } else {
    impl_->port = impl_->svr.bind_to_port(cfg.host, cfg.port) ? cfg.port : -1;
  }
  return impl_->port;
}

bool HttpServer::listen() { return impl_->svr.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_ && impl_->svr.is_running()) impl_->svr.stop();
}

void HttpServer::wait_until_ready() const { impl_->svr.wait_until_ready(); }

}  // namespace provis
