#include "provis/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <random>
#include <thread>

#include <httplib.h>

#include "provis/flights.hpp"
#include "provis/presets.hpp"
#include "provis/server.hpp"
#include "provis/trace.hpp"

namespace provis {

namespace {

using Clock = std::chrono::steady_clock;

template <class F>
double time_ms(F&& fn) {
  const auto t0 = Clock::now();
  fn();
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::vector<double> warm(std::vector<double> v) {
  if (v.size() > 1) v.erase(v.begin());
  return v;
}

double median(std::vector<double> v) { return percentile(std::move(v), 0.5); }

Json summary(const std::vector<double>& samples) {
  return {{"samples", samples.size()},
          {"p50_ms", percentile(samples, 0.5)},
          {"p95_ms", percentile(samples, 0.95)},
          {"max_ms", samples.empty() ? 0.0 : *std::max_element(samples.begin(), samples.end())}};
}

// Predicate-rewrite reference: the selected groups as a filter on prep.
std::vector<std::string> group_keys(const ViewDef& def) {
  for (const auto& n : def.workflow.nodes) {
    if (n.output != def.data) continue;
    if (const auto* g = std::get_if<GroupOp>(&n.op)) return g->keys;
  }
  return {};
}

Expr selection_predicate(const EvaluatedView& view, const RowSet& marks) {
  const auto& rel = *view.mark_relation();
  std::vector<Expr> any;
  for (auto m : marks) {
    std::vector<Expr> all;
    for (const auto& k : group_keys(view.def())) {
      const auto v = rel.value(m, *rel.schema().find(k));
      all.push_back(v.is_null() ? Expr::is_null(col(k)) : eq(col(k), lit(v)));
    }
    any.push_back(Expr::all_of(std::move(all)));
  }
  return any.empty() ? lit(false) : Expr::any_of(std::move(any));
}

WorkflowDef with_predicate(const WorkflowDef& def, const Expr& pred) {
  WorkflowDef out;
  for (const auto& n : def.nodes) {
    OpNode node = n;
    std::visit(
        [](auto& op) {
          if constexpr (std::is_same_v<std::decay_t<decltype(op)>, JoinOp>) {
            if (op.left == "prep") op.left = "prep_sel";
            if (op.right == "prep") op.right = "prep_sel";
          } else {
            if (op.input == "prep") op.input = "prep_sel";
          }
        },
        node.op);
    out.nodes.push_back(node);
    if (n.output == "prep") out.nodes.push_back({"prep_sel", FilterOp{"prep", pred}});
  }
  return out;
}

std::string row_key(const Row& row) {
  std::string out;
  for (const auto& v : row) {
    if (v.type() != ValueType::Float64) out += to_text(v) + '\x1f';
  }
  return out;
}

bool same_rows(std::vector<Row> a, std::vector<Row> b, double rel_tol) {
  if (a.size() != b.size()) return false;
  auto by_key = [](const Row& x, const Row& y) { return row_key(x) < row_key(y); };
  std::sort(a.begin(), a.end(), by_key);
  std::sort(b.begin(), b.end(), by_key);
  for (std::size_t r = 0; r < a.size(); ++r) {
    for (std::size_t c = 0; c < a[r].size(); ++c) {
      const auto &x = a[r][c], &y = b[r][c];
      if (x == y) continue;
      if (x.type() != ValueType::Float64 || y.type() != ValueType::Float64) return false;
      const double p = x.as_float(), q = y.as_float();
      if (std::abs(p - q) > rel_tol * std::max(std::abs(p), std::abs(q))) return false;
    }
  }
  return true;
}

std::vector<Row> all_rows(const Relation& rel) { return get_rows(rel, RowSet::range(rel.row_count())); }

Selection fit_to(const EvaluatedView& view, const Selection& sel) {
  if (sel.kind != Selection::Items) return sel;
  std::vector<RowId> ids;
  for (auto id : sel.items) {
    if (id < view.marks().size()) ids.push_back(id);
  }
  return Selection::of_items(RowSet::from_sorted(std::move(ids)));
}

std::string cpu_model() {
  std::ifstream in("/proc/cpuinfo");
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("model name", 0) == 0) {
      auto colon = line.find(':');
      if (colon != std::string::npos) return line.substr(colon + 2);
    }
  }
  return "unknown";
}

}  // namespace

double percentile(std::vector<double> samples, double q) {
  if (samples.empty()) return 0.0;
  std::sort(samples.begin(), samples.end());
  auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(samples.size())));
  return samples[std::clamp<std::size_t>(rank, 1, samples.size()) - 1];
}

std::vector<ScriptStep> script_from_json(const Json& j) {
  const Json& steps = j.is_object() && j.contains("steps") ? j.at("steps") : j;
  if (!steps.is_array()) throw Error(ErrorCode::ParseError, "script must be a list of steps");
  std::vector<ScriptStep> out;
  for (const auto& s : steps) {
    if (!s.is_object() || !s.contains("view") || !s.at("view").is_string() || !s.contains("selection")) {
      throw Error(ErrorCode::ParseError, "script step needs a view and a selection");
    }
    out.push_back({s.at("view").get<std::string>(), selection_from_json(s.at("selection"))});
  }
  return out;
}

Json script_to_json(const std::vector<ScriptStep>& steps) {
  Json out = Json::array();
  for (const auto& s : steps) out.push_back({{"view", s.view}, {"selection", selection_to_json(s.selection)}});
  return out;
}

std::vector<ScriptStep> random_script(std::size_t steps, std::uint64_t seed) {
  const auto views = flight_dashboard();
  std::mt19937_64 rng(seed);
  auto unit = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  std::vector<ScriptStep> out;
  for (std::size_t i = 0; i < steps; ++i) {
    const auto& v = views[i % views.size()];
    const double w = v.viewport.width, h = v.viewport.height;
    double x0 = unit() * w, x1 = unit() * w;
    if (x0 > x1) std::swap(x0, x1);
    Box box{x0, 0.0, x1, h};
    if (v.mark && v.mark->kind == MarkKind::Polygon) {
      double y0 = unit() * h, y1 = unit() * h;
      if (y0 > y1) std::swap(y0, y1);
      box.y0 = y0;
      box.y1 = y1;
    }
    out.push_back({v.id, Selection::of_range(box)});
  }
  return out;
}

std::size_t check_result_equivalence(const Catalog& data, const std::vector<ScriptStep>& script,
                                     std::size_t sample_rows) {
  Catalog sample;
  for (const auto& name : data.names()) {
    auto rel = data.get(name);
    if (name == "ontime") {
      rel = restrict_rows(*rel, RowSet::range(static_cast<RowId>(std::min(sample_rows, rel->row_count()))),
                          RelationKind::Base);
    }
    sample.add(rel);
  }
  Session session("guard", sample, flight_dashboard());
  const auto steps = script.empty() ? random_script(6, 1) : script;
  std::size_t checked = 0;
  for (const auto& step : steps) {
    const auto& source = session.view(step.view);
    const auto sel = fit_to(source, step.selection);
    const auto pred = selection_predicate(source, resolve_selection(source, sel).marks);
    const auto updates = session.crossfilter(step.view, sel);
    for (const auto& [id, refreshed] : updates) {
      const auto& def = session.view(id).def();
      EvalOptions opts;
      opts.capture_lineage = false;
      opts.sinks = {def.data};
      const auto wf = Workflow::evaluate(with_predicate(def.workflow, pred), sample, opts);
      if (!same_rows(all_rows(*refreshed.data), all_rows(*wf.relation(def.data)), 1e-9)) {
        throw Error(ErrorCode::InvalidArgument,
                    "result-equivalence guard failed: brush on " + step.view + " refreshing " + id);
      }
      ++checked;
    }
  }
  return checked;
}

Json environment_note() {
  Json env;
#if defined(__clang__)
  env["compiler"] = std::string("clang ") + __clang_version__;
#elif defined(__GNUC__)
  env["compiler"] = std::string("gcc ") + __VERSION__;
#endif
#ifdef NDEBUG
  env["build"] = "release";
#else
  env["build"] = "debug";
#endif
  env["cpu"] = cpu_model();
  env["hardware_threads"] = std::thread::hardware_concurrency();
  env["note"] = "scaled-down synthetic flight data; timings from a monotonic clock, warm runs only";
  return env;
}

Json run_bench(const BenchOptions& o) {
  const int reps = std::max(1, o.reps);
  Json report;
  Catalog data;
  report["load_ms"] = time_ms([&] { data = load_flight_dataset(o.data); });
  Json rows = Json::object();
  for (const auto& name : data.names()) rows[name] = data.get(name)->row_count();
  report["rows"] = rows;
  report["guard"] = {{"sample_rows", std::min(o.guard_rows, data.get("ontime")->row_count())},
                     {"checked", check_result_equivalence(data, o.script, o.guard_rows)}};

  std::unique_ptr<Session> session;
  const double session_ms = time_ms([&] { session = std::make_unique<Session>("bench", data, flight_dashboard()); });
  const auto& merged = session->views().workflow()->def();
  std::vector<double> with_lineage, without;
  for (int r = 0; r < reps; ++r) {
    EvalOptions lin, plain;
    plain.capture_lineage = false;
    with_lineage.push_back(time_ms([&] { Workflow::evaluate(merged, data, lin); }));
    without.push_back(time_ms([&] { Workflow::evaluate(merged, data, plain); }));
  }
  const double build_lin = median(warm(with_lineage)), build_plain = median(warm(without));
  report["build"] = {{"session_ms", session_ms},
                     {"lineage_ms", build_lin},
                     {"reference_ms", build_plain},
                     {"overhead_ratio", build_plain > 0 ? build_lin / build_plain : 0.0},
                     {"views", session->views().views().size()}};

  const auto& map = session->view("map");
  const auto& wf = session->views().workflow();
  const auto mark_rel = map.global(map.def().mark->relation);
  const auto all_marks = RowSet::range(static_cast<RowId>(map.marks().size()));
  const auto n_ontime = static_cast<RowId>(data.get("ontime")->row_count());
  std::vector<RowId> sample_ids;
  for (RowId r = 0; r < n_ontime; r += 100) sample_ids.push_back(r);
  const auto sample = RowSet::from_sorted(std::move(sample_ids));
  std::vector<double> back, fwd;
  std::size_t back_n = 0, fwd_n = 0;
  for (int r = 0; r < reps; ++r) {
    back.push_back(time_ms([&] { back_n = backward_trace(*wf, mark_rel, all_marks, "ontime").rids.size(); }));
    fwd.push_back(time_ms([&] { fwd_n = forward_trace(*wf, "ontime", sample, mark_rel).rids.size(); }));
  }
  report["trace"] = {{"backward_ms", median(warm(back))},
                     {"backward_rows", back_n},
                     {"forward_ms", median(warm(fwd))},
                     {"forward_inputs", sample.size()},
                     {"forward_rows", fwd_n}};

  Json cardinalities = Json::array();
  std::vector<double> inproc;
  std::vector<std::vector<double>> per_step(o.script.size());
  for (int r = 0; r < reps; ++r) {
    for (std::size_t i = 0; i < o.script.size(); ++i) {
      const auto& step = o.script[i];
      std::map<std::string, RefreshedView> out;
      const double ms = time_ms([&] { out = session->crossfilter(step.view, step.selection); });
      if (r > 0 || reps == 1) {
        inproc.push_back(ms);
        per_step[i].push_back(ms);
      }
      if (r == 0) {
        Json c = Json::object();
        for (const auto& [id, rv] : out) c[id] = rv.data->row_count();
        cardinalities.push_back(c);
      }
    }
  }
  report["crossfilter"] = summary(inproc);
  report["crossfilter"]["steps"] = o.script.size();
  report["crossfilter"]["result_rows"] = cardinalities;
  Json step_ms = Json::array();
  for (const auto& s : per_step) step_ms.push_back(median(s));
  report["crossfilter"]["step_p50_ms"] = step_ms;

  if (o.http && !o.script.empty()) {
    ServerConfig cfg;
    cfg.port = 0;
    cfg.request_timeout_seconds = 600;
    Api api(cfg);
    const auto ds = api.add_dataset("bench", data);
    HttpServer server(api);
    const int port = server.bind();
    if (port < 0) throw Error(ErrorCode::InvalidArgument, "cannot bind a port for the HTTP run");
    std::thread th([&] { server.listen(); });
    server.wait_until_ready();
    std::vector<double> http;
    try {
      httplib::Client cli("127.0.0.1", port);
      cli.set_read_timeout(600, 0);
      Json views = Json::array();
      for (const auto& v : flight_dashboard()) views.push_back(v.id);
      auto created = cli.Post("/sessions", Json{{"dataset", ds}, {"views", views}}.dump(), "application/json");
      if (!created || created->status != 201) throw Error(ErrorCode::InvalidArgument, "HTTP session creation failed");
      const std::string sid = Json::parse(created->body).at("session");
      for (int r = 0; r < reps; ++r) {
        for (const auto& step : o.script) {
          const auto body = Json{{"source", step.view}, {"kind", "brush"}, {"selection", selection_to_json(step.selection)}}.dump();
          httplib::Result res;
          Json reply;
          const double ms = time_ms([&] {
            res = cli.Post("/sessions/" + sid + "/interactions", body, "application/json");
            if (res) reply = Json::parse(res->body);
          });
          if (!res || res->status != 200) {
            throw Error(ErrorCode::InvalidArgument, "HTTP interaction failed: " + (res ? res->body : std::string("no response")));
          }
          if (r > 0 || reps == 1) http.push_back(ms);
        }
      }
    } catch (...) {
      server.stop();
      th.join();
      throw;
    }
    server.stop();
    th.join();
    report["http"] = summary(http);
  }
  report["environment"] = environment_note();
  return report;
}

}  // namespace provis
