#include "provis/session.hpp"

#include <algorithm>
#include <chrono>

#include "provis/error.hpp"
#include "provis/json.hpp"
#include "provis/trace.hpp"

namespace provis {

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::Hover: return "hover";
    case EventKind::Brush: return "brush";
    case EventKind::Click: return "click";
  }
  return "?";
}

EventKind parse_event_kind(std::string_view name) {
  if (name == "hover") return EventKind::Hover;
  if (name == "brush") return EventKind::Brush;
  if (name == "click") return EventKind::Click;
  throw Error(ErrorCode::InvalidArgument, "unknown event kind '" + std::string(name) + "'");
}

std::map<std::string, RelationPtr> Outcome::relations(const Session& session) const {
  std::map<std::string, RelationPtr> out;
  for (const auto& [id, r] : updates) out[id] = r.data;
  for (const auto& [id, marks] : highlights) {
    out[id] = restrict_rows(*session.view(id).mark_relation(), marks, RelationKind::Derived);
  }
  return out;
}

namespace {

std::string mark_sink(const EvaluatedView& v) {
  if (!v.def().mark) {
    throw Error(ErrorCode::InvalidArgument, "view '" + v.id() + "' has no marks");
  }
  return v.global(v.def().mark->relation);
}

/// Bases both views depend on that the source's marks derive from.
std::set<std::string> common_bases(const EvaluatedView& source, const EvaluatedView& target) {
  const auto sink = mark_sink(source);
  const auto a = source.bases();
  const auto b = target.bases();
  std::set<std::string> out;
  for (const auto& base : a) {
    if (b.count(base) && source.workflow().reaches(sink, base)) out.insert(base);
  }
  return out;
}

std::int64_t now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

}  // namespace

Session::Session(std::string id, const Catalog& dataset, std::vector<ViewDef> views)
    : id_(std::move(id)), dataset_(dataset), views_(ViewSet::build(std::move(views), dataset)) {
  std::map<std::string, int> uses;
  for (const auto& v : views_.views()) {
    for (const auto& b : v.bases()) ++uses[b];
  }
  for (const auto& [b, n] : uses) {
    if (n >= 2) shared_.insert(b);
  }
}

std::map<std::string, RowSet> Session::provenance(const EvaluatedView& view, const RowSet& marks,
                                                  const std::set<std::string>& bases) const {
  const std::vector<std::string> targets(bases.begin(), bases.end());
  auto traced = backward_trace_many(view.workflow(), mark_sink(view), marks, targets);
  std::map<std::string, RowSet> out;
  for (auto& [name, r] : traced) out.emplace(name, std::move(r.rids));
  return out;
}

std::vector<Row> Session::tooltip(std::string_view view, const Selection& sel,
                                  const std::vector<std::string>& attrs) const {
  const auto& v = views_.view(view);
  const auto& data = *v.data();
  std::vector<std::size_t> cols;
  for (const auto& a : attrs) {
    auto c = data.schema().find(a);
    if (!c) throw Error(ErrorCode::UnknownColumn, "'" + v.id() + "' has no column '" + a + "'");
    cols.push_back(*c);
  }
  const auto marks = resolve_selection(v, sel).marks;
  const auto groups =
      backward_trace(v.workflow(), mark_sink(v), marks, v.global(v.def().data)).rids;
  std::vector<Row> out;
  for (auto g : groups) {
    Row row;
    for (auto c : cols) row.push_back(data.value(g, c));
    out.push_back(std::move(row));
  }
  return out;
}

RelationPtr Session::details_on_demand(std::string_view view, const Selection& sel,
                                       const ViewDef& detail) const {
  const auto& v = views_.view(view);
  const auto sink = mark_sink(v);
  std::set<std::string> bound;
  for (const auto& b : detail.selection_bound) {
    dataset_.get(b);
    if (v.workflow().contains(b) && v.workflow().reaches(sink, b)) bound.insert(b);
  }
  if (!detail.selection_bound.empty() && bound.empty()) {
    throw Error(ErrorCode::NoSharedBase,
                "'" + detail.id + "' is bound to no base behind view '" + v.id() + "'");
  }
  const auto marks = resolve_selection(v, sel).marks;
  const auto subsets = provenance(v, marks, bound);
  Catalog restricted;
  for (const auto& name : dataset_.names()) {
    auto it = subsets.find(name);
    auto rel = dataset_.get(name);
    restricted.add(it == subsets.end() ? rel : restrict_rows(*rel, it->second, RelationKind::Base));
  }
  if (detail.workflow.nodes.empty()) return restricted.get(detail.data);
  EvalOptions options;
  options.capture_lineage = false;
  options.sinks = {detail.data};
  options.prune_columns = true;
  return Workflow::evaluate(detail.workflow, restricted, options).relation(detail.data);
}

RowSet Session::linked_brush(std::string_view source, const Selection& sel,
                             std::string_view target) const {
  const auto& src = views_.view(source);
  const auto& tgt = views_.view(target);
  const auto shared = common_bases(src, tgt);
  const auto tgt_sink = mark_sink(tgt);
  if (shared.empty()) {
    throw Error(ErrorCode::NoSharedBase,
                "views '" + src.id() + "' and '" + tgt.id() + "' share no base relation");
  }
  const auto marks = resolve_selection(src, sel).marks;
  return forward_trace_joint(tgt.workflow(), provenance(src, marks, shared), tgt_sink);
}

std::map<std::string, RefreshedView> Session::crossfilter(std::string_view source,
                                                          const Selection& sel) const {
  const auto& src = views_.view(source);
  const auto marks = resolve_selection(src, sel).marks;
  std::map<std::set<std::string>, std::vector<std::string>> by_bases;
  std::set<std::string> all;
  for (const auto& v : views_.views()) {
    if (v.id() == src.id()) continue;
    auto shared = common_bases(src, v);
    if (shared.empty()) continue;
    all.insert(shared.begin(), shared.end());
    by_bases[shared].push_back(v.id());
  }
  const auto subsets = provenance(src, marks, all);
  std::map<std::string, RefreshedView> out;
  for (const auto& [bases, ids] : by_bases) {
    std::map<std::string, RowSet> part;
    for (const auto& b : bases) part.emplace(b, subsets.at(b));
    auto fresh = views_.refresh(part, ids);
    out.merge(fresh);
  }
  return out;
}

std::map<std::string, RowSet> Session::highlight(std::string_view source, const Selection& sel) const {
  const auto& src = views_.view(source);
  std::map<std::string, RowSet> out;
  for (const auto& v : views_.views()) {
    if (v.id() == src.id() || !v.def().mark || common_bases(src, v).empty()) continue;
    out.emplace(v.id(), linked_brush(source, sel, v.id()));
  }
  return out;
}

Outcome Session::execute(std::string_view source, EventKind kind, const Selection& sel) const {
  Outcome out;
  if (kind == EventKind::Hover) {
    out.highlights = highlight(source, sel);
  } else {
    out.updates = crossfilter(source, sel);
  }
  return out;
}

std::int64_t Session::record_event(std::string_view source, EventKind kind, const Selection& sel,
                                   std::optional<std::int64_t> timestamp) {
  const auto& v = views_.view(source);
  resolve_selection(v, sel);
  std::unique_lock lock(events_mu_);
  InteractionEvent ev;
  ev.eid = static_cast<std::int64_t>(events_.size());
  ev.timestamp = timestamp.value_or(now_ms());
  if (!events_.empty()) ev.timestamp = std::max(ev.timestamp, events_.back().timestamp);
  ev.source = v.id();
  ev.kind = kind;
  ev.selection = sel;
  events_.push_back(ev);
  return ev.eid;
}

std::pair<std::int64_t, Outcome> Session::interact(std::string_view source, EventKind kind,
                                                   const Selection& sel) {
  std::lock_guard lock(interact_mu_);
  const auto eid = record_event(source, kind, sel);
  return {eid, execute(source, kind, sel)};
}

InteractionEvent Session::event(std::int64_t eid) const {
  std::shared_lock lock(events_mu_);
  if (eid < 0 || eid >= static_cast<std::int64_t>(events_.size())) {
    throw Error(ErrorCode::UnknownEvent, "no event " + std::to_string(eid));
  }
  return events_[static_cast<std::size_t>(eid)];
}

std::vector<InteractionEvent> Session::events() const {
  std::shared_lock lock(events_mu_);
  return events_;
}

RelationPtr Session::events_relation() const {
  const auto evs = events();
  ColumnBuilder eid(ValueType::Int64), ts(ValueType::Int64), src(ValueType::Text),
      kind(ValueType::Text), sel(ValueType::Text);
  for (const auto& e : evs) {
    eid.append(Value(e.eid));
    ts.append(Value(e.timestamp));
    src.append(Value(e.source));
    kind.append(Value(to_string(e.kind)));
    sel.append(Value(selection_to_json(e.selection).dump()));
  }
  std::vector<Column> cols;
  cols.push_back(eid.finish());
  cols.push_back(ts.finish());
  cols.push_back(src.finish());
  cols.push_back(kind.finish());
  cols.push_back(sel.finish());
  Schema schema({{"eid", ValueType::Int64},
                 {"timestamp", ValueType::Int64},
                 {"source", ValueType::Text},
                 {"kind", ValueType::Text},
                 {"selection", ValueType::Text}});
  return std::make_shared<const Relation>("events", std::move(schema), std::move(cols),
                                          RelationKind::Base, evs.size());
}

Outcome Session::replay_event(std::int64_t eid) const {
  const auto ev = event(eid);
  return execute(ev.source, ev.kind, ev.selection);
}

std::vector<std::pair<InteractionEvent, Outcome>> Session::history(
    const std::optional<std::string>& source) const {
  std::vector<std::pair<InteractionEvent, Outcome>> out;
  for (const auto& ev : events()) {
    if (source && ev.source != *source) continue;
    out.emplace_back(ev, execute(ev.source, ev.kind, ev.selection));
  }
  return out;
}

}  // namespace provis
