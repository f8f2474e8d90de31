#include "provis/view.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "provis/error.hpp"
#include "provis/operators.hpp"

namespace provis {

std::string_view to_string(MarkKind kind) {
  switch (kind) {
    case MarkKind::Polygon: return "polygon";
    case MarkKind::Rect: return "rect";
    case MarkKind::Circle: return "circle";
  }
  return "?";
}

MarkKind parse_mark_kind(std::string_view name) {
  if (name == "polygon") return MarkKind::Polygon;
  if (name == "rect") return MarkKind::Rect;
  if (name == "circle") return MarkKind::Circle;
  throw Error(ErrorCode::InvalidArgument, "unknown mark kind '" + std::string(name) + "'");
}

namespace {

constexpr double kDefaultRadius = 4.0;

const double* number(const ChannelValue& v) { return std::get_if<double>(&v); }

const ChannelValue* channel(const Mark& m, const std::string& name) {
  auto it = m.channels.find(name);
  return it == m.channels.end() ? nullptr : &it->second;
}

}  // namespace

std::optional<Box> mark_bounds(const Mark& mark) {
  auto num = [&](const std::string& name) -> std::optional<double> {
    const auto* v = channel(mark, name);
    if (v == nullptr) return std::nullopt;
    const auto* d = number(*v);
    if (d == nullptr || !std::isfinite(*d)) return std::nullopt;
    return *d;
  };
  switch (mark.kind) {
    case MarkKind::Rect: {
      auto x = num("x"), y = num("y"), w = num("width"), h = num("height");
      if (!x || !y || !w || !h) return std::nullopt;
      return Box{std::min(*x, *x + *w), std::min(*y, *y + *h), std::max(*x, *x + *w),
                 std::max(*y, *y + *h)};
    }
    case MarkKind::Circle: {
      auto x = num("x"), y = num("y"), r = num("r");
      if (!x || !y || !r) return std::nullopt;
      const double rr = std::abs(*r);
      return Box{*x - rr, *y - rr, *x + rr, *y + rr};
    }
    case MarkKind::Polygon: {
      const auto* v = channel(mark, "geometry");
      const auto* rings = v ? std::get_if<std::vector<PixelRing>>(v) : nullptr;
      if (rings == nullptr || rings->empty()) return std::nullopt;
      Box b{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
            -std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
      for (const auto& ring : *rings) {
        for (const auto& p : ring) {
          b.x0 = std::min(b.x0, p[0]);
          b.x1 = std::max(b.x1, p[0]);
          b.y0 = std::min(b.y0, p[1]);
          b.y1 = std::max(b.y1, p[1]);
        }
      }
      if (!(b.x0 <= b.x1)) return std::nullopt;
      return b;
    }
  }
  return std::nullopt;
}

namespace {

ScaleSpec resolve_scale(const ScaleRef& ref,
                        const std::map<std::string, std::pair<double, double>>& extents) {
  ScaleSpec s;
  s.kind = ref.kind;
  s.lo = ref.lo;
  s.hi = ref.hi;
  s.from = ref.from;
  s.to = ref.to;
  if (ref.domain) {
    s.mi = ref.domain->first;
    s.mx = ref.domain->second;
  } else {
    auto it = extents.find(ref.extent);
    if (it == extents.end()) {
      throw Error(ErrorCode::InvalidArgument, "scale refers to unknown extent '" + ref.extent + "'");
    }
    s.mi = it->second.first;
    s.mx = it->second.second;
    if (ref.zero_based) {
      s.mi = std::min(0.0, s.mi);
      s.mx = std::max(0.0, s.mx);
    }
  }
  validate(s);
  return s;
}

const std::vector<std::string>& required_channels(MarkKind kind) {
  static const std::vector<std::string> polygon{"geometry", "fill"};
  static const std::vector<std::string> rect{"x", "width", "height"};
  static const std::vector<std::string> circle{"x", "y"};
  switch (kind) {
    case MarkKind::Polygon: return polygon;
    case MarkKind::Rect: return rect;
    case MarkKind::Circle: return circle;
  }
  return rect;
}

void check_mark_spec(const MarkSpec& spec, const Schema& schema) {
  for (const auto& c : required_channels(spec.kind)) {
    if (!spec.channels.count(c)) {
      throw Error(ErrorCode::InvalidArgument,
                  std::string(to_string(spec.kind)) + " marks need a '" + c + "' channel");
    }
  }
  for (const auto& [name, b] : spec.channels) {
    if (b.kind == ChannelBinding::Constant) continue;
    auto idx = schema.find(b.column);
    if (!idx) {
      throw Error(ErrorCode::TypeError, "channel '" + name + "' refers to unknown column '" +
                                            b.column + "'");
    }
    const auto type = schema.at(*idx).type;
    if (b.kind == ChannelBinding::Geo && type != ValueType::PolygonList) {
      throw Error(ErrorCode::TypeError, "geometry channel needs a polygon column");
    }
    if (b.kind == ChannelBinding::Scaled && !is_numeric(type)) {
      throw Error(ErrorCode::TypeError, "scaled channel '" + name + "' needs a numeric column");
    }
    if (b.kind == ChannelBinding::Column && type == ValueType::PolygonList) {
      throw Error(ErrorCode::TypeError, "polygon column bound without a geo scale");
    }
    if (b.kind == ChannelBinding::Scaled && b.scale.kind == ScaleKind::LinearColorRamp &&
        name != "fill") {
      throw Error(ErrorCode::InvalidArgument, "color ramp bound to channel '" + name + "'");
    }
  }
}

ChannelValue plain_value(const Value& v) {
  switch (v.type()) {
    case ValueType::Null: return std::monostate{};
    case ValueType::Int64:
    case ValueType::Float64: return v.numeric();
    default: return to_text(v);
  }
}

}  // namespace

std::vector<Mark> encode_marks(const ViewDef& def, const Relation& rel,
                               const std::map<std::string, std::pair<double, double>>& extents,
                               std::map<std::string, ScaleSpec>* scales) {
  std::vector<Mark> marks;
  if (!def.mark) return marks;
  const auto& spec = *def.mark;
  check_mark_spec(spec, rel.schema());
  const std::size_t n = rel.row_count();
  marks.resize(n);
  for (std::size_t r = 0; r < n; ++r) {
    marks[r].id = static_cast<RowId>(r);
    marks[r].kind = spec.kind;
  }
  for (const auto& [name, b] : spec.channels) {
    switch (b.kind) {
      case ChannelBinding::Constant: {
        auto v = plain_value(b.constant);
        for (auto& m : marks) m.channels[name] = v;
        break;
      }
      case ChannelBinding::Column: {
        const auto& c = rel.column(b.column);
        for (std::size_t r = 0; r < n; ++r) marks[r].channels[name] = plain_value(c.value(r));
        break;
      }
      case ChannelBinding::Scaled: {
        if (n == 0 && !b.scale.domain && !extents.count(b.scale.extent)) break;
        const auto s = resolve_scale(b.scale, extents);
        if (scales) (*scales)[name] = s;
        const auto& c = rel.column(b.column);
        for (std::size_t r = 0; r < n; ++r) {
          auto& slot = marks[r].channels[name];
          if (!c.is_valid(r)) {
            slot = std::monostate{};
          } else if (s.kind == ScaleKind::LinearColorRamp) {
            slot = apply_color(s, c.numeric(r));
          } else {
            slot = apply_position(s, c.numeric(r));
          }
        }
        break;
      }
      case ChannelBinding::Geo: {
        if (n == 0) break;
        const auto sx = resolve_scale(b.scale, extents);
        const auto sy = resolve_scale(b.scale_y, extents);
        if (scales) {
          (*scales)[name + ".x"] = sx;
          (*scales)[name + ".y"] = sy;
        }
        const auto& c = rel.column(b.column);
        for (std::size_t r = 0; r < n; ++r) {
          auto& slot = marks[r].channels[name];
          if (!c.is_valid(r)) {
            slot = std::monostate{};
            continue;
          }
          std::vector<PixelRing> rings;
          for (const auto& ring : c.polygon_pool()[c.codes()[r]]) {
            PixelRing px;
            for (const auto& p : ring) px.push_back({apply_position(sx, p.lon), apply_position(sy, p.lat)});
            rings.push_back(std::move(px));
          }
          slot = std::move(rings);
        }
        break;
      }
    }
  }
  if (spec.kind == MarkKind::Rect && !spec.channels.count("y")) {
    // Bars stand on the bottom edge of the viewport.
    for (auto& m : marks) {
      const auto* h = number(m.channels["height"]);
      m.channels["y"] = h ? ChannelValue(def.viewport.height - *h) : ChannelValue(std::monostate{});
    }
  }
  if (spec.kind == MarkKind::Circle && !spec.channels.count("r")) {
    for (auto& m : marks) m.channels["r"] = kDefaultRadius;
  }
  return marks;
}

EvaluatedView::EvaluatedView(ViewDef def, std::shared_ptr<const Workflow> wf,
                             std::map<std::string, std::string> names)
    : def_(std::move(def)), wf_(std::move(wf)), names_(std::move(names)) {}

std::string EvaluatedView::global(const std::string& local) const {
  auto it = names_.find(local);
  if (it != names_.end()) return it->second;
  if (wf_->contains(local) && wf_->is_base(local)) return local;
  throw Error(ErrorCode::UnknownRelation,
              "view '" + def_.id + "' has no relation '" + local + "'");
}

const RelationPtr& EvaluatedView::relation(const std::string& local) const {
  return wf_->relation(global(local));
}

RelationPtr EvaluatedView::mark_relation() const {
  if (!def_.mark) return nullptr;
  return relation(def_.mark->relation);
}

std::vector<std::string> EvaluatedView::outputs() const {
  std::vector<std::string> out{def_.data};
  if (def_.mark) out.push_back(def_.mark->relation);
  for (const auto& e : def_.extents) out.push_back(e.relation);
  return out;
}

std::set<std::string> EvaluatedView::bases() const {
  std::set<std::string> out;
  for (const auto& local : outputs()) {
    auto b = wf_->bases_of(global(local));
    out.insert(b.begin(), b.end());
  }
  return out;
}

namespace {

/// Extents over the given relations; skipped when there is nothing to draw.
std::map<std::string, std::pair<double, double>> compute_extents(
    const ViewDef& def, const std::function<RelationPtr(const std::string&)>& rel_of,
    std::size_t mark_rows) {
  std::map<std::string, std::pair<double, double>> out;
  for (const auto& e : def.extents) {
    try {
      auto [mi, mx] = extent(*rel_of(e.relation), e.column);
      out[e.name] = {mi.numeric(), mx.numeric()};
    } catch (const Error& err) {
      if (err.code() != ErrorCode::EmptyExtent || mark_rows > 0) throw;
    }
  }
  return out;
}

}  // namespace

ViewSet ViewSet::build(std::vector<ViewDef> defs, const Catalog& bases) {
  std::vector<WorkflowDef> workflows;
  std::vector<std::string> ids;
  for (const auto& d : defs) {
    if (std::find(ids.begin(), ids.end(), d.id) != ids.end()) {
      throw Error(ErrorCode::InvalidArgument, "duplicate view id '" + d.id + "'");
    }
    if (d.mark && (!(d.viewport.width > 0) || !(d.viewport.height > 0))) {
      throw Error(ErrorCode::InvalidArgument, "view '" + d.id + "' needs a positive viewport");
    }
    ids.push_back(d.id);
    workflows.push_back(d.workflow);
  }
  auto merged = merge_plans(workflows, ids, bases);
  std::vector<std::string> sinks;
  for (std::size_t i = 0; i < defs.size(); ++i) {
    auto& names = merged.names[i];
    std::vector<std::string> locals{defs[i].data};
    if (defs[i].mark) locals.push_back(defs[i].mark->relation);
    for (const auto& e : defs[i].extents) locals.push_back(e.relation);
    for (const auto& b : defs[i].selection_bound) bases.get(b);
    for (const auto& l : locals) {
      auto it = names.find(l);
      if (it != names.end()) {
        sinks.push_back(it->second);
      } else {
        bases.get(l);
        sinks.push_back(l);
      }
    }
  }
  ViewSet set;
  set.wf_ = std::make_shared<const Workflow>(
      Workflow::evaluate(merged.def, bases, {.capture_lineage = true, .sinks = sinks, .prune_columns = true}));
  for (std::size_t i = 0; i < defs.size(); ++i) {
    EvaluatedView v(std::move(defs[i]), set.wf_, std::move(merged.names[i]));
    auto marks_rel = v.mark_relation();
    v.extents_ = compute_extents(
        v.def_, [&](const std::string& l) { return v.relation(l); },
        marks_rel ? marks_rel->row_count() : 0);
    if (marks_rel) v.marks_ = encode_marks(v.def_, *marks_rel, v.extents_, &v.scales_);
    set.views_.push_back(std::move(v));
  }
  return set;
}

const EvaluatedView& ViewSet::view(std::string_view id) const {
  for (const auto& v : views_) {
    if (v.id() == id) return v;
  }
  throw Error(ErrorCode::UnknownView, "unknown view '" + std::string(id) + "'");
}

bool ViewSet::contains(std::string_view id) const {
  return std::any_of(views_.begin(), views_.end(), [&](const auto& v) { return v.id() == id; });
}

std::map<std::string, RefreshedView> ViewSet::refresh(const std::map<std::string, RowSet>& subsets,
                                                      std::span<const std::string> view_ids) const {
  std::vector<std::string> sinks;
  for (const auto& id : view_ids) {
    const auto& v = view(id);
    for (const auto& l : v.outputs()) sinks.push_back(v.global(l));
  }
  std::sort(sinks.begin(), sinks.end());
  sinks.erase(std::unique(sinks.begin(), sinks.end()), sinks.end());
  auto fresh = refresh_many(*wf_, subsets, sinks);
  std::map<std::string, RefreshedView> out;
  for (const auto& id : view_ids) {
    const auto& v = view(id);
    auto rel_of = [&](const std::string& l) { return fresh.at(v.global(l)); };
    RefreshedView r;
    r.data = rel_of(v.def().data);
    if (v.def().mark) {
      r.mark_relation = rel_of(v.def().mark->relation);
      r.marks = encode_marks(v.def(), *r.mark_relation, v.extents());
    }
    out.emplace(id, std::move(r));
  }
  return out;
}

EvaluatedView build_view(const ViewDef& def, const Catalog& bases) {
  return ViewSet::build({def}, bases).views().front();
}

namespace {

bool intersects(const Box& a, const Box& b) {
  return a.x0 <= b.x1 && b.x0 <= a.x1 && a.y0 <= b.y1 && b.y0 <= a.y1;
}

std::optional<Expr> interval(const std::string& column, const ScaleSpec& s, double p0, double p1) {
  if (s.mi == s.mx) {
    // Every value sits at the midpoint.
    const double mid = apply_position(s, s.mi);
    if (p0 <= mid && mid <= p1) return Expr::negate(Expr::is_null(col(column)));
    return lit(false);
  }
  // A bound reaching past a range end also takes the values clamped there.
  const bool open_low = p0 <= s.lo && s.lo <= p1;
  const bool open_high = p0 <= s.hi && s.hi <= p1;
  double a = invert_scale(s, p0);
  double b = invert_scale(s, p1);
  if (a > b) std::swap(a, b);
  if (open_low && open_high) return Expr::negate(Expr::is_null(col(column)));
  if (open_low) return le(col(column), lit(b));
  if (open_high) return ge(col(column), lit(a));
  return Expr::between(col(column), lit(a), lit(b));
}

std::optional<Expr> range_predicate(const EvaluatedView& view, const Box& box) {
  const auto& spec = *view.def().mark;
  if (spec.kind == MarkKind::Polygon) return std::nullopt;
  const auto& scales = view.scales();
  std::vector<Expr> parts;
  auto scaled = [&](const std::string& ch) -> const ChannelBinding* {
    auto it = spec.channels.find(ch);
    if (it == spec.channels.end() || it->second.kind != ChannelBinding::Scaled) return nullptr;
    if (!scales.count(ch)) return nullptr;
    return &it->second;
  };
  if (const auto* x = scaled("x")) {
    if (auto e = interval(x->column, scales.at("x"), box.x0, box.x1)) parts.push_back(*e);
  }
  if (const auto* y = scaled("y")) {
    if (auto e = interval(y->column, scales.at("y"), box.y0, box.y1)) parts.push_back(*e);
  } else if (const auto* h = scaled("height");
             h && spec.kind == MarkKind::Rect && !spec.channels.count("y")) {
    const double height = view.def().viewport.height;
    const auto& s = scales.at("height");
    if (s.mi == s.mx) {
      parts.push_back(height - box.y1 > apply_position(s, s.mi)
                          ? lit(false)
                          : Expr::negate(Expr::is_null(col(h->column))));
    } else if (box.y1 < height) {
      parts.push_back(ge(col(h->column), lit(invert_scale(s, height - box.y1))));
    }
  }
  if (parts.empty()) return std::nullopt;
  return Expr::all_of(std::move(parts));
}

}  // namespace

ResolvedSelection resolve_selection(const EvaluatedView& view, const Selection& sel) {
  ResolvedSelection out;
  const auto marks_rel = view.mark_relation();
  const std::size_t n = view.marks().size();
  switch (sel.kind) {
    case Selection::Items:
      if (sel.items.max_plus_one() > n) {
        throw Error(ErrorCode::RowIdOutOfRange, "mark id out of range for view '" + view.id() + "'");
      }
      out.marks = sel.items;
      return out;
    case Selection::Range: {
      const auto& b = sel.box;
      const auto& vp = view.def().viewport;
      const bool finite = std::isfinite(b.x0) && std::isfinite(b.x1) && std::isfinite(b.y0) &&
                          std::isfinite(b.y1);
      if (!finite || b.x0 > b.x1 || b.y0 > b.y1 || b.x0 < 0 || b.y0 < 0 || b.x1 > vp.width ||
          b.y1 > vp.height) {
        throw Error(ErrorCode::SelectionOutOfViewport,
                    "selection box outside the viewport of '" + view.id() + "'");
      }
      std::vector<RowId> hit;
      for (const auto& m : view.marks()) {
        auto mb = mark_bounds(m);
        if (mb && intersects(*mb, b)) hit.push_back(m.id);
      }
      out.marks = RowSet::from_sorted(std::move(hit));
      if (view.def().mark) out.predicate = range_predicate(view, b);
      return out;
    }
    case Selection::Predicate: {
      if (!sel.predicate) throw Error(ErrorCode::BadSelection, "predicate selection without a predicate");
      if (!marks_rel) return out;
      infer_type(*sel.predicate, marks_rel->schema());
      out.marks = RowSet::from_sorted(select_rows(*sel.predicate, *marks_rel));
      return out;
    }
  }
  return out;
}

}  // namespace provis
