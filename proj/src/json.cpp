#include "provis/json.hpp"

#include <cmath>

#include "provis/error.hpp"

namespace provis {

namespace {

template <class F>
auto guarded(ErrorCode code, const char* what, F&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Json::exception& e) {
    throw Error(code, std::string("malformed ") + what + ": " + e.what());
  }
}

[[noreturn]] void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

CompareOp parse_compare(const std::string& s) {
  for (auto op : {CompareOp::Eq, CompareOp::Ne, CompareOp::Lt, CompareOp::Le, CompareOp::Gt,
                  CompareOp::Ge}) {
    if (to_string(op) == s) return op;
  }
  fail(ErrorCode::ParseError, "unknown comparison '" + s + "'");
}

ArithOp parse_arith(const std::string& s) {
  for (auto op : {ArithOp::Add, ArithOp::Sub, ArithOp::Mul, ArithOp::Div}) {
    if (to_string(op) == s) return op;
  }
  fail(ErrorCode::ParseError, "unknown arithmetic operator '" + s + "'");
}

Expr expr_from(const Json& j) {
  if (!j.is_object() || j.empty()) fail(ErrorCode::ParseError, "expression must be an object");
  auto args = [&](const char* key) {
    std::vector<Expr> out;
    for (const auto& a : j.at(key)) out.push_back(expr_from(a));
    return out;
  };
  if (j.contains("col")) return col(j.at("col").get<std::string>());
  if (j.contains("lit")) return lit(value_from_json(j.at("lit")));
  if (j.contains("cmp")) {
    auto a = args("args");
    if (a.size() != 2) fail(ErrorCode::ParseError, "comparison takes two arguments");
    return Expr::compare(parse_compare(j.at("cmp").get<std::string>()), a[0], a[1]);
  }
  if (j.contains("arith")) {
    auto a = args("args");
    if (a.size() != 2) fail(ErrorCode::ParseError, "arithmetic takes two arguments");
    return Expr::arith(parse_arith(j.at("arith").get<std::string>()), a[0], a[1]);
  }
  if (j.contains("and")) return Expr::all_of(args("and"));
  if (j.contains("or")) return Expr::any_of(args("or"));
  if (j.contains("not")) return Expr::negate(expr_from(j.at("not")));
  if (j.contains("between")) {
    auto a = args("between");
    if (a.size() != 3) fail(ErrorCode::ParseError, "between takes three arguments");
    return Expr::between(a[0], a[1], a[2]);
  }
  if (j.contains("in")) {
    std::vector<Value> values;
    for (const auto& v : j.at("values")) values.push_back(value_from_json(v));
    return Expr::in(expr_from(j.at("in")), std::move(values));
  }
  if (j.contains("is_null")) return Expr::is_null(expr_from(j.at("is_null")));
  if (j.contains("floor")) return Expr::floor(expr_from(j.at("floor")));
  fail(ErrorCode::ParseError, "unknown expression " + j.dump());
}

Json scale_ref_to_json(const ScaleRef& s) {
  Json j;
  const bool ramp = s.kind == ScaleKind::LinearColorRamp;
  j["kind"] = ramp ? "linear_color_ramp" : "linear_position";
  if (s.domain) {
    j["domain"] = {s.domain->first, s.domain->second};
  } else {
    j["extent"] = s.extent;
    if (s.zero_based) j["zero_based"] = true;
  }
  if (ramp) {
    j["ramp"] = {{s.from.r, s.from.g, s.from.b}, {s.to.r, s.to.g, s.to.b}};
  } else {
    j["range"] = {s.lo, s.hi};
  }
  return j;
}

Rgb rgb_from(const Json& j) {
  if (!j.is_array() || j.size() != 3) fail(ErrorCode::ParseError, "color must be [r, g, b]");
  return Rgb{j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

ScaleRef scale_ref_from(const Json& j) {
  ScaleRef s;
  const auto kind = j.value("kind", std::string("linear_position"));
  if (kind == "linear_color_ramp") {
    s.kind = ScaleKind::LinearColorRamp;
  } else if (kind != "linear_position") {
    fail(ErrorCode::ParseError, "unknown scale kind '" + kind + "'");
  }
  if (j.contains("domain")) {
    const auto& d = j.at("domain");
    if (!d.is_array() || d.size() != 2) fail(ErrorCode::ParseError, "domain must be [mi, mx]");
    s.domain = std::make_pair(d[0].get<double>(), d[1].get<double>());
  } else {
    s.extent = j.at("extent").get<std::string>();
    s.zero_based = j.value("zero_based", false);
  }
  if (j.contains("range")) {
    const auto& r = j.at("range");
    if (!r.is_array() || r.size() != 2) fail(ErrorCode::ParseError, "range must be [lo, hi]");
    s.lo = r[0].get<double>();
    s.hi = r[1].get<double>();
  }
  if (j.contains("ramp")) {
    const auto& r = j.at("ramp");
    if (!r.is_array() || r.size() != 2) fail(ErrorCode::ParseError, "ramp must be [from, to]");
    s.from = rgb_from(r[0]);
    s.to = rgb_from(r[1]);
  }
  return s;
}

Json binding_to_json(const ChannelBinding& b) {
  Json j;
  switch (b.kind) {
    case ChannelBinding::Column:
      j["kind"] = "column";
      j["column"] = b.column;
      break;
    case ChannelBinding::Scaled:
      j["kind"] = "scaled";
      j["column"] = b.column;
      j["scale"] = scale_ref_to_json(b.scale);
      break;
    case ChannelBinding::Constant:
      j["kind"] = "constant";
      j["value"] = value_to_json(b.constant);
      break;
    case ChannelBinding::Geo:
      j["kind"] = "geo";
      j["column"] = b.column;
      j["scale"] = scale_ref_to_json(b.scale);
      j["scale_y"] = scale_ref_to_json(b.scale_y);
      break;
  }
  return j;
}

ChannelBinding binding_from(const Json& j) {
  ChannelBinding b;
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "column") {
    b.kind = ChannelBinding::Column;
    b.column = j.at("column").get<std::string>();
  } else if (kind == "scaled") {
    b.kind = ChannelBinding::Scaled;
    b.column = j.at("column").get<std::string>();
    b.scale = scale_ref_from(j.at("scale"));
  } else if (kind == "constant") {
    b.kind = ChannelBinding::Constant;
    b.constant = value_from_json(j.at("value"));
  } else if (kind == "geo") {
    b.kind = ChannelBinding::Geo;
    b.column = j.at("column").get<std::string>();
    b.scale = scale_ref_from(j.at("scale"));
    b.scale_y = scale_ref_from(j.at("scale_y"));
  } else {
    fail(ErrorCode::ParseError, "unknown channel binding '" + kind + "'");
  }
  return b;
}

Json node_to_json(const OpNode& n) {
  Json j;
  j["output"] = n.output;
  j["op"] = std::string(op_kind(n.op));
  std::visit(
      [&](const auto& op) {
        using T = std::decay_t<decltype(op)>;
        if constexpr (std::is_same_v<T, FilterOp>) {
          j["input"] = op.input;
          j["predicate"] = expr_to_json(op.predicate);
        } else if constexpr (std::is_same_v<T, ProjectOp>) {
          j["input"] = op.input;
          j["exprs"] = Json::array();
          for (const auto& e : op.exprs) {
            j["exprs"].push_back({{"expr", expr_to_json(e.expr)}, {"name", e.name}});
          }
        } else if constexpr (std::is_same_v<T, JoinOp>) {
          j["left"] = op.left;
          j["right"] = op.right;
          j["left_key"] = op.left_key;
          j["right_key"] = op.right_key;
          if (!op.right_prefix.empty()) j["right_prefix"] = op.right_prefix;
        } else {
          j["input"] = op.input;
          j["keys"] = op.keys;
          j["aggs"] = Json::array();
          for (const auto& a : op.aggs) {
            Json aj{{"fn", std::string(to_string(a.fn))}, {"name", a.name}};
            if (a.column) aj["column"] = *a.column;
            j["aggs"].push_back(aj);
          }
        }
      },
      n.op);
  return j;
}

OpSpec op_from(const Json& j) {
  const auto op = j.at("op").get<std::string>();
  if (op == "filter") return FilterOp{j.at("input").get<std::string>(), expr_from(j.at("predicate"))};
  if (op == "project") {
    ProjectOp p{j.at("input").get<std::string>(), {}};
    for (const auto& e : j.at("exprs")) {
      p.exprs.push_back({expr_from(e.at("expr")), e.at("name").get<std::string>()});
    }
    return p;
  }
  if (op == "join") {
    return JoinOp{j.at("left").get<std::string>(), j.at("right").get<std::string>(),
                  j.at("left_key").get<std::string>(), j.at("right_key").get<std::string>(),
                  j.value("right_prefix", std::string())};
  }
  if (op == "group") {
    GroupOp g{j.at("input").get<std::string>(), j.at("keys").get<std::vector<std::string>>(), {}};
    for (const auto& a : j.at("aggs")) {
      AggSpec spec;
      try {
        spec.fn = parse_agg_fn(a.at("fn").get<std::string>());
      } catch (const Error& e) {
        fail(ErrorCode::ParseError, e.what());
      }
      if (a.contains("column")) spec.column = a.at("column").get<std::string>();
      spec.name = a.at("name").get<std::string>();
      g.aggs.push_back(std::move(spec));
    }
    return g;
  }
  fail(ErrorCode::ParseError, "unknown operator '" + op + "'");
}

OpNode node_from(const Json& j) { return OpNode{j.at("output").get<std::string>(), op_from(j)}; }

}  // namespace

Json value_to_json(const Value& v) {
  switch (v.type()) {
    case ValueType::Null: return nullptr;
    case ValueType::Int64: return v.as_int();
    case ValueType::Float64: return number(v.as_float());
    case ValueType::Text: return v.as_text();
    case ValueType::Bool: return v.as_bool();
    case ValueType::PolygonList: {
      Json out = Json::array();
      for (const auto& ring : v.as_polygons()) {
        Json r = Json::array();
        for (const auto& p : ring) r.push_back({p.lon, p.lat});
        out.push_back(r);
      }
      return out;
    }
  }
  return nullptr;
}

Value value_from_json(const Json& j) {
  switch (j.type()) {
    case Json::value_t::null: return Value();
    case Json::value_t::boolean: return Value(j.get<bool>());
    case Json::value_t::number_integer: return Value(j.get<std::int64_t>());
    case Json::value_t::number_unsigned: {
      const auto u = j.get<std::uint64_t>();
      if (u > static_cast<std::uint64_t>(INT64_MAX)) fail(ErrorCode::ParseError, "integer out of range");
      return Value(static_cast<std::int64_t>(u));
    }
    case Json::value_t::number_float: return Value(j.get<double>());
    case Json::value_t::string: return Value(j.get<std::string>());
    default: fail(ErrorCode::ParseError, "unsupported literal " + j.dump());
  }
}

Json expr_to_json(const Expr& e) {
  auto all = [](const std::vector<Expr>& xs) {
    Json out = Json::array();
    for (const auto& x : xs) out.push_back(expr_to_json(x));
    return out;
  };
  const auto& c = e.children();
  switch (e.kind()) {
    case ExprKind::Column: return {{"col", e.column_name()}};
    case ExprKind::Literal: return {{"lit", value_to_json(e.literal_value())}};
    case ExprKind::Compare: return {{"cmp", std::string(to_string(e.compare_op()))}, {"args", all(c)}};
    case ExprKind::Arith: return {{"arith", std::string(to_string(e.arith_op()))}, {"args", all(c)}};
    case ExprKind::And: return {{"and", all(c)}};
    case ExprKind::Or: return {{"or", all(c)}};
    case ExprKind::Not: return {{"not", expr_to_json(c.at(0))}};
    case ExprKind::Between: return {{"between", all(c)}};
    case ExprKind::In: {
      Json values = Json::array();
      for (const auto& v : e.values()) values.push_back(value_to_json(v));
      return {{"in", expr_to_json(c.at(0))}, {"values", values}};
    }
    case ExprKind::IsNull: return {{"is_null", expr_to_json(c.at(0))}};
    case ExprKind::Floor: return {{"floor", expr_to_json(c.at(0))}};
  }
  return nullptr;
}

Expr expr_from_json(const Json& j) {
  return guarded(ErrorCode::ParseError, "expression", [&] { return expr_from(j); });
}

Json selection_to_json(const Selection& s) {
  switch (s.kind) {
    case Selection::Items: {
      Json ids = Json::array();
      for (auto r : s.items) ids.push_back(r);
      return {{"items", ids}};
    }
    case Selection::Range: return {{"range", {s.box.x0, s.box.y0, s.box.x1, s.box.y1}}};
    case Selection::Predicate:
      return {{"predicate", s.predicate ? expr_to_json(*s.predicate) : Json(nullptr)}};
  }
  return nullptr;
}

Selection selection_from_json(const Json& j) {
  try {
    if (!j.is_object() || j.size() != 1) fail(ErrorCode::BadSelection, "selection needs exactly one of items, range, predicate");
    if (j.contains("items")) {
      std::vector<RowId> ids;
      for (const auto& v : j.at("items")) {
        if (!v.is_number_integer() || v.get<std::int64_t>() < 0 ||
            v.get<std::int64_t>() > std::int64_t{UINT32_MAX}) {
          fail(ErrorCode::BadSelection, "mark ids must be non-negative integers");
        }
        ids.push_back(static_cast<RowId>(v.get<std::int64_t>()));
      }
      std::sort(ids.begin(), ids.end());
      ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
      return Selection::of_items(RowSet::from_sorted(std::move(ids)));
    }
    if (j.contains("range")) {
      const auto& r = j.at("range");
      if (!r.is_array() || r.size() != 4) fail(ErrorCode::BadSelection, "range must be [x0, y0, x1, y1]");
      for (const auto& v : r) {
        if (!v.is_number()) fail(ErrorCode::BadSelection, "range bounds must be numbers");
      }
      Box b{r[0].get<double>(), r[1].get<double>(), r[2].get<double>(), r[3].get<double>()};
      if (b.x0 > b.x1 || b.y0 > b.y1) fail(ErrorCode::BadSelection, "range needs x0 <= x1 and y0 <= y1");
      return Selection::of_range(b);
    }
    if (j.contains("predicate")) {
      try {
        return Selection::of_predicate(expr_from(j.at("predicate")));
      } catch (const Error& e) {
        fail(ErrorCode::BadSelection, e.what());
      }
    }
    fail(ErrorCode::BadSelection, "selection needs exactly one of items, range, predicate");
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::BadSelection, std::string("malformed selection: ") + e.what());
  }
}

Json rgb_to_json(const Rgb& c) {
  return "rgb(" + format_double(c.r) + "," + format_double(c.g) + "," + format_double(c.b) + ")";
}

Json mark_to_json(const Mark& m) {
  Json channels = Json::object();
  for (const auto& [name, v] : m.channels) {
    channels[name] = std::visit(
        [](const auto& x) -> Json {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, std::monostate>) {
            return nullptr;
          } else if constexpr (std::is_same_v<T, double>) {
            return number(x);
          } else if constexpr (std::is_same_v<T, std::string>) {
            return x;
          } else if constexpr (std::is_same_v<T, Rgb>) {
            return rgb_to_json(x);
          } else {
            Json rings = Json::array();
            for (const auto& ring : x) {
              Json r = Json::array();
              for (const auto& p : ring) r.push_back({number(p[0]), number(p[1])});
              rings.push_back(r);
            }
            return rings;
          }
        },
        v);
  }
  return {{"id", m.id}, {"kind", std::string(to_string(m.kind))}, {"channels", channels}};
}

Json marks_to_json(const std::vector<Mark>& marks) {
  Json out = Json::array();
  for (const auto& m : marks) out.push_back(mark_to_json(m));
  return out;
}

Json relation_to_json(const Relation& rel) {
  Json rows = Json::array();
  for (RowId r = 0; r < rel.row_count(); ++r) {
    Json row = Json::array();
    for (std::size_t c = 0; c < rel.column_count(); ++c) row.push_back(value_to_json(rel.value(r, c)));
    rows.push_back(std::move(row));
  }
  return {{"name", rel.name()}, {"columns", schema_to_json(rel.schema())}, {"rows", rows}};
}

Json schema_to_json(const Schema& s) {
  Json out = Json::array();
  for (const auto& c : s.columns()) out.push_back({{"name", c.name}, {"type", std::string(to_string(c.type))}});
  return out;
}

Schema schema_from_json(const Json& j) {
  return guarded(ErrorCode::SchemaMismatch, "schema", [&] {
    if (!j.is_array()) fail(ErrorCode::SchemaMismatch, "schema must be a list of columns");
    std::vector<ColumnDef> cols;
    for (const auto& c : j) {
      cols.push_back({c.at("name").get<std::string>(), parse_value_type(c.at("type").get<std::string>())});
    }
    return Schema(std::move(cols));
  });
}

Json workflow_to_json(const WorkflowDef& def) {
  Json out = Json::array();
  for (const auto& n : def.nodes) out.push_back(node_to_json(n));
  return out;
}

WorkflowDef workflow_from_json(const Json& j) {
  return guarded(ErrorCode::ParseError, "workflow", [&] {
    if (!j.is_array()) fail(ErrorCode::ParseError, "workflow must be a list of nodes");
    WorkflowDef def;
    for (const auto& n : j) def.nodes.push_back(node_from(n));
    return def;
  });
}

Json view_def_to_json(const ViewDef& def) {
  Json j;
  j["id"] = def.id;
  j["workflow"] = workflow_to_json(def.workflow);
  j["data"] = def.data;
  j["extents"] = Json::array();
  for (const auto& e : def.extents) {
    j["extents"].push_back({{"name", e.name}, {"relation", e.relation}, {"column", e.column}});
  }
  if (def.mark) {
    Json channels = Json::object();
    for (const auto& [name, b] : def.mark->channels) channels[name] = binding_to_json(b);
    j["mark"] = {{"relation", def.mark->relation},
                 {"kind", std::string(to_string(def.mark->kind))},
                 {"channels", channels}};
    j["viewport"] = {{"width", def.viewport.width}, {"height", def.viewport.height}};
  }
  if (!def.selection_bound.empty()) j["selection_bound"] = def.selection_bound;
  return j;
}

ViewDef view_def_from_json(const Json& j) {
  return guarded(ErrorCode::ParseError, "view definition", [&] {
    ViewDef def;
    def.id = j.at("id").get<std::string>();
    if (j.contains("workflow")) def.workflow = workflow_from_json(j.at("workflow"));
    def.data = j.at("data").get<std::string>();
    for (const auto& e : j.value("extents", Json::array())) {
      def.extents.push_back({e.at("name").get<std::string>(), e.at("relation").get<std::string>(),
                             e.at("column").get<std::string>()});
    }
    if (j.contains("mark")) {
      const auto& m = j.at("mark");
      MarkSpec spec;
      spec.relation = m.at("relation").get<std::string>();
      try {
        spec.kind = parse_mark_kind(m.at("kind").get<std::string>());
      } catch (const Error& e) {
        fail(ErrorCode::ParseError, e.what());
      }
      for (const auto& [name, b] : m.at("channels").items()) spec.channels[name] = binding_from(b);
      def.mark = std::move(spec);
      const auto& vp = j.at("viewport");
      def.viewport = {vp.at("width").get<double>(), vp.at("height").get<double>()};
    }
    if (j.contains("selection_bound")) {
      def.selection_bound = j.at("selection_bound").get<std::vector<std::string>>();
    }
    return def;
  });
}

}  // namespace provis
