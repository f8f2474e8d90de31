#include "provis/expr.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <absl/container/flat_hash_set.h>

#include "provis/error.hpp"

namespace provis {

struct Expr::Node {
  ExprKind kind;
  std::string name;
  Value value;
  int op = 0;
  std::vector<Expr> children;
  std::vector<Value> values;
};

std::string_view to_string(CompareOp op) {
  switch (op) {
    case CompareOp::Eq: return "=";
    case CompareOp::Ne: return "!=";
    case CompareOp::Lt: return "<";
    case CompareOp::Le: return "<=";
    case CompareOp::Gt: return ">";
    case CompareOp::Ge: return ">=";
  }
  return "?";
}

std::string_view to_string(ArithOp op) {
  switch (op) {
    case ArithOp::Add: return "+";
    case ArithOp::Sub: return "-";
    case ArithOp::Mul: return "*";
    case ArithOp::Div: return "/";
  }
  return "?";
}

Expr Expr::column(std::string name) {
  return Expr(std::make_shared<const Node>(Node{ExprKind::Column, std::move(name), {}, 0, {}, {}}));
}

Expr Expr::literal(Value v) {
  return Expr(std::make_shared<const Node>(Node{ExprKind::Literal, {}, std::move(v), 0, {}, {}}));
}

Expr Expr::compare(CompareOp op, Expr lhs, Expr rhs) {
  return Expr(std::make_shared<const Node>(
      Node{ExprKind::Compare, {}, {}, static_cast<int>(op), {std::move(lhs), std::move(rhs)}, {}}));
}

Expr Expr::arith(ArithOp op, Expr lhs, Expr rhs) {
  return Expr(std::make_shared<const Node>(
      Node{ExprKind::Arith, {}, {}, static_cast<int>(op), {std::move(lhs), std::move(rhs)}, {}}));
}

Expr Expr::all_of(std::vector<Expr> args) {
  if (args.empty()) return literal(Value(true));
  if (args.size() == 1) return args.front();
  return Expr(std::make_shared<const Node>(Node{ExprKind::And, {}, {}, 0, std::move(args), {}}));
}

Expr Expr::any_of(std::vector<Expr> args) {
  if (args.empty()) return literal(Value(false));
  if (args.size() == 1) return args.front();
  return Expr(std::make_shared<const Node>(Node{ExprKind::Or, {}, {}, 0, std::move(args), {}}));
}

Expr Expr::negate(Expr arg) {
  return Expr(std::make_shared<const Node>(Node{ExprKind::Not, {}, {}, 0, {std::move(arg)}, {}}));
}

Expr Expr::between(Expr arg, Expr lo, Expr hi) {
  return Expr(std::make_shared<const Node>(
      Node{ExprKind::Between, {}, {}, 0, {std::move(arg), std::move(lo), std::move(hi)}, {}}));
}

Expr Expr::in(Expr arg, std::vector<Value> values) {
  return Expr(std::make_shared<const Node>(
      Node{ExprKind::In, {}, {}, 0, {std::move(arg)}, std::move(values)}));
}

Expr Expr::is_null(Expr arg) {
  return Expr(std::make_shared<const Node>(Node{ExprKind::IsNull, {}, {}, 0, {std::move(arg)}, {}}));
}

Expr Expr::floor(Expr arg) {
  return Expr(std::make_shared<const Node>(Node{ExprKind::Floor, {}, {}, 0, {std::move(arg)}, {}}));
}

ExprKind Expr::kind() const { return node_->kind; }
const std::string& Expr::column_name() const { return node_->name; }
const Value& Expr::literal_value() const { return node_->value; }
CompareOp Expr::compare_op() const { return static_cast<CompareOp>(node_->op); }
ArithOp Expr::arith_op() const { return static_cast<ArithOp>(node_->op); }
const std::vector<Expr>& Expr::children() const { return node_->children; }
const std::vector<Value>& Expr::values() const { return node_->values; }

std::set<std::string> Expr::referenced_columns() const {
  std::set<std::string> out;
  if (kind() == ExprKind::Column) out.insert(column_name());
  for (const auto& c : children()) {
    auto sub = c.referenced_columns();
    out.insert(sub.begin(), sub.end());
  }
  return out;
}

namespace {

std::string literal_text(const Value& v) {
  switch (v.type()) {
    case ValueType::Null: return "NULL";
    case ValueType::Bool: return v.as_bool() ? "TRUE" : "FALSE";
    case ValueType::Int64: return std::to_string(v.as_int());
    case ValueType::Float64: {
      std::string s = format_double(v.as_float());
      if (s.find_first_of(".eEin") == std::string::npos) s += ".0";
      return s;
    }
    case ValueType::Text: {
      std::string out = "'";
      for (char c : v.as_text()) {
        if (c == '\'') out += '\'';
        out += c;
      }
      return out + "'";
    }
    case ValueType::PolygonList: return "POLYGONS(" + format_polygons(v.as_polygons()) + ")";
  }
  return "?";
}

}  // namespace

std::string Expr::to_string() const {
  std::ostringstream os;
  switch (kind()) {
    case ExprKind::Column: os << '"' << column_name() << '"'; break;
    case ExprKind::Literal: os << literal_text(literal_value()); break;
    case ExprKind::Compare:
      os << '(' << children()[0].to_string() << ' ' << provis::to_string(compare_op()) << ' '
         << children()[1].to_string() << ')';
      break;
    case ExprKind::Arith:
      os << '(' << children()[0].to_string() << ' ' << provis::to_string(arith_op()) << ' '
         << children()[1].to_string() << ')';
      break;
    case ExprKind::And:
    case ExprKind::Or: {
      os << '(';
      for (std::size_t i = 0; i < children().size(); ++i) {
        if (i) os << (kind() == ExprKind::And ? " AND " : " OR ");
        os << children()[i].to_string();
      }
      os << ')';
      break;
    }
    case ExprKind::Not: os << "(NOT " << children()[0].to_string() << ')'; break;
    case ExprKind::Between:
      os << '(' << children()[0].to_string() << " BETWEEN " << children()[1].to_string()
         << " AND " << children()[2].to_string() << ')';
      break;
    case ExprKind::In: {
      os << '(' << children()[0].to_string() << " IN (";
      for (std::size_t i = 0; i < values().size(); ++i) {
        if (i) os << ", ";
        os << literal_text(values()[i]);
      }
      os << "))";
      break;
    }
    case ExprKind::IsNull: os << '(' << children()[0].to_string() << " IS NULL)"; break;
    case ExprKind::Floor: os << "FLOOR(" << children()[0].to_string() << ')'; break;
  }
  return os.str();
}

Expr col(std::string name) { return Expr::column(std::move(name)); }
Expr lit(Value v) { return Expr::literal(std::move(v)); }
Expr eq(Expr a, Expr b) { return Expr::compare(CompareOp::Eq, std::move(a), std::move(b)); }
Expr ne(Expr a, Expr b) { return Expr::compare(CompareOp::Ne, std::move(a), std::move(b)); }
Expr lt(Expr a, Expr b) { return Expr::compare(CompareOp::Lt, std::move(a), std::move(b)); }
Expr le(Expr a, Expr b) { return Expr::compare(CompareOp::Le, std::move(a), std::move(b)); }
Expr gt(Expr a, Expr b) { return Expr::compare(CompareOp::Gt, std::move(a), std::move(b)); }
Expr ge(Expr a, Expr b) { return Expr::compare(CompareOp::Ge, std::move(a), std::move(b)); }

namespace {

[[noreturn]] void type_error(const std::string& msg) { throw Error(ErrorCode::TypeError, msg); }

bool comparable(ValueType a, ValueType b) {
  if (a == ValueType::Null || b == ValueType::Null) return true;
  if (is_numeric(a) && is_numeric(b)) return true;
  return a == b;
}

void require_bool(ValueType t, const Expr& e) {
  if (t != ValueType::Bool && t != ValueType::Null) {
    type_error("expected boolean operand in " + e.to_string());
  }
}

void require_numeric(ValueType t, const Expr& e) {
  if (!is_numeric(t) && t != ValueType::Null) {
    type_error("expected numeric operand in " + e.to_string());
  }
}

}  // namespace

ValueType infer_type(const Expr& expr, const Schema& schema) {
  switch (expr.kind()) {
    case ExprKind::Column: {
      auto idx = schema.find(expr.column_name());
      if (!idx) type_error("unknown column '" + expr.column_name() + "'");
      return schema.at(*idx).type;
    }
    case ExprKind::Literal: return expr.literal_value().type();
    case ExprKind::Compare: {
      auto a = infer_type(expr.children()[0], schema);
      auto b = infer_type(expr.children()[1], schema);
      if (!comparable(a, b)) type_error("incomparable operands in " + expr.to_string());
      if ((a == ValueType::PolygonList || b == ValueType::PolygonList) &&
          expr.compare_op() != CompareOp::Eq && expr.compare_op() != CompareOp::Ne) {
        type_error("polygons only support = and != in " + expr.to_string());
      }
      return ValueType::Bool;
    }
    case ExprKind::Arith: {
      auto a = infer_type(expr.children()[0], schema);
      auto b = infer_type(expr.children()[1], schema);
      require_numeric(a, expr);
      require_numeric(b, expr);
      if (expr.arith_op() == ArithOp::Div) return ValueType::Float64;
      if (a == ValueType::Float64 || b == ValueType::Float64) return ValueType::Float64;
      if (a == ValueType::Null && b == ValueType::Null) return ValueType::Null;
      return ValueType::Int64 == a || ValueType::Int64 == b ? ValueType::Int64 : ValueType::Float64;
    }
    case ExprKind::And:
    case ExprKind::Or:
      for (const auto& c : expr.children()) require_bool(infer_type(c, schema), expr);
      return ValueType::Bool;
    case ExprKind::Not:
      require_bool(infer_type(expr.children()[0], schema), expr);
      return ValueType::Bool;
    case ExprKind::Between: {
      auto a = infer_type(expr.children()[0], schema);
      for (std::size_t i = 1; i < 3; ++i) {
        if (!comparable(a, infer_type(expr.children()[i], schema))) {
          type_error("incomparable interval bound in " + expr.to_string());
        }
      }
      if (a == ValueType::PolygonList) type_error("polygons are not ordered");
      return ValueType::Bool;
    }
    case ExprKind::In: {
      auto a = infer_type(expr.children()[0], schema);
      for (const auto& v : expr.values()) {
        if (!comparable(a, v.type())) type_error("incomparable set member in " + expr.to_string());
      }
      return ValueType::Bool;
    }
    case ExprKind::IsNull:
      infer_type(expr.children()[0], schema);
      return ValueType::Bool;
    case ExprKind::Floor: {
      auto a = infer_type(expr.children()[0], schema);
      require_numeric(a, expr);
      return a == ValueType::Null ? ValueType::Float64 : a;
    }
  }
  return ValueType::Null;
}

namespace {

/// Intermediate result: either a full column or a broadcast scalar.
struct Operand {
  bool scalar = false;
  Value value;
  Column column;
  ValueType type = ValueType::Null;

  bool valid(std::size_t i) const { return scalar ? !value.is_null() : column.is_valid(i); }
  bool any_null() const { return scalar ? value.is_null() : column.has_nulls(); }
};

Operand scalar_operand(Value v) {
  Operand o;
  o.scalar = true;
  o.type = v.type();
  o.value = std::move(v);
  return o;
}

Operand column_operand(Column c) {
  Operand o;
  o.type = c.type();
  o.column = std::move(c);
  return o;
}

struct IntGet {
  const std::int64_t* p = nullptr;
  std::int64_t s = 0;
  std::int64_t operator()(std::size_t i) const { return p ? p[i] : s; }
};

struct DoubleGet {
  const double* pd = nullptr;
  const std::int64_t* pi = nullptr;
  double s = 0.0;
  double operator()(std::size_t i) const {
    if (pd) return pd[i];
    if (pi) return static_cast<double>(pi[i]);
    return s;
  }
};

struct BoolGet {
  const std::uint8_t* p = nullptr;
  std::uint8_t s = 0;
  std::uint8_t operator()(std::size_t i) const { return p ? p[i] : s; }
};

IntGet int_get(const Operand& o) {
  if (o.scalar) return IntGet{nullptr, o.value.is_null() ? 0 : o.value.as_int()};
  return IntGet{o.column.ints().data(), 0};
}

DoubleGet double_get(const Operand& o) {
  if (o.scalar) return DoubleGet{nullptr, nullptr, o.value.is_null() ? 0.0 : o.value.numeric()};
  if (o.type == ValueType::Int64) return DoubleGet{nullptr, o.column.ints().data(), 0.0};
  return DoubleGet{o.column.floats().data(), nullptr, 0.0};
}

BoolGet bool_get(const Operand& o) {
  if (o.scalar) return BoolGet{nullptr, static_cast<std::uint8_t>(!o.value.is_null() && o.value.as_bool())};
  return BoolGet{o.column.bools().data(), 0};
}

std::vector<std::uint8_t> merge_validity(std::size_t n, std::initializer_list<const Operand*> ops) {
  bool any = false;
  bool scalar_null = false;
  for (const auto* o : ops) {
    any = any || o->any_null();
    scalar_null = scalar_null || (o->scalar && o->value.is_null());
  }
  if (!any) return {};
  if (scalar_null) return std::vector<std::uint8_t>(n, 0);
  std::vector<std::uint8_t> valid;
  for (const auto* o : ops) {
    if (!o->any_null()) continue;
    const auto v = o->column.validity();
    if (valid.empty()) {
      valid.assign(v.begin(), v.end());
    } else {
      for (std::size_t i = 0; i < n; ++i) valid[i] &= v[i];
    }
  }
  return valid;
}

/// Calls k with a per-row reader of o as double.
template <typename K>
auto with_doubles(const Operand& o, K&& k) {
  if (o.scalar) {
    const double s = o.value.is_null() ? 0.0 : o.value.numeric();
    return k([s](std::size_t) { return s; });
  }
  if (o.type == ValueType::Int64) {
    const auto* p = o.column.ints().data();
    return k([p](std::size_t i) { return static_cast<double>(p[i]); });
  }
  const auto* p = o.column.floats().data();
  return k([p](std::size_t i) { return p[i]; });
}

template <typename T>
bool apply_compare(CompareOp op, const T& a, const T& b) {
  switch (op) {
    case CompareOp::Eq: return a == b;
    case CompareOp::Ne: return a != b;
    case CompareOp::Lt: return a < b;
    case CompareOp::Le: return a <= b;
    case CompareOp::Gt: return a > b;
    case CompareOp::Ge: return a >= b;
  }
  return false;
}

CompareOp mirror(CompareOp op) {
  switch (op) {
    case CompareOp::Lt: return CompareOp::Gt;
    case CompareOp::Le: return CompareOp::Ge;
    case CompareOp::Gt: return CompareOp::Lt;
    case CompareOp::Ge: return CompareOp::Le;
    default: return op;
  }
}

template <typename Get, typename Cmp>
std::vector<std::uint8_t> compare_loop(std::size_t n, const Get& a, const Get& b, Cmp cmp) {
  std::vector<std::uint8_t> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = cmp(a(i), b(i)) ? 1 : 0;
  return out;
}

Column compare_operands(CompareOp op, const Operand& a, const Operand& b, std::size_t n) {
  if (a.type == ValueType::Null || b.type == ValueType::Null ||
      (a.scalar && a.value.is_null()) || (b.scalar && b.value.is_null())) {
    return Column::from_bools(std::vector<std::uint8_t>(n, 0), std::vector<std::uint8_t>(n, 0));
  }
  auto valid = merge_validity(n, {&a, &b});
  std::vector<std::uint8_t> out;
  if (a.type == ValueType::Int64 && b.type == ValueType::Int64) {
    out = compare_loop(n, int_get(a), int_get(b),
                       [op](std::int64_t x, std::int64_t y) { return apply_compare(op, x, y); });
  } else if (is_numeric(a.type) && is_numeric(b.type)) {
    out = compare_loop(n, double_get(a), double_get(b),
                       [op](double x, double y) { return apply_compare(op, x, y); });
  } else if (a.type == ValueType::Bool) {
    out = compare_loop(n, bool_get(a), bool_get(b),
                       [op](std::uint8_t x, std::uint8_t y) { return apply_compare(op, x, y); });
  } else if (a.type == ValueType::Text) {
    out.resize(n);
    if (a.scalar && b.scalar) {
      std::fill(out.begin(), out.end(), apply_compare(op, a.value.as_text(), b.value.as_text()));
    } else if (a.scalar || b.scalar) {
      const Operand& c = a.scalar ? b : a;
      const std::string& s = a.scalar ? a.value.as_text() : b.value.as_text();
      const CompareOp eff = a.scalar ? mirror(op) : op;
      const auto& dict = c.column.dictionary();
      std::vector<std::uint8_t> table(dict.size());
      for (std::size_t k = 0; k < dict.size(); ++k) table[k] = apply_compare(eff, dict[k], s);
      auto codes = c.column.codes();
      for (std::size_t i = 0; i < n; ++i) out[i] = table.empty() ? 0 : table[codes[i]];
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        out[i] = apply_compare(op, a.column.text(i), b.column.text(i));
      }
    }
  } else if (a.type == ValueType::PolygonList) {
    out.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (valid.empty() || valid[i]) {
        Value va = a.scalar ? a.value : a.column.value(i);
        Value vb = b.scalar ? b.value : b.column.value(i);
        out[i] = apply_compare(op, va == vb ? 0 : 1, 0);
      }
    }
  } else {
    type_error("incomparable operands");
  }
  return Column::from_bools(std::move(out), std::move(valid));
}

Operand eval(const Expr& e, const Relation& rel);

Column materialize(const Operand& o, std::size_t n) {
  if (!o.scalar) return o.column;
  std::vector<Value> values(n, o.value);
  return Column::from_values(o.type, values);
}

Column arith_operands(ArithOp op, const Operand& a, const Operand& b, ValueType out_type,
                      std::size_t n) {
  if (a.type == ValueType::Null || b.type == ValueType::Null ||
      (a.scalar && a.value.is_null()) || (b.scalar && b.value.is_null())) {
    return Column::nulls(n);
  }
  auto valid = merge_validity(n, {&a, &b});
  if (out_type == ValueType::Int64) {
    auto x = int_get(a);
    auto y = int_get(b);
    std::vector<std::int64_t> out(n);
    for (std::size_t i = 0; i < n; ++i) {
      switch (op) {
        case ArithOp::Add: out[i] = x(i) + y(i); break;
        case ArithOp::Sub: out[i] = x(i) - y(i); break;
        case ArithOp::Mul: out[i] = x(i) * y(i); break;
        case ArithOp::Div: break;
      }
    }
    return Column::from_ints(std::move(out), std::move(valid));
  }
  std::vector<double> out(n);
  with_doubles(a, [&](auto x) {
    with_doubles(b, [&](auto y) {
      switch (op) {
        case ArithOp::Add: for (std::size_t i = 0; i < n; ++i) out[i] = x(i) + y(i); break;
        case ArithOp::Sub: for (std::size_t i = 0; i < n; ++i) out[i] = x(i) - y(i); break;
        case ArithOp::Mul: for (std::size_t i = 0; i < n; ++i) out[i] = x(i) * y(i); break;
        case ArithOp::Div: for (std::size_t i = 0; i < n; ++i) out[i] = x(i) / y(i); break;
      }
    });
  });
  return Column::from_floats(std::move(out), std::move(valid));
}

/// Kleene AND/OR over boolean operands.
Column logical(bool is_and, const std::vector<Operand>& args, std::size_t n) {
  std::vector<std::uint8_t> out(n, is_and ? 1 : 0);
  std::vector<std::uint8_t> unknown(n, 0);
  for (const auto& a : args) {
    auto get = bool_get(a);
    for (std::size_t i = 0; i < n; ++i) {
      if (!a.valid(i)) {
        unknown[i] = 1;
      } else if (is_and && !get(i)) {
        out[i] = 0;
      } else if (!is_and && get(i)) {
        out[i] = 1;
      }
    }
  }
  bool any_unknown = false;
  std::vector<std::uint8_t> valid(n, 1);
  for (std::size_t i = 0; i < n; ++i) {
    // A decided value (false for AND, true for OR) wins over unknown.
    const bool decided = is_and ? out[i] == 0 : out[i] == 1;
    if (unknown[i] && !decided) {
      valid[i] = 0;
      out[i] = 0;
      any_unknown = true;
    }
  }
  if (!any_unknown) valid.clear();
  return Column::from_bools(std::move(out), std::move(valid));
}

Column in_set(const Operand& a, const std::vector<Value>& values, std::size_t n) {
  bool set_has_null = false;
  for (const auto& v : values) set_has_null = set_has_null || v.is_null();
  std::vector<std::uint8_t> out(n, 0);
  std::vector<std::uint8_t> valid(n, 1);
  if (!a.scalar && a.type == ValueType::Text) {
    absl::flat_hash_set<std::string> members;
    for (const auto& v : values) {
      if (!v.is_null()) members.insert(v.as_text());
    }
    const auto& dict = a.column.dictionary();
    std::vector<std::uint8_t> table(dict.size());
    for (std::size_t k = 0; k < dict.size(); ++k) table[k] = members.contains(dict[k]) ? 1 : 0;
    auto codes = a.column.codes();
    for (std::size_t i = 0; i < n; ++i) {
      if (!a.valid(i)) {
        valid[i] = 0;
        continue;
      }
      out[i] = table[codes[i]];
      if (!out[i] && set_has_null) valid[i] = 0;
    }
  } else if (!a.scalar && is_numeric(a.type)) {
    std::vector<double> members;
    for (const auto& v : values) {
      if (!v.is_null()) members.push_back(v.numeric());
    }
    std::sort(members.begin(), members.end());
    auto get = double_get(a);
    for (std::size_t i = 0; i < n; ++i) {
      if (!a.valid(i)) {
        valid[i] = 0;
        continue;
      }
      out[i] = std::binary_search(members.begin(), members.end(), get(i)) ? 1 : 0;
      if (!out[i] && set_has_null) valid[i] = 0;
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      Value v = a.scalar ? a.value : a.column.value(i);
      if (v.is_null()) {
        valid[i] = 0;
        continue;
      }
      for (const auto& m : values) {
        auto c = sql_compare(v, m);
        if (c && *c == 0) {
          out[i] = 1;
          break;
        }
      }
      if (!out[i] && set_has_null) valid[i] = 0;
    }
  }
  if (std::all_of(valid.begin(), valid.end(), [](std::uint8_t v) { return v != 0; })) valid.clear();
  return Column::from_bools(std::move(out), std::move(valid));
}

Operand eval(const Expr& e, const Relation& rel) {
  const std::size_t n = rel.row_count();
  switch (e.kind()) {
    case ExprKind::Column: return column_operand(rel.column(e.column_name()));
    case ExprKind::Literal: return scalar_operand(e.literal_value());
    case ExprKind::Compare: {
      auto a = eval(e.children()[0], rel);
      auto b = eval(e.children()[1], rel);
      return column_operand(compare_operands(e.compare_op(), a, b, n));
    }
    case ExprKind::Arith: {
      auto a = eval(e.children()[0], rel);
      auto b = eval(e.children()[1], rel);
      return column_operand(arith_operands(e.arith_op(), a, b,
                                           infer_type(e, rel.schema()), n));
    }
    case ExprKind::And:
    case ExprKind::Or: {
      std::vector<Operand> args;
      for (const auto& c : e.children()) args.push_back(eval(c, rel));
      return column_operand(logical(e.kind() == ExprKind::And, args, n));
    }
    case ExprKind::Not: {
      auto a = eval(e.children()[0], rel);
      auto get = bool_get(a);
      std::vector<std::uint8_t> out(n);
      for (std::size_t i = 0; i < n; ++i) out[i] = a.valid(i) ? !get(i) : 0;
      auto valid = merge_validity(n, {&a});
      return column_operand(Column::from_bools(std::move(out), std::move(valid)));
    }
    case ExprKind::Between: {
      auto a = eval(e.children()[0], rel);
      auto lo = eval(e.children()[1], rel);
      auto hi = eval(e.children()[2], rel);
      std::vector<Operand> parts{column_operand(compare_operands(CompareOp::Ge, a, lo, n)),
                                 column_operand(compare_operands(CompareOp::Le, a, hi, n))};
      return column_operand(logical(true, parts, n));
    }
    case ExprKind::In: {
      auto a = eval(e.children()[0], rel);
      return column_operand(in_set(a, e.values(), n));
    }
    case ExprKind::IsNull: {
      auto a = eval(e.children()[0], rel);
      std::vector<std::uint8_t> out(n);
      for (std::size_t i = 0; i < n; ++i) out[i] = a.valid(i) ? 0 : 1;
      return column_operand(Column::from_bools(std::move(out)));
    }
    case ExprKind::Floor: {
      auto a = eval(e.children()[0], rel);
      if (a.type == ValueType::Int64) return a;
      if (a.type == ValueType::Null || (a.scalar && a.value.is_null())) {
        return column_operand(Column::from_floats(std::vector<double>(n), std::vector<std::uint8_t>(n, 0)));
      }
      std::vector<double> out(n);
      with_doubles(a, [&](auto get) {
        for (std::size_t i = 0; i < n; ++i) out[i] = std::floor(get(i));
      });
      auto valid = merge_validity(n, {&a});
      return column_operand(Column::from_floats(std::move(out), std::move(valid)));
    }
  }
  return scalar_operand(Value::null());
}

}  // namespace

Column evaluate(const Expr& expr, const Relation& rel) {
  const auto type = infer_type(expr, rel.schema());
  auto result = eval(expr, rel);
  Column out = materialize(result, rel.row_count());
  if (out.type() == ValueType::Null && type != ValueType::Null) {
    ColumnBuilder b(type);
    for (std::size_t i = 0; i < rel.row_count(); ++i) b.append_null();
    return b.finish();
  }
  return out;
}

std::vector<RowId> select_rows(const Expr& predicate, const Relation& rel) {
  const auto type = infer_type(predicate, rel.schema());
  if (type != ValueType::Bool && type != ValueType::Null) {
    type_error("predicate is not boolean: " + predicate.to_string());
  }
  auto result = eval(predicate, rel);
  std::vector<RowId> out;
  const std::size_t n = rel.row_count();
  if (result.scalar) {
    if (!result.value.is_null() && result.value.as_bool()) {
      out.resize(n);
      for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<RowId>(i);
    }
    return out;
  }
  auto vals = result.column.bools();
  for (std::size_t i = 0; i < n; ++i) {
    if (result.column.is_valid(i) && vals[i]) out.push_back(static_cast<RowId>(i));
  }
  return out;
}

}  // namespace provis
