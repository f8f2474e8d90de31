#include "reference.hpp"

#include <cmath>
#include <stdexcept>

namespace provis::oracle {

std::size_t RefTable::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return i;
  }
  throw std::out_of_range("reference: no column " + name);
}

std::vector<std::vector<Value>> rows_of(const Relation& rel) {
  std::vector<std::vector<Value>> out;
  for (std::size_t r = 0; r < rel.row_count(); ++r) out.push_back(rel.row(static_cast<RowId>(r)));
  return out;
}

RefTable ref_table(const Relation& rel) {
  RefTable t;
  t.columns = rel.schema().names();
  t.rows = rows_of(rel);
  for (std::size_t r = 0; r < rel.row_count(); ++r) {
    t.derivs.push_back(std::make_shared<const Deriv>(
        Deriv{Deriv::Base, rel.name(), static_cast<RowId>(r), {}}));
  }
  return t;
}

namespace {

Value kleene_and(const std::vector<Value>& xs) {
  bool unknown = false;
  for (const auto& x : xs) {
    if (x.is_null()) {
      unknown = true;
    } else if (!x.as_bool()) {
      return Value(false);
    }
  }
  return unknown ? Value() : Value(true);
}

Value kleene_or(const std::vector<Value>& xs) {
  bool unknown = false;
  for (const auto& x : xs) {
    if (x.is_null()) {
      unknown = true;
    } else if (x.as_bool()) {
      return Value(true);
    }
  }
  return unknown ? Value() : Value(false);
}

Value compare_values(CompareOp op, const Value& a, const Value& b) {
  if (a.is_null() || b.is_null()) return Value();
  if (a.type() == ValueType::PolygonList || b.type() == ValueType::PolygonList) {
    bool same = a == b;
    return Value(op == CompareOp::Eq ? same : !same);
  }
  auto c = *sql_compare(a, b);
  switch (op) {
    case CompareOp::Eq: return Value(c == 0);
    case CompareOp::Ne: return Value(c != 0);
    case CompareOp::Lt: return Value(c < 0);
    case CompareOp::Le: return Value(c <= 0);
    case CompareOp::Gt: return Value(c > 0);
    case CompareOp::Ge: return Value(c >= 0);
  }
  return Value();
}

}  // namespace

Value ref_eval(const Expr& e, const std::vector<std::string>& columns,
               const std::vector<Value>& row) {
  auto sub = [&](std::size_t i) { return ref_eval(e.children()[i], columns, row); };
  switch (e.kind()) {
    case ExprKind::Column:
      for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i] == e.column_name()) return row[i];
      }
      throw std::out_of_range("reference: no column " + e.column_name());
    case ExprKind::Literal: return e.literal_value();
    case ExprKind::Compare: return compare_values(e.compare_op(), sub(0), sub(1));
    case ExprKind::Arith: {
      auto a = sub(0);
      auto b = sub(1);
      if (a.is_null() || b.is_null()) return Value();
      if (e.arith_op() == ArithOp::Div) return Value(a.numeric() / b.numeric());
      if (a.type() == ValueType::Int64 && b.type() == ValueType::Int64) {
        switch (e.arith_op()) {
          case ArithOp::Add: return Value(a.as_int() + b.as_int());
          case ArithOp::Sub: return Value(a.as_int() - b.as_int());
          default: return Value(a.as_int() * b.as_int());
        }
      }
      switch (e.arith_op()) {
        case ArithOp::Add: return Value(a.numeric() + b.numeric());
        case ArithOp::Sub: return Value(a.numeric() - b.numeric());
        default: return Value(a.numeric() * b.numeric());
      }
    }
    case ExprKind::And:
    case ExprKind::Or: {
      std::vector<Value> xs;
      for (std::size_t i = 0; i < e.children().size(); ++i) xs.push_back(sub(i));
      return e.kind() == ExprKind::And ? kleene_and(xs) : kleene_or(xs);
    }
    case ExprKind::Not: {
      auto a = sub(0);
      return a.is_null() ? Value() : Value(!a.as_bool());
    }
    case ExprKind::Between: {
      auto a = sub(0);
      return kleene_and({compare_values(CompareOp::Le, sub(1), a),
                         compare_values(CompareOp::Le, a, sub(2))});
    }
    case ExprKind::In: {
      auto a = sub(0);
      if (a.is_null()) return Value();
      bool saw_null = false;
      for (const auto& v : e.values()) {
        if (v.is_null()) {
          saw_null = true;
          continue;
        }
        auto r = compare_values(CompareOp::Eq, a, v);
        if (r.as_bool()) return Value(true);
      }
      return saw_null ? Value() : Value(false);
    }
    case ExprKind::IsNull: return Value(sub(0).is_null());
    case ExprKind::Floor: {
      auto a = sub(0);
      if (a.is_null() || a.type() == ValueType::Int64) return a;
      return Value(std::floor(a.as_float()));
    }
  }
  return Value();
}

namespace {

bool same_group_key(const Value& a, const Value& b) {
  if (a.is_null() || b.is_null()) return a.is_null() && b.is_null();
  if (a.type() == ValueType::Float64 && b.type() == ValueType::Float64 &&
      std::isnan(a.as_float()) && std::isnan(b.as_float())) {
    return true;
  }
  return a == b;
}

Value fold(AggFn fn, const std::vector<Value>& xs, ValueType input) {
  std::vector<Value> vals;
  for (const auto& x : xs) {
    if (!x.is_null()) vals.push_back(x);
  }
  if (vals.empty()) return Value();
  switch (fn) {
    case AggFn::Sum: {
      if (input == ValueType::Int64) {
        std::int64_t s = 0;
        for (const auto& v : vals) s += v.as_int();
        return Value(s);
      }
      double s = 0;
      for (const auto& v : vals) s += v.as_float();
      return Value(s);
    }
    case AggFn::Avg: {
      double s = 0;
      for (const auto& v : vals) s += v.numeric();
      return Value(s / static_cast<double>(vals.size()));
    }
    case AggFn::Min:
    case AggFn::Max: {
      Value best = vals[0];
      for (const auto& v : vals) {
        if (fn == AggFn::Min ? v.numeric() < best.numeric() : v.numeric() > best.numeric()) best = v;
      }
      return best;
    }
    case AggFn::Count: break;
  }
  return Value();
}

RefTable run(const OpNode& node, const RefResult& env, const Catalog& bases) {
  auto input = [&](const std::string& name) -> const RefTable& { return env.at(name); };
  RefTable out;
  if (auto* f = std::get_if<FilterOp>(&node.op)) {
    const auto& in = input(f->input);
    out.columns = in.columns;
    for (std::size_t r = 0; r < in.rows.size(); ++r) {
      auto v = ref_eval(f->predicate, in.columns, in.rows[r]);
      if (!v.is_null() && v.as_bool()) {
        out.rows.push_back(in.rows[r]);
        out.derivs.push_back(in.derivs[r]);
      }
    }
  } else if (auto* p = std::get_if<ProjectOp>(&node.op)) {
    const auto& in = input(p->input);
    for (const auto& e : p->exprs) out.columns.push_back(e.name);
    for (std::size_t r = 0; r < in.rows.size(); ++r) {
      std::vector<Value> row;
      for (const auto& e : p->exprs) row.push_back(ref_eval(e.expr, in.columns, in.rows[r]));
      out.rows.push_back(std::move(row));
      out.derivs.push_back(in.derivs[r]);
    }
  } else if (auto* j = std::get_if<JoinOp>(&node.op)) {
    const auto& l = input(j->left);
    const auto& r = input(j->right);
    const std::string prefix = j->right_prefix.empty() ? j->right : j->right_prefix;
    auto lk = l.column_index(j->left_key);
    auto rk = r.column_index(j->right_key);
    std::vector<std::size_t> right_cols;
    out.columns = l.columns;
    for (std::size_t c = 0; c < r.columns.size(); ++c) {
      bool clash = false;
      for (const auto& lc : l.columns) clash = clash || lc == r.columns[c];
      if (!clash) {
        out.columns.push_back(r.columns[c]);
        right_cols.push_back(c);
      } else if (r.columns[c] != j->right_key) {
        out.columns.push_back(prefix + "." + r.columns[c]);
        right_cols.push_back(c);
      }
    }
    for (std::size_t a = 0; a < l.rows.size(); ++a) {
      for (std::size_t b = 0; b < r.rows.size(); ++b) {
        auto m = compare_values(CompareOp::Eq, l.rows[a][lk], r.rows[b][rk]);
        if (m.is_null() || !m.as_bool()) continue;
        auto row = l.rows[a];
        for (auto c : right_cols) row.push_back(r.rows[b][c]);
        out.rows.push_back(std::move(row));
        out.derivs.push_back(std::make_shared<const Deriv>(
            Deriv{Deriv::Join, "", 0, {l.derivs[a], r.derivs[b]}}));
      }
    }
  } else if (auto* g = std::get_if<GroupOp>(&node.op)) {
    const auto& in = input(g->input);
    std::vector<std::size_t> keys;
    for (const auto& k : g->keys) keys.push_back(in.column_index(k));
    std::vector<std::vector<std::size_t>> groups;
    for (std::size_t r = 0; r < in.rows.size(); ++r) {
      bool placed = false;
      for (auto& grp : groups) {
        bool same = true;
        for (auto k : keys) same = same && same_group_key(in.rows[grp[0]][k], in.rows[r][k]);
        if (same) {
          grp.push_back(r);
          placed = true;
          break;
        }
      }
      if (!placed) groups.push_back({r});
    }
    out.columns = g->keys;
    for (const auto& a : g->aggs) out.columns.push_back(a.name);
    for (const auto& grp : groups) {
      std::vector<Value> row;
      for (auto k : keys) row.push_back(in.rows[grp[0]][k]);
      for (const auto& a : g->aggs) {
        if (a.fn == AggFn::Count) {
          std::int64_t n = 0;
          for (auto r : grp) {
            if (!a.column || !in.rows[r][in.column_index(*a.column)].is_null()) ++n;
          }
          row.push_back(Value(n));
          continue;
        }
        const auto c = in.column_index(*a.column);
        std::vector<Value> xs;
        ValueType type = ValueType::Float64;
        for (auto r : grp) {
          xs.push_back(in.rows[r][c]);
          if (in.rows[r][c].type() == ValueType::Int64) type = ValueType::Int64;
        }
        row.push_back(fold(a.fn, xs, type));
      }
      Deriv d{Deriv::Group, "", 0, {}};
      for (auto r : grp) d.children.push_back(in.derivs[r]);
      out.rows.push_back(std::move(row));
      out.derivs.push_back(std::make_shared<const Deriv>(std::move(d)));
    }
  }
  (void)bases;
  return out;
}

}  // namespace

RefResult ref_evaluate(const WorkflowDef& def, const Catalog& bases) {
  RefResult env;
  for (const auto& name : bases.names()) env.emplace(name, ref_table(*bases.get(name)));
  std::vector<bool> done(def.nodes.size(), false);
  std::size_t remaining = def.nodes.size();
  while (remaining > 0) {
    bool progress = false;
    for (std::size_t i = 0; i < def.nodes.size(); ++i) {
      if (done[i]) continue;
      bool ready = true;
      for (const auto& in : op_inputs(def.nodes[i].op)) ready = ready && env.count(in) > 0;
      if (!ready) continue;
      env.emplace(def.nodes[i].output, run(def.nodes[i], env, bases));
      done[i] = true;
      --remaining;
      progress = true;
    }
    if (!progress) throw std::runtime_error("reference: unresolvable workflow");
  }
  return env;
}

void collect_occurrences(const DerivPtr& d, Occurrences& out) {
  if (d->kind == Deriv::Base) {
    ++out[d->base][d->rid];
    return;
  }
  for (const auto& c : d->children) collect_occurrences(c, out);
}

bool qualifies(const DerivPtr& d, const std::map<std::string, RowSet>& subsets) {
  switch (d->kind) {
    case Deriv::Base: {
      auto it = subsets.find(d->base);
      return it == subsets.end() || it->second.contains(d->rid);
    }
    case Deriv::Join:
      for (const auto& c : d->children) {
        if (!qualifies(c, subsets)) return false;
      }
      return true;
    case Deriv::Group:
      for (const auto& c : d->children) {
        if (qualifies(c, subsets)) return true;
      }
      return false;
  }
  return false;
}

}  // namespace provis::oracle
