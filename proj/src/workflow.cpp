#include "provis/workflow.hpp"

#include <algorithm>
#include <functional>

#include "provis/error.hpp"

namespace provis {

std::vector<std::string> op_inputs(const OpSpec& op) {
  return std::visit(
      [](const auto& o) -> std::vector<std::string> {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, JoinOp>) {
          return {o.left, o.right};
        } else {
          return {o.input};
        }
      },
      op);
}

std::string_view op_kind(const OpSpec& op) {
  static constexpr std::string_view kinds[] = {"filter", "project", "join", "group"};
  return kinds[op.index()];
}

namespace {

std::string join_prefix(const JoinOp& j) { return j.right_prefix.empty() ? j.right : j.right_prefix; }

std::vector<std::string> with_inputs(OpSpec& op, std::span<const std::string> inputs) {
  std::vector<std::string> old = op_inputs(op);
  std::visit(
      [&](auto& o) {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, JoinOp>) {
          o.right_prefix = join_prefix(o);
          o.left = inputs[0];
          o.right = inputs[1];
        } else {
          o.input = inputs[0];
        }
      },
      op);
  return old;
}

}  // namespace

std::string op_signature(const OpSpec& op, std::span<const std::string> inputs) {
  std::string s(op_kind(op));
  s += "(";
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (i) s += ",";
    s += inputs[i];
  }
  s += ")";
  std::visit(
      [&](const auto& o) {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, FilterOp>) {
          s += "[" + o.predicate.to_string() + "]";
        } else if constexpr (std::is_same_v<T, ProjectOp>) {
          for (const auto& e : o.exprs) s += "[" + e.name + "=" + e.expr.to_string() + "]";
        } else if constexpr (std::is_same_v<T, JoinOp>) {
          s += "[" + o.left_key + "=" + o.right_key + "|" + join_prefix(o) + "]";
        } else {
          s += "[";
          for (const auto& k : o.keys) s += k + ",";
          s += "|";
          for (const auto& a : o.aggs) {
            s += a.name + "=" + std::string(to_string(a.fn)) + "(" + a.column.value_or("*") + "),";
          }
          s += "]";
        }
      },
      op);
  return s;
}

namespace {

struct Plan {
  /// Node indices in topological order.
  std::vector<std::size_t> order;
  std::map<std::string, std::size_t, std::less<>> producer;
};

Plan make_plan(const WorkflowDef& def, const std::function<bool(std::string_view)>& is_base) {
  Plan plan;
  for (std::size_t i = 0; i < def.nodes.size(); ++i) {
    const auto& out = def.nodes[i].output;
    if (is_base(out) || !plan.producer.emplace(out, i).second) {
      throw Error(ErrorCode::DuplicateRelationName, "relation '" + out + "' defined twice");
    }
  }
  // 0 = unvisited, 1 = on stack, 2 = done
  std::vector<int> state(def.nodes.size(), 0);
  std::function<void(std::size_t)> visit = [&](std::size_t i) {
    if (state[i] == 2) return;
    if (state[i] == 1) {
      throw Error(ErrorCode::InvalidArgument, "cycle through '" + def.nodes[i].output + "'");
    }
    state[i] = 1;
    for (const auto& in : op_inputs(def.nodes[i].op)) {
      auto it = plan.producer.find(in);
      if (it != plan.producer.end()) {
        visit(it->second);
      } else if (!is_base(in)) {
        throw Error(ErrorCode::UnknownRelation, "unknown relation '" + in + "'");
      }
    }
    state[i] = 2;
    plan.order.push_back(i);
  };
  for (std::size_t i = 0; i < def.nodes.size(); ++i) visit(i);
  return plan;
}

/// Nodes needed to produce `sinks`, in topological order.
std::vector<std::size_t> needed_nodes(const WorkflowDef& def, const Plan& plan,
                                      std::span<const std::string> sinks) {
  if (sinks.empty()) return plan.order;
  std::vector<std::uint8_t> need(def.nodes.size(), 0);
  std::vector<std::string> stack(sinks.begin(), sinks.end());
  while (!stack.empty()) {
    auto name = std::move(stack.back());
    stack.pop_back();
    auto it = plan.producer.find(name);
    if (it == plan.producer.end() || need[it->second]) continue;
    need[it->second] = 1;
    for (auto& in : op_inputs(def.nodes[it->second].op)) stack.push_back(std::move(in));
  }
  std::vector<std::size_t> out;
  for (auto i : plan.order) {
    if (need[i]) out.push_back(i);
  }
  return out;
}

using SchemaLookup = std::function<const Schema&(const std::string&)>;

Schema output_schema(const OpSpec& op, const SchemaLookup& schema_of) {
  return std::visit(
      [&](const auto& o) -> Schema {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, FilterOp>) {
          return schema_of(o.input);
        } else if constexpr (std::is_same_v<T, ProjectOp>) {
          std::vector<ColumnDef> defs;
          for (const auto& e : o.exprs) defs.push_back({e.name, infer_type(e.expr, schema_of(o.input))});
          return Schema(std::move(defs));
        } else if constexpr (std::is_same_v<T, JoinOp>) {
          const auto& l = schema_of(o.left);
          const auto& r = schema_of(o.right);
          std::vector<ColumnDef> defs;
          for (const auto& jc : join_layout(l, r, o.right_key, join_prefix(o))) {
            defs.push_back({jc.name, (jc.side == 0 ? l : r).at(jc.source).type});
          }
          return Schema(std::move(defs));
        } else {
          const auto& in = schema_of(o.input);
          std::vector<ColumnDef> defs;
          for (const auto& k : o.keys) {
            auto idx = in.find(k);
            if (!idx) throw Error(ErrorCode::TypeError, "group by: unknown column '" + k + "'");
            defs.push_back(in.at(*idx));
          }
          for (const auto& a : o.aggs) {
            ValueType t = ValueType::Int64;
            if (a.fn != AggFn::Count) {
              auto idx = a.column ? in.find(*a.column) : std::nullopt;
              t = a.fn == AggFn::Avg ? ValueType::Float64
                                     : (idx ? in.at(*idx).type : ValueType::Float64);
            }
            defs.push_back({a.name, t});
          }
          return Schema(std::move(defs));
        }
      },
      op);
}

/// Columns of each input that `op` reads when `out_needed` of its output are
/// wanted.
void add_input_needs(const OpSpec& op, const std::set<std::string>& out_needed,
                     const SchemaLookup& schema_of,
                     std::map<std::string, std::set<std::string>>& needed) {
  std::visit(
      [&](const auto& o) {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, FilterOp>) {
          auto& in = needed[o.input];
          in.insert(out_needed.begin(), out_needed.end());
          for (const auto& c : o.predicate.referenced_columns()) in.insert(c);
        } else if constexpr (std::is_same_v<T, ProjectOp>) {
          auto& in = needed[o.input];
          for (const auto& e : o.exprs) {
            if (!out_needed.count(e.name)) continue;
            for (const auto& c : e.expr.referenced_columns()) in.insert(c);
          }
        } else if constexpr (std::is_same_v<T, JoinOp>) {
          const auto& l = schema_of(o.left);
          const auto& r = schema_of(o.right);
          auto& ln = needed[o.left];
          ln.insert(o.left_key);
          for (const auto& jc : join_layout(l, r, o.right_key, join_prefix(o))) {
            if (jc.side == 0 && out_needed.count(jc.name)) ln.insert(jc.name);
          }
          // A self-join reads both lists from the same relation.
          auto& rn = needed[o.right];
          rn.insert(o.right_key);
          for (const auto& jc : join_layout(l, r, o.right_key, join_prefix(o))) {
            if (jc.side == 1 && out_needed.count(jc.name)) rn.insert(r.at(jc.source).name);
          }
        } else {
          auto& in = needed[o.input];
          for (const auto& k : o.keys) in.insert(k);
          for (const auto& a : o.aggs) {
            if (a.column) in.insert(*a.column);
          }
        }
      },
      op);
}

}  // namespace

std::map<std::string, std::set<std::string>> needed_columns(const WorkflowDef& def,
                                                            const Catalog& bases,
                                                            std::span<const std::string> sinks) {
  auto plan = make_plan(def, [&](std::string_view n) { return bases.contains(n); });
  std::map<std::string, Schema> schemas;
  SchemaLookup schema_of = [&](const std::string& name) -> const Schema& {
    auto it = schemas.find(name);
    if (it != schemas.end()) return it->second;
    return schemas.emplace(name, bases.get(name)->schema()).first->second;
  };
  for (auto i : plan.order) {
    const auto& node = def.nodes[i];
    schemas.emplace(node.output, output_schema(node.op, schema_of));
  }
  std::vector<std::string> all_sinks(sinks.begin(), sinks.end());
  if (all_sinks.empty()) {
    std::set<std::string> consumed;
    for (const auto& n : def.nodes) {
      for (const auto& in : op_inputs(n.op)) consumed.insert(in);
    }
    for (const auto& n : def.nodes) {
      if (!consumed.count(n.output)) all_sinks.push_back(n.output);
    }
  }
  std::map<std::string, std::set<std::string>> needed;
  for (const auto& s : all_sinks) {
    auto names = schema_of(s).names();
    needed[s].insert(names.begin(), names.end());
  }
  for (auto it = plan.order.rbegin(); it != plan.order.rend(); ++it) {
    const auto& node = def.nodes[*it];
    auto found = needed.find(node.output);
    if (found == needed.end()) continue;
    const auto out_needed = found->second;
    add_input_needs(node.op, out_needed, schema_of, needed);
  }
  return needed;
}

namespace {

OpResult run_op(const OpNode& node, std::span<const RelationPtr> inputs, const OpOptions& options) {
  return std::visit(
      [&](const auto& o) -> OpResult {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, FilterOp>) {
          return filter(*inputs[0], o.predicate, options);
        } else if constexpr (std::is_same_v<T, ProjectOp>) {
          return project(*inputs[0], o.exprs, options);
        } else if constexpr (std::is_same_v<T, JoinOp>) {
          return hash_join(*inputs[0], *inputs[1], o.left_key, o.right_key, join_prefix(o), options);
        } else {
          return group_aggregate(*inputs[0], o.keys, o.aggs, options);
        }
      },
      node.op);
}

/// Base relation narrowed to the listed columns, keeping its name.
RelationPtr narrow(const RelationPtr& rel, const std::set<std::string>* keep) {
  if (keep == nullptr || keep->size() == rel->column_count()) return rel;
  std::vector<ColumnDef> defs;
  std::vector<Column> cols;
  for (std::size_t c = 0; c < rel->column_count(); ++c) {
    if (!keep->count(rel->schema().at(c).name)) continue;
    defs.push_back(rel->schema().at(c));
    cols.push_back(rel->column(c));
  }
  return std::make_shared<const Relation>(rel->name(), Schema(std::move(defs)), std::move(cols),
                                          rel->kind(), rel->row_count());
}

}  // namespace

Workflow Workflow::evaluate(const WorkflowDef& def, const Catalog& bases,
                            const EvalOptions& options) {
  Workflow wf;
  wf.def_ = def;
  wf.captured_ = options.capture_lineage;
  auto plan = make_plan(def, [&](std::string_view n) { return bases.contains(n); });
  auto nodes = needed_nodes(def, plan, options.sinks);

  std::map<std::string, std::set<std::string>> keep;
  if (options.prune_columns) keep = needed_columns(def, bases, options.sinks);

  auto add_relation = [&](const std::string& name, RelationPtr rel, int producer) {
    wf.index_.emplace(name, wf.names_.size());
    wf.names_.push_back(name);
    wf.relations_.push_back(std::move(rel));
    wf.producer_.push_back(producer);
  };
  for (const auto& s : options.sinks) {
    if (!plan.producer.count(s) && !wf.index_.count(s)) add_relation(s, bases.get(s), -1);
  }
  for (auto i : nodes) {
    for (const auto& in : op_inputs(def.nodes[i].op)) {
      if (!plan.producer.count(in) && !wf.index_.count(in)) add_relation(in, bases.get(in), -1);
    }
  }

  wf.node_inputs_.resize(def.nodes.size());
  wf.node_output_.assign(def.nodes.size(), 0);
  wf.lineage_.resize(def.nodes.size());
  for (auto i : nodes) {
    const auto& node = def.nodes[i];
    std::vector<RelationPtr> inputs;
    for (const auto& in : op_inputs(node.op)) {
      auto idx = wf.index_.at(in);
      wf.node_inputs_[i].push_back(idx);
      inputs.push_back(wf.relations_[idx]);
    }
    OpOptions op_options;
    op_options.output_name = node.output;
    op_options.operator_id = node.output;
    op_options.capture_lineage = options.capture_lineage;
    auto k = keep.find(node.output);
    if (options.prune_columns && k != keep.end()) op_options.keep_columns = &k->second;
    auto result = run_op(node, inputs, op_options);
    wf.node_output_[i] = wf.names_.size();
    wf.lineage_[i] = std::move(result.lineage);
    add_relation(node.output, std::move(result.relation), static_cast<int>(i));
    wf.order_.push_back(i);
  }

  const auto n = wf.names_.size();
  wf.ancestors_.assign(n, std::vector<std::uint8_t>(n, 0));
  for (std::size_t r = 0; r < n; ++r) {
    wf.ancestors_[r][r] = 1;
    if (wf.producer_[r] < 0) continue;
    for (auto in : wf.node_inputs_[wf.producer_[r]]) {
      for (std::size_t a = 0; a < n; ++a) {
        if (wf.ancestors_[in][a]) wf.ancestors_[r][a] = 1;
      }
    }
  }
  return wf;
}

bool Workflow::contains(std::string_view name) const { return index_.find(name) != index_.end(); }

std::size_t Workflow::index_of(std::string_view name) const {
  auto it = index_.find(name);
  if (it == index_.end()) {
    throw Error(ErrorCode::UnknownRelation, "unknown relation '" + std::string(name) + "'");
  }
  return it->second;
}

bool Workflow::is_base(std::string_view name) const { return producer_[index_of(name)] < 0; }

const RelationPtr& Workflow::relation(std::string_view name) const {
  return relations_[index_of(name)];
}

std::vector<std::string> Workflow::sources() const {
  std::vector<std::string> out;
  for (std::size_t r = 0; r < names_.size(); ++r) {
    if (producer_[r] < 0) out.push_back(names_[r]);
  }
  return out;
}

std::vector<std::string> Workflow::sinks() const {
  std::vector<std::uint8_t> consumed(names_.size(), 0);
  for (auto i : order_) {
    for (auto in : node_inputs_[i]) consumed[in] = 1;
  }
  std::vector<std::string> out;
  for (auto i : order_) {
    if (!consumed[node_output_[i]]) out.push_back(names_[node_output_[i]]);
  }
  return out;
}

std::set<std::string> Workflow::bases_of(std::string_view name) const {
  const auto r = index_of(name);
  std::set<std::string> out;
  for (std::size_t a = 0; a < names_.size(); ++a) {
    if (ancestors_[r][a] && producer_[a] < 0) out.insert(names_[a]);
  }
  return out;
}

bool Workflow::reaches(std::string_view name, std::string_view ancestor) const {
  return ancestors_[index_of(name)][index_of(ancestor)] != 0;
}

std::map<std::string, RelationPtr> refresh_many(const Workflow& wf,
                                                const std::map<std::string, RowSet>& subsets,
                                                std::span<const std::string> sinks) {
  for (const auto& s : sinks) wf.index_of(s);
  for (const auto& [name, rids] : subsets) {
    if (!wf.contains(name) || !wf.is_base(name)) {
      throw Error(ErrorCode::UnknownRelation, "'" + name + "' is not a base of the workflow");
    }
  }
  WorkflowDef def;
  for (auto i : wf.order()) def.nodes.push_back(wf.node(i));
  Catalog full;
  for (const auto& base : wf.sources()) full.add(wf.relation(base));
  const auto needed = needed_columns(def, full, sinks);
  // Drop nodes and outputs nobody reads so the plan type-checks over narrowed bases.
  std::erase_if(def.nodes, [&](const OpNode& n) { return !needed.count(n.output); });
  for (auto& node : def.nodes) {
    auto n = needed.find(node.output);
    if (n == needed.end()) continue;
    if (auto* p = std::get_if<ProjectOp>(&node.op)) {
      std::erase_if(p->exprs, [&](const NamedExpr& e) { return !n->second.count(e.name); });
    } else if (auto* g = std::get_if<GroupOp>(&node.op)) {
      std::erase_if(g->aggs, [&](const AggSpec& a) { return !n->second.count(a.name); });
    }
  }

  Catalog restricted;
  for (const auto& base : wf.sources()) {
    auto n = needed.find(base);
    auto rel = narrow(wf.relation(base), n == needed.end() ? nullptr : &n->second);
    auto it = subsets.find(base);
    if (it == subsets.end()) {
      restricted.add(rel);
      continue;
    }
    if (it->second.max_plus_one() > rel->row_count()) {
      throw Error(ErrorCode::RowIdOutOfRange, "subset exceeds the rows of '" + base + "'");
    }
    restricted.add(restrict_rows(*rel, it->second, RelationKind::Base));
  }
  EvalOptions options;
  options.capture_lineage = false;
  options.sinks.assign(sinks.begin(), sinks.end());
  options.prune_columns = true;
  auto fresh = Workflow::evaluate(def, restricted, options);
  std::map<std::string, RelationPtr> out;
  for (const auto& s : sinks) out.emplace(s, fresh.relation(s));
  return out;
}

RelationPtr refresh(const Workflow& wf, const std::map<std::string, RowSet>& subsets,
                    std::string_view sink) {
  std::string s(sink);
  return refresh_many(wf, subsets, std::span<const std::string>(&s, 1)).at(s);
}

MergedPlan merge_plans(std::span<const WorkflowDef> defs, std::span<const std::string> prefixes,
                       const Catalog& bases) {
  MergedPlan merged;
  std::map<std::string, std::string> by_signature;
  std::set<std::string> taken;
  for (std::size_t w = 0; w < defs.size(); ++w) {
    const auto& def = defs[w];
    auto plan = make_plan(def, [&](std::string_view n) { return bases.contains(n); });
    std::map<std::string, std::string> names;
    auto global = [&](const std::string& local) {
      auto it = names.find(local);
      return it == names.end() ? local : it->second;
    };
    for (auto i : plan.order) {
      OpNode node = def.nodes[i];
      std::vector<std::string> inputs;
      for (const auto& in : op_inputs(node.op)) inputs.push_back(global(in));
      with_inputs(node.op, inputs);
      const auto sig = op_signature(node.op, inputs);
      auto found = by_signature.find(sig);
      if (found != by_signature.end()) {
        names[node.output] = found->second;
        continue;
      }
      std::string name = prefixes[w] + "/" + node.output;
      while (taken.count(name) || bases.contains(name)) name += "'";
      taken.insert(name);
      by_signature.emplace(sig, name);
      names[node.output] = name;
      node.output = name;
      merged.def.nodes.push_back(std::move(node));
    }
    merged.names.push_back(std::move(names));
  }
  return merged;
}

}  // namespace provis
