#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "provis/lineage_index.hpp"
#include "provis/operators.hpp"
#include "provis/relation.hpp"
#include "provis/row_set.hpp"

namespace provis {

struct FilterOp {
  std::string input;
  Expr predicate;
};

struct ProjectOp {
  std::string input;
  std::vector<NamedExpr> exprs;
};

struct JoinOp {
  std::string left;
  std::string right;
  std::string left_key;
  std::string right_key;
  /// Prefix for renamed right columns; empty means the right input's name.
  std::string right_prefix;
};

struct GroupOp {
  std::string input;
  std::vector<std::string> keys;
  std::vector<AggSpec> aggs;
};

using OpSpec = std::variant<FilterOp, ProjectOp, JoinOp, GroupOp>;

struct OpNode {
  std::string output;
  OpSpec op;
};

/// A DAG of operators over named base relations. Nodes may be listed in any
/// order; evaluation sorts them topologically.
struct WorkflowDef {
  std::vector<OpNode> nodes;
};

std::vector<std::string> op_inputs(const OpSpec& op);
std::string_view op_kind(const OpSpec& op);
/// Canonical text of an operator with the given input names substituted.
std::string op_signature(const OpSpec& op, std::span<const std::string> inputs);

/// For every relation in the workflow, the columns some sink needs. Sinks
/// keep all their columns.
std::map<std::string, std::set<std::string>> needed_columns(
    const WorkflowDef& def, const Catalog& bases, std::span<const std::string> sinks);

struct EvalOptions {
  bool capture_lineage = true;
  /// Evaluate only the ancestors of these relations; empty evaluates all.
  std::vector<std::string> sinks;
  /// Drop intermediate columns no sink needs.
  bool prune_columns = false;
};

/// An evaluated workflow: frozen relations plus, when captured, one
/// LineageIndex per operator.
class Workflow {
 public:
  /// Throws UnknownRelation for missing inputs, DuplicateRelationName when
  /// two nodes (or a node and a base) share an output name, InvalidArgument
  /// on cycles, and whatever the operators throw.
  static Workflow evaluate(const WorkflowDef& def, const Catalog& bases,
                           const EvalOptions& options = {});

  const WorkflowDef& def() const { return def_; }
  bool captured() const { return captured_; }

  bool contains(std::string_view name) const;
  bool is_base(std::string_view name) const;
  /// Throws UnknownRelation.
  const RelationPtr& relation(std::string_view name) const;
  /// All relation names, bases first, then derived in topological order.
  const std::vector<std::string>& names() const { return names_; }
  /// Base relations read by at least one evaluated node.
  std::vector<std::string> sources() const;
  /// Derived relations no other node consumes.
  std::vector<std::string> sinks() const;
  /// Base relations `name` depends on (itself when it is a base).
  std::set<std::string> bases_of(std::string_view name) const;
  /// True when `ancestor` lies on some backward path from `name`, or equals it.
  bool reaches(std::string_view name, std::string_view ancestor) const;

  // Index-level access used by tracing.
  std::size_t index_of(std::string_view name) const;
  /// Producer node of a derived relation; -1 for bases.
  int producer(std::size_t rel) const { return producer_[rel]; }
  const std::vector<std::size_t>& inputs(std::size_t node) const { return node_inputs_[node]; }
  std::size_t output(std::size_t node) const { return node_output_[node]; }
  const LineageIndex& lineage(std::size_t node) const { return lineage_[node]; }
  std::size_t node_count() const { return node_output_.size(); }
  /// Nodes in topological order.
  const std::vector<std::size_t>& order() const { return order_; }
  const OpNode& node(std::size_t i) const { return def_.nodes[i]; }

 private:
  WorkflowDef def_;
  bool captured_ = false;
  std::vector<std::string> names_;
  std::map<std::string, std::size_t, std::less<>> index_;
  std::vector<RelationPtr> relations_;
  std::vector<int> producer_;
  std::vector<std::vector<std::size_t>> node_inputs_;
  std::vector<std::size_t> node_output_;
  std::vector<LineageIndex> lineage_;
  std::vector<std::size_t> order_;
  // ancestors_[r] holds every relation r depends on, r included.
  std::vector<std::vector<std::uint8_t>> ancestors_;
};

/// Re-evaluates the nodes feeding `sinks` with each listed base restricted to
/// its rid subset; unlisted bases are used in full. Lineage is not captured
/// and `wf` is left untouched. Throws UnknownRelation, RowIdOutOfRange.
std::map<std::string, RelationPtr> refresh_many(const Workflow& wf,
                                                const std::map<std::string, RowSet>& subsets,
                                                std::span<const std::string> sinks);
RelationPtr refresh(const Workflow& wf, const std::map<std::string, RowSet>& subsets,
                    std::string_view sink);

/// Several workflows over the same bases combined into one DAG. Structurally
/// identical nodes are evaluated once.
struct MergedPlan {
  WorkflowDef def;
  /// Per input workflow, local relation name -> name in `def`. Base names map
  /// to themselves.
  std::vector<std::map<std::string, std::string>> names;
};

/// `prefixes[i]` namespaces the fresh names of workflow i as
/// `<prefix>/<local name>`.
MergedPlan merge_plans(std::span<const WorkflowDef> defs, std::span<const std::string> prefixes,
                       const Catalog& bases);

}  // namespace provis
