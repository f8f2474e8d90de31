#pragma once

#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "provis/expr.hpp"
#include "provis/lineage_index.hpp"
#include "provis/relation.hpp"

namespace provis {

struct NamedExpr {
  Expr expr;
  std::string name;
};

enum class AggFn { Count, Sum, Avg, Min, Max };
std::string_view to_string(AggFn fn);
AggFn parse_agg_fn(std::string_view name);

struct AggSpec {
  AggFn fn = AggFn::Count;
  /// Absent for COUNT(*).
  std::optional<std::string> column;
  std::string name;
};

struct OpOptions {
  std::string output_name;
  std::string operator_id;
  bool capture_lineage = true;
  /// Output columns to materialize; nullptr keeps all of them.
  const std::set<std::string>* keep_columns = nullptr;
};

struct OpResult {
  RelationPtr relation;
  /// Sides are empty when lineage capture was off.
  LineageIndex lineage;
};

/// Rows satisfying `predicate`, in input order.
OpResult filter(const Relation& in, const Expr& predicate, const OpOptions& options);

/// One output row per input row.
OpResult project(const Relation& in, std::span<const NamedExpr> exprs, const OpOptions& options);

/// Inner equijoin. Output rows are ordered by left row, then by right row.
/// Output columns are the left columns followed by the right columns; the
/// right key is dropped when its name collides with a left column, and any
/// other colliding right column is renamed `<right_prefix>.<name>`.
/// Null keys never match.
OpResult hash_join(const Relation& left, const Relation& right, std::string_view left_key,
                   std::string_view right_key, std::string_view right_prefix,
                   const OpOptions& options);

/// Output column layout of hash_join: for each output column, its source side
/// (0 = left, 1 = right) and source column index.
struct JoinColumn {
  std::string name;
  int side = 0;
  std::size_t source = 0;
};
std::vector<JoinColumn> join_layout(const Schema& left, const Schema& right,
                                    std::string_view right_key, std::string_view right_prefix);

/// One output row per distinct key combination, in order of first
/// appearance. Null is its own group. Output columns are the keys followed by
/// the aggregates.
OpResult group_aggregate(const Relation& in, std::span<const std::string> keys,
                         std::span<const AggSpec> aggs, const OpOptions& options);

/// (min, max) of a numeric column ignoring Nulls. Throws EmptyExtent when no
/// non-null value exists.
std::pair<Value, Value> extent(const Relation& in, std::string_view column);

}  // namespace provis
