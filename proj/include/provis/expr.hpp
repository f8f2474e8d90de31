#pragma once

#include <memory>
#include <set>
#include <string>
#include <vector>

#include "provis/column.hpp"
#include "provis/relation.hpp"
#include "provis/value.hpp"

namespace provis {

enum class ExprKind { Column, Literal, Compare, Arith, And, Or, Not, Between, In, IsNull, Floor };
enum class CompareOp { Eq, Ne, Lt, Le, Gt, Ge };
enum class ArithOp { Add, Sub, Mul, Div };

std::string_view to_string(CompareOp op);
std::string_view to_string(ArithOp op);

/// Immutable scalar/boolean expression tree over column references and
/// constants. Predicates are Exprs of Bool type; comparisons involving Null
/// yield Null and filters keep only rows that evaluate to true.
class Expr {
 public:
  static Expr column(std::string name);
  static Expr literal(Value v);
  static Expr compare(CompareOp op, Expr lhs, Expr rhs);
  static Expr arith(ArithOp op, Expr lhs, Expr rhs);
  static Expr all_of(std::vector<Expr> args);
  static Expr any_of(std::vector<Expr> args);
  static Expr negate(Expr arg);
  /// Inclusive interval containment lo <= arg <= hi.
  static Expr between(Expr arg, Expr lo, Expr hi);
  static Expr in(Expr arg, std::vector<Value> values);
  static Expr is_null(Expr arg);
  static Expr floor(Expr arg);

  ExprKind kind() const;
  const std::string& column_name() const;
  const Value& literal_value() const;
  CompareOp compare_op() const;
  ArithOp arith_op() const;
  const std::vector<Expr>& children() const;
  /// Set members for ExprKind::In.
  const std::vector<Value>& values() const;

  std::set<std::string> referenced_columns() const;
  /// Canonical SQL-like rendering; equal strings mean equal trees.
  std::string to_string() const;

  friend bool operator==(const Expr& a, const Expr& b) { return a.to_string() == b.to_string(); }

 private:
  struct Node;
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

// Shorthand builders.
Expr col(std::string name);
Expr lit(Value v);
Expr eq(Expr a, Expr b);
Expr ne(Expr a, Expr b);
Expr lt(Expr a, Expr b);
Expr le(Expr a, Expr b);
Expr gt(Expr a, Expr b);
Expr ge(Expr a, Expr b);

/// Result type of `expr` over `schema`. Throws TypeError for unknown columns
/// or ill-typed operands.
ValueType infer_type(const Expr& expr, const Schema& schema);

/// Column-at-a-time evaluation; the result has one entry per row of `rel`.
Column evaluate(const Expr& expr, const Relation& rel);

/// Rows of `rel` for which `predicate` is true, ascending.
std::vector<RowId> select_rows(const Expr& predicate, const Relation& rel);

}  // namespace provis
