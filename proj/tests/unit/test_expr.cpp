#include <gtest/gtest.h>

#include <random>

#include "provis/error.hpp"
#include "provis/expr.hpp"
#include "random_pipeline.hpp"
#include "reference.hpp"

using namespace provis;
using provis::oracle::ref_eval;

namespace {

RelationPtr sample() {
  ColumnBuilder a(ValueType::Int64), x(ValueType::Float64), s(ValueType::Text);
  const std::optional<std::int64_t> as[] = {1, 3, std::nullopt, 7};
  const std::optional<double> xs[] = {10.0, std::nullopt, 20.0, 30.0};
  const std::optional<std::string> ss[] = {"CA", "NY", std::nullopt, "CA"};
  for (int i = 0; i < 4; ++i) {
    as[i] ? a.append_int(*as[i]) : a.append_null();
    xs[i] ? x.append_float(*xs[i]) : x.append_null();
    ss[i] ? s.append_text(*ss[i]) : s.append_null();
  }
  Schema schema({{"a", ValueType::Int64}, {"x", ValueType::Float64}, {"s", ValueType::Text}});
  return std::make_shared<const Relation>("t", schema,
                                          std::vector<Column>{a.finish(), x.finish(), s.finish()},
                                          RelationKind::Base);
}

std::vector<Value> values(const Column& c) {
  std::vector<Value> out;
  for (std::size_t i = 0; i < c.size(); ++i) out.push_back(c.value(i));
  return out;
}

}  // namespace

TEST(Expr, ComparisonsWithNullYieldNullAndAreNotSelected) {
  auto rel = sample();
  auto p = gt(col("a"), lit(2));
  EXPECT_EQ(values(evaluate(p, *rel)), (std::vector<Value>{Value(false), Value(true), Value(), Value(true)}));
  EXPECT_EQ(select_rows(p, *rel), (std::vector<RowId>{1, 3}));
}

TEST(Expr, KleeneLogic) {
  auto rel = sample();
  // a > 2 OR x > 15: row 2 has a Null but x = 20.
  auto p = Expr::any_of({gt(col("a"), lit(2)), gt(col("x"), lit(15.0))});
  EXPECT_EQ(select_rows(p, *rel), (std::vector<RowId>{1, 2, 3}));
  auto q = Expr::negate(Expr::all_of({gt(col("a"), lit(0)), lt(col("x"), lit(25.0))}));
  // row0: NOT(T and T)=F, row1: NOT(T and N)=N, row2: NOT(N and T)=N, row3: NOT(T and F)=T
  EXPECT_EQ(values(evaluate(q, *rel)), (std::vector<Value>{Value(false), Value(), Value(), Value(true)}));
}

TEST(Expr, BetweenInAndIsNull) {
  auto rel = sample();
  EXPECT_EQ(select_rows(Expr::between(col("x"), lit(10), lit(20)), *rel), (std::vector<RowId>{0, 2}));
  EXPECT_EQ(select_rows(Expr::in(col("s"), {Value("CA")}), *rel), (std::vector<RowId>{0, 3}));
  EXPECT_EQ(values(evaluate(Expr::in(col("a"), {Value(1), Value()}), *rel)),
            (std::vector<Value>{Value(true), Value(), Value(), Value()}));
  EXPECT_EQ(select_rows(Expr::is_null(col("s")), *rel), (std::vector<RowId>{2}));
}

TEST(Expr, ArithmeticTypes) {
  auto rel = sample();
  EXPECT_EQ(infer_type(Expr::arith(ArithOp::Mul, col("a"), lit(2)), rel->schema()), ValueType::Int64);
  EXPECT_EQ(infer_type(Expr::arith(ArithOp::Div, col("a"), lit(2)), rel->schema()), ValueType::Float64);
  EXPECT_EQ(values(evaluate(Expr::arith(ArithOp::Mul, col("a"), lit(2)), *rel)),
            (std::vector<Value>{Value(2), Value(6), Value(), Value(14)}));
  EXPECT_EQ(values(evaluate(Expr::floor(Expr::arith(ArithOp::Div, col("a"), lit(2))), *rel)),
            (std::vector<Value>{Value(0.0), Value(1.0), Value(), Value(3.0)}));
}

TEST(Expr, TypeErrors) {
  auto rel = sample();
  auto code = [&](const Expr& e) {
    try {
      infer_type(e, rel->schema());
    } catch (const Error& err) {
      return err.code();
    }
    return ErrorCode::InvalidArgument;
  };
  EXPECT_EQ(code(eq(col("missing"), lit(1))), ErrorCode::TypeError);
  EXPECT_EQ(code(eq(col("s"), lit(1))), ErrorCode::TypeError);
  EXPECT_EQ(code(Expr::arith(ArithOp::Add, col("s"), lit(1))), ErrorCode::TypeError);
  EXPECT_EQ(code(Expr::all_of({col("a"), lit(true)})), ErrorCode::TypeError);
}

TEST(Expr, CanonicalTextIdentifiesTrees) {
  EXPECT_EQ(eq(col("a"), lit(1)), eq(col("a"), lit(1)));
  EXPECT_FALSE(eq(col("a"), lit(1)) == eq(col("a"), lit(1.0)));
  EXPECT_EQ(Expr::between(col("v"), lit(10.0), lit(30.0)).referenced_columns(),
            std::set<std::string>{"v"});
}

TEST(ExprProperty, VectorizedMatchesRowInterpreter) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    auto bases = provis::oracle::random_bases(rng, 40);
    auto rel = bases.get("r" + std::to_string(trial % 3));
    auto p = provis::oracle::random_predicate(rng, rel->schema(), 3);
    auto vec = evaluate(p, *rel);
    auto table = provis::oracle::ref_table(*rel);
    for (std::size_t r = 0; r < rel->row_count(); ++r) {
      ASSERT_EQ(vec.value(r), ref_eval(p, table.columns, table.rows[r])) << p.to_string() << " row " << r;
    }
  }
}
