#include <gtest/gtest.h>

#include "provis/error.hpp"
#include "provis/flights.hpp"
#include "provis/trace.hpp"
#include "reference.hpp"

using namespace provis;

namespace {

const Catalog& toy() {
  static const Catalog c = load_flight_dataset(PROVIS_TOY_DIR);
  return c;
}

// Q1: flights of active airlines per departure state.
WorkflowDef q1_def() {
  WorkflowDef def;
  def.nodes.push_back({"active", FilterOp{"airlines", eq(col("active"), lit("Y"))}});
  def.nodes.push_back({"f1", JoinOp{"ontime", "active", "alid", "alid", ""}});
  def.nodes.push_back({"f2", JoinOp{"f1", "airports", "src_apid", "apid", ""}});
  def.nodes.push_back({"q1", GroupOp{"f2", {"state"},
                                     {{AggFn::Count, std::nullopt, "cnt"},
                                      {AggFn::Avg, "ddelay", "avg_ddelay"},
                                      {AggFn::Avg, "adelay", "avg_adelay"}}}});
  return def;
}

RowId group_of(const Workflow& wf, const std::string& state) {
  const auto& q1 = wf.relation("q1");
  for (RowId r = 0; r < q1->row_count(); ++r) {
    if (q1->value(r, 0) == Value(state)) return r;
  }
  throw std::runtime_error("no group " + state);
}

// Direct scan of the base tables: ontime rows departing `state` on an active airline.
RowSet flights_from(const std::string& state) {
  const auto& ontime = *toy().get("ontime");
  const auto& airports = *toy().get("airports");
  const auto& airlines = *toy().get("airlines");
  std::vector<RowId> out;
  for (RowId r = 0; r < ontime.row_count(); ++r) {
    bool airport_ok = false, airline_ok = false;
    for (RowId a = 0; a < airports.row_count(); ++a) {
      airport_ok = airport_ok || (airports.value(a, 0) == ontime.value(r, 7) &&
                                  airports.value(a, 6) == Value(state));
    }
    for (RowId a = 0; a < airlines.row_count(); ++a) {
      airline_ok = airline_ok || (airlines.value(a, 0) == ontime.value(r, 9) &&
                                  airlines.value(a, 2) == Value("Y"));
    }
    if (airport_ok && airline_ok) out.push_back(r);
  }
  return RowSet::from_sorted(out);
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST(BackwardTrace, EmptySelection) {
  auto wf = Workflow::evaluate(q1_def(), toy());
  EXPECT_TRUE(backward_trace(wf, "q1", {}, "ontime").rids.empty());
}

TEST(BackwardTrace, CaliforniaGroupToOntime) {
  auto wf = Workflow::evaluate(q1_def(), toy());
  auto r = backward_trace(wf, "q1", {group_of(wf, "CA")}, "ontime");
  EXPECT_EQ(r.relation, "ontime");
  EXPECT_EQ(r.rids, flights_from("CA"));
  EXPECT_FALSE(r.rids.empty());
}

TEST(BackwardTrace, WhichProvenanceDeduplicatesAirlines) {
  auto wf = Workflow::evaluate(q1_def(), toy());
  auto ref = oracle::ref_evaluate(q1_def(), toy());
  const auto& q1 = ref.at("q1");
  for (RowId g = 0; g < q1.rows.size(); ++g) {
    oracle::Occurrences occ;
    oracle::collect_occurrences(q1.derivs[g], occ);
    std::vector<RowId> expect;
    std::vector<std::uint64_t> counts;
    for (auto [rid, n] : occ["airlines"]) {
      expect.push_back(rid);
      counts.push_back(n);
    }
    auto which = backward_trace(wf, "q1", {g}, "airlines");
    EXPECT_EQ(which.rids, RowSet::from_sorted(expect));
    EXPECT_TRUE(which.counts.empty());
    auto bag = backward_trace(wf, "q1", {g}, "airlines", Semantics::Bag);
    EXPECT_EQ(bag.rids, which.rids);
    EXPECT_EQ(bag.counts, counts);
  }
}

TEST(BackwardTrace, DerivedTargetAndIdentity) {
  auto wf = Workflow::evaluate(q1_def(), toy());
  RowSet sel{0, 2};
  EXPECT_EQ(backward_trace(wf, "q1", sel, "q1").rids, sel);
  auto f2 = backward_trace(wf, "q1", sel, "f2");
  EXPECT_EQ(f2.relation, "f2");
  EXPECT_FALSE(f2.rids.empty());
}

TEST(BackwardTrace, Errors) {
  auto wf = Workflow::evaluate(q1_def(), toy());
  EXPECT_EQ(code_of([&] { backward_trace(wf, "nope", {}, "ontime"); }), ErrorCode::UnknownRelation);
  EXPECT_EQ(code_of([&] { backward_trace(wf, "active", {0}, "ontime"); }), ErrorCode::UnreachableTarget);
  EXPECT_EQ(code_of([&] { backward_trace(wf, "q1", {99}, "ontime"); }), ErrorCode::RowIdOutOfRange);
  auto plain = Workflow::evaluate(q1_def(), toy(), {.capture_lineage = false});
  EXPECT_EQ(code_of([&] { backward_trace(plain, "q1", {0}, "ontime"); }), ErrorCode::InvalidArgument);
}

TEST(BackwardTrace, MultiPathConfluenceUnions) {
  // airports reached both through the departure and the arrival join.
  auto def = q1_def();
  def.nodes.pop_back();
  def.nodes.push_back({"f3", JoinOp{"f2", "airports", "dst_apid", "apid", "dst"}});
  auto wf = Workflow::evaluate(def, toy());
  auto ref = oracle::ref_evaluate(def, toy());
  const auto& f3 = ref.at("f3");
  for (RowId o = 0; o < f3.rows.size(); ++o) {
    oracle::Occurrences occ;
    oracle::collect_occurrences(f3.derivs[o], occ);
    std::vector<RowId> expect;
    for (auto [rid, n] : occ["airports"]) expect.push_back(rid);
    EXPECT_EQ(backward_trace(wf, "f3", {o}, "airports").rids, RowSet::from_sorted(expect));
  }
}

TEST(ForwardTrace, EmptyAndSingleFlight) {
  auto wf = Workflow::evaluate(q1_def(), toy());
  EXPECT_TRUE(forward_trace(wf, "ontime", {}, "q1").rids.empty());
  // fid 1 departs SFO on active airline 1.
  EXPECT_EQ(forward_trace(wf, "ontime", {0}, "q1").rids, (RowSet{group_of(wf, "CA")}));
  // fid 14 flies the inactive airline 3.
  EXPECT_TRUE(forward_trace(wf, "ontime", {13}, "q1").rids.empty());
  EXPECT_EQ(code_of([&] { forward_trace(wf, "q1", {0}, "ontime"); }), ErrorCode::UnreachableTarget);
}

TEST(ForwardTrace, RoundTripOnGroupSinkIsExact) {
  auto wf = Workflow::evaluate(q1_def(), toy());
  const auto groups = wf.relation("q1")->row_count();
  ASSERT_LE(groups, 12u);
  for (std::uint32_t mask = 0; mask < (1u << groups); ++mask) {
    std::vector<RowId> g;
    for (RowId i = 0; i < groups; ++i) {
      if (mask & (1u << i)) g.push_back(i);
    }
    auto sel = RowSet::from_sorted(g);
    auto back = backward_trace(wf, "q1", sel, "ontime");
    EXPECT_EQ(forward_trace(wf, "ontime", back.rids, "q1").rids, sel);
  }
}

TEST(Refresh, FullSubsetsReproduceSink) {
  auto wf = Workflow::evaluate(q1_def(), toy());
  std::map<std::string, RowSet> all;
  for (const auto& b : wf.sources()) all[b] = RowSet::range(static_cast<RowId>(wf.relation(b)->row_count()));
  EXPECT_TRUE(identical(*refresh(wf, all, "q1"), *wf.relation("q1")));
  EXPECT_TRUE(identical(*refresh(wf, {}, "q1"), *wf.relation("q1")));
}

TEST(Refresh, EmptyFactTableGivesNoGroups) {
  auto wf = Workflow::evaluate(q1_def(), toy());
  EXPECT_EQ(refresh(wf, {{"ontime", RowSet{}}}, "q1")->row_count(), 0u);
}

TEST(Refresh, MatchesPredicateRewrite) {
  auto wf = Workflow::evaluate(q1_def(), toy());
  for (const std::string state : {"CA", "NY", "TX"}) {
    auto traced = backward_trace(wf, "q1", {group_of(wf, state)}, "ontime");
    auto refreshed = refresh(wf, {{"ontime", traced.rids}}, "q1");
    auto direct = q1_def();
    direct.nodes.insert(direct.nodes.begin() + 3, OpNode{"f2s", FilterOp{"f2", eq(col("state"), lit(state))}});
    std::get<GroupOp>(direct.nodes.back().op).input = "f2s";
    auto expect = oracle::ref_evaluate(direct, toy()).at("q1");
    EXPECT_EQ(oracle::rows_of(*refreshed), expect.rows);
  }
}

TEST(Refresh, LeavesWorkflowUntouchedAndRejectsUnknownBase) {
  auto wf = Workflow::evaluate(q1_def(), toy());
  auto before = wf.relation("q1");
  refresh(wf, {{"ontime", RowSet{0}}}, "q1");
  EXPECT_EQ(wf.relation("q1"), before);
  EXPECT_EQ(code_of([&] { refresh(wf, {{"events", RowSet{}}}, "q1"); }), ErrorCode::UnknownRelation);
  EXPECT_EQ(code_of([&] { refresh(wf, {}, "nope"); }), ErrorCode::UnknownRelation);
}

TEST(Workflow, StructureQueries) {
  auto wf = Workflow::evaluate(q1_def(), toy());
  EXPECT_EQ(wf.sinks(), std::vector<std::string>{"q1"});
  EXPECT_EQ(wf.bases_of("q1"), (std::set<std::string>{"airlines", "airports", "ontime"}));
  EXPECT_TRUE(wf.reaches("q1", "active"));
  EXPECT_FALSE(wf.reaches("active", "ontime"));
  EXPECT_FALSE(wf.contains("shapes"));
}

TEST(Workflow, DefinitionErrors) {
  WorkflowDef dup;
  dup.nodes.push_back({"x", FilterOp{"airlines", lit(true)}});
  dup.nodes.push_back({"x", FilterOp{"airlines", lit(true)}});
  EXPECT_EQ(code_of([&] { Workflow::evaluate(dup, toy()); }), ErrorCode::DuplicateRelationName);
  WorkflowDef missing;
  missing.nodes.push_back({"x", FilterOp{"flights", lit(true)}});
  EXPECT_EQ(code_of([&] { Workflow::evaluate(missing, toy()); }), ErrorCode::UnknownRelation);
  WorkflowDef cycle;
  cycle.nodes.push_back({"a", FilterOp{"b", lit(true)}});
  cycle.nodes.push_back({"b", FilterOp{"a", lit(true)}});
  EXPECT_EQ(code_of([&] { Workflow::evaluate(cycle, toy()); }), ErrorCode::InvalidArgument);
}

TEST(Workflow, PruningKeepsSinkValues) {
  auto full = Workflow::evaluate(q1_def(), toy());
  auto pruned = Workflow::evaluate(q1_def(), toy(), {.capture_lineage = true, .sinks = {"q1"}, .prune_columns = true});
  EXPECT_TRUE(identical(*full.relation("q1"), *pruned.relation("q1")));
  EXPECT_LT(pruned.relation("f2")->column_count(), full.relation("f2")->column_count());
  auto needed = needed_columns(q1_def(), toy(), std::vector<std::string>{"q1"});
  EXPECT_EQ(needed.at("ontime"), (std::set<std::string>{"adelay", "alid", "ddelay", "src_apid"}));
}

TEST(MergePlans, SharedPrefixEvaluatedOnce) {
  auto a = q1_def();
  auto b = q1_def();
  std::get<GroupOp>(b.nodes.back().op).keys = {"city"};
  std::vector<WorkflowDef> defs{a, b};
  std::vector<std::string> prefixes{"map", "cities"};
  auto merged = merge_plans(defs, prefixes, toy());
  EXPECT_EQ(merged.def.nodes.size(), 5u);
  EXPECT_EQ(merged.names[0].at("f2"), merged.names[1].at("f2"));
  EXPECT_NE(merged.names[0].at("q1"), merged.names[1].at("q1"));
  auto wf = Workflow::evaluate(merged.def, toy());
  auto alone = Workflow::evaluate(a, toy());
  EXPECT_EQ(oracle::rows_of(*wf.relation(merged.names[0].at("q1"))), oracle::rows_of(*alone.relation("q1")));
}
