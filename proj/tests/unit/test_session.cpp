#include <gtest/gtest.h>

#include <random>

#include "dashboard.hpp"
#include "fixtures.hpp"
#include "provis/presets.hpp"
#include "provis/trace.hpp"
#include "reference.hpp"

using namespace provis;
using oracle::error_of;
using oracle::toy;

namespace {

std::vector<ViewDef> dashboard_with_scatter() {
  auto defs = flight_dashboard();
  defs.push_back(delay_scatter());
  return defs;
}

RowId mark_of_state(const EvaluatedView& v, const std::string& state) {
  const auto& rel = *v.mark_relation();
  const auto c = *rel.schema().find("state");
  for (RowId r = 0; r < rel.row_count(); ++r) {
    if (rel.value(r, c) == Value(state)) return r;
  }
  throw std::runtime_error("no mark for " + state);
}

// Scan of the base tables for one state: (count, avg ddelay, avg adelay).
std::tuple<std::int64_t, double, double> scan_state(const std::string& state) {
  const auto& ontime = *toy().get("ontime");
  const auto& airports = *toy().get("airports");
  const auto& airlines = *toy().get("airlines");
  std::int64_t n = 0, nd = 0, na = 0;
  double sd = 0, sa = 0;
  for (const auto& row : oracle::rows_of(ontime)) {
    bool active = false, in_state = false;
    for (const auto& al : oracle::rows_of(airlines)) active = active || (al[0] == row[9] && al[2] == Value("Y"));
    for (const auto& ap : oracle::rows_of(airports)) in_state = in_state || (ap[0] == row[7] && ap[6] == Value(state));
    if (!active || !in_state) continue;
    ++n;
    if (!row[6].is_null()) sd += row[6].numeric(), ++nd;
    if (!row[5].is_null()) sa += row[5].numeric(), ++na;
  }
  return {n, sd / nd, sa / na};
}

std::vector<std::vector<Value>> rows(const RelationPtr& r) { return oracle::rows_of(*r); }

bool same_outcome(const Outcome& a, const Outcome& b) {
  if (a.updates.size() != b.updates.size() || a.highlights != b.highlights) return false;
  for (const auto& [id, r] : a.updates) {
    auto it = b.updates.find(id);
    if (it == b.updates.end() || !identical(*r.data, *it->second.data) || r.marks != it->second.marks) {
      return false;
    }
  }
  return true;
}

}  // namespace

TEST(Session, SharedBases) {
  Session s("s", toy(), dashboard_with_scatter());
  EXPECT_EQ(s.shared_bases(), (std::set<std::string>{"airlines", "airports", "ontime"}));
}

TEST(Tooltip, California) {
  Session s("s", toy(), {state_map()});
  const auto& map = s.view("map");
  auto r = s.tooltip("map", Selection::of_items({mark_of_state(map, "CA")}), {"avg_ddelay", "avg_adelay"});
  auto [n, dd, ad] = scan_state("CA");
  ASSERT_GT(n, 0);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_NEAR(r[0][0].as_float(), dd, 1e-12);
  EXPECT_NEAR(r[0][1].as_float(), ad, 1e-12);
}

TEST(Tooltip, EmptyAndErrors) {
  Session s("s", toy(), {state_map()});
  EXPECT_TRUE(s.tooltip("map", Selection::of_items({}), {"cnt"}).empty());
  EXPECT_EQ(error_of([&] { s.tooltip("map", Selection::of_items({0}), {"nonexistent"}); }),
            ErrorCode::UnknownColumn);
  EXPECT_EQ(error_of([&] { s.tooltip("map", Selection::of_range({-1, 0, 5, 5}), {"cnt"}); }),
            ErrorCode::SelectionOutOfViewport);
  EXPECT_EQ(error_of([&] { s.tooltip("nope", Selection::of_items({}), {"cnt"}); }),
            ErrorCode::UnknownView);
}

TEST(DetailsOnDemand, AirportsOfOneState) {
  Session s("s", toy(), {state_map()});
  const auto& map = s.view("map");
  for (std::string state : {"CA", "NY", "TX", "WA", "IL"}) {
    auto d = s.details_on_demand("map", Selection::of_items({mark_of_state(map, state)}), airports_detail());
    std::vector<std::vector<Value>> expected;
    for (const auto& row : rows(toy().get("airports"))) {
      if (row[6] == Value(state)) expected.push_back(row);
    }
    EXPECT_EQ(rows(d), expected) << state;
  }
}

TEST(DetailsOnDemand, CityCountsAllStatesEqualUnfiltered) {
  Session s("s", toy(), {state_map()});
  auto all = RowSet::range(static_cast<RowId>(s.view("map").marks().size()));
  auto z = s.details_on_demand("map", Selection::of_items(all), city_detail());
  auto direct = Workflow::evaluate(city_detail().workflow, toy(), {.capture_lineage = false});
  EXPECT_TRUE(identical(*z, *direct.relation("z")));
  EXPECT_EQ(oracle::compare_rows(rows(z), oracle::reference_rows(city_detail(), toy()), 0), "");
}

TEST(DetailsOnDemand, CityCountsForSelection) {
  Session s("s", toy(), {state_map()});
  const auto& map = s.view("map");
  auto z = s.details_on_demand("map", Selection::of_items({mark_of_state(map, "CA")}), city_detail());
  std::map<std::string, std::int64_t> got;
  for (const auto& r : rows(z)) got[r[0].as_text()] = r[1].as_int();
  // Active-airline departures from San Francisco, Los Angeles, San Diego.
  std::map<std::string, std::int64_t> expected;
  const auto ontime = rows(toy().get("ontime"));
  for (const auto& ap : rows(toy().get("airports"))) {
    if (ap[6] != Value("CA")) continue;
    for (const auto& f : ontime) {
      if (f[7] == ap[0] && f[9] != Value(3)) ++expected[ap[5].as_text()];
    }
  }
  EXPECT_EQ(got, expected);
}

TEST(DetailsOnDemand, EmptySelection) {
  Session s("s", toy(), {state_map()});
  EXPECT_EQ(s.details_on_demand("map", Selection::of_items({}), airports_detail())->row_count(), 0u);
  EXPECT_EQ(s.details_on_demand("map", Selection::of_items({}), city_detail())->row_count(), 0u);
}

TEST(LinkedBrush, CaliforniaToScatter) {
  Session s("s", toy(), dashboard_with_scatter());
  const auto& map = s.view("map");
  const auto& scatter = s.view("scatter");
  auto got = s.linked_brush("map", Selection::of_items({mark_of_state(map, "CA")}), "scatter");
  EXPECT_EQ(got, RowSet{mark_of_state(scatter, "CA")});
}

TEST(LinkedBrush, AllAndEmpty) {
  Session s("s", toy(), dashboard_with_scatter());
  auto all = RowSet::range(static_cast<RowId>(s.view("map").marks().size()));
  EXPECT_EQ(s.linked_brush("map", Selection::of_items(all), "scatter"),
            RowSet::range(static_cast<RowId>(s.view("scatter").marks().size())));
  EXPECT_EQ(s.linked_brush("map", Selection::of_items(all), "by_airline"),
            RowSet::range(static_cast<RowId>(s.view("by_airline").marks().size())));
  EXPECT_TRUE(s.linked_brush("map", Selection::of_items({}), "scatter").empty());
}

TEST(LinkedBrush, NoSharedBase) {
  ViewDef shapes;
  shapes.id = "shapes";
  shapes.data = "shapes";
  MarkSpec m = *state_map().mark;
  m.relation = "shapes";
  m.channels["fill"] = ChannelBinding{ChannelBinding::Constant, "", {}, {}, Value("#cccccc")};
  shapes.mark = m;
  shapes.viewport = {800, 500};
  Session s("s", toy(), {shapes, count_bars("by_year", "y")});
  EXPECT_EQ(error_of([&] { s.linked_brush("shapes", Selection::of_items({0}), "by_year"); }),
            ErrorCode::NoSharedBase);
}

// Returned marks draw on the traced base rows; the oracle walks each target
// row's derivation and asks whether a join-complete path stays inside them.
TEST(LinkedBrushProperty, SoundAndExact) {
  Session s("s", toy(), dashboard_with_scatter());
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const auto& src = s.views().views()[rng() % s.views().views().size()];
    const auto& tgt = s.views().views()[rng() % s.views().views().size()];
    auto sel = oracle::random_selection(rng, src);
    auto got = s.linked_brush(src.id(), sel, tgt.id());
    auto marks = resolve_selection(src, sel).marks;
    std::map<std::string, RowSet> subsets;
    for (const std::string base : {"ontime", "airlines", "airports"}) {
      subsets[base] = backward_trace(src.workflow(), src.global(src.def().mark->relation), marks, base).rids;
    }
    for (auto m : got) {
      for (const auto& [base, rids] : subsets) {
        auto back = backward_trace(tgt.workflow(), tgt.global(tgt.def().mark->relation), {m}, base).rids;
        EXPECT_FALSE(back.intersect(rids).empty());
      }
    }
    auto ref = oracle::ref_evaluate(s.views().workflow()->def(), toy());
    const auto& table = ref.at(tgt.global(tgt.def().mark->relation));
    std::vector<RowId> expected;
    for (RowId r = 0; r < table.rows.size(); ++r) {
      if (oracle::qualifies(table.derivs[r], subsets)) expected.push_back(r);
    }
    ASSERT_EQ(got, RowSet::from_sorted(expected)) << src.id() << " -> " << tgt.id();
  }
}

TEST(Crossfilter, StatesToCarrierCounts) {
  Session s("s", toy(), flight_dashboard());
  const auto& map = s.view("map");
  RowSet sel{mark_of_state(map, "CA"), mark_of_state(map, "TX")};
  auto out = s.crossfilter("map", Selection::of_items(sel));
  EXPECT_FALSE(out.count("map"));
  ASSERT_EQ(out.size(), 5u);
  auto pred = Expr::in(col("state"), {Value("CA"), Value("TX")});
  for (const auto& [id, r] : out) {
    auto expected = oracle::reference_rows(oracle::with_predicate(s.view(id).def(), pred), toy());
    EXPECT_EQ(oracle::compare_rows(rows(r.data), expected, 1e-9), "") << id;
    EXPECT_EQ(r.marks.size(), r.mark_relation->row_count());
  }
  // Hand count over ontime: carrier 1 has 8 CA/TX departures, carrier 2 has 2, carrier 4 has 3.
  std::map<std::int64_t, std::int64_t> carriers;
  for (const auto& row : rows(out.at("by_airline").data)) carriers[row[0].as_int()] = row[1].as_int();
  EXPECT_EQ(carriers, (std::map<std::int64_t, std::int64_t>{{1, 8}, {2, 2}, {4, 3}}));
}

TEST(Crossfilter, SelectAllIsIdentity) {
  Session s("s", toy(), dashboard_with_scatter());
  for (const auto& src : s.views().views()) {
    auto all = RowSet::range(static_cast<RowId>(src.marks().size()));
    for (const auto& [id, r] : s.crossfilter(src.id(), Selection::of_items(all))) {
      EXPECT_TRUE(identical(*r.data, *s.view(id).data())) << src.id() << " -> " << id;
      EXPECT_EQ(r.marks, s.view(id).marks()) << src.id() << " -> " << id;
    }
  }
}

TEST(Crossfilter, EmptySelection) {
  Session s("s", toy(), flight_dashboard());
  auto out = s.crossfilter("by_year", Selection::of_items({}));
  ASSERT_EQ(out.size(), 5u);
  for (const auto& [id, r] : out) EXPECT_EQ(r.data->row_count(), 0u) << id;
}

TEST(CrossfilterProperty, EqualsPredicateRewrite) {
  Session s("s", toy(), flight_dashboard());
  std::mt19937_64 rng(41);
  int selections = 0;
  for (int trial = 0; trial < 150; ++trial) {
    const auto& src = s.views().views()[rng() % s.views().views().size()];
    auto sel = oracle::random_selection(rng, src);
    auto marks = resolve_selection(src, sel).marks;
    auto pred = oracle::selection_predicate(src, marks);
    auto out = s.crossfilter(src.id(), sel);
    ASSERT_EQ(out.size(), 5u);
    for (const auto& [id, r] : out) {
      auto expected = oracle::reference_rows(oracle::with_predicate(s.view(id).def(), pred), toy());
      ASSERT_EQ(oracle::compare_rows(rows(r.data), expected, 1e-9), "")
          << src.id() << " -> " << id << " " << pred.to_string();
    }
    // The source view keeps its relation.
    EXPECT_EQ(rows(s.view(src.id()).data()), oracle::reference_rows(src.def(), toy()));
    ++selections;
  }
  EXPECT_GE(selections, 100);
}

TEST(Events, RecordAssignsIncreasingIds) {
  Session s("s", toy(), flight_dashboard());
  EXPECT_EQ(s.record_event("by_year", EventKind::Brush, Selection::of_items({0})), 0);
  EXPECT_EQ(s.record_event("map", EventKind::Hover, Selection::of_items({1})), 1);
  auto evs = s.events();
  ASSERT_EQ(evs.size(), 2u);
  EXPECT_LE(evs[0].timestamp, evs[1].timestamp);
  EXPECT_EQ(s.record_event("map", EventKind::Click, Selection::of_items({}), 5), 2);
  EXPECT_EQ(s.event(2).timestamp, evs[1].timestamp);
  EXPECT_EQ(error_of([&] { s.record_event("nope", EventKind::Brush, Selection::of_items({})); }),
            ErrorCode::UnknownView);
  EXPECT_EQ(error_of([&] { s.record_event("map", EventKind::Brush, Selection::of_range({5, 5, 1, 1})); }),
            ErrorCode::SelectionOutOfViewport);
  EXPECT_EQ(s.events().size(), 3u);
}

TEST(Events, Relation) {
  Session s("s", toy(), flight_dashboard());
  s.record_event("by_year", EventKind::Brush, Selection::of_range({0, 0, 10, 10}), 100);
  auto rel = s.events_relation();
  ASSERT_EQ(rel->row_count(), 1u);
  EXPECT_EQ(rel->schema().names(), (std::vector<std::string>{"eid", "timestamp", "source", "kind", "selection"}));
  EXPECT_EQ(rel->value(0, 0), Value(0));
  EXPECT_EQ(rel->value(0, 1), Value(100));
  EXPECT_EQ(rel->value(0, 2), Value("by_year"));
  EXPECT_EQ(rel->value(0, 3), Value("brush"));
}

TEST(Events, ReplayMatchesLive) {
  Session s("s", toy(), flight_dashboard());
  auto [eid, live] = s.interact("by_month", EventKind::Brush, Selection::of_range({0, 0, 300, 300}));
  EXPECT_TRUE(same_outcome(s.replay_event(eid), live));
  EXPECT_TRUE(same_outcome(s.replay_event(eid), s.replay_event(eid)));
  auto [hover, lit] = s.interact("map", EventKind::Hover, Selection::of_items({0}));
  EXPECT_TRUE(lit.updates.empty());
  EXPECT_EQ(lit.highlights.size(), 5u);
  EXPECT_EQ(lit.highlights.at("by_airline"),
            s.linked_brush("map", Selection::of_items({0}), "by_airline"));
  EXPECT_TRUE(same_outcome(s.replay_event(hover), lit));
  EXPECT_EQ(error_of([&] { s.replay_event(-1); }), ErrorCode::UnknownEvent);
  EXPECT_EQ(error_of([&] { s.replay_event(2); }), ErrorCode::UnknownEvent);
}

TEST(Events, History) {
  Session s("s", toy(), flight_dashboard());
  EXPECT_TRUE(s.history().empty());
  s.interact("by_airline", EventKind::Brush, Selection::of_items({0}));
  s.interact("map", EventKind::Brush, Selection::of_items({1}));
  s.interact("by_airline", EventKind::Brush, Selection::of_items({1, 2}));
  auto h = s.history(std::string("by_airline"));
  ASSERT_EQ(h.size(), 2u);
  EXPECT_EQ(h[0].first.eid, 0);
  EXPECT_EQ(h[1].first.eid, 2);
  for (const auto& [ev, outcome] : h) EXPECT_TRUE(same_outcome(outcome, s.replay_event(ev.eid)));
  EXPECT_TRUE(s.history(std::string("scatter")).empty());
  EXPECT_EQ(s.history().size(), 3u);
}

TEST(EventsProperty, FreshSessionReplaysLog) {
  std::mt19937_64 rng(51);
  Session live("live", toy(), dashboard_with_scatter());
  std::vector<Outcome> produced;
  const auto kinds = {EventKind::Hover, EventKind::Brush, EventKind::Click};
  for (int i = 0; i < 50; ++i) {
    const auto& v = live.views().views()[rng() % live.views().views().size()];
    auto kind = *(kinds.begin() + rng() % 3);
    produced.push_back(live.interact(v.id(), kind, oracle::random_selection(rng, v)).second);
  }
  Session fresh("fresh", toy(), dashboard_with_scatter());
  for (const auto& ev : live.events()) {
    fresh.record_event(ev.source, ev.kind, ev.selection, ev.timestamp);
  }
  for (std::int64_t e = 0; e < 50; ++e) {
    ASSERT_TRUE(same_outcome(fresh.replay_event(e), produced[static_cast<std::size_t>(e)])) << e;
  }
}
