#include <gtest/gtest.h>

#include <fstream>
#include <set>
#include <sstream>

#include "fixtures.hpp"
#include "provis/bench.hpp"
#include "provis/flights.hpp"
#include "provis/presets.hpp"
#include "provis/synth.hpp"
#include "reference.hpp"

using namespace provis;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("provis_" + tag + "_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                        "_" + std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    fs::remove_all(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::set<std::string> column_values(const Relation& rel, const std::string& col) {
  std::set<std::string> out;
  const auto c = *rel.schema().find(col);
  for (RowId r = 0; r < rel.row_count(); ++r) out.insert(to_text(rel.value(r, c)));
  return out;
}

}  // namespace

TEST(Generate, SameSeedSameBytes) {
  TempDir a("gen_a"), b("gen_b");
  generate({10, 7}, a.path);
  generate({10, 7}, b.path);
  for (const auto* t : {"ontime", "airlines", "airports", "shapes"}) {
    const auto file = std::string(t) + ".csv";
    EXPECT_EQ(slurp(a.path / file), slurp(b.path / file)) << t;
  }
  TempDir c("gen_c");
  generate({10, 8}, c.path);
  EXPECT_NE(slurp(a.path / "ontime.csv"), slurp(c.path / "ontime.csv"));
}

TEST(Generate, ForeignKeysResolve) {
  TempDir d("fk");
  generate({1000, 3, 12, 80}, d.path);
  const auto data = load_flight_dataset(d.path);
  EXPECT_EQ(data.get("ontime")->row_count(), 1000u);
  EXPECT_EQ(data.get("airlines")->row_count(), 12u);
  EXPECT_EQ(data.get("airports")->row_count(), 80u);
  const auto alids = column_values(*data.get("airlines"), "alid");
  const auto apids = column_values(*data.get("airports"), "apid");
  for (const auto& f : oracle::rows_of(*data.get("ontime"))) {
    ASSERT_TRUE(alids.count(to_text(f[9]))) << f[9];
    ASSERT_TRUE(apids.count(to_text(f[7]))) << f[7];
    ASSERT_TRUE(apids.count(to_text(f[8]))) << f[8];
  }
  const auto states = column_values(*data.get("shapes"), "state");
  EXPECT_EQ(states.size(), 50u);
  for (const auto& s : column_values(*data.get("airports"), "state")) EXPECT_TRUE(states.count(s)) << s;
  EXPECT_EQ(column_values(*data.get("airports"), "state").size(), 50u);
}

TEST(Generate, SingleFlightWorksEndToEnd) {
  TempDir d("one");
  generate({1, 5}, d.path);
  const auto data = load_flight_dataset(d.path);
  ASSERT_EQ(data.get("ontime")->row_count(), 1u);
  Session s("one", data, flight_dashboard());
  const auto& bars = s.view("by_airline");
  const auto out = s.crossfilter("by_airline", Selection::of_items(RowSet::range(bars.marks().size())));
  EXPECT_EQ(out.size(), 5u);
}

TEST(Generate, RejectsZeroRows) {
  TempDir d("zero");
  EXPECT_EQ(oracle::error_of([&] { generate({0, 1}, d.path); }), ErrorCode::InvalidArgument);
}

TEST(Bench, Percentile) {
  std::vector<double> v;
  for (int i = 1; i <= 20; ++i) v.push_back(21 - i);
  EXPECT_EQ(percentile(v, 0.5), 10.0);
  EXPECT_EQ(percentile(v, 0.95), 19.0);
  EXPECT_EQ(percentile(v, 1.0), 20.0);
  EXPECT_EQ(percentile({}, 0.5), 0.0);
  EXPECT_EQ(percentile({4.0}, 0.95), 4.0);
}

TEST(Bench, ScriptRoundTrip) {
  const auto steps = random_script(12, 9);
  ASSERT_EQ(steps.size(), 12u);
  const auto again = script_from_json(Json::parse(script_to_json(steps).dump()));
  ASSERT_EQ(again.size(), steps.size());
  for (std::size_t i = 0; i < steps.size(); ++i) {
    EXPECT_EQ(again[i].view, steps[i].view);
    EXPECT_EQ(selection_to_json(again[i].selection), selection_to_json(steps[i].selection));
  }
  EXPECT_EQ(script_from_json(Json{{"steps", script_to_json(steps)}}).size(), 12u);
  EXPECT_EQ(oracle::error_of([] { script_from_json(Json::parse(R"([{"view": 1}])")); }), ErrorCode::ParseError);
}

TEST(Bench, GuardAgreesOnToyAndSynthetic) {
  EXPECT_GT(check_result_equivalence(oracle::toy(), random_script(12, 4), 1000), 0u);
  TempDir d("guard");
  generate({3000, 11}, d.path);
  EXPECT_EQ(check_result_equivalence(load_flight_dataset(d.path), random_script(12, 5), 1000), 12u * 5);
}

TEST(Bench, EmptyScriptReportsBuildOnly) {
  TempDir d("empty");
  generate({500, 2}, d.path);
  BenchOptions o;
  o.data = d.path;
  o.reps = 2;
  const auto r = run_bench(o);
  EXPECT_EQ(r.at("rows").at("ontime"), 500);
  EXPECT_GT(r.at("build").at("lineage_ms").get<double>(), 0.0);
  EXPECT_GT(r.at("build").at("overhead_ratio").get<double>(), 0.0);
  EXPECT_EQ(r.at("crossfilter").at("samples"), 0);
  EXPECT_FALSE(r.contains("http"));
  EXPECT_TRUE(r.at("environment").contains("cpu"));
}

TEST(Bench, ResultsRepeatAcrossRuns) {
  TempDir d("repeat");
  generate({2000, 6}, d.path);
  BenchOptions o;
  o.data = d.path;
  o.script = random_script(6, 13);
  o.reps = 2;
  const auto a = run_bench(o);
  const auto b = run_bench(o);
  EXPECT_EQ(a.at("crossfilter").at("result_rows"), b.at("crossfilter").at("result_rows"));
  EXPECT_EQ(a.at("trace").at("backward_rows"), b.at("trace").at("backward_rows"));
  EXPECT_EQ(a.at("crossfilter").at("samples"), 6);
  ASSERT_TRUE(a.contains("http"));
  EXPECT_EQ(a.at("http").at("samples"), 6);
}
