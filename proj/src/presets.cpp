#include "provis/presets.hpp"

namespace provis {

namespace {

constexpr double kChartWidth = 600.0;
constexpr double kChartHeight = 300.0;
constexpr double kMapWidth = 800.0;
constexpr double kMapHeight = 500.0;
constexpr double kBarWidth = 8.0;

ScaleRef position(std::string extent, double lo, double hi, bool zero_based = false) {
  ScaleRef s;
  s.extent = std::move(extent);
  s.lo = lo;
  s.hi = hi;
  s.zero_based = zero_based;
  return s;
}

ScaleRef fixed(double mi, double mx, double lo, double hi) {
  ScaleRef s;
  s.domain = std::make_pair(mi, mx);
  s.lo = lo;
  s.hi = hi;
  return s;
}

ChannelBinding scaled(std::string column, ScaleRef scale) {
  ChannelBinding b;
  b.kind = ChannelBinding::Scaled;
  b.column = std::move(column);
  b.scale = std::move(scale);
  return b;
}

ChannelBinding constant(Value v) {
  ChannelBinding b;
  b.kind = ChannelBinding::Constant;
  b.constant = std::move(v);
  return b;
}

GroupOp state_counts() {
  return GroupOp{"prep",
                 {"state"},
                 {{AggFn::Count, std::nullopt, "cnt"},
                  {AggFn::Avg, "ddelay", "avg_ddelay"},
                  {AggFn::Avg, "adelay", "avg_adelay"}}};
}

}  // namespace

WorkflowDef flight_prep() {
  WorkflowDef def;
  def.nodes.push_back({"active", FilterOp{"airlines", eq(col("active"), lit("Y"))}});
  def.nodes.push_back({"flights_al", JoinOp{"ontime", "active", "alid", "alid", ""}});
  def.nodes.push_back({"flights", JoinOp{"flights_al", "airports", "src_apid", "apid", ""}});
  auto bin = Expr::arith(ArithOp::Mul,
                         Expr::floor(Expr::arith(ArithOp::Div, col("ddelay"), lit(10))), lit(10));
  def.nodes.push_back({"prep", ProjectOp{"flights",
                                         {{col("state"), "state"},
                                          {col("city"), "city"},
                                          {col("alid"), "alid"},
                                          {col("ddelay"), "ddelay"},
                                          {col("adelay"), "adelay"},
                                          {col("y"), "y"},
                                          {col("m"), "m"},
                                          {col("d"), "d"},
                                          {bin, "delay_bin"}}}});
  return def;
}

ViewDef state_map() {
  ViewDef v;
  v.id = "map";
  v.workflow = flight_prep();
  v.workflow.nodes.push_back({"q1", state_counts()});
  v.workflow.nodes.push_back({"m", JoinOp{"q1", "shapes", "state", "state", ""}});
  v.data = "q1";
  v.extents = {{"cnt", "q1", "cnt"}};
  MarkSpec mark;
  mark.relation = "m";
  mark.kind = MarkKind::Polygon;
  ChannelBinding geo;
  geo.kind = ChannelBinding::Geo;
  geo.column = "polygons";
  geo.scale = fixed(-125.0, -66.0, 0.0, kMapWidth);
  geo.scale_y = fixed(24.0, 50.0, kMapHeight, 0.0);
  mark.channels["geometry"] = geo;
  ScaleRef ramp;
  ramp.kind = ScaleKind::LinearColorRamp;
  ramp.extent = "cnt";
  mark.channels["fill"] = scaled("cnt", ramp);
  v.mark = mark;
  v.viewport = {kMapWidth, kMapHeight};
  return v;
}

ViewDef count_bars(const std::string& id, const std::string& key) {
  ViewDef v;
  v.id = id;
  v.workflow = flight_prep();
  v.workflow.nodes.push_back({"q", GroupOp{"prep", {key}, {{AggFn::Count, std::nullopt, "cnt"}}}});
  v.data = "q";
  v.extents = {{"key", "q", key}, {"cnt", "q", "cnt"}};
  MarkSpec mark;
  mark.relation = "q";
  mark.kind = MarkKind::Rect;
  mark.channels["x"] = scaled(key, position("key", 0.0, kChartWidth - kBarWidth));
  mark.channels["width"] = constant(kBarWidth);
  mark.channels["height"] = scaled("cnt", position("cnt", 0.0, kChartHeight, true));
  v.mark = mark;
  v.viewport = {kChartWidth, kChartHeight};
  return v;
}

std::vector<ViewDef> flight_dashboard() {
  return {state_map(),
          count_bars("by_airline", "alid"),
          count_bars("by_delay", "delay_bin"),
          count_bars("by_day", "d"),
          count_bars("by_month", "m"),
          count_bars("by_year", "y")};
}

ViewDef delay_scatter() {
  ViewDef v;
  v.id = "scatter";
  v.workflow = flight_prep();
  v.workflow.nodes.push_back({"q1", state_counts()});
  v.data = "q1";
  v.extents = {{"dd", "q1", "avg_ddelay"}, {"ad", "q1", "avg_adelay"}};
  MarkSpec mark;
  mark.relation = "q1";
  mark.kind = MarkKind::Circle;
  mark.channels["x"] = scaled("avg_ddelay", position("dd", 0.0, kChartWidth));
  mark.channels["y"] = scaled("avg_adelay", position("ad", kChartHeight, 0.0));
  v.mark = mark;
  v.viewport = {kChartWidth, kChartHeight};
  return v;
}

ViewDef airports_detail() {
  ViewDef v;
  v.id = "airports_detail";
  v.data = "airports";
  v.selection_bound = {"airports"};
  return v;
}

ViewDef city_detail() {
  ViewDef v;
  v.id = "city_detail";
  v.workflow.nodes.push_back({"active", FilterOp{"airlines", eq(col("active"), lit("Y"))}});
  v.workflow.nodes.push_back({"a1", JoinOp{"ontime", "active", "alid", "alid", ""}});
  v.workflow.nodes.push_back({"a2", JoinOp{"a1", "airports", "src_apid", "apid", ""}});
  v.workflow.nodes.push_back({"z", GroupOp{"a2", {"city"}, {{AggFn::Count, std::nullopt, "cnt"}}}});
  v.data = "z";
  v.selection_bound = {"ontime", "airports"};
  return v;
}

}  // namespace provis
