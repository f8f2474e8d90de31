#include "provis/value.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <ostream>

#include <nlohmann/json.hpp>

#include "provis/error.hpp"

namespace provis {

std::string_view to_string(ValueType type) {
  switch (type) {
    case ValueType::Null: return "null";
    case ValueType::Int64: return "int64";
    case ValueType::Float64: return "float64";
    case ValueType::Text: return "text";
    case ValueType::Bool: return "bool";
    case ValueType::PolygonList: return "polygon_list";
  }
  return "?";
}

ValueType parse_value_type(std::string_view name) {
  if (name == "int64") return ValueType::Int64;
  if (name == "float64") return ValueType::Float64;
  if (name == "text") return ValueType::Text;
  if (name == "bool") return ValueType::Bool;
  if (name == "polygon_list") return ValueType::PolygonList;
  throw Error(ErrorCode::SchemaMismatch, "unknown column type '" + std::string(name) + "'");
}

bool is_numeric(ValueType type) {
  return type == ValueType::Int64 || type == ValueType::Float64;
}

void validate_polygons(const PolygonList& polygons) {
  for (const auto& ring : polygons) {
    if (ring.size() < 3) {
      throw Error(ErrorCode::InvalidArgument, "polygon ring needs at least 3 vertices");
    }
    for (const auto& p : ring) {
      if (!(p.lat >= -90.0 && p.lat <= 90.0) || !(p.lon >= -180.0 && p.lon <= 180.0)) {
        throw Error(ErrorCode::InvalidArgument, "polygon vertex out of lat/lon range");
      }
    }
  }
}

namespace {

[[noreturn]] void wrong_type(ValueType want, ValueType have) {
  throw Error(ErrorCode::TypeError, "expected " + std::string(to_string(want)) + ", found " +
                                        std::string(to_string(have)));
}

}  // namespace

std::int64_t Value::as_int() const {
  if (auto* p = std::get_if<std::int64_t>(&v_)) return *p;
  wrong_type(ValueType::Int64, type());
}

double Value::as_float() const {
  if (auto* p = std::get_if<double>(&v_)) return *p;
  wrong_type(ValueType::Float64, type());
}

const std::string& Value::as_text() const {
  if (auto* p = std::get_if<std::string>(&v_)) return *p;
  wrong_type(ValueType::Text, type());
}

bool Value::as_bool() const {
  if (auto* p = std::get_if<bool>(&v_)) return *p;
  wrong_type(ValueType::Bool, type());
}

const PolygonList& Value::as_polygons() const {
  if (auto* p = std::get_if<PolygonList>(&v_)) return *p;
  wrong_type(ValueType::PolygonList, type());
}

double Value::numeric() const {
  if (auto* p = std::get_if<std::int64_t>(&v_)) return static_cast<double>(*p);
  if (auto* p = std::get_if<double>(&v_)) return *p;
  wrong_type(ValueType::Float64, type());
}

std::optional<std::partial_ordering> sql_compare(const Value& a, const Value& b) {
  if (a.is_null() || b.is_null()) return std::nullopt;
  const auto ta = a.type();
  const auto tb = b.type();
  if (ta == ValueType::Int64 && tb == ValueType::Int64) return a.as_int() <=> b.as_int();
  if (is_numeric(ta) && is_numeric(tb)) return a.numeric() <=> b.numeric();
  if (ta != tb) {
    throw Error(ErrorCode::TypeError, "cannot compare " + std::string(to_string(ta)) + " with " +
                                          std::string(to_string(tb)));
  }
  switch (ta) {
    case ValueType::Text: return a.as_text().compare(b.as_text()) <=> 0;
    case ValueType::Bool: return a.as_bool() <=> b.as_bool();
    case ValueType::PolygonList:
      if (a.as_polygons() == b.as_polygons()) return std::partial_ordering::equivalent;
      return std::partial_ordering::unordered;
    default: break;
  }
  return std::nullopt;
}

bool identical(const Value& a, const Value& b) {
  if (a.type() == ValueType::Float64 && b.type() == ValueType::Float64) {
    return std::bit_cast<std::uint64_t>(a.as_float()) == std::bit_cast<std::uint64_t>(b.as_float());
  }
  return a == b;
}

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

std::string format_polygons(const PolygonList& polygons) {
  std::string out = "[";
  for (std::size_t r = 0; r < polygons.size(); ++r) {
    if (r) out += ',';
    out += '[';
    const auto& ring = polygons[r];
    for (std::size_t i = 0; i <= ring.size(); ++i) {
      // closing vertex repeats the first
      const auto& p = ring[i % ring.size()];
      if (i) out += ',';
      out += '[' + format_double(p.lon) + ',' + format_double(p.lat) + ']';
    }
    out += ']';
  }
  out += ']';
  return out;
}

PolygonList parse_polygons(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("polygon text is not JSON: ") + e.what());
  }
  if (!doc.is_array()) throw Error(ErrorCode::InvalidArgument, "polygon list must be an array");
  PolygonList out;
  for (const auto& ring_doc : doc) {
    if (!ring_doc.is_array()) throw Error(ErrorCode::InvalidArgument, "ring must be an array");
    Ring ring;
    for (const auto& pt : ring_doc) {
      if (!pt.is_array() || pt.size() != 2 || !pt[0].is_number() || !pt[1].is_number()) {
        throw Error(ErrorCode::InvalidArgument, "vertex must be [lon, lat]");
      }
      ring.push_back(GeoPoint{pt[1].get<double>(), pt[0].get<double>()});
    }
    if (ring.size() > 1 && ring.front() == ring.back()) ring.pop_back();
    out.push_back(std::move(ring));
  }
  validate_polygons(out);
  return out;
}

std::string to_text(const Value& v) {
  switch (v.type()) {
    case ValueType::Null: return {};
    case ValueType::Int64: return std::to_string(v.as_int());
    case ValueType::Float64: return format_double(v.as_float());
    case ValueType::Text: return v.as_text();
    case ValueType::Bool: return v.as_bool() ? "true" : "false";
    case ValueType::PolygonList: return format_polygons(v.as_polygons());
  }
  return {};
}

std::ostream& operator<<(std::ostream& os, const Value& v) {
  if (v.is_null()) return os << "NULL";
  if (v.type() == ValueType::Text) return os << '\'' << v.as_text() << '\'';
  return os << to_text(v);
}

}  // namespace provis
