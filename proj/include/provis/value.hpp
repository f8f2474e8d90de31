#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace provis {

enum class ValueType : std::uint8_t { Null, Int64, Float64, Text, Bool, PolygonList };

std::string_view to_string(ValueType type);
/// Accepts the lower-case names used in schema documents: int64, float64,
/// text, bool, polygon_list.
ValueType parse_value_type(std::string_view name);
bool is_numeric(ValueType type);

struct GeoPoint {
  double lat = 0.0;
  double lon = 0.0;
  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

/// A ring is stored open: the closing vertex of a GeoJSON ring is dropped.
using Ring = std::vector<GeoPoint>;
using PolygonList = std::vector<Ring>;

/// Throws InvalidArgument unless every ring has at least three vertices and
/// every vertex lies in lat [-90, 90], lon [-180, 180].
void validate_polygons(const PolygonList& polygons);

class Value {
 public:
  Value() = default;
  Value(std::int64_t v) : v_(v) {}
  Value(int v) : v_(static_cast<std::int64_t>(v)) {}
  Value(double v) : v_(v) {}
  Value(bool v) : v_(v) {}
  Value(std::string v) : v_(std::move(v)) {}
  Value(std::string_view v) : v_(std::string(v)) {}
  Value(const char* v) : v_(std::string(v)) {}
  Value(PolygonList v) : v_(std::move(v)) {}

  static Value null() { return Value(); }

  ValueType type() const { return static_cast<ValueType>(v_.index()); }
  bool is_null() const { return v_.index() == 0; }

  std::int64_t as_int() const;
  double as_float() const;
  const std::string& as_text() const;
  bool as_bool() const;
  const PolygonList& as_polygons() const;
  /// Int64 or Float64 widened to double.
  double numeric() const;

  /// Structural equality: Null equals Null, floats compare with ==.
  friend bool operator==(const Value& a, const Value& b) = default;

 private:
  std::variant<std::monostate, std::int64_t, double, std::string, bool, PolygonList> v_;
};

/// SQL comparison: nullopt when either side is Null. Int64/Float64 compare
/// numerically; mismatched non-numeric types throw TypeError.
std::optional<std::partial_ordering> sql_compare(const Value& a, const Value& b);

/// Like operator== but floats compare by bit pattern.
bool identical(const Value& a, const Value& b);

/// Shortest round-trip text for a double.
std::string format_double(double v);
/// Text form used in CSV output and diagnostics. Null renders empty.
std::string to_text(const Value& v);
/// GeoJSON-style nested arrays, vertices as [lon, lat].
std::string format_polygons(const PolygonList& polygons);
PolygonList parse_polygons(std::string_view text);

std::ostream& operator<<(std::ostream& os, const Value& v);

}  // namespace provis
