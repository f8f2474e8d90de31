#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "provis/row_set.hpp"
#include "provis/value.hpp"

namespace provis {

namespace detail {
struct ColumnData {
  ValueType type = ValueType::Null;
  std::size_t size = 0;
  std::vector<std::int64_t> ints;
  std::vector<double> floats;
  std::vector<std::uint8_t> bools;
  std::vector<std::uint32_t> codes;
  std::shared_ptr<const std::vector<std::string>> dictionary;
  std::shared_ptr<const std::vector<PolygonList>> polygons;
  std::vector<std::uint8_t> valid;
};
[[noreturn]] void throw_not_numeric();
}  // namespace detail

/// Immutable typed column. Copies share storage. Text and PolygonList
/// columns hold 32-bit codes into a shared pool, so gathers never copy
/// strings or geometry.
class Column {
 public:
  Column();

  static Column from_ints(std::vector<std::int64_t> values, std::vector<std::uint8_t> valid = {});
  static Column from_floats(std::vector<double> values, std::vector<std::uint8_t> valid = {});
  static Column from_bools(std::vector<std::uint8_t> values, std::vector<std::uint8_t> valid = {});
  static Column from_codes(ValueType type, std::vector<std::uint32_t> codes,
                           std::shared_ptr<const std::vector<std::string>> dictionary,
                           std::shared_ptr<const std::vector<PolygonList>> polygons,
                           std::vector<std::uint8_t> valid = {});
  static Column nulls(std::size_t n);
  static Column from_values(ValueType type, std::span<const Value> values);

  ValueType type() const { return data_->type; }
  std::size_t size() const { return data_->size; }
  bool has_nulls() const { return !data_->valid.empty(); }
  bool is_valid(std::size_t i) const { return data_->valid.empty() || data_->valid[i] != 0; }
  /// Empty when the column has no nulls.
  std::span<const std::uint8_t> validity() const;

  Value value(std::size_t i) const;
  double numeric(std::size_t i) const {
    if (data_->type == ValueType::Float64) return data_->floats[i];
    if (data_->type == ValueType::Int64) return static_cast<double>(data_->ints[i]);
    detail::throw_not_numeric();
  }
  std::string_view text(std::size_t i) const;

  std::span<const std::int64_t> ints() const;
  std::span<const double> floats() const;
  std::span<const std::uint8_t> bools() const;
  std::span<const std::uint32_t> codes() const;
  const std::vector<std::string>& dictionary() const;
  const std::vector<PolygonList>& polygon_pool() const;

  /// Rows at `rids`, in the given order. Returns *this when `rids` is the
  /// identity sequence over the whole column.
  Column gather(std::span<const RowId> rids) const;

 private:
  explicit Column(std::shared_ptr<const detail::ColumnData> data);
  std::shared_ptr<const detail::ColumnData> data_;
};

/// Appends values one at a time; text cells are dictionary-encoded.
class ColumnBuilder {
 public:
  explicit ColumnBuilder(ValueType type);
  ~ColumnBuilder();
  ColumnBuilder(ColumnBuilder&&) noexcept;
  ColumnBuilder& operator=(ColumnBuilder&&) noexcept;

  ValueType type() const { return type_; }
  std::size_t size() const { return size_; }

  void append_null();
  void append_int(std::int64_t v);
  void append_float(double v);
  void append_bool(bool v);
  void append_text(std::string_view v);
  void append_polygons(PolygonList v);
  /// Int64 values are widened when the builder is Float64; any other
  /// mismatch throws TypeError.
  void append(const Value& v);
  void reserve(std::size_t n);

  Column finish();

 private:
  struct Impl;
  void mark_valid(bool valid);

  ValueType type_;
  std::size_t size_ = 0;
  std::unique_ptr<Impl> impl_;
};

}  // namespace provis
