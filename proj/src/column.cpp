#include "provis/column.hpp"

#include <absl/container/flat_hash_map.h>

#include "provis/error.hpp"

namespace provis {

namespace detail {

void throw_not_numeric() { throw Error(ErrorCode::TypeError, "column is not numeric"); }

}  // namespace detail

namespace {

const std::vector<std::string>& empty_dictionary() {
  static const std::vector<std::string> empty;
  return empty;
}

const std::vector<PolygonList>& empty_polygons() {
  static const std::vector<PolygonList> empty;
  return empty;
}

template <typename T>
std::vector<T> gather_vec(const std::vector<T>& src, std::span<const RowId> rids) {
  std::vector<T> out(rids.size());
  for (std::size_t i = 0; i < rids.size(); ++i) out[i] = src[rids[i]];
  return out;
}

bool is_identity(std::span<const RowId> rids, std::size_t n) {
  if (rids.size() != n) return false;
  for (std::size_t i = 0; i < n; ++i) {
    if (rids[i] != i) return false;
  }
  return true;
}

}  // namespace

Column::Column() : data_(std::make_shared<detail::ColumnData>()) {}

Column::Column(std::shared_ptr<const detail::ColumnData> data) : data_(std::move(data)) {}

Column Column::from_ints(std::vector<std::int64_t> values, std::vector<std::uint8_t> valid) {
  auto d = std::make_shared<detail::ColumnData>();
  d->type = ValueType::Int64;
  d->size = values.size();
  d->ints = std::move(values);
  d->valid = std::move(valid);
  return Column(std::move(d));
}

Column Column::from_floats(std::vector<double> values, std::vector<std::uint8_t> valid) {
  auto d = std::make_shared<detail::ColumnData>();
  d->type = ValueType::Float64;
  d->size = values.size();
  d->floats = std::move(values);
  d->valid = std::move(valid);
  return Column(std::move(d));
}

Column Column::from_bools(std::vector<std::uint8_t> values, std::vector<std::uint8_t> valid) {
  auto d = std::make_shared<detail::ColumnData>();
  d->type = ValueType::Bool;
  d->size = values.size();
  d->bools = std::move(values);
  d->valid = std::move(valid);
  return Column(std::move(d));
}

Column Column::from_codes(ValueType type, std::vector<std::uint32_t> codes,
                          std::shared_ptr<const std::vector<std::string>> dictionary,
                          std::shared_ptr<const std::vector<PolygonList>> polygons,
                          std::vector<std::uint8_t> valid) {
  auto d = std::make_shared<detail::ColumnData>();
  d->type = type;
  d->size = codes.size();
  d->codes = std::move(codes);
  d->dictionary = std::move(dictionary);
  d->polygons = std::move(polygons);
  d->valid = std::move(valid);
  return Column(std::move(d));
}

Column Column::nulls(std::size_t n) {
  auto d = std::make_shared<detail::ColumnData>();
  d->type = ValueType::Null;
  d->size = n;
  d->valid.assign(n, 0);
  return Column(std::move(d));
}

Column Column::from_values(ValueType type, std::span<const Value> values) {
  ColumnBuilder b(type);
  b.reserve(values.size());
  for (const auto& v : values) b.append(v);
  return b.finish();
}

std::span<const std::uint8_t> Column::validity() const { return data_->valid; }

Value Column::value(std::size_t i) const {
  if (!is_valid(i)) return Value::null();
  switch (data_->type) {
    case ValueType::Null: return Value::null();
    case ValueType::Int64: return Value(data_->ints[i]);
    case ValueType::Float64: return Value(data_->floats[i]);
    case ValueType::Bool: return Value(data_->bools[i] != 0);
    case ValueType::Text: return Value((*data_->dictionary)[data_->codes[i]]);
    case ValueType::PolygonList: return Value((*data_->polygons)[data_->codes[i]]);
  }
  return Value::null();
}

std::string_view Column::text(std::size_t i) const {
  if (data_->type != ValueType::Text) throw Error(ErrorCode::TypeError, "column is not text");
  return (*data_->dictionary)[data_->codes[i]];
}

std::span<const std::int64_t> Column::ints() const { return data_->ints; }
std::span<const double> Column::floats() const { return data_->floats; }
std::span<const std::uint8_t> Column::bools() const { return data_->bools; }
std::span<const std::uint32_t> Column::codes() const { return data_->codes; }

const std::vector<std::string>& Column::dictionary() const {
  return data_->dictionary ? *data_->dictionary : empty_dictionary();
}

const std::vector<PolygonList>& Column::polygon_pool() const {
  return data_->polygons ? *data_->polygons : empty_polygons();
}

Column Column::gather(std::span<const RowId> rids) const {
  if (is_identity(rids, data_->size)) return *this;
  auto d = std::make_shared<detail::ColumnData>();
  d->type = data_->type;
  d->size = rids.size();
  switch (data_->type) {
    case ValueType::Null: break;
    case ValueType::Int64: d->ints = gather_vec(data_->ints, rids); break;
    case ValueType::Float64: d->floats = gather_vec(data_->floats, rids); break;
    case ValueType::Bool: d->bools = gather_vec(data_->bools, rids); break;
    case ValueType::Text:
    case ValueType::PolygonList:
      d->codes = gather_vec(data_->codes, rids);
      d->dictionary = data_->dictionary;
      d->polygons = data_->polygons;
      break;
  }
  if (!data_->valid.empty()) {
    d->valid = gather_vec(data_->valid, rids);
  }
  return Column(std::move(d));
}

struct ColumnBuilder::Impl {
  std::vector<std::int64_t> ints;
  std::vector<double> floats;
  std::vector<std::uint8_t> bools;
  std::vector<std::uint32_t> codes;
  std::vector<std::string> dictionary;
  absl::flat_hash_map<std::string, std::uint32_t> dictionary_index;
  std::vector<PolygonList> polygons;
  std::vector<std::uint8_t> valid;
  bool any_null = false;
};

ColumnBuilder::ColumnBuilder(ValueType type) : type_(type), impl_(std::make_unique<Impl>()) {}
ColumnBuilder::~ColumnBuilder() = default;
ColumnBuilder::ColumnBuilder(ColumnBuilder&&) noexcept = default;
ColumnBuilder& ColumnBuilder::operator=(ColumnBuilder&&) noexcept = default;

void ColumnBuilder::reserve(std::size_t n) {
  switch (type_) {
    case ValueType::Int64: impl_->ints.reserve(n); break;
    case ValueType::Float64: impl_->floats.reserve(n); break;
    case ValueType::Bool: impl_->bools.reserve(n); break;
    case ValueType::Text:
    case ValueType::PolygonList: impl_->codes.reserve(n); break;
    case ValueType::Null: break;
  }
}

void ColumnBuilder::mark_valid(bool valid) {
  if (!valid && !impl_->any_null) {
    impl_->any_null = true;
    impl_->valid.assign(size_, 1);
  }
  if (impl_->any_null) impl_->valid.push_back(valid ? 1 : 0);
  ++size_;
}

void ColumnBuilder::append_null() {
  switch (type_) {
    case ValueType::Int64: impl_->ints.push_back(0); break;
    case ValueType::Float64: impl_->floats.push_back(0.0); break;
    case ValueType::Bool: impl_->bools.push_back(0); break;
    case ValueType::Text:
    case ValueType::PolygonList: impl_->codes.push_back(0); break;
    case ValueType::Null: break;
  }
  mark_valid(false);
}

void ColumnBuilder::append_int(std::int64_t v) {
  if (type_ == ValueType::Float64) {
    append_float(static_cast<double>(v));
    return;
  }
  if (type_ != ValueType::Int64) throw Error(ErrorCode::TypeError, "int appended to non-int column");
  impl_->ints.push_back(v);
  mark_valid(true);
}

void ColumnBuilder::append_float(double v) {
  if (type_ != ValueType::Float64) {
    throw Error(ErrorCode::TypeError, "float appended to non-float column");
  }
  impl_->floats.push_back(v);
  mark_valid(true);
}

void ColumnBuilder::append_bool(bool v) {
  if (type_ != ValueType::Bool) throw Error(ErrorCode::TypeError, "bool appended to non-bool column");
  impl_->bools.push_back(v ? 1 : 0);
  mark_valid(true);
}

void ColumnBuilder::append_text(std::string_view v) {
  if (type_ != ValueType::Text) throw Error(ErrorCode::TypeError, "text appended to non-text column");
  auto it = impl_->dictionary_index.find(absl::string_view(v.data(), v.size()));
  std::uint32_t code;
  if (it == impl_->dictionary_index.end()) {
    code = static_cast<std::uint32_t>(impl_->dictionary.size());
    impl_->dictionary.emplace_back(v);
    impl_->dictionary_index.emplace(std::string(v), code);
  } else {
    code = it->second;
  }
  impl_->codes.push_back(code);
  mark_valid(true);
}

void ColumnBuilder::append_polygons(PolygonList v) {
  if (type_ != ValueType::PolygonList) {
    throw Error(ErrorCode::TypeError, "polygons appended to non-polygon column");
  }
  impl_->codes.push_back(static_cast<std::uint32_t>(impl_->polygons.size()));
  impl_->polygons.push_back(std::move(v));
  mark_valid(true);
}

void ColumnBuilder::append(const Value& v) {
  switch (v.type()) {
    case ValueType::Null: append_null(); return;
    case ValueType::Int64: append_int(v.as_int()); return;
    case ValueType::Float64: append_float(v.as_float()); return;
    case ValueType::Bool: append_bool(v.as_bool()); return;
    case ValueType::Text: append_text(v.as_text()); return;
    case ValueType::PolygonList: append_polygons(v.as_polygons()); return;
  }
}

Column ColumnBuilder::finish() {
  auto valid = impl_->any_null ? std::move(impl_->valid) : std::vector<std::uint8_t>{};
  Column out;
  switch (type_) {
    case ValueType::Null: out = Column::nulls(size_); break;
    case ValueType::Int64: out = Column::from_ints(std::move(impl_->ints), std::move(valid)); break;
    case ValueType::Float64:
      out = Column::from_floats(std::move(impl_->floats), std::move(valid));
      break;
    case ValueType::Bool: out = Column::from_bools(std::move(impl_->bools), std::move(valid)); break;
    case ValueType::Text:
      out = Column::from_codes(
          type_, std::move(impl_->codes),
          std::make_shared<const std::vector<std::string>>(std::move(impl_->dictionary)), nullptr,
          std::move(valid));
      break;
    case ValueType::PolygonList:
      out = Column::from_codes(
          type_, std::move(impl_->codes), nullptr,
          std::make_shared<const std::vector<PolygonList>>(std::move(impl_->polygons)),
          std::move(valid));
      break;
  }
  impl_ = std::make_unique<Impl>();
  size_ = 0;
  return out;
}

}  // namespace provis
