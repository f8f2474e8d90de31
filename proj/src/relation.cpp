#include "provis/relation.hpp"

#include <set>

#include "provis/error.hpp"

namespace provis {

Schema::Schema(std::vector<ColumnDef> columns) : columns_(std::move(columns)) {
  std::set<std::string_view> seen;
  for (const auto& c : columns_) {
    if (!seen.insert(c.name).second) {
      throw Error(ErrorCode::SchemaMismatch, "duplicate column name '" + c.name + "'");
    }
  }
}

std::optional<std::size_t> Schema::find(std::string_view name) const {
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i].name == name) return i;
  }
  return std::nullopt;
}

std::vector<std::string> Schema::names() const {
  std::vector<std::string> out;
  out.reserve(columns_.size());
  for (const auto& c : columns_) out.push_back(c.name);
  return out;
}

Relation::Relation(std::string name, Schema schema, std::vector<Column> columns, RelationKind kind,
                   std::optional<std::size_t> row_count)
    : name_(std::move(name)), schema_(std::move(schema)), columns_(std::move(columns)), kind_(kind) {
  if (columns_.size() != schema_.size()) {
    throw Error(ErrorCode::SchemaMismatch, "relation '" + name_ + "': column count differs from schema");
  }
  row_count_ = row_count ? *row_count : (columns_.empty() ? 0 : columns_.front().size());
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i].size() != row_count_) {
      throw Error(ErrorCode::SchemaMismatch,
                  "relation '" + name_ + "': column '" + schema_.at(i).name + "' has wrong length");
    }
    if (columns_[i].type() != schema_.at(i).type && columns_[i].type() != ValueType::Null) {
      throw Error(ErrorCode::SchemaMismatch,
                  "relation '" + name_ + "': column '" + schema_.at(i).name + "' has wrong type");
    }
  }
}

const Column& Relation::column(std::string_view name) const {
  auto idx = schema_.find(name);
  if (!idx) {
    throw Error(ErrorCode::UnknownColumn,
                "relation '" + name_ + "' has no column '" + std::string(name) + "'");
  }
  return columns_[*idx];
}

Row Relation::row(RowId id) const {
  if (id >= row_count_) {
    throw Error(ErrorCode::RowIdOutOfRange,
                "row " + std::to_string(id) + " out of range for '" + name_ + "'");
  }
  Row out;
  out.reserve(columns_.size());
  for (const auto& c : columns_) out.push_back(c.value(id));
  return out;
}

std::vector<Row> get_rows(const Relation& rel, const RowSet& rids) {
  if (rids.max_plus_one() > rel.row_count()) {
    throw Error(ErrorCode::RowIdOutOfRange, "row " + std::to_string(rids.max_plus_one() - 1) +
                                                " out of range for '" + rel.name() + "'");
  }
  std::vector<Row> out;
  out.reserve(rids.size());
  for (RowId id : rids) out.push_back(rel.row(id));
  return out;
}

RelationPtr restrict_rows(const Relation& rel, const RowSet& rids, RelationKind kind) {
  if (rids.max_plus_one() > rel.row_count()) {
    throw Error(ErrorCode::RowIdOutOfRange, "row id out of range for '" + rel.name() + "'");
  }
  std::vector<Column> cols;
  cols.reserve(rel.column_count());
  for (const auto& c : rel.columns()) cols.push_back(c.gather(rids.ids()));
  return std::make_shared<const Relation>(rel.name(), rel.schema(), std::move(cols), kind, rids.size());
}

bool identical(const Relation& a, const Relation& b) {
  if (!(a.schema() == b.schema()) || a.row_count() != b.row_count()) return false;
  for (std::size_t c = 0; c < a.column_count(); ++c) {
    for (std::size_t r = 0; r < a.row_count(); ++r) {
      if (!identical(a.column(c).value(r), b.column(c).value(r))) return false;
    }
  }
  return true;
}

void Catalog::add(RelationPtr rel) {
  const auto& name = rel->name();
  if (relations_.count(name)) {
    throw Error(ErrorCode::DuplicateRelationName, "relation '" + name + "' already loaded");
  }
  relations_.emplace(name, std::move(rel));
}

RelationPtr Catalog::get(std::string_view name) const {
  auto rel = find(name);
  if (!rel) throw Error(ErrorCode::UnknownRelation, "unknown relation '" + std::string(name) + "'");
  return rel;
}

RelationPtr Catalog::find(std::string_view name) const {
  auto it = relations_.find(name);
  return it == relations_.end() ? nullptr : it->second;
}

std::vector<std::string> Catalog::names() const {
  std::vector<std::string> out;
  for (const auto& [name, rel] : relations_) out.push_back(name);
  return out;
}

}  // namespace provis
