#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "provis/column.hpp"
#include "provis/row_set.hpp"
#include "provis/value.hpp"

namespace provis {

struct ColumnDef {
  std::string name;
  ValueType type = ValueType::Null;
  friend bool operator==(const ColumnDef&, const ColumnDef&) = default;
};

class Schema {
 public:
  Schema() = default;
  /// Throws SchemaMismatch on duplicate column names.
  explicit Schema(std::vector<ColumnDef> columns);

  std::size_t size() const { return columns_.size(); }
  const ColumnDef& at(std::size_t i) const { return columns_.at(i); }
  const std::vector<ColumnDef>& columns() const { return columns_; }
  std::optional<std::size_t> find(std::string_view name) const;
  std::vector<std::string> names() const;

  friend bool operator==(const Schema&, const Schema&) = default;

 private:
  std::vector<ColumnDef> columns_;
};

enum class RelationKind { Base, Derived };

using Row = std::vector<Value>;

/// Columnar table. Immutable once constructed; shared as RelationPtr.
class Relation {
 public:
  Relation(std::string name, Schema schema, std::vector<Column> columns, RelationKind kind,
           std::optional<std::size_t> row_count = std::nullopt);

  const std::string& name() const { return name_; }
  const Schema& schema() const { return schema_; }
  RelationKind kind() const { return kind_; }
  std::size_t row_count() const { return row_count_; }
  std::size_t column_count() const { return columns_.size(); }

  const Column& column(std::size_t i) const { return columns_.at(i); }
  /// Throws UnknownColumn.
  const Column& column(std::string_view name) const;
  const std::vector<Column>& columns() const { return columns_; }

  Value value(RowId row, std::size_t col) const { return columns_[col].value(row); }
  Row row(RowId id) const;

 private:
  std::string name_;
  Schema schema_;
  std::vector<Column> columns_;
  RelationKind kind_;
  std::size_t row_count_ = 0;
};

using RelationPtr = std::shared_ptr<const Relation>;

/// Rows at `rids` in ascending RowId order, all columns. Throws
/// RowIdOutOfRange.
std::vector<Row> get_rows(const Relation& rel, const RowSet& rids);

/// Rows at `rids`, all columns, as a new relation named `name`.
RelationPtr restrict_rows(const Relation& rel, const RowSet& rids, RelationKind kind);

/// Relations equal by schema, row count, and bit-identical values.
bool identical(const Relation& a, const Relation& b);

/// A named collection of frozen base relations.
class Catalog {
 public:
  /// Throws DuplicateRelationName.
  void add(RelationPtr rel);
  /// Throws UnknownRelation.
  RelationPtr get(std::string_view name) const;
  RelationPtr find(std::string_view name) const;
  bool contains(std::string_view name) const { return find(name) != nullptr; }
  std::vector<std::string> names() const;
  std::size_t size() const { return relations_.size(); }

 private:
  std::map<std::string, RelationPtr, std::less<>> relations_;
};

}  // namespace provis
