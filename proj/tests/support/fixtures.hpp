#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "provis/error.hpp"
#include "provis/flights.hpp"
#include "provis/relation.hpp"

namespace provis::oracle {

inline RelationPtr make_relation(std::string name, Schema schema,
                                 const std::vector<std::vector<Value>>& rows) {
  std::vector<ColumnBuilder> builders;
  for (const auto& c : schema.columns()) builders.emplace_back(c.type);
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) builders[c].append(row[c]);
  }
  std::vector<Column> cols;
  for (auto& b : builders) cols.push_back(b.finish());
  return std::make_shared<const Relation>(std::move(name), std::move(schema), std::move(cols),
                                          RelationKind::Base, rows.size());
}

inline const Catalog& toy() {
  static const Catalog c = load_flight_dataset(PROVIS_TOY_DIR);
  return c;
}

/// Code of the Error thrown by `fn`, nullopt when it returns normally.
template <class F>
std::optional<ErrorCode> error_of(F&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

}  // namespace provis::oracle
