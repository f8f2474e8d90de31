#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "provis/relation.hpp"

namespace provis {

/// The four tables of the flight schema: ontime, airlines, airports, shapes.
struct TableSchema {
  std::string name;
  Schema schema;
};
const std::vector<TableSchema>& flight_schemas();
const Schema& flight_schema(std::string_view table);

/// Reads `<dir>/<table>.csv` for every flight table.
Catalog load_flight_dataset(const std::filesystem::path& dir);

}  // namespace provis
