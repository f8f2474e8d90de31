#include "provis/flights.hpp"

#include <fstream>

#include "provis/csv.hpp"
#include "provis/error.hpp"

namespace provis {

const std::vector<TableSchema>& flight_schemas() {
  static const std::vector<TableSchema> schemas = {
      {"ontime", Schema({{"fid", ValueType::Int64},
                         {"y", ValueType::Int64},
                         {"m", ValueType::Int64},
                         {"d", ValueType::Int64},
                         {"h", ValueType::Int64},
                         {"adelay", ValueType::Float64},
                         {"ddelay", ValueType::Float64},
                         {"src_apid", ValueType::Int64},
                         {"dst_apid", ValueType::Int64},
                         {"alid", ValueType::Int64}})},
      {"airlines", Schema({{"alid", ValueType::Int64},
                           {"name", ValueType::Text},
                           {"active", ValueType::Text}})},
      {"airports", Schema({{"apid", ValueType::Int64},
                           {"name", ValueType::Text},
                           {"lat", ValueType::Float64},
                           {"lon", ValueType::Float64},
                           {"elevation", ValueType::Float64},
                           {"city", ValueType::Text},
                           {"state", ValueType::Text},
                           {"country", ValueType::Text}})},
      {"shapes", Schema({{"state", ValueType::Text}, {"polygons", ValueType::PolygonList}})},
  };
  return schemas;
}

const Schema& flight_schema(std::string_view table) {
  for (const auto& t : flight_schemas()) {
    if (t.name == table) return t.schema;
  }
  throw Error(ErrorCode::UnknownRelation, "no flight table '" + std::string(table) + "'");
}

Catalog load_flight_dataset(const std::filesystem::path& dir) {
  Catalog catalog;
  for (const auto& t : flight_schemas()) {
    const auto path = dir / (t.name + ".csv");
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open " + path.string());
    catalog.add(ingest_csv(in, t.schema, t.name));
  }
  return catalog;
}

}  // namespace provis
