#pragma once

#include <iosfwd>
#include <string>
#include <string_view>

#include "provis/relation.hpp"

namespace provis {

/// Parses a header-prefixed, comma-delimited, optionally `"`-quoted CSV
/// document into a frozen base relation. Unquoted empty cells become Null;
/// a quoted empty cell is the empty string. Row i of the result is data
/// line i of the input.
///
/// Throws SchemaMismatch when the header disagrees with `schema`, and
/// ParseError (with the 1-based line number) for malformed rows or cells.
RelationPtr ingest_csv(std::string_view text, const Schema& schema, std::string name);
RelationPtr ingest_csv(std::istream& source, const Schema& schema, std::string name);

/// Ingests and registers in `catalog`. Fails with DuplicateRelationName
/// before parsing if the name is taken.
RelationPtr ingest_csv(Catalog& catalog, std::string_view text, const Schema& schema,
                       std::string name);

/// Inverse of ingest_csv: header plus one line per row.
std::string write_csv(const Relation& rel);
std::string format_csv_cell(const Value& v);

}  // namespace provis
