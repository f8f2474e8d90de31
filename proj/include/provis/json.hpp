#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "provis/relation.hpp"
#include "provis/view.hpp"

namespace provis {

using Json = nlohmann::json;

// Wire encodings. Decoders throw ParseError on malformed documents, except
// selection_from_json which throws BadSelection.

Json value_to_json(const Value& v);
/// Numbers with a fraction or exponent become Float64, other numbers Int64.
Value value_from_json(const Json& j);

/// {"col": name} | {"lit": v} | {"cmp": op, "args": [a, b]} |
/// {"arith": op, "args": [a, b]} | {"and": [...]} | {"or": [...]} |
/// {"not": e} | {"between": [e, lo, hi]} | {"in": e, "values": [...]} |
/// {"is_null": e} | {"floor": e}
Json expr_to_json(const Expr& e);
Expr expr_from_json(const Json& j);

/// {"items": [ids]} | {"range": [x0, y0, x1, y1]} | {"predicate": expr}
Json selection_to_json(const Selection& s);
Selection selection_from_json(const Json& j);

Json rgb_to_json(const Rgb& c);
Json mark_to_json(const Mark& m);
Json marks_to_json(const std::vector<Mark>& marks);

/// {"name", "columns": [{"name", "type"}], "rows": [[...]]}
Json relation_to_json(const Relation& rel);

Json schema_to_json(const Schema& s);
Schema schema_from_json(const Json& j);

Json workflow_to_json(const WorkflowDef& def);
WorkflowDef workflow_from_json(const Json& j);

/// Canonical form: object keys sorted, absent optionals omitted.
Json view_def_to_json(const ViewDef& def);
ViewDef view_def_from_json(const Json& j);

}  // namespace provis
