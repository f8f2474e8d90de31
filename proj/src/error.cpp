#include "provis/error.hpp"

namespace provis {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::DuplicateRelationName: return "DuplicateRelationName";
    case ErrorCode::RowIdOutOfRange: return "RowIdOutOfRange";
    case ErrorCode::TypeError: return "TypeError";
    case ErrorCode::UnknownColumn: return "UnknownColumn";
    case ErrorCode::EmptyExtent: return "EmptyExtent";
    case ErrorCode::UnknownRelation: return "UnknownRelation";
    case ErrorCode::UnreachableTarget: return "UnreachableTarget";
    case ErrorCode::NotInvertible: return "NotInvertible";
    case ErrorCode::SelectionOutOfViewport: return "SelectionOutOfViewport";
    case ErrorCode::BadSelection: return "BadSelection";
    case ErrorCode::NoSharedBase: return "NoSharedBase";
    case ErrorCode::UnknownView: return "UnknownView";
    case ErrorCode::UnknownEvent: return "UnknownEvent";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message,
             std::optional<std::size_t> line)
    : std::runtime_error(message), code_(code), line_(line) {}

}  // namespace provis
