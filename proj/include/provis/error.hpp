#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace provis {

enum class ErrorCode {
  SchemaMismatch,
  ParseError,
  DuplicateRelationName,
  RowIdOutOfRange,
  TypeError,
  UnknownColumn,
  EmptyExtent,
  UnknownRelation,
  UnreachableTarget,
  NotInvertible,
  SelectionOutOfViewport,
  BadSelection,
  NoSharedBase,
  UnknownView,
  UnknownEvent,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code);

/// Every engine failure surfaces as this exception; `code()` is the
/// machine-readable category, `line()` is set for CSV parse failures.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<std::size_t> line = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::size_t> line() const noexcept { return line_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> line_;
};

}  // namespace provis
