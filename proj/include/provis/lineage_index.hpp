#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "provis/row_set.hpp"

namespace provis {

/// Compressed adjacency list: entry i is a contiguous run of row ids.
/// When `offsets` is empty every entry holds exactly one id (`ids[i]`).
class RidLists {
 public:
  RidLists() = default;
  /// One id per entry.
  static RidLists unit(std::vector<RowId> ids);
  /// `offsets` has entries+1 elements, offsets[0] == 0.
  static RidLists csr(std::vector<std::uint32_t> offsets, std::vector<RowId> ids);
  /// Builds entries from a grouping: entry g lists, ascending, every i with
  /// group_of[i] == g.
  static RidLists from_groups(std::span<const std::uint32_t> group_of, std::size_t groups);

  std::size_t entries() const { return offsets_.empty() ? ids_.size() : offsets_.size() - 1; }
  std::size_t total() const { return ids_.size(); }
  bool is_unit() const { return offsets_.empty(); }
  std::span<const RowId> at(std::size_t i) const {
    if (offsets_.empty()) return {ids_.data() + i, 1};
    return {ids_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }
  /// Offsets array; empty for unit lists.
  std::span<const std::uint32_t> offsets() const { return offsets_; }
  std::span<const RowId> flat() const { return ids_; }

  /// The reverse mapping over `targets` rows: entry t lists every i whose
  /// entry contains t. Built by a counting pass followed by a scatter.
  RidLists invert(std::size_t targets) const;

 private:
  std::vector<std::uint32_t> offsets_;
  std::vector<RowId> ids_;
};

/// Lineage written by one operator evaluation: for every input slot, the
/// backward map (output row -> input rows) and the forward map (input row ->
/// output rows).
struct LineageSide {
  std::string relation;
  RidLists backward;
  RidLists forward;
};

struct LineageIndex {
  std::string operator_id;
  std::size_t output_rows = 0;
  std::vector<LineageSide> sides;
};

}  // namespace provis
