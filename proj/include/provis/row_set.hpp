#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace provis {

/// Ordinal of a row inside one relation; dense in [0, row_count).
using RowId = std::uint32_t;

/// Sorted, duplicate-free set of row ids.
class RowSet {
 public:
  RowSet() = default;
  RowSet(std::initializer_list<RowId> ids);
  /// Sorts and deduplicates.
  static RowSet from_unsorted(std::vector<RowId> ids);
  /// Caller guarantees `ids` is strictly increasing.
  static RowSet from_sorted(std::vector<RowId> ids);
  static RowSet range(RowId n);
  /// Collects the positions of non-zero bytes.
  static RowSet from_mask(std::span<const std::uint8_t> mask);

  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }
  bool contains(RowId id) const;
  std::span<const RowId> ids() const { return ids_; }
  auto begin() const { return ids_.begin(); }
  auto end() const { return ids_.end(); }
  /// 0 when empty.
  RowId max_plus_one() const { return ids_.empty() ? 0 : ids_.back() + 1; }

  RowSet unite(const RowSet& other) const;
  RowSet intersect(const RowSet& other) const;
  bool is_subset_of(const RowSet& other) const;

  friend bool operator==(const RowSet&, const RowSet&) = default;

 private:
  std::vector<RowId> ids_;
};

}  // namespace provis
