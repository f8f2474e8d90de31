#include "provis/row_set.hpp"

#include <algorithm>
#include <iterator>
#include <numeric>

namespace provis {

RowSet::RowSet(std::initializer_list<RowId> ids)
    : RowSet(from_unsorted(std::vector<RowId>(ids))) {}

RowSet RowSet::from_unsorted(std::vector<RowId> ids) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return from_sorted(std::move(ids));
}

RowSet RowSet::from_sorted(std::vector<RowId> ids) {
  RowSet out;
  out.ids_ = std::move(ids);
  return out;
}

RowSet RowSet::range(RowId n) {
  std::vector<RowId> ids(n);
  std::iota(ids.begin(), ids.end(), RowId{0});
  return from_sorted(std::move(ids));
}

RowSet RowSet::from_mask(std::span<const std::uint8_t> mask) {
  std::vector<RowId> ids;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i]) ids.push_back(static_cast<RowId>(i));
  }
  return from_sorted(std::move(ids));
}

bool RowSet::contains(RowId id) const {
  return std::binary_search(ids_.begin(), ids_.end(), id);
}

RowSet RowSet::unite(const RowSet& other) const {
  std::vector<RowId> out;
  out.reserve(ids_.size() + other.ids_.size());
  std::set_union(ids_.begin(), ids_.end(), other.ids_.begin(), other.ids_.end(),
                 std::back_inserter(out));
  return from_sorted(std::move(out));
}

RowSet RowSet::intersect(const RowSet& other) const {
  std::vector<RowId> out;
  std::set_intersection(ids_.begin(), ids_.end(), other.ids_.begin(), other.ids_.end(),
                        std::back_inserter(out));
  return from_sorted(std::move(out));
}

bool RowSet::is_subset_of(const RowSet& other) const {
  return std::includes(other.ids_.begin(), other.ids_.end(), ids_.begin(), ids_.end());
}

}  // namespace provis
