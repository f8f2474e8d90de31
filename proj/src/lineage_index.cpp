#include "provis/lineage_index.hpp"

namespace provis {

RidLists RidLists::unit(std::vector<RowId> ids) {
  RidLists out;
  out.ids_ = std::move(ids);
  return out;
}

RidLists RidLists::csr(std::vector<std::uint32_t> offsets, std::vector<RowId> ids) {
  RidLists out;
  out.offsets_ = std::move(offsets);
  out.ids_ = std::move(ids);
  if (out.offsets_.empty()) out.offsets_.push_back(0);
  return out;
}

RidLists RidLists::from_groups(std::span<const std::uint32_t> group_of, std::size_t groups) {
  std::vector<std::uint32_t> offsets(groups + 1, 0);
  for (auto g : group_of) ++offsets[g + 1];
  for (std::size_t g = 0; g < groups; ++g) offsets[g + 1] += offsets[g];
  std::vector<RowId> ids(group_of.size());
  std::vector<std::uint32_t> cursor(offsets.begin(), offsets.end() - 1);
  for (std::size_t i = 0; i < group_of.size(); ++i) {
    ids[cursor[group_of[i]]++] = static_cast<RowId>(i);
  }
  return csr(std::move(offsets), std::move(ids));
}

RidLists RidLists::invert(std::size_t targets) const {
  std::vector<std::uint32_t> offsets(targets + 1, 0);
  for (RowId t : ids_) ++offsets[t + 1];
  for (std::size_t t = 0; t < targets; ++t) offsets[t + 1] += offsets[t];
  std::vector<RowId> ids(ids_.size());
  std::vector<std::uint32_t> cursor(offsets.begin(), offsets.end() - 1);
  const std::size_t n = entries();
  if (offsets_.empty()) {
    for (std::size_t i = 0; i < n; ++i) ids[cursor[ids_[i]]++] = static_cast<RowId>(i);
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::uint32_t k = offsets_[i]; k < offsets_[i + 1]; ++k) {
        ids[cursor[ids_[k]]++] = static_cast<RowId>(i);
      }
    }
  }
  return csr(std::move(offsets), std::move(ids));
}

}  // namespace provis
