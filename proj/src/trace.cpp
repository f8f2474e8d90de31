#include "provis/trace.hpp"

#include <algorithm>
#include <optional>

#include "provis/error.hpp"

namespace provis {

namespace {

void require_lineage(const Workflow& wf) {
  if (!wf.captured()) {
    throw Error(ErrorCode::InvalidArgument, "workflow was evaluated without lineage capture");
  }
}

void check_rids(const Workflow& wf, std::size_t rel, const RowSet& rids) {
  const auto rows = wf.relation(wf.names()[rel])->row_count();
  if (rids.max_plus_one() > rows) {
    throw Error(ErrorCode::RowIdOutOfRange,
                "row id " + std::to_string(rids.max_plus_one() - 1) + " out of range for '" +
                    wf.names()[rel] + "' (" + std::to_string(rows) + " rows)");
  }
}

std::size_t rows_of(const Workflow& wf, std::size_t rel) {
  return wf.relation(wf.names()[rel])->row_count();
}

/// Per-relation accumulators: 0/1 flags for Which, counts for Bag.
template <class T>
using State = std::vector<std::vector<T>>;

template <class T>
TraceResult to_result(const std::string& name, Semantics semantics, const std::vector<T>& acc) {
  TraceResult out;
  out.relation = name;
  out.semantics = semantics;
  std::size_t hits = 0;
  for (auto a : acc) hits += a != 0;
  std::vector<RowId> ids(hits + 1);
  std::size_t k = 0;
  for (std::size_t i = 0; i < acc.size(); ++i) {
    ids[k] = static_cast<RowId>(i);
    k += acc[i] != 0;
  }
  ids.pop_back();
  if (semantics == Semantics::Bag) {
    out.counts.reserve(hits);
    for (auto r : ids) out.counts.push_back(acc[r]);
  }
  out.rids = RowSet::from_sorted(std::move(ids));
  return out;
}

template <class T>
void seed(State<T>& state, std::size_t rel, std::size_t rows, const RowSet& rids) {
  state[rel].assign(rows, 0);
  for (auto r : rids) state[rel][r] = 1;
}

// dst[r] gets src[o] (or 1) for every r in lists[o].
template <class T>
void push(const RidLists& lists, const std::vector<T>& src, std::vector<T>& dst) {
  const auto ids = lists.flat();
  if (lists.is_unit()) {
    // Flags are dense and unordered, so no branch on them.
    for (std::size_t o = 0; o < src.size(); ++o) {
      if constexpr (std::is_same_v<T, std::uint8_t>) {
        dst[ids[o]] |= src[o];
      } else {
        dst[ids[o]] += src[o];
      }
    }
    return;
  }
  const auto off = lists.offsets();
  for (std::size_t o = 0; o < src.size(); ++o) {
    if (src[o] == 0) continue;
    for (auto k = off[o]; k < off[o + 1]; ++k) {
      if constexpr (std::is_same_v<T, std::uint8_t>) {
        dst[ids[k]] = 1;
      } else {
        dst[ids[k]] += src[o];
      }
    }
  }
}

template <class T>
std::map<std::string, TraceResult> run_backward(const Workflow& wf, std::size_t s, const RowSet& rids,
                                                const std::vector<std::size_t>& target_idx,
                                                Semantics semantics) {
  const auto n = wf.names().size();
  std::vector<std::uint8_t> relevant(n, 0);
  for (std::size_t r = 0; r < n; ++r) {
    for (auto t : target_idx) {
      if (wf.reaches(wf.names()[r], wf.names()[t])) relevant[r] = 1;
    }
  }
  State<T> state(n);
  seed(state, s, rows_of(wf, s), rids);
  const auto& order = wf.order();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const auto node = *it;
    const auto out = wf.output(node);
    if (state[out].empty() || !relevant[out]) continue;
    const auto& lineage = wf.lineage(node);
    const auto& inputs = wf.inputs(node);
    for (std::size_t k = 0; k < inputs.size(); ++k) {
      const auto in = inputs[k];
      if (!relevant[in]) continue;
      if (state[in].empty()) state[in].assign(rows_of(wf, in), 0);
      push(lineage.sides[k].backward, state[out], state[in]);
    }
    // Intermediate states are not read again.
    if (std::find(target_idx.begin(), target_idx.end(), out) == target_idx.end()) {
      std::vector<T>().swap(state[out]);
    }
  }
  std::map<std::string, TraceResult> results;
  for (auto t : target_idx) {
    const auto& name = wf.names()[t];
    if (state[t].size() != rows_of(wf, t)) state[t].assign(rows_of(wf, t), 0);
    results.emplace(name, to_result(name, semantics, state[t]));
  }
  return results;
}

template <class T>
TraceResult run_forward(const Workflow& wf, std::size_t src, std::size_t dst, const RowSet& rids,
                        const std::string& source, std::string_view sink, Semantics semantics) {
  const auto n = wf.names().size();
  std::vector<std::uint8_t> relevant(n, 0);
  for (std::size_t r = 0; r < n; ++r) {
    relevant[r] = wf.reaches(wf.names()[r], source) && wf.reaches(sink, wf.names()[r]);
  }
  State<T> state(n);
  seed(state, src, rows_of(wf, src), rids);
  for (auto node : wf.order()) {
    const auto out = wf.output(node);
    if (!relevant[out]) continue;
    const auto& lineage = wf.lineage(node);
    const auto& inputs = wf.inputs(node);
    for (std::size_t k = 0; k < inputs.size(); ++k) {
      const auto in = inputs[k];
      if (!relevant[in] || state[in].empty()) continue;
      if (state[out].empty()) state[out].assign(rows_of(wf, out), 0);
      push(lineage.sides[k].forward, state[in], state[out]);
    }
  }
  if (state[dst].empty()) state[dst].assign(rows_of(wf, dst), 0);
  return to_result(wf.names()[dst], semantics, state[dst]);
}

}  // namespace

std::map<std::string, TraceResult> backward_trace_many(const Workflow& wf, std::string_view sink,
                                                       const RowSet& rids,
                                                       std::span<const std::string> targets,
                                                       Semantics semantics) {
  const auto s = wf.index_of(sink);
  std::vector<std::size_t> target_idx;
  for (const auto& t : targets) {
    const auto ti = wf.index_of(t);
    if (!wf.reaches(sink, t)) {
      throw Error(ErrorCode::UnreachableTarget,
                  "'" + t + "' is not reachable backwards from '" + std::string(sink) + "'");
    }
    target_idx.push_back(ti);
  }
  check_rids(wf, s, rids);
  if (wf.producer(s) >= 0) require_lineage(wf);
  if (semantics == Semantics::Which) return run_backward<std::uint8_t>(wf, s, rids, target_idx, semantics);
  return run_backward<std::uint64_t>(wf, s, rids, target_idx, semantics);
}

TraceResult backward_trace(const Workflow& wf, std::string_view sink, const RowSet& rids,
                           std::string_view target, Semantics semantics) {
  std::string t(target);
  return backward_trace_many(wf, sink, rids, std::span<const std::string>(&t, 1), semantics).at(t);
}

TraceResult forward_trace(const Workflow& wf, std::string_view source, const RowSet& rids,
                          std::string_view sink, Semantics semantics) {
  const auto src = wf.index_of(source);
  const auto dst = wf.index_of(sink);
  if (!wf.reaches(sink, source)) {
    throw Error(ErrorCode::UnreachableTarget,
                "'" + std::string(sink) + "' is not reachable forwards from '" +
                    std::string(source) + "'");
  }
  check_rids(wf, src, rids);
  if (src != dst) require_lineage(wf);
  const std::string name(source);
  if (semantics == Semantics::Which) return run_forward<std::uint8_t>(wf, src, dst, rids, name, sink, semantics);
  return run_forward<std::uint64_t>(wf, src, dst, rids, name, sink, semantics);
}

RowSet forward_trace_joint(const Workflow& wf, const std::map<std::string, RowSet>& subsets,
                           std::string_view sink) {
  const auto dst = wf.index_of(sink);
  const auto n = wf.names().size();
  // Empty optional: every row qualifies.
  std::vector<std::optional<std::vector<std::uint8_t>>> mask(n);
  for (const auto& [name, rids] : subsets) {
    const auto r = wf.index_of(name);
    check_rids(wf, r, rids);
    std::vector<std::uint8_t> m(rows_of(wf, r), 0);
    for (auto id : rids) m[id] = 1;
    mask[r] = std::move(m);
  }
  if (wf.producer(dst) >= 0) require_lineage(wf);
  for (auto node : wf.order()) {
    const auto out = wf.output(node);
    if (!wf.reaches(sink, wf.names()[out]) || mask[out]) continue;
    const auto& inputs = wf.inputs(node);
    bool restricted = false;
    for (auto in : inputs) restricted = restricted || mask[in].has_value();
    if (!restricted) continue;
    const auto& lineage = wf.lineage(node);
    const bool any_member = std::holds_alternative<GroupOp>(wf.node(node).op);
    std::vector<std::uint8_t> m(lineage.output_rows, any_member ? 0 : 1);
    for (std::size_t k = 0; k < inputs.size(); ++k) {
      if (!mask[inputs[k]]) continue;
      const auto& in = *mask[inputs[k]];
      const auto& backward = lineage.sides[k].backward;
      for (std::size_t o = 0; o < m.size(); ++o) {
        if (any_member) {
          for (auto r : backward.at(o)) {
            if (in[r]) {
              m[o] = 1;
              break;
            }
          }
        } else if (m[o]) {
          for (auto r : backward.at(o)) m[o] = m[o] && in[r];
        }
      }
    }
    mask[out] = std::move(m);
  }
  if (!mask[dst]) return RowSet::range(static_cast<RowId>(rows_of(wf, dst)));
  return RowSet::from_mask(*mask[dst]);
}

}  // namespace provis
