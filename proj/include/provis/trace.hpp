#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "provis/row_set.hpp"
#include "provis/workflow.hpp"

namespace provis {

enum class Semantics { Which, Bag };

struct TraceResult {
  std::string relation;
  Semantics semantics = Semantics::Which;
  RowSet rids;
  /// Bag semantics only: multiplicity of each rid, parallel to `rids`.
  std::vector<std::uint64_t> counts;
};

/// Rows of `target` contributing to `rids` of `sink`, unioned over every
/// backward path. `target` may be any ancestor of `sink`, derived or base.
/// Throws UnknownRelation, UnreachableTarget, RowIdOutOfRange, and
/// InvalidArgument when the workflow was evaluated without lineage.
TraceResult backward_trace(const Workflow& wf, std::string_view sink, const RowSet& rids,
                           std::string_view target, Semantics semantics = Semantics::Which);

/// One traversal serving several targets.
std::map<std::string, TraceResult> backward_trace_many(const Workflow& wf, std::string_view sink,
                                                       const RowSet& rids,
                                                       std::span<const std::string> targets,
                                                       Semantics semantics = Semantics::Which);

/// Rows of `sink` to which any of `rids` of `source` contributes.
TraceResult forward_trace(const Workflow& wf, std::string_view source, const RowSet& rids,
                          std::string_view sink, Semantics semantics = Semantics::Which);

/// Rows of `sink` with a derivation drawing only on the given subsets: a join
/// row needs both of its inputs to qualify, a group row needs any member to.
/// Relations outside `subsets` qualify in full.
RowSet forward_trace_joint(const Workflow& wf, const std::map<std::string, RowSet>& subsets,
                           std::string_view sink);

}  // namespace provis
