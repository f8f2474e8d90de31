#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <vector>

#include "provis/view.hpp"

namespace provis {

enum class EventKind { Hover, Brush, Click };
std::string_view to_string(EventKind kind);
/// Throws InvalidArgument.
EventKind parse_event_kind(std::string_view name);

struct InteractionEvent {
  std::int64_t eid = -1;
  /// UTC milliseconds.
  std::int64_t timestamp = 0;
  std::string source;
  EventKind kind = EventKind::Brush;
  Selection selection;
};

/// What an interaction changed: refreshed views (brush, click) or
/// highlighted marks in dependent views (hover).
struct Outcome {
  std::map<std::string, RefreshedView> updates;
  std::map<std::string, RowSet> highlights;

  /// Per view: the refreshed data relation, or for highlights the view's mark
  /// relation restricted to the highlighted marks.
  std::map<std::string, RelationPtr> relations(const class Session& session) const;
};

/// Views over one frozen dataset plus the log of interactions on them.
/// Reads may run concurrently; interactions and event appends are serialized.
class Session {
 public:
  /// Builds every view in one shared workflow. Throws as ViewSet::build.
  Session(std::string id, const Catalog& dataset, std::vector<ViewDef> views);

  const std::string& id() const { return id_; }
  const Catalog& dataset() const { return dataset_; }
  const ViewSet& views() const { return views_; }
  const EvaluatedView& view(std::string_view id) const { return views_.view(id); }
  /// Bases referenced by two or more views.
  const std::set<std::string>& shared_bases() const { return shared_; }

  /// Attributes of the selected groups of the view's data relation, one row
  /// per group. Throws UnknownColumn, SelectionOutOfViewport.
  std::vector<Row> tooltip(std::string_view view, const Selection& sel,
                           const std::vector<std::string>& attrs) const;

  /// The detail view's data relation recomputed with each selection-bound
  /// base restricted to the selection's provenance.
  RelationPtr details_on_demand(std::string_view view, const Selection& sel,
                                const ViewDef& detail) const;

  /// Marks of `target` whose derivation draws only on the bases rows behind
  /// the selection. Throws NoSharedBase.
  RowSet linked_brush(std::string_view source, const Selection& sel, std::string_view target) const;

  /// Every other view refreshed over the selection's provenance in the bases
  /// it shares with the source.
  std::map<std::string, RefreshedView> crossfilter(std::string_view source, const Selection& sel) const;
  /// Highlights in every other view sharing a base with the source.
  std::map<std::string, RowSet> highlight(std::string_view source, const Selection& sel) const;

  /// Runs the operation an event of this kind stands for, without logging it.
  Outcome execute(std::string_view source, EventKind kind, const Selection& sel) const;

  /// Appends to the event log after validating the selection against the
  /// source view; `timestamp` defaults to now and never decreases. Throws
  /// UnknownView, SelectionOutOfViewport, RowIdOutOfRange.
  std::int64_t record_event(std::string_view source, EventKind kind, const Selection& sel,
                            std::optional<std::int64_t> timestamp = std::nullopt);
  /// record_event followed by execute, serialized with other interactions.
  std::pair<std::int64_t, Outcome> interact(std::string_view source, EventKind kind,
                                            const Selection& sel);

  /// Throws UnknownEvent.
  InteractionEvent event(std::int64_t eid) const;
  std::vector<InteractionEvent> events() const;
  /// The events as a relation (eid, timestamp, source, kind, selection).
  RelationPtr events_relation() const;
  /// Re-executes a logged event. Throws UnknownEvent.
  Outcome replay_event(std::int64_t eid) const;
  /// Matching events in eid order with their replayed outcomes.
  std::vector<std::pair<InteractionEvent, Outcome>> history(
      const std::optional<std::string>& source = std::nullopt) const;

 private:
  /// Base subsets behind the selected marks, for the given bases.
  std::map<std::string, RowSet> provenance(const EvaluatedView& view, const RowSet& marks,
                                           const std::set<std::string>& bases) const;

  std::string id_;
  Catalog dataset_;
  ViewSet views_;
  std::set<std::string> shared_;
  mutable std::shared_mutex events_mu_;
  std::mutex interact_mu_;
  std::vector<InteractionEvent> events_;
};

}  // namespace provis
