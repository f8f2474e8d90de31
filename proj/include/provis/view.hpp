#pragma once

#include <array>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "provis/expr.hpp"
#include "provis/row_set.hpp"
#include "provis/scale.hpp"
#include "provis/workflow.hpp"

namespace provis {

/// A scale as declared in a view: the domain is fixed or read from one of the
/// view's extents.
struct ScaleRef {
  ScaleKind kind = ScaleKind::LinearPosition;
  std::optional<std::pair<double, double>> domain;
  std::string extent;
  /// Extent-based domain widened to include 0.
  bool zero_based = false;
  double lo = 0.0;
  double hi = 1.0;
  Rgb from = kRampLow;
  Rgb to = kRampHigh;
};

struct ChannelBinding {
  enum Kind { Column, Scaled, Constant, Geo } kind = Column;
  std::string column;
  /// Scaled: the scale; Geo: longitude -> x.
  ScaleRef scale;
  /// Geo: latitude -> y.
  ScaleRef scale_y;
  /// Constant: a number or a text value such as "#888888".
  Value constant;
};

enum class MarkKind { Polygon, Rect, Circle };
std::string_view to_string(MarkKind kind);
MarkKind parse_mark_kind(std::string_view name);

struct MarkSpec {
  /// Relation with one mark per row.
  std::string relation;
  MarkKind kind = MarkKind::Rect;
  /// Channels: geometry, fill (polygon); x, y, width, height, fill (rect);
  /// x, y, r, fill (circle).
  std::map<std::string, ChannelBinding> channels;
};

struct ExtentDef {
  std::string name;
  std::string relation;
  std::string column;
};

struct Viewport {
  double width = 0.0;
  double height = 0.0;
};

struct ViewDef {
  std::string id;
  WorkflowDef workflow;
  /// The relation the view shows (an aggregation such as Q1, or a base).
  std::string data;
  std::vector<ExtentDef> extents;
  std::optional<MarkSpec> mark;
  Viewport viewport;
  /// Bases a selection elsewhere restricts when this view is a detail view.
  std::vector<std::string> selection_bound;
};

using PixelRing = std::vector<std::array<double, 2>>;
using ChannelValue = std::variant<std::monostate, double, std::string, Rgb, std::vector<PixelRing>>;

struct Mark {
  RowId id = 0;
  MarkKind kind = MarkKind::Rect;
  std::map<std::string, ChannelValue> channels;
  friend bool operator==(const Mark&, const Mark&) = default;
};

struct Box {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 0.0;
  double y1 = 0.0;
};

/// Pixel bounding box of a mark; nullopt when a positional channel is Null.
std::optional<Box> mark_bounds(const Mark& mark);

struct Selection {
  enum Kind { Items, Range, Predicate } kind = Items;
  RowSet items;
  Box box;
  std::optional<Expr> predicate;

  static Selection of_items(RowSet ids) { return Selection{Items, std::move(ids), {}, std::nullopt}; }
  static Selection of_range(Box b) { return Selection{Range, {}, b, std::nullopt}; }
  static Selection of_predicate(Expr p) { return Selection{Predicate, {}, {}, std::move(p)}; }
};

struct ResolvedSelection {
  RowSet marks;
  /// Data-space predicate over the mark relation for range selections on
  /// position-scaled channels.
  std::optional<Expr> predicate;
};

/// One view evaluated inside a (possibly shared) workflow.
class EvaluatedView {
 public:
  EvaluatedView(ViewDef def, std::shared_ptr<const Workflow> wf,
                std::map<std::string, std::string> names);

  const ViewDef& def() const { return def_; }
  const std::string& id() const { return def_.id; }
  const Workflow& workflow() const { return *wf_; }
  const std::shared_ptr<const Workflow>& shared_workflow() const { return wf_; }

  /// Name of the view's local relation in the shared workflow.
  std::string global(const std::string& local) const;
  const RelationPtr& relation(const std::string& local) const;
  const RelationPtr& data() const { return relation(def_.data); }
  /// Null when the view has no marks.
  RelationPtr mark_relation() const;
  /// Base relations the view's data and marks depend on.
  std::set<std::string> bases() const;

  const std::vector<Mark>& marks() const { return marks_; }
  const std::map<std::string, std::pair<double, double>>& extents() const { return extents_; }
  /// Concrete scale of a scaled channel; Geo channels use "<channel>.x"/".y".
  const std::map<std::string, ScaleSpec>& scales() const { return scales_; }

  /// Relation list the view needs evaluated: data, mark, and extent relations.
  std::vector<std::string> outputs() const;

 private:
  friend class ViewSet;
  ViewDef def_;
  std::shared_ptr<const Workflow> wf_;
  std::map<std::string, std::string> names_;
  std::map<std::string, std::pair<double, double>> extents_;
  std::map<std::string, ScaleSpec> scales_;
  std::vector<Mark> marks_;
};

/// A view recomputed over refreshed relations. Marks keep the scales of the
/// original view.
struct RefreshedView {
  RelationPtr data;
  RelationPtr mark_relation;
  std::vector<Mark> marks;
};

/// Views over one dataset sharing a merged workflow.
class ViewSet {
 public:
  /// Throws InvalidArgument on duplicate view ids or a bad mark spec,
  /// TypeError, UnknownRelation, EmptyExtent.
  static ViewSet build(std::vector<ViewDef> defs, const Catalog& bases);

  const std::vector<EvaluatedView>& views() const { return views_; }
  /// Throws UnknownView.
  const EvaluatedView& view(std::string_view id) const;
  bool contains(std::string_view id) const;
  const std::shared_ptr<const Workflow>& workflow() const { return wf_; }

  /// Re-evaluates the listed views with the given bases restricted.
  std::map<std::string, RefreshedView> refresh(const std::map<std::string, RowSet>& subsets,
                                               std::span<const std::string> view_ids) const;

 private:
  std::shared_ptr<const Workflow> wf_;
  std::vector<EvaluatedView> views_;
};

/// A single view in its own workflow.
EvaluatedView build_view(const ViewDef& def, const Catalog& bases);

/// Throws SelectionOutOfViewport for a box outside the viewport or with
/// x0 > x1 / y0 > y1, RowIdOutOfRange for unknown mark ids, TypeError for a
/// predicate that does not fit the mark relation.
ResolvedSelection resolve_selection(const EvaluatedView& view, const Selection& sel);

/// Marks of `rel` under the view's mark spec, with scale domains taken from
/// `extents`. Exposed for refresh and tests.
std::vector<Mark> encode_marks(const ViewDef& def, const Relation& rel,
                               const std::map<std::string, std::pair<double, double>>& extents,
                               std::map<std::string, ScaleSpec>* scales = nullptr);

}  // namespace provis
