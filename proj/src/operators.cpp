#include "provis/operators.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>

#include <absl/container/flat_hash_map.h>

#include "provis/error.hpp"

namespace provis {

std::string_view to_string(AggFn fn) {
  switch (fn) {
    case AggFn::Count: return "count";
    case AggFn::Sum: return "sum";
    case AggFn::Avg: return "avg";
    case AggFn::Min: return "min";
    case AggFn::Max: return "max";
  }
  return "?";
}

AggFn parse_agg_fn(std::string_view name) {
  if (name == "count") return AggFn::Count;
  if (name == "sum") return AggFn::Sum;
  if (name == "avg") return AggFn::Avg;
  if (name == "min") return AggFn::Min;
  if (name == "max") return AggFn::Max;
  throw Error(ErrorCode::TypeError, "unknown aggregate '" + std::string(name) + "'");
}

namespace {

constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

bool keep(const OpOptions& options, const std::string& name) {
  return options.keep_columns == nullptr || options.keep_columns->count(name) > 0;
}

std::vector<RowId> iota_rids(std::size_t n) {
  std::vector<RowId> ids(n);
  std::iota(ids.begin(), ids.end(), RowId{0});
  return ids;
}

std::size_t require_column(const Schema& schema, std::string_view name, std::string_view what) {
  auto idx = schema.find(name);
  if (!idx) {
    throw Error(ErrorCode::TypeError,
                std::string(what) + ": unknown column '" + std::string(name) + "'");
  }
  return *idx;
}

/// Canonical bit pattern so that -0.0 == 0.0 and all NaNs coincide.
std::uint64_t double_key(double v) {
  if (v == 0.0) v = 0.0;
  if (std::isnan(v)) v = std::numeric_limits<double>::quiet_NaN();
  return std::bit_cast<std::uint64_t>(v);
}

bool dense_range(std::int64_t lo, std::int64_t hi, std::size_t n) {
  if (hi < lo) return false;
  const auto span = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo);
  return span <= 2 * static_cast<std::uint64_t>(n) + 1024;
}

/// Dense ids by first appearance; Null rows form their own group.
std::uint32_t encode_group_column(const Column& c, std::vector<std::uint32_t>& ids) {
  const std::size_t n = c.size();
  ids.assign(n, kNone);
  std::uint32_t next = 0;
  std::uint32_t null_id = kNone;
  auto assign_null = [&](std::size_t i) {
    if (null_id == kNone) null_id = next++;
    ids[i] = null_id;
  };
  switch (c.type()) {
    case ValueType::Null:
      for (std::size_t i = 0; i < n; ++i) assign_null(i);
      break;
    case ValueType::Int64: {
      auto v = c.ints();
      std::int64_t lo = std::numeric_limits<std::int64_t>::max();
      std::int64_t hi = std::numeric_limits<std::int64_t>::min();
      for (std::size_t i = 0; i < n; ++i) {
        if (c.is_valid(i)) {
          lo = std::min(lo, v[i]);
          hi = std::max(hi, v[i]);
        }
      }
      if (dense_range(lo, hi, n)) {
        std::vector<std::uint32_t> table(static_cast<std::size_t>(hi - lo) + 1, kNone);
        for (std::size_t i = 0; i < n; ++i) {
          if (!c.is_valid(i)) {
            assign_null(i);
            continue;
          }
          auto& slot = table[static_cast<std::size_t>(v[i] - lo)];
          if (slot == kNone) slot = next++;
          ids[i] = slot;
        }
      } else {
        absl::flat_hash_map<std::int64_t, std::uint32_t> map;
        for (std::size_t i = 0; i < n; ++i) {
          if (!c.is_valid(i)) {
            assign_null(i);
            continue;
          }
          auto [it, inserted] = map.try_emplace(v[i], next);
          if (inserted) ++next;
          ids[i] = it->second;
        }
      }
      break;
    }
    case ValueType::Float64: {
      auto v = c.floats();
      // Integral values in a small range are common (binned keys).
      bool integral = true;
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      for (std::size_t i = 0; i < n && integral; ++i) {
        if (!c.is_valid(i)) continue;
        if (!(std::abs(v[i]) <= 1e15) || v[i] != static_cast<double>(static_cast<std::int64_t>(v[i]))) {
          integral = false;
        }
        lo = std::min(lo, v[i]);
        hi = std::max(hi, v[i]);
      }
      if (integral && hi >= lo &&
          dense_range(static_cast<std::int64_t>(lo), static_cast<std::int64_t>(hi), n)) {
        const auto base = static_cast<std::int64_t>(lo);
        std::vector<std::uint32_t> table(static_cast<std::size_t>(static_cast<std::int64_t>(hi) - base) + 1, kNone);
        for (std::size_t i = 0; i < n; ++i) {
          if (!c.is_valid(i)) {
            assign_null(i);
            continue;
          }
          auto& slot = table[static_cast<std::size_t>(static_cast<std::int64_t>(v[i]) - base)];
          if (slot == kNone) slot = next++;
          ids[i] = slot;
        }
      } else {
        absl::flat_hash_map<std::uint64_t, std::uint32_t> map;
        for (std::size_t i = 0; i < n; ++i) {
          if (!c.is_valid(i)) {
            assign_null(i);
            continue;
          }
          auto [it, inserted] = map.try_emplace(double_key(v[i]), next);
          if (inserted) ++next;
          ids[i] = it->second;
        }
      }
      break;
    }
    case ValueType::Bool: {
      std::uint32_t table[2] = {kNone, kNone};
      auto v = c.bools();
      for (std::size_t i = 0; i < n; ++i) {
        if (!c.is_valid(i)) {
          assign_null(i);
          continue;
        }
        auto& slot = table[v[i] ? 1 : 0];
        if (slot == kNone) slot = next++;
        ids[i] = slot;
      }
      break;
    }
    case ValueType::Text: {
      // Codes are unique per distinct string within one dictionary.
      std::vector<std::uint32_t> table(c.dictionary().size(), kNone);
      auto codes = c.codes();
      for (std::size_t i = 0; i < n; ++i) {
        if (!c.is_valid(i)) {
          assign_null(i);
          continue;
        }
        auto& slot = table[codes[i]];
        if (slot == kNone) slot = next++;
        ids[i] = slot;
      }
      break;
    }
    case ValueType::PolygonList: {
      const auto& pool = c.polygon_pool();
      for (std::size_t i = 0; i < n; ++i) {
        if (!c.is_valid(i)) {
          assign_null(i);
          continue;
        }
        for (std::size_t j = 0; j < i; ++j) {
          if (c.is_valid(j) && pool[c.codes()[j]] == pool[c.codes()[i]]) {
            ids[i] = ids[j];
            break;
          }
        }
        if (ids[i] == kNone) ids[i] = next++;
      }
      break;
    }
  }
  return next;
}

/// Assigns each right key a group id and maps each left key onto it (kNone
/// when absent or Null).
struct JoinKeys {
  std::vector<std::uint32_t> left;
  std::vector<std::uint32_t> right;
  std::uint32_t groups = 0;
};

template <typename Key, typename LeftKey, typename RightKey>
JoinKeys hash_keys(const Column& lc, const Column& rc, LeftKey lkey, RightKey rkey) {
  JoinKeys out;
  out.left.assign(lc.size(), kNone);
  out.right.assign(rc.size(), kNone);
  absl::flat_hash_map<Key, std::uint32_t> map;
  for (std::size_t r = 0; r < rc.size(); ++r) {
    if (!rc.is_valid(r)) continue;
    auto k = rkey(r);
    if (!k) continue;
    auto [it, inserted] = map.try_emplace(*k, out.groups);
    if (inserted) ++out.groups;
    out.right[r] = it->second;
  }
  for (std::size_t l = 0; l < lc.size(); ++l) {
    if (!lc.is_valid(l)) continue;
    auto k = lkey(l);
    if (!k) continue;
    auto it = map.find(*k);
    if (it != map.end()) out.left[l] = it->second;
  }
  return out;
}

JoinKeys join_keys(const Column& lc, const Column& rc) {
  const auto lt = lc.type();
  const auto rt = rc.type();
  if (lt == ValueType::Null || rt == ValueType::Null) {
    return JoinKeys{std::vector<std::uint32_t>(lc.size(), kNone),
                    std::vector<std::uint32_t>(rc.size(), kNone), 0};
  }
  if (lt == ValueType::Int64 && rt == ValueType::Int64) {
    auto lv = lc.ints();
    auto rv = rc.ints();
    std::int64_t lo = std::numeric_limits<std::int64_t>::max();
    std::int64_t hi = std::numeric_limits<std::int64_t>::min();
    for (std::size_t r = 0; r < rc.size(); ++r) {
      if (rc.is_valid(r)) {
        lo = std::min(lo, rv[r]);
        hi = std::max(hi, rv[r]);
      }
    }
    if (dense_range(lo, hi, rc.size())) {
      JoinKeys out;
      out.left.assign(lc.size(), kNone);
      out.right.assign(rc.size(), kNone);
      std::vector<std::uint32_t> table(static_cast<std::size_t>(hi - lo) + 1, kNone);
      for (std::size_t r = 0; r < rc.size(); ++r) {
        if (!rc.is_valid(r)) continue;
        auto& slot = table[static_cast<std::size_t>(rv[r] - lo)];
        if (slot == kNone) slot = out.groups++;
        out.right[r] = slot;
      }
      const bool lnull = lc.has_nulls();
      for (std::size_t l = 0; l < lc.size(); ++l) {
        if (lnull && !lc.is_valid(l)) continue;
        const auto k = lv[l];
        if (k >= lo && k <= hi) out.left[l] = table[static_cast<std::size_t>(k - lo)];
      }
      return out;
    }
    return hash_keys<std::int64_t>(
        lc, rc, [&](std::size_t i) { return std::optional<std::int64_t>(lv[i]); },
        [&](std::size_t i) { return std::optional<std::int64_t>(rv[i]); });
  }
  if (is_numeric(lt) && is_numeric(rt)) {
    auto key = [](const Column& c) {
      return [&c](std::size_t i) -> std::optional<std::uint64_t> {
        double v = c.numeric(i);
        if (std::isnan(v)) return std::nullopt;
        return double_key(v);
      };
    };
    return hash_keys<std::uint64_t>(lc, rc, key(lc), key(rc));
  }
  if (lt == ValueType::Text && rt == ValueType::Text) {
    // Work per dictionary entry, then map codes.
    JoinKeys out;
    out.left.assign(lc.size(), kNone);
    out.right.assign(rc.size(), kNone);
    const auto& rdict = rc.dictionary();
    std::vector<std::uint32_t> rcode_group(rdict.size(), kNone);
    absl::flat_hash_map<absl::string_view, std::uint32_t> map;
    auto rcodes = rc.codes();
    for (std::size_t r = 0; r < rc.size(); ++r) {
      if (!rc.is_valid(r)) continue;
      auto& slot = rcode_group[rcodes[r]];
      if (slot == kNone) {
        auto [it, inserted] = map.try_emplace(absl::string_view(rdict[rcodes[r]]), out.groups);
        if (inserted) ++out.groups;
        slot = it->second;
      }
      out.right[r] = slot;
    }
    const auto& ldict = lc.dictionary();
    std::vector<std::uint32_t> lcode_group(ldict.size(), kNone);
    for (std::size_t k = 0; k < ldict.size(); ++k) {
      auto it = map.find(absl::string_view(ldict[k]));
      if (it != map.end()) lcode_group[k] = it->second;
    }
    auto lcodes = lc.codes();
    for (std::size_t l = 0; l < lc.size(); ++l) {
      if (lc.is_valid(l)) out.left[l] = lcode_group[lcodes[l]];
    }
    return out;
  }
  if (lt == ValueType::Bool && rt == ValueType::Bool) {
    return hash_keys<std::uint8_t>(
        lc, rc, [&](std::size_t i) { return std::optional<std::uint8_t>(lc.bools()[i]); },
        [&](std::size_t i) { return std::optional<std::uint8_t>(rc.bools()[i]); });
  }
  throw Error(ErrorCode::TypeError, "join keys have incompatible types " +
                                        std::string(to_string(lt)) + " and " +
                                        std::string(to_string(rt)));
}

}  // namespace

OpResult filter(const Relation& in, const Expr& predicate, const OpOptions& options) {
  auto rids = select_rows(predicate, in);
  std::vector<ColumnDef> defs;
  std::vector<Column> cols;
  for (std::size_t c = 0; c < in.column_count(); ++c) {
    const auto& def = in.schema().at(c);
    if (!keep(options, def.name)) continue;
    defs.push_back(def);
    cols.push_back(in.column(c).gather(rids));
  }
  OpResult out;
  out.relation = std::make_shared<const Relation>(options.output_name, Schema(std::move(defs)),
                                                  std::move(cols), RelationKind::Derived,
                                                  rids.size());
  out.lineage.operator_id = options.operator_id;
  out.lineage.output_rows = rids.size();
  if (options.capture_lineage) {
    auto backward = RidLists::unit(std::move(rids));
    auto forward = backward.invert(in.row_count());
    out.lineage.sides.push_back({in.name(), std::move(backward), std::move(forward)});
  }
  return out;
}

OpResult project(const Relation& in, std::span<const NamedExpr> exprs, const OpOptions& options) {
  std::vector<ColumnDef> defs;
  std::vector<Column> cols;
  for (const auto& ne : exprs) {
    if (!keep(options, ne.name)) continue;
    const auto type = infer_type(ne.expr, in.schema());
    auto column = evaluate(ne.expr, in);
    defs.push_back({ne.name, type});
    cols.push_back(std::move(column));
  }
  OpResult out;
  out.relation = std::make_shared<const Relation>(options.output_name, Schema(std::move(defs)),
                                                  std::move(cols), RelationKind::Derived,
                                                  in.row_count());
  out.lineage.operator_id = options.operator_id;
  out.lineage.output_rows = in.row_count();
  if (options.capture_lineage) {
    out.lineage.sides.push_back({in.name(), RidLists::unit(iota_rids(in.row_count())),
                                 RidLists::unit(iota_rids(in.row_count()))});
  }
  return out;
}

std::vector<JoinColumn> join_layout(const Schema& left, const Schema& right,
                                    std::string_view right_key, std::string_view right_prefix) {
  std::vector<JoinColumn> out;
  for (std::size_t i = 0; i < left.size(); ++i) out.push_back({left.at(i).name, 0, i});
  for (std::size_t i = 0; i < right.size(); ++i) {
    const auto& name = right.at(i).name;
    if (!left.find(name)) {
      out.push_back({name, 1, i});
    } else if (name != right_key) {
      out.push_back({std::string(right_prefix) + "." + name, 1, i});
    }
  }
  return out;
}

OpResult hash_join(const Relation& left, const Relation& right, std::string_view left_key,
                   std::string_view right_key, std::string_view right_prefix,
                   const OpOptions& options) {
  const auto lk = require_column(left.schema(), left_key, "join");
  const auto rk = require_column(right.schema(), right_key, "join");
  auto keys = join_keys(left.column(lk), right.column(rk));

  // Right rows bucketed by group, ascending within each bucket.
  std::vector<std::uint32_t> offsets(keys.groups + 1, 0);
  for (auto g : keys.right) {
    if (g != kNone) ++offsets[g + 1];
  }
  for (std::uint32_t g = 0; g < keys.groups; ++g) offsets[g + 1] += offsets[g];
  std::vector<RowId> bucket(offsets.back());
  {
    std::vector<std::uint32_t> cursor(offsets.begin(), offsets.end() - 1);
    for (std::size_t r = 0; r < keys.right.size(); ++r) {
      if (keys.right[r] != kNone) bucket[cursor[keys.right[r]]++] = static_cast<RowId>(r);
    }
  }

  std::vector<RowId> left_rids;
  std::vector<RowId> right_rids;
  left_rids.reserve(left.row_count());
  right_rids.reserve(left.row_count());
  for (std::size_t l = 0; l < keys.left.size(); ++l) {
    const auto g = keys.left[l];
    if (g == kNone) continue;
    for (std::uint32_t k = offsets[g]; k < offsets[g + 1]; ++k) {
      left_rids.push_back(static_cast<RowId>(l));
      right_rids.push_back(bucket[k]);
    }
  }

  auto layout = join_layout(left.schema(), right.schema(), right_key, right_prefix);
  std::vector<ColumnDef> defs;
  std::vector<Column> cols;
  for (const auto& jc : layout) {
    if (!keep(options, jc.name)) continue;
    const Relation& src = jc.side == 0 ? left : right;
    defs.push_back({jc.name, src.schema().at(jc.source).type});
    cols.push_back(src.column(jc.source).gather(jc.side == 0 ? left_rids : right_rids));
  }
  OpResult out;
  out.relation = std::make_shared<const Relation>(options.output_name, Schema(std::move(defs)),
                                                  std::move(cols), RelationKind::Derived,
                                                  left_rids.size());
  out.lineage.operator_id = options.operator_id;
  out.lineage.output_rows = left_rids.size();
  if (options.capture_lineage) {
    auto lb = RidLists::unit(std::move(left_rids));
    auto lf = lb.invert(left.row_count());
    auto rb = RidLists::unit(std::move(right_rids));
    auto rf = rb.invert(right.row_count());
    out.lineage.sides.push_back({left.name(), std::move(lb), std::move(lf)});
    out.lineage.sides.push_back({right.name(), std::move(rb), std::move(rf)});
  }
  return out;
}

namespace {

Column aggregate_column(const AggSpec& agg, const Relation& in,
                        std::span<const std::uint32_t> gid, std::uint32_t groups) {
  const std::size_t n = in.row_count();
  if (agg.fn == AggFn::Count) {
    std::vector<std::int64_t> counts(groups, 0);
    if (!agg.column) {
      for (std::size_t i = 0; i < n; ++i) ++counts[gid[i]];
    } else {
      const auto& c = in.column(*agg.column);
      for (std::size_t i = 0; i < n; ++i) {
        if (c.is_valid(i)) ++counts[gid[i]];
      }
    }
    return Column::from_ints(std::move(counts));
  }
  const auto& c = in.column(*agg.column);
  const auto type = c.type();
  std::vector<std::int64_t> nonnull(groups, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (c.is_valid(i)) ++nonnull[gid[i]];
  }
  std::vector<std::uint8_t> valid(groups, 1);
  bool any_null = false;
  for (std::uint32_t g = 0; g < groups; ++g) {
    if (nonnull[g] == 0) {
      valid[g] = 0;
      any_null = true;
    }
  }
  if (!any_null) valid.clear();

  if (agg.fn == AggFn::Avg) {
    std::vector<double> sums(groups, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      if (c.is_valid(i)) sums[gid[i]] += c.numeric(i);
    }
    for (std::uint32_t g = 0; g < groups; ++g) {
      sums[g] = nonnull[g] ? sums[g] / static_cast<double>(nonnull[g]) : 0.0;
    }
    return Column::from_floats(std::move(sums), std::move(valid));
  }
  if (type == ValueType::Int64) {
    auto v = c.ints();
    std::vector<std::int64_t> acc(groups, 0);
    std::vector<std::uint8_t> seen(groups, 0);
    for (std::size_t i = 0; i < n; ++i) {
      if (!c.is_valid(i)) continue;
      auto g = gid[i];
      switch (agg.fn) {
        case AggFn::Sum: acc[g] += v[i]; break;
        case AggFn::Min: acc[g] = seen[g] ? std::min(acc[g], v[i]) : v[i]; break;
        case AggFn::Max: acc[g] = seen[g] ? std::max(acc[g], v[i]) : v[i]; break;
        default: break;
      }
      seen[g] = 1;
    }
    return Column::from_ints(std::move(acc), std::move(valid));
  }
  auto v = c.floats();
  std::vector<double> acc(groups, 0.0);
  std::vector<std::uint8_t> seen(groups, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (!c.is_valid(i)) continue;
    auto g = gid[i];
    switch (agg.fn) {
      case AggFn::Sum: acc[g] += v[i]; break;
      case AggFn::Min: acc[g] = seen[g] ? std::min(acc[g], v[i]) : v[i]; break;
      case AggFn::Max: acc[g] = seen[g] ? std::max(acc[g], v[i]) : v[i]; break;
      default: break;
    }
    seen[g] = 1;
  }
  return Column::from_floats(std::move(acc), std::move(valid));
}

ValueType aggregate_type(const AggSpec& agg, const Schema& schema) {
  if (agg.fn == AggFn::Count) {
    if (agg.column) require_column(schema, *agg.column, "aggregate");
    return ValueType::Int64;
  }
  if (!agg.column) {
    throw Error(ErrorCode::TypeError, std::string(to_string(agg.fn)) + " needs an input column");
  }
  const auto type = schema.at(require_column(schema, *agg.column, "aggregate")).type;
  if (!is_numeric(type)) {
    throw Error(ErrorCode::TypeError, std::string(to_string(agg.fn)) + "(" + *agg.column +
                                          ") needs a numeric column");
  }
  return agg.fn == AggFn::Avg ? ValueType::Float64 : type;
}

}  // namespace

OpResult group_aggregate(const Relation& in, std::span<const std::string> keys,
                         std::span<const AggSpec> aggs, const OpOptions& options) {
  std::vector<std::size_t> key_idx;
  for (const auto& k : keys) key_idx.push_back(require_column(in.schema(), k, "group by"));
  std::vector<ColumnDef> defs;
  for (auto k : key_idx) defs.push_back(in.schema().at(k));
  for (const auto& a : aggs) defs.push_back({a.name, aggregate_type(a, in.schema())});
  Schema schema(defs);

  const std::size_t n = in.row_count();
  std::vector<std::uint32_t> gid;
  if (key_idx.empty()) gid.assign(n, 0);
  std::uint32_t groups = n > 0 ? 1 : 0;
  std::vector<std::uint32_t> column_ids;
  for (std::size_t ki = 0; ki < key_idx.size(); ++ki) {
    const auto count = encode_group_column(in.column(key_idx[ki]), column_ids);
    if (ki == 0) {
      gid.swap(column_ids);
      groups = count;
      continue;
    }
    absl::flat_hash_map<std::uint64_t, std::uint32_t> combine;
    std::uint32_t next = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::uint64_t pair = (static_cast<std::uint64_t>(gid[i]) << 32) | column_ids[i];
      auto [it, inserted] = combine.try_emplace(pair, next);
      if (inserted) ++next;
      gid[i] = it->second;
    }
    groups = next;
  }

  std::vector<RowId> representative(groups, 0);
  {
    std::vector<std::uint8_t> seen(groups, 0);
    for (std::size_t i = 0; i < n; ++i) {
      if (!seen[gid[i]]) {
        seen[gid[i]] = 1;
        representative[gid[i]] = static_cast<RowId>(i);
      }
    }
  }
  std::vector<Column> cols;
  for (auto k : key_idx) cols.push_back(in.column(k).gather(representative));
  for (const auto& a : aggs) cols.push_back(aggregate_column(a, in, gid, groups));

  OpResult out;
  out.relation = std::make_shared<const Relation>(options.output_name, std::move(schema),
                                                  std::move(cols), RelationKind::Derived, groups);
  out.lineage.operator_id = options.operator_id;
  out.lineage.output_rows = groups;
  if (options.capture_lineage) {
    auto backward = RidLists::from_groups(gid, groups);
    out.lineage.sides.push_back({in.name(), std::move(backward), RidLists::unit(std::move(gid))});
  }
  return out;
}

std::pair<Value, Value> extent(const Relation& in, std::string_view column) {
  const auto& c = in.column(column);
  if (!is_numeric(c.type())) {
    throw Error(ErrorCode::TypeError, "extent of non-numeric column '" + std::string(column) + "'");
  }
  std::optional<std::size_t> lo;
  std::optional<std::size_t> hi;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (!c.is_valid(i)) continue;
    const double v = c.numeric(i);
    if (std::isnan(v)) continue;
    if (!lo || v < c.numeric(*lo)) lo = i;
    if (!hi || v > c.numeric(*hi)) hi = i;
  }
  if (!lo) {
    throw Error(ErrorCode::EmptyExtent, "no values to compute the extent of '" +
                                            std::string(column) + "' in '" + in.name() + "'");
  }
  return {c.value(*lo), c.value(*hi)};
}

}  // namespace provis
