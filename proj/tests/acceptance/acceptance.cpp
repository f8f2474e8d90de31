// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>

#include "dashboard.hpp"
#include "fixtures.hpp"
#include "provis/bench.hpp"
#include "provis/presets.hpp"
#include "provis/synth.hpp"
#include "provis/trace.hpp"
#include "random_pipeline.hpp"
#include "reference.hpp"

using namespace provis;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(bool ok, const char* name, const std::string& detail) {
  if (!ok) ++failures;
  std::printf("%s %s: %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
  std::fflush(stdout);
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

RowSet random_subset(std::mt19937_64& rng, std::size_t n, double p) {
  std::vector<RowId> out;
  std::bernoulli_distribution pick(p);
  for (std::size_t i = 0; i < n; ++i) {
    if (pick(rng)) out.push_back(static_cast<RowId>(i));
  }
  return RowSet::from_sorted(std::move(out));
}

struct DualityStats {
  std::size_t operators = 0;
  std::size_t groups = 0;
  std::size_t duality_failures = 0;
  std::size_t partition_failures = 0;
};

// forward[i] contains o exactly when backward[o] contains i; group images
// cover every input row exactly once.
void check_operators(const Workflow& wf, DualityStats& st) {
  for (auto node : wf.order()) {
    ++st.operators;
    const auto& lin = wf.lineage(node);
    const auto& inputs = wf.inputs(node);
    for (std::size_t k = 0; k < inputs.size(); ++k) {
      const auto n_in = wf.relation(wf.names()[inputs[k]])->row_count();
      const auto& side = lin.sides[k];
      std::set<std::pair<RowId, RowId>> back, fwd;
      for (std::size_t o = 0; o < lin.output_rows; ++o) {
        for (auto i : side.backward.at(o)) back.emplace(static_cast<RowId>(o), i);
      }
      bool ok = side.forward.entries() == n_in && side.backward.entries() == lin.output_rows;
      for (std::size_t i = 0; ok && i < n_in; ++i) {
        for (auto o : side.forward.at(i)) fwd.emplace(o, static_cast<RowId>(i));
      }
      if (!ok || back != fwd) ++st.duality_failures;
    }
    if (std::holds_alternative<GroupOp>(wf.node(node).op)) {
      ++st.groups;
      const auto n_in = wf.relation(wf.names()[inputs[0]])->row_count();
      std::vector<int> seen(n_in, 0);
      for (std::size_t o = 0; o < lin.output_rows; ++o) {
        const auto img = lin.sides[0].backward.at(o);
        if (img.empty()) ++st.partition_failures;
        for (auto i : img) ++seen[i];
      }
      for (auto c : seen) {
        if (c != 1) {
          ++st.partition_failures;
          break;
        }
      }
    }
  }
}

void lineage_oracle(DualityStats& st) {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(20240601);
  const int pipelines = 200;
  std::size_t mismatches = 0, checks = 0;
  for (int p = 0; p < pipelines; ++p) {
    const std::size_t max_rows = p % 4 == 0 ? 1000 : 200;
    auto bases = oracle::random_bases(rng, max_rows);
    auto pipe = oracle::random_pipeline(rng, bases, 5, 5000);
    auto wf = Workflow::evaluate(pipe.def, bases);
    check_operators(wf, st);
    const auto ref = oracle::ref_evaluate(pipe.def, bases).at(pipe.sink);
    const auto n = ref.rows.size();
    std::vector<oracle::Occurrences> occ_of(n);
    for (std::size_t o = 0; o < n; ++o) oracle::collect_occurrences(ref.derivs[o], occ_of[o]);
    const auto sel = random_subset(rng, n, 0.3);
    for (const auto& base : wf.bases_of(pipe.sink)) {
      oracle::Occurrences occ;
      for (auto o : sel) {
        for (auto [rid, k] : occ_of[o][base]) occ[base][rid] += k;
      }
      std::vector<RowId> ids;
      std::vector<std::uint64_t> counts;
      for (auto [rid, k] : occ[base]) {
        ids.push_back(rid);
        counts.push_back(k);
      }
      const auto which = backward_trace(wf, pipe.sink, sel, base);
      const auto bag = backward_trace(wf, pipe.sink, sel, base, Semantics::Bag);
      mismatches += which.rids != RowSet::from_sorted(ids);
      mismatches += bag.rids != which.rids || bag.counts != counts;

      const auto in = random_subset(rng, bases.get(base)->row_count(), 0.3);
      std::vector<RowId> hit;
      std::vector<std::uint64_t> hit_counts;
      for (RowId o = 0; o < n; ++o) {
        std::uint64_t k = 0;
        for (auto [rid, m] : occ_of[o][base]) {
          if (in.contains(rid)) k += m;
        }
        if (k) {
          hit.push_back(o);
          hit_counts.push_back(k);
        }
      }
      const auto fwd = forward_trace(wf, base, in, pipe.sink, Semantics::Bag);
      mismatches += forward_trace(wf, base, in, pipe.sink).rids != RowSet::from_sorted(hit);
      mismatches += fwd.counts != hit_counts;
      checks += 4;
    }
  }
  const double secs = seconds_since(t0);
  report(mismatches == 0 && secs < 120.0, "lineage-oracle",
         std::to_string(pipelines) + " pipelines, " + std::to_string(checks) + " trace comparisons, " +
             std::to_string(mismatches) + " mismatches, " + std::to_string(secs) + " s (limit 120 s)");
}

void crossfilter_rewrite() {
  std::mt19937_64 rng(777);
  auto defs = flight_dashboard();
  defs.push_back(delay_scatter());
  Session s("accept", oracle::toy(), defs);
  const int selections = 120;
  std::size_t compared = 0, mismatches = 0;
  std::string first;
  for (int i = 0; i < selections; ++i) {
    const auto& src = s.views().views()[rng() % s.views().views().size()];
    const auto sel = oracle::random_selection(rng, src);
    const auto pred = oracle::selection_predicate(src, resolve_selection(src, sel).marks);
    for (const auto& [id, r] : s.crossfilter(src.id(), sel)) {
      const auto expected = oracle::reference_rows(oracle::with_predicate(s.view(id).def(), pred), oracle::toy());
      const auto diff = oracle::compare_rows(oracle::rows_of(*r.data), expected, 1e-9);
      ++compared;
      if (!diff.empty()) {
        ++mismatches;
        if (first.empty()) first = src.id() + " -> " + id + ": " + diff;
      }
    }
  }
  report(mismatches == 0 && compared > 0, "crossfilter-predicate-rewrite",
         std::to_string(selections) + " selections, " + std::to_string(compared) +
             " refreshed views, " + std::to_string(mismatches) +
             " mismatches (COUNT exact, AVG rel tol 1e-9)" + (first.empty() ? "" : "; first: " + first));
}

void duality(const DualityStats& st) {
  report(st.duality_failures == 0 && st.partition_failures == 0 && st.groups > 0, "duality-partition",
         std::to_string(st.operators) + " operator evaluations, " + std::to_string(st.groups) +
             " group-aggregates, " + std::to_string(st.duality_failures) + " duality failures, " +
             std::to_string(st.partition_failures) + " partition failures");
}

void scale_round_trip() {
  std::mt19937_64 rng(4242);
  std::uniform_real_distribution<double> u(-1e4, 1e4);
  int triples = 0, bad = 0;
  double worst = 0.0;
  while (triples < 10000) {
    double mi = u(rng), mx = u(rng);
    if (mi > mx) std::swap(mi, mx);
    const double lo = u(rng), hi = u(rng);
    if (mi == mx || lo == hi) continue;
    ++triples;
    ScaleSpec sp{ScaleKind::LinearPosition, mi, mx, lo, hi};
    const double v = std::uniform_real_distribution<double>(mi, mx)(rng);
    const double err = std::abs(invert_scale(sp, apply_position(sp, v)) - v) / std::max(1.0, mx - mi);
    worst = std::max(worst, err);
    if (err > 1e-9) ++bad;
  }
  int degenerate_bad = 0;
  double worst_mid = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double d = u(rng), lo = u(rng), hi = u(rng);
    ScaleSpec sp{ScaleKind::LinearPosition, d, d, lo, hi};
    const double off = std::abs(apply_position(sp, d) - (lo + hi) / 2) / std::max(1.0, std::abs(hi - lo));
    worst_mid = std::max(worst_mid, off);
    if (off > 1e-12) ++degenerate_bad;
  }
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "%d triples, worst relative error %.3g (tol 1e-9); %d of 1000 degenerate domains off the "
                "midpoint, worst %.3g (tol 1e-12)",
                triples, worst, degenerate_bad, worst_mid);
  report(bad == 0 && degenerate_bad == 0, "scale-round-trip", buf);
}

void event_determinism() {
  std::mt19937_64 rng(5150);
  auto defs = flight_dashboard();
  defs.push_back(delay_scatter());
  Session live("live", oracle::toy(), defs);
  std::vector<std::map<std::string, RelationPtr>> produced;
  const EventKind kinds[] = {EventKind::Hover, EventKind::Brush, EventKind::Click};
  for (int i = 0; i < 50; ++i) {
    const auto& v = live.views().views()[rng() % live.views().views().size()];
    produced.push_back(live.interact(v.id(), kinds[rng() % 3], oracle::random_selection(rng, v)).second.relations(live));
  }
  Session fresh("fresh", oracle::toy(), defs);
  for (const auto& ev : live.events()) fresh.record_event(ev.source, ev.kind, ev.selection, ev.timestamp);
  std::size_t relations = 0, differing = 0;
  for (std::int64_t e = 0; e < 50; ++e) {
    const auto replayed = fresh.replay_event(e).relations(fresh);
    const auto& want = produced[static_cast<std::size_t>(e)];
    if (replayed.size() != want.size()) ++differing;
    for (const auto& [id, rel] : want) {
      ++relations;
      auto it = replayed.find(id);
      if (it == replayed.end() || !identical(*it->second, *rel)) ++differing;
    }
  }
  const bool log_same = identical(*live.events_relation(), *fresh.events_relation());
  report(differing == 0 && log_same, "event-determinism",
         "50 events, " + std::to_string(relations) + " relations compared bit-exactly, " +
             std::to_string(differing) + " differ; events relation " + (log_same ? "identical" : "differs"));
}

void scaled_latency() {
  namespace fs = std::filesystem;
  const auto dir = fs::temp_directory_path() / "provis_acceptance_1m";
  fs::remove_all(dir);
  try {
    generate({1'000'000, 2024}, dir);
    BenchOptions o;
    o.data = dir;
    o.script = random_script(20, 99);
    o.reps = 3;
    o.http = false;
    const auto r = run_bench(o);
    const double p95 = r.at("crossfilter").at("p95_ms");
    const double ratio = r.at("build").at("overhead_ratio");
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "1M ontime rows, 6 views, 20 brushes x 2 warm reps: p50 %.1f ms, p95 %.1f ms (bar 100 ms); "
                  "lineage build overhead %.2fx (soft target 3x%s); cpu %s",
                  r.at("crossfilter").at("p50_ms").get<double>(), p95, ratio, ratio < 3.0 ? ", met" : ", missed",
                  r.at("environment").at("cpu").get<std::string>().c_str());
    report(p95 < 100.0 && r.at("crossfilter").at("samples") == 40, "scaled-latency", buf);
  } catch (const std::exception& e) {
    report(false, "scaled-latency", e.what());
  }
  fs::remove_all(dir);
}

void which_dedup() {
  const auto def = state_map().workflow;
  auto wf = Workflow::evaluate(def, oracle::toy());
  const auto ref = oracle::ref_evaluate(def, oracle::toy()).at("q1");
  std::size_t groups = 0, bad = 0, repeated = 0;
  for (RowId g = 0; g < ref.rows.size(); ++g) {
    ++groups;
    oracle::Occurrences occ;
    oracle::collect_occurrences(ref.derivs[g], occ);
    std::vector<RowId> expect;
    for (auto [rid, k] : occ["airlines"]) {
      expect.push_back(rid);
      if (k > 1) ++repeated;
    }
    const auto which = backward_trace(wf, "q1", {g}, "airlines");
    const auto ids = which.rids.ids();
    const bool unique = std::adjacent_find(ids.begin(), ids.end()) == ids.end();
    if (!unique || which.rids != RowSet::from_sorted(expect) || !which.counts.empty()) ++bad;
  }
  report(bad == 0 && repeated > 0, "which-provenance-dedup",
         std::to_string(groups) + " Q1 groups traced to airlines, " + std::to_string(repeated) +
             " airline occurrences with multiplicity > 1 collapsed, " + std::to_string(bad) + " mismatches");
}

}  // namespace

int main() {
  DualityStats st;
  lineage_oracle(st);
  crossfilter_rewrite();
  duality(st);
  scale_round_trip();
  event_determinism();
  scaled_latency();
  which_dedup();
  return failures == 0 ? 0 : 1;
}
