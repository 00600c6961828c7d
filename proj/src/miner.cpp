#include "pesao/miner.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <limits>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "pesao/geometry.hpp"

namespace pesao {

namespace {

constexpr double kEps = 1e-9;

bool is_candidate_note(const std::string& n) {
  return n == "candidate_same" || n == "candidate_different" || n == "confirmed";
}

int part_of(const FixationRecord& r) { return r.element ? r.element->part : -1; }

OperationInterval make_interval(const Trace& t, OperationKind kind, std::vector<std::size_t> ev, std::string rule,
                                double confidence = 1.0) {
  OperationInterval iv;
  iv.kind = kind;
  iv.t0 = t.records[ev.front()].t_start;
  iv.t1 = t.records[ev.back()].t_end();
  iv.evidence = std::move(ev);
  iv.rule = std::move(rule);
  iv.confidence = confidence;
  return iv;
}

/// Number of notes at or before the start of each record.
std::vector<std::size_t> note_slots(const Trace& t) {
  std::vector<std::size_t> slot(t.records.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < t.records.size(); ++i) {
    while (k < t.notes.size() && t.notes[k].t <= t.records[i].t_start + kEps) ++k;
    slot[i] = k;
  }
  return slot;
}

struct Segment {
  std::vector<std::size_t> targets;  // indices of on-object records
  std::size_t first = 0;             // first record index
  std::string lead;                  // last note before the segment
};

/// Target records from `from` on, split at notes.
std::vector<Segment> segments(const Trace& t, std::size_t from) {
  const auto slot = note_slots(t);
  std::vector<Segment> out;
  for (std::size_t i = from; i < t.records.size(); ++i) {
    if (out.empty() || slot[i] != slot[i - 1] || i == from) {
      Segment s;
      s.first = i;
      if (slot[i] > 0) s.lead = t.notes[slot[i] - 1].note;
      out.push_back(s);
    }
    if (t.records[i].on_object() && t.records[i].element) out.back().targets.push_back(i);
  }
  return out;
}

bool stationary(const Trace& t, std::span<const std::size_t> ev, const DetectorConfig& cfg) {
  const auto& h0 = t.records[ev.front()].head;
  for (std::size_t i : ev) {
    const auto& h = t.records[i].head;
    if ((h.position - h0.position).norm() >= cfg.stationary_m) return false;
    if (angle_between_deg(h.forward(), h0.forward()) >= cfg.stationary_deg) return false;
  }
  return true;
}

// ---- rule matchers over target-record lists; return the matched length ----

std::size_t run_length(const Trace& t, std::span<const std::size_t> v, std::size_t i, bool increasing) {
  std::size_t n = 1;
  const auto& r0 = t.records[v[i]];
  while (i + n < v.size()) {
    const auto& r = t.records[v[i + n]];
    const auto& prev = t.records[v[i + n - 1]];
    if (r.target != r0.target || part_of(r) != part_of(r0)) break;
    if (increasing && !(r.duration_ms > prev.duration_ms)) break;
    ++n;
  }
  return n;
}

std::size_t match_coarse(const Trace& t, std::span<const std::size_t> v, std::size_t i, const DetectorConfig& cfg) {
  const auto min_run = static_cast<std::size_t>(cfg.min_coarse_run);
  const std::size_t n1 = run_length(t, v, i, true);
  if (n1 < min_run) return 0;
  const std::size_t j = i + n1;
  // The counterpart run may land on another part when the other object
  // lacks this one.
  if (j < v.size() && t.records[v[j]].target != t.records[v[i]].target) {
    const std::size_t n2 = run_length(t, v, j, true);
    if (n2 >= min_run && n2 >= n1) return n1 + n2;
  }
  return n1;
}

std::size_t match_alternation(const Trace& t, std::span<const std::size_t> v, std::size_t i,
                              const DetectorConfig& cfg) {
  std::size_t n = 1;
  const int part = part_of(t.records[v[i]]);
  while (i + n < v.size()) {
    const auto& r = t.records[v[i + n]];
    if (part_of(r) != part || r.target == t.records[v[i + n - 1]].target) break;
    ++n;
  }
  return n >= 2 * static_cast<std::size_t>(cfg.min_alternations) ? n : 0;
}

std::size_t same_target_run(const Trace& t, std::span<const std::size_t> v, std::size_t i) {
  std::size_t n = 1;
  while (i + n < v.size() && t.records[v[i + n]].target == t.records[v[i]].target) ++n;
  return n;
}

int distinct_sectors(const Trace& t, std::span<const std::size_t> v) {
  std::set<int> s;
  for (std::size_t i : v)
    if (t.records[i].sector) s.insert(*t.records[i].sector);
  return static_cast<int>(s.size());
}

std::size_t match_gist(const Trace& t, std::span<const std::size_t> v, std::size_t i, const DetectorConfig& cfg) {
  const std::size_t n1 = same_target_run(t, v, i);
  if (distinct_sectors(t, v.subspan(i, n1)) < cfg.min_gist_sectors || i + n1 >= v.size()) return 0;
  const std::size_t n2 = same_target_run(t, v, i + n1);
  if (distinct_sectors(t, v.subspan(i + n1, n2)) < cfg.min_gist_sectors) return 0;
  return n1 + n2;
}

std::size_t match_divide(const Trace& t, std::span<const std::size_t> v, std::size_t i) {
  std::set<int> used;
  std::size_t n = 0;
  while (i + n + 1 < v.size()) {
    const auto& a = t.records[v[i + n]];
    const auto& b = t.records[v[i + n + 1]];
    if (a.target != Target::A || b.target != Target::B || part_of(a) != part_of(b) || used.count(part_of(a))) break;
    used.insert(part_of(a));
    n += 2;
  }
  return n;
}

bool outlier_rule(const Trace& t, std::span<const std::size_t> ev) {
  if (ev.empty()) return false;
  bool a = false, b = false;
  for (std::size_t i : ev) {
    const auto& r = t.records[i];
    if (!r.on_object() || !r.element) return false;
    (r.target == Target::A ? a : b) = true;
    // The pair is a re-examination: each part was fixated on that object before.
    bool seen = false;
    for (std::size_t k = 0; k < ev.front() && !seen; ++k)
      seen = t.records[k].target == r.target && part_of(t.records[k]) == part_of(r);
    if (!seen) return false;
  }
  return a && b;
}

/// The k target records immediately preceding record `first`.
std::vector<std::size_t> preceding_targets(const Trace& t, std::size_t first, std::size_t k) {
  std::vector<std::size_t> out;
  for (std::size_t i = first; i-- > 0 && out.size() < k;)
    if (t.records[i].on_object() && t.records[i].element) out.push_back(i);
  std::reverse(out.begin(), out.end());
  return out;
}

bool same_signature(const Trace& t, std::span<const std::size_t> x, std::span<const std::size_t> y) {
  if (x.size() != y.size()) return false;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (t.records[x[i]].target != t.records[y[i]].target || part_of(t.records[x[i]]) != part_of(t.records[y[i]]))
      return false;
  return true;
}

std::size_t initialization_end(const Initialization& init) {
  if (init.locate) return init.locate->evidence.back() + 1;
  if (init.layout) return init.layout->evidence.back() + 1;
  return 0;
}

}  // namespace

Initialization detect_initialization(const Trace& t, const DetectorConfig& cfg) {
  Initialization out;
  std::vector<std::size_t> pan;
  for (std::size_t i = 0; i < t.records.size() && !t.records[i].on_object(); ++i) pan.push_back(i);
  if (pan.size() >= 2) {
    std::set<double> yaws;
    for (std::size_t i : pan) yaws.insert(t.records[i].head.yaw);
    if (yaws.size() >= 2) out.layout = make_interval(t, OperationKind::ThreeDLayout, pan, "opening-pan");
  }
  // Earliest run of short fixations touching both objects; environment
  // glances may be interleaved.
  for (std::size_t i = 0; i < t.records.size(); ++i) {
    if (!(t.records[i].on_object() && t.records[i].duration_ms < cfg.locate_max_ms)) continue;
    std::vector<std::size_t> ev;
    bool a = false, b = false;
    for (std::size_t k = i; k < t.records.size() && t.records[k].duration_ms < cfg.locate_max_ms; ++k) {
      if (!t.records[k].on_object()) continue;
      ev.push_back(k);
      (t.records[k].target == Target::A ? a : b) = true;
      if (a && b) break;
    }
    if (a && b) {
      out.locate = make_interval(t, OperationKind::LocateTargets, ev, "short-both");
      break;
    }
  }
  return out;
}

std::vector<OperationInterval> detect_strategy_operations(const Trace& t, const DetectorConfig& cfg) {
  std::vector<OperationInterval> out;
  for (const auto& seg : segments(t, initialization_end(detect_initialization(t, cfg)))) {
    const std::span<const std::size_t> v = seg.targets;
    if (v.empty()) continue;
    if (seg.lead == "outlier" && outlier_rule(t, v)) {
      out.push_back(make_interval(t, OperationKind::OutlierDetection, seg.targets, "refixate-counterpart"));
      continue;
    }
    for (std::size_t i = 0; i < v.size();) {
      auto take = [&](std::size_t n, OperationKind kind, const char* rule) {
        out.push_back(make_interval(t, kind, {v.begin() + static_cast<std::ptrdiff_t>(i),
                                              v.begin() + static_cast<std::ptrdiff_t>(i + n)}, rule));
        i += n;
      };
      if (const auto n = match_coarse(t, v, i, cfg)) {
        take(n, OperationKind::CoarseToFine, "increasing-duration");
      } else if (const auto m = match_alternation(t, v, i, cfg)) {
        const bool still = stationary(t, v.subspan(i, m), cfg);
        take(m, still ? OperationKind::AlternatingFixation : OperationKind::AlternatingView,
             still ? "alternate-stationary" : "alternate-moving");
      } else if (const auto g = match_gist(t, v, i, cfg)) {
        take(g, OperationKind::GlobalGist, "sector-runs");
      } else if (const auto d = match_divide(t, v, i)) {
        take(d, OperationKind::DivideAndConquer, "distinct-part-pairs");
      } else {
        ++i;
      }
    }
  }
  return out;
}

std::vector<OperationInterval> detect_confirmation(const Trace& t, const std::vector<OperationInterval>& prior,
                                                   const DetectorConfig& cfg) {
  std::vector<OperationInterval> out;
  for (const auto& seg : segments(t, initialization_end(detect_initialization(t, cfg)))) {
    if (!is_candidate_note(seg.lead) || seg.targets.size() < 2) continue;
    const auto ref = preceding_targets(t, seg.first, seg.targets.size());
    if (!same_signature(t, seg.targets, ref)) continue;
    // Full confidence when the repeated window closes a detected interval.
    double confidence = 0.75;
    for (const auto& p : prior)
      if (!p.evidence.empty() && p.evidence.back() == ref.back()) confidence = 1.0;
    out.push_back(make_interval(t, OperationKind::StrategyRepetition, seg.targets, "repeat-signature", confidence));
  }
  return out;
}

std::vector<OperationInterval> detect_operations(const Trace& t, const DetectorConfig& cfg) {
  std::vector<OperationInterval> out;
  const auto init = detect_initialization(t, cfg);
  if (init.layout) out.push_back(*init.layout);
  if (init.locate) out.push_back(*init.locate);
  const auto strategies = detect_strategy_operations(t, cfg);
  const auto reps = detect_confirmation(t, strategies, cfg);
  for (const auto& s : strategies) {
    bool inside = false;
    for (const auto& r : reps)
      inside = inside || (s.evidence.front() >= r.evidence.front() && s.evidence.back() <= r.evidence.back());
    if (!inside) out.push_back(s);
  }
  out.insert(out.end(), reps.begin(), reps.end());
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.t0 < b.t0; });
  return out;
}

bool rule_holds(const Trace& t, const OperationInterval& iv, const DetectorConfig& cfg) {
  const auto& ev = iv.evidence;
  if (ev.empty() || !(iv.t0 < iv.t1)) return false;
  for (std::size_t i = 0; i < ev.size(); ++i)
    if (ev[i] >= t.records.size() || (i > 0 && ev[i] <= ev[i - 1])) return false;
  auto targets_only = [&] {
    for (std::size_t i : ev)
      if (!t.records[i].on_object() || !t.records[i].element) return false;
    return true;
  };
  const std::span<const std::size_t> v = ev;
  switch (iv.kind) {
    case OperationKind::ThreeDLayout: {
      std::set<double> yaws;
      for (std::size_t i : ev) {
        if (t.records[i].on_object()) return false;
        yaws.insert(t.records[i].head.yaw);
      }
      for (std::size_t i = 0; i < ev.back(); ++i)
        if (t.records[i].on_object()) return false;
      return ev.size() >= 2 && yaws.size() >= 2;
    }
    case OperationKind::LocateTargets: {
      bool a = false, b = false;
      for (std::size_t i : ev) {
        const auto& r = t.records[i];
        if (!r.on_object() || !(r.duration_ms < cfg.locate_max_ms)) return false;
        (r.target == Target::A ? a : b) = true;
      }
      return a && b;
    }
    case OperationKind::CoarseToFine: {
      if (!targets_only()) return false;
      const std::size_t n1 = run_length(t, v, 0, true);
      if (n1 < static_cast<std::size_t>(cfg.min_coarse_run)) return false;
      if (n1 == v.size()) return true;
      return match_coarse(t, v, 0, cfg) == v.size();
    }
    case OperationKind::AlternatingFixation:
    case OperationKind::AlternatingView:
      return targets_only() && match_alternation(t, v, 0, cfg) == v.size() &&
             stationary(t, v, cfg) == (iv.kind == OperationKind::AlternatingFixation);
    case OperationKind::DivideAndConquer:
      return targets_only() && match_divide(t, v, 0) == v.size();
    case OperationKind::GlobalGist:
      return targets_only() && match_gist(t, v, 0, cfg) == v.size() &&
             same_target_run(t, v, 0) + same_target_run(t, v, same_target_run(t, v, 0)) == v.size();
    case OperationKind::OutlierDetection:
      return outlier_rule(t, v);
    case OperationKind::StrategyRepetition:
      return targets_only() && ev.size() >= 2 && same_signature(t, v, preceding_targets(t, ev.front(), ev.size()));
    default:
      return false;
  }
}

std::optional<OperationKind> classify_elemental(const Trace& t, std::span<const std::size_t> records,
                                                double object_diameter_m, const DetectorConfig& cfg) {
  if (records.size() < 2) return std::nullopt;
  std::vector<double> steps;
  for (std::size_t i = 1; i < records.size(); ++i)
    steps.push_back((t.records[records[i]].gaze - t.records[records[i - 1]].gaze).norm());
  std::sort(steps.begin(), steps.end());
  const std::size_t n = steps.size();
  const double median = n % 2 ? steps[n / 2] : 0.5 * (steps[n / 2 - 1] + steps[n / 2]);
  return median < cfg.closeness_factor * object_diameter_m ? OperationKind::TraceConnectedComponents
                                                          : OperationKind::CompareArbitraryComponents;
}

OperationKind classify_elemental(Vec3 head_before, Vec3 head_after, const DetectorConfig& cfg) {
  const double d = std::hypot(head_after.x - head_before.x, head_after.y - head_before.y);
  return d >= cfg.body_displacement_m ? OperationKind::PointOfViewChange : OperationKind::ViewingAngleChange;
}

std::optional<OperationKind> classify_motion(const Trace& t, std::size_t motion, const DetectorConfig& cfg) {
  if (motion >= t.motions.size()) return std::nullopt;
  const double when = t.motions[motion].t_start;
  const FixationRecord* before = nullptr;
  const FixationRecord* after = nullptr;
  for (const auto& r : t.records) {
    if (r.t_end() <= when + kEps) before = &r;
    if (!after && r.t_start >= when - kEps) after = &r;
  }
  if (!before || !after) return std::nullopt;
  return classify_elemental(before->head.position, after->head.position, cfg);
}

std::vector<OperationInterval> annotated_intervals(const Trace& t) {
  std::vector<OperationInterval> out;
  const auto slot = note_slots(t);
  std::vector<std::size_t> run;
  auto flush = [&] {
    if (!run.empty()) out.push_back(make_interval(t, *t.records[run.front()].annotation, run, "annotation"));
    run.clear();
  };
  for (std::size_t i = 0; i < t.records.size(); ++i) {
    const auto& a = t.records[i].annotation;
    if (!a) {
      flush();
      continue;
    }
    if (!run.empty() && (*t.records[run.front()].annotation != *a || slot[run.front()] != slot[i])) flush();
    run.push_back(i);
  }
  flush();
  return out;
}

double temporal_iou(const OperationInterval& a, const OperationInterval& b) {
  const double inter = std::min(a.t1, b.t1) - std::max(a.t0, b.t0);
  if (inter <= 0.0) return 0.0;
  const double uni = std::max(a.t1, b.t1) - std::min(a.t0, b.t0);
  return uni > 0.0 ? inter / uni : 0.0;
}

double DetectionScore::precision() const {
  const int d = true_positives + false_positives;
  return d ? static_cast<double>(true_positives) / d : 1.0;
}

double DetectionScore::recall() const {
  const int d = true_positives + false_negatives;
  return d ? static_cast<double>(true_positives) / d : 1.0;
}

double DetectionScore::f1() const {
  const double p = precision(), r = recall();
  return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
}

void score_detection(const std::vector<OperationInterval>& detected, const std::vector<OperationInterval>& truth,
                     std::map<OperationKind, DetectionScore>& scores, double min_iou) {
  struct Cand {
    double iou;
    std::size_t d, g;
  };
  std::vector<Cand> cands;
  for (std::size_t d = 0; d < detected.size(); ++d)
    for (std::size_t g = 0; g < truth.size(); ++g)
      if (detected[d].kind == truth[g].kind) {
        const double iou = temporal_iou(detected[d], truth[g]);
        if (iou >= min_iou) cands.push_back({iou, d, g});
      }
  std::stable_sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) { return a.iou > b.iou; });
  std::vector<char> dm(detected.size(), 0), gm(truth.size(), 0);
  for (const auto& c : cands) {
    if (dm[c.d] || gm[c.g]) continue;
    dm[c.d] = gm[c.g] = 1;
    scores[detected[c.d].kind].true_positives++;
  }
  for (std::size_t d = 0; d < detected.size(); ++d)
    if (!dm[d]) scores[detected[d].kind].false_positives++;
  for (std::size_t g = 0; g < truth.size(); ++g)
    if (!gm[g]) scores[truth[g].kind].false_negatives++;
}

// ---- trial graphs ----

int TrialGraph::dead_end_branches() const {
  int n = 0;
  for (std::size_t v = 0; v < nodes.size(); ++v) {
    if (!nodes[v].dead_end) continue;
    bool inner = false;
    for (const auto& a : arcs)
      if (!a.back_edge && a.to == static_cast<int>(v) && nodes[static_cast<std::size_t>(a.from)].dead_end) inner = true;
    if (!inner) ++n;
  }
  return n;
}

std::vector<std::vector<OperationKind>> TrialGraph::paths() const {
  std::vector<std::vector<int>> out_arcs(nodes.size());
  std::vector<int> indeg(nodes.size(), 0);
  for (const auto& a : arcs)
    if (!a.back_edge) {
      out_arcs[static_cast<std::size_t>(a.from)].push_back(a.to);
      indeg[static_cast<std::size_t>(a.to)]++;
    }
  std::vector<std::vector<OperationKind>> out;
  std::vector<OperationKind> cur;
  auto dfs = [&](auto&& self, int v) -> void {
    cur.push_back(nodes[static_cast<std::size_t>(v)].kind);
    if (out_arcs[static_cast<std::size_t>(v)].empty()) out.push_back(cur);
    for (int w : out_arcs[static_cast<std::size_t>(v)]) self(self, w);
    cur.pop_back();
  };
  for (std::size_t v = 0; v < nodes.size(); ++v)
    if (indeg[v] == 0) dfs(dfs, static_cast<int>(v));
  return out;
}

TrialGraph build_trial_graph(const Trace& t, const std::vector<OperationInterval>& intervals) {
  if (!t.answer) throw Error(ErrorCode::Incomplete, "trace has no answer");
  auto sorted = intervals;
  std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.t0 < b.t0; });

  TrialGraph g;
  int anchor = -1;  // end of initialization; every thread hangs off it
  int last = -1;
  std::vector<int> thread;
  auto end_thread = [&](bool uncertain) {
    if (thread.empty()) return;
    for (int v : thread) g.nodes[static_cast<std::size_t>(v)].dead_end = true;
    // Reformulation: back into strategy formulation at the thread head.
    if (uncertain) g.arcs.push_back({thread.back(), thread.front(), true});
    thread.clear();
    last = anchor;
  };
  std::size_t ni = 0;
  auto notes_until = [&](double time) {
    for (; ni < t.notes.size() && t.notes[ni].t <= time + kEps; ++ni) {
      if (t.notes[ni].note == "dismiss") end_thread(false);
      if (t.notes[ni].note == "uncertain") end_thread(true);
    }
  };
  for (const auto& iv : sorted) {
    notes_until(iv.t0);
    const int v = static_cast<int>(g.nodes.size());
    g.nodes.push_back({iv.kind, iv.t0, iv.t1, false});
    if (last >= 0) g.arcs.push_back({last, v, false});
    last = v;
    // Initialization nodes form the trunk as long as nothing else came first.
    const bool init =
        (iv.kind == OperationKind::ThreeDLayout || iv.kind == OperationKind::LocateTargets) && anchor == v - 1;
    if (init)
      anchor = v;
    else
      thread.push_back(v);
  }
  notes_until(std::numeric_limits<double>::infinity());
  const double end = t.records.empty() ? 0.0 : t.records.back().t_end();
  g.answer = static_cast<int>(g.nodes.size());
  g.nodes.push_back({OperationKind::Answer, end, end, false});
  if (last >= 0) g.arcs.push_back({last, g.answer, false});
  return g;
}

// ---- mining ----

namespace {

using Seq = std::string;  // one char per OperationKind

Seq encode(const std::vector<OperationKind>& v) {
  Seq s;
  for (auto k : v) s.push_back(static_cast<char>('a' + static_cast<int>(k)));
  return s;
}

OperationKind decode(char c) { return static_cast<OperationKind>(c - 'a'); }

struct Count {
  int support = 0;
  int occurrences = 0;
};

/// Splits a distribution into millionths summing exactly to one so that
/// the written weights re-validate.
std::vector<double> unit_split(const std::vector<double>& w) {
  double sum = 0.0;
  for (double x : w) sum += x;
  std::vector<long> k(w.size());
  long total = 0;
  std::size_t big = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    k[i] = std::lround(w[i] / sum * 1e6);
    total += k[i];
    if (w[i] > w[big]) big = i;
  }
  k[big] += 1000000 - total;
  std::vector<double> out;
  for (long x : k) out.push_back(static_cast<double>(x) / 1e6);
  return out;
}

}  // namespace

std::vector<int> MethodGraph::outgoing(int node) const {
  std::vector<int> out;
  for (std::size_t i = 0; i < arcs.size(); ++i)
    if (arcs[i].from == node) out.push_back(static_cast<int>(i));
  return out;
}

bool MethodGraph::contains(std::span<const OperationKind> seq) const {
  if (seq.empty()) return true;
  auto walk = [&](auto&& self, int v, std::size_t i) -> bool {
    if (nodes[static_cast<std::size_t>(v)] != seq[i]) return false;
    if (i + 1 == seq.size()) return true;
    for (int a : outgoing(v))
      if (self(self, arcs[static_cast<std::size_t>(a)].to, i + 1)) return true;
    return false;
  };
  for (std::size_t v = 0; v < nodes.size(); ++v)
    if (walk(walk, static_cast<int>(v), 0)) return true;
  return false;
}

std::vector<MethodGraph> mine_method_graphs(const std::vector<TrialGraph>& graphs, double min_support) {
  if (graphs.size() < 2) throw Error(ErrorCode::InvalidArgument, "mining needs at least two trial graphs");
  if (!(min_support > 0.0 && min_support <= 1.0)) throw Error(ErrorCode::InvalidArgument, "min_support must be in (0,1]");
  const int n = static_cast<int>(graphs.size());
  const int threshold = std::max(1, static_cast<int>(std::ceil(min_support * n - 1e-9)));

  std::vector<std::vector<Seq>> corpus;
  for (const auto& g : graphs) {
    corpus.emplace_back();
    for (const auto& p : g.paths()) corpus.back().push_back(encode(p));
  }
  std::unordered_map<Seq, Count> counts;
  for (const auto& paths : corpus) {
    std::unordered_set<Seq> seen;
    for (const auto& p : paths)
      for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t len = 2; i + len <= p.size(); ++len) {
          Seq sub = p.substr(i, len);
          auto& c = counts[sub];
          c.occurrences++;
          if (seen.insert(std::move(sub)).second) c.support++;
        }
  }
  std::map<Seq, Count> frequent;
  for (const auto& [s, c] : counts)
    if (c.support >= threshold) frequent.emplace(s, c);

  // Support is anti-monotone, so a frequent sequence is maximal exactly when
  // no one-label extension is frequent.
  std::map<char, std::vector<Seq>> groups;
  for (const auto& [s, c] : frequent) {
    bool maximal = true;
    for (std::size_t k = 0; k < kOperationKindCount && maximal; ++k) {
      const char x = static_cast<char>('a' + k);
      maximal = !frequent.count(s + x) && !frequent.count(x + s);
    }
    if (maximal) groups[s[0]].push_back(s);
  }

  std::vector<MethodGraph> out;
  for (const auto& [first, seqs] : groups) {
    // Prefix trie; node ids in lexicographic prefix order, root first.
    std::map<Seq, int> id;
    std::vector<Seq> order;
    std::set<Seq> prefixes;
    for (const auto& s : seqs)
      for (std::size_t len = 1; len <= s.size(); ++len) prefixes.insert(s.substr(0, len));
    for (const auto& p : prefixes) {
      id[p] = static_cast<int>(order.size());
      order.push_back(p);
    }
    MethodGraph g;
    for (const auto& p : order) g.nodes.push_back(decode(p.back()));
    for (const auto& p : order) {
      std::vector<Seq> kids;
      for (std::size_t k = 0; k < kOperationKindCount; ++k)
        if (prefixes.count(p + static_cast<char>('a' + k))) kids.push_back(p + static_cast<char>('a' + k));
      double sum = 0.0;
      for (const auto& c : kids) sum += frequent.at(c).occurrences;
      for (const auto& c : kids)
        g.arcs.push_back({id[p], id[c], kids.size() == 1 ? 1.0 : frequent.at(c).occurrences / sum});
    }
    for (const auto& paths : corpus) {
      bool has = false;
      for (const auto& p : paths)
        for (const auto& s : seqs) has = has || p.find(s) != Seq::npos;
      if (has) ++g.support;
    }
    out.push_back(std::move(g));
  }
  return out;
}

StrategyLibrary to_library(const std::vector<MethodGraph>& graphs, double confirm) {
  if (graphs.empty()) throw Error(ErrorCode::InvalidArgument, "no method graphs to export");
  StrategyLibrary lib;
  lib.confirm = confirm;
  std::vector<double> supports;
  for (const auto& g : graphs) supports.push_back(std::max(1, g.support));
  const auto weights = unit_split(supports);
  for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
    const auto& g = graphs[gi];
    CognitiveProgram m;
    m.name = "mined" + std::to_string(gi + 1);
    m.weight = weights[gi];
    for (std::size_t v = 0; v < g.nodes.size(); ++v) {
      ProgramNode node;
      node.id = "n" + std::to_string(v);
      node.kind = g.nodes[v];
      switch (node.kind) {
        case OperationKind::GlobalGist: node.params = {{"coverage", std::nullopt}}; break;
        case OperationKind::CoarseToFine: node.params = {{"part", std::nullopt}}; break;
        case OperationKind::AlternatingFixation:
        case OperationKind::AlternatingView: node.params = {{"part", std::nullopt}, {"reps", "2"}}; break;
        default: break;
      }
      m.nodes.push_back(node);
    }
    for (std::size_t v = 0; v < g.nodes.size(); ++v) {
      const auto outs = g.outgoing(static_cast<int>(v));
      if (outs.empty()) m.exits.push_back(static_cast<int>(v));
      if (outs.size() == 1) m.arcs.push_back({static_cast<int>(v), g.arcs[static_cast<std::size_t>(outs[0])].to, 1.0});
      if (outs.size() < 2) continue;
      const int choice = static_cast<int>(m.nodes.size());
      m.nodes.push_back({"c" + std::to_string(v), true, OperationKind::Answer, {}});
      m.arcs.push_back({static_cast<int>(v), choice, 1.0});
      std::vector<double> f;
      for (int a : outs) f.push_back(g.arcs[static_cast<std::size_t>(a)].frequency);
      const auto w = unit_split(f);
      for (std::size_t i = 0; i < outs.size(); ++i)
        m.arcs.push_back({choice, g.arcs[static_cast<std::size_t>(outs[i])].to, w[i]});
    }
    m.entry = 0;
    lib.methods.push_back(std::move(m));
  }
  validate(lib);
  return lib;
}

void write_dot(std::ostream& os, const MethodGraph& g, const std::string& name) {
  os << "digraph \"" << name << "\" {\n  label=\"support " << g.support << "\";\n";
  for (std::size_t v = 0; v < g.nodes.size(); ++v) os << "  n" << v << " [label=\"" << to_string(g.nodes[v]) << "\"];\n";
  for (const auto& a : g.arcs)
    os << "  n" << a.from << " -> n" << a.to << " [label=\"" << format6(a.frequency) << "\"];\n";
  os << "}\n";
}

void write_dot(std::ostream& os, const TrialGraph& g, const std::string& name) {
  os << "digraph \"" << name << "\" {\n";
  for (std::size_t v = 0; v < g.nodes.size(); ++v)
    os << "  n" << v << " [label=\"" << to_string(g.nodes[v].kind) << "\"" << (g.nodes[v].dead_end ? ", style=dashed" : "")
       << "];\n";
  for (const auto& a : g.arcs)
    os << "  n" << a.from << " -> n" << a.to << (a.back_edge ? " [style=dotted, constraint=false]" : "") << ";\n";
  os << "}\n";
}

void write_trial_graph(std::ostream& os, const TrialGraph& g) {
  os << "method trial 1\n";
  for (std::size_t v = 0; v < g.nodes.size(); ++v) os << "node n" << v << ' ' << to_string(g.nodes[v].kind) << '\n';
  int entry = -1;
  for (std::size_t v = 0; v < g.nodes.size(); ++v) {
    std::vector<int> to;
    bool incoming = false;
    for (const auto& a : g.arcs) {
      if (a.back_edge) continue;
      if (a.from == static_cast<int>(v)) to.push_back(a.to);
      if (a.to == static_cast<int>(v)) incoming = true;
    }
    if (!incoming && entry < 0) entry = static_cast<int>(v);
    const auto w = to.empty() ? std::vector<double>{} : unit_split(std::vector<double>(to.size(), 1.0));
    for (std::size_t i = 0; i < to.size(); ++i) os << "arc n" << v << " n" << to[i] << ' ' << format6(w[i]) << '\n';
    if (to.empty()) os << "exit n" << v << '\n';
  }
  for (const auto& a : g.arcs)
    if (a.back_edge) os << "# back-edge n" << a.from << " n" << a.to << '\n';
  os << "entry n" << std::max(entry, 0) << "\nend\n";
}

}  // namespace pesao
