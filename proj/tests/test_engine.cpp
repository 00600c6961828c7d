#include <cmath>
#include <set>

#include "doctest.h"
#include "pesao/engine.hpp"

using namespace pesao;

namespace {

const ObjectLibrary& objects() {
  static const ObjectLibrary l = generate_library(5);
  return l;
}

Scene scene_for(std::uint64_t seed, std::size_t i) { return build_scene(sample_session(objects(), seed)[i], objects()); }

Scene scene_with(GroundTruth g, Complexity c, std::uint64_t seed) {
  for (std::uint64_t s = seed;; ++s)
    for (const auto& cfg : sample_session(objects(), s))
      if (cfg.ground_truth == g && cfg.complexity == c) return build_scene(cfg, objects());
}

}  // namespace

TEST_CASE("sample_choice") {
  auto rng = make_rng(1);
  const double one[] = {1.0};
  const double degenerate[] = {1.0, 0.0};
  for (int i = 0; i < 100; ++i) {
    CHECK(sample_choice(one, rng) == 0);
    CHECK(sample_choice(degenerate, rng) == 0);
  }
  const double half[] = {0.5, 0.5};
  const int n = 10000;
  int first = 0;
  for (int i = 0; i < n; ++i)
    if (sample_choice(half, rng) == 0) ++first;
  CHECK(std::abs(first - n / 2.0) <= 3 * std::sqrt(n * 0.25));
  const double zero[] = {0.0, 0.0};
  CHECK_THROWS_AS(sample_choice(zero, rng), Error);
  CHECK_THROWS_AS(sample_choice(std::span<const double>{}, rng), Error);
}

TEST_CASE("default library parses, validates and round-trips") {
  const auto lib = default_library();
  CHECK(lib.methods.size() == 5);
  CHECK_NOTHROW(validate(lib));
  const auto text = write_library_string(lib);
  CHECK(parse_library_string(text) == lib);
  CHECK(write_library_string(parse_library_string(text)) == text);
  for (const auto& m : lib.methods) {
    bool unbound = false;
    for (const auto& n : m.nodes)
      for (const auto& p : n.params) unbound = unbound || !p.value;
    CHECK(m.is_script() == !unbound);
  }
  CHECK_FALSE(lib.methods[2].is_script());
}

TEST_CASE("library grammar errors") {
  CHECK_THROWS_AS(parse_library_string("method a 1\nnode x Bogus\nentry x\nexit x\nend\n"), ParseError);
  CHECK_THROWS_AS(parse_library_string("method a 1\nnode x GlobalGist\nentry x\nexit x\n"), ParseError);
  // Weights leaving a choice point must sum to one.
  const char* bad = "method a 1\nchoice c\nnode x GlobalGist\nnode y DivideAndConquer\narc c x 0.5\narc c y 0.4\n"
                    "entry c\nexit x\nexit y\nend\n";
  try {
    parse_library_string(bad);
    FAIL("expected configuration error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Configuration);
  }
  CHECK_THROWS_AS(parse_library_string("method a 0.5\nnode x GlobalGist\nentry x\nexit x\nend\n"), Error);
  try {
    parse_library_string("method a 1\nnode x GlobalGist\nnode y GlobalGist\narc x y 1\nentry x\nexit x\nend\nfoo\n");
    FAIL("expected parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 8);
  }
}

TEST_CASE("instantiate binds parameters") {
  const auto lib = default_library();
  CognitiveProgram plain;
  plain.name = "p";
  plain.nodes = {{"d", false, OperationKind::DivideAndConquer, {}}};
  plain.exits = {0};
  CHECK(instantiate(plain, {}) == plain);

  const CognitiveProgram* altfix = nullptr;
  for (const auto& m : lib.methods)
    if (m.name == "altfix") altfix = &m;
  REQUIRE(altfix != nullptr);
  const auto script = instantiate(*altfix, {{"f.part", "3"}});
  CHECK(script.is_script());
  CHECK(script.nodes[0].param("part") == "3");
  CHECK(script.nodes[0].param("reps") == "2");
  CHECK(script.arcs == altfix->arcs);

  CHECK_THROWS_AS(instantiate(lib.methods[2], {{"c.part", "1"}}), Error);
  try {
    instantiate(lib.methods[2], {{"c.part", "1"}});
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnboundParameter);
  }
  CHECK(instantiate(lib.methods[2], {{"part", "1"}}).is_script());
}

TEST_CASE("GlobalGist reaches the coverage target") {
  for (std::uint64_t s = 0; s < 6; ++s) {
    Executive ex(scene_for(s, 0), NoiseModel{}, s);
    ex.initialize();
    ex.deploy(OperationKind::GlobalGist, {{"coverage", "4"}});
    CHECK(std::popcount(static_cast<unsigned>(ex.state().visited_sectors[0])) >= 4);
    CHECK(std::popcount(static_cast<unsigned>(ex.state().visited_sectors[1])) >= 4);
  }
}

TEST_CASE("DivideAndConquer partitions the blocks of equal objects") {
  for (std::uint64_t s = 0; s < 6; ++s) {
    const Scene sc = scene_with(GroundTruth::Same, Complexity::Easy, s * 10);
    Executive ex(sc, NoiseModel{}, s);
    ex.initialize();
    CHECK(ex.deploy(OperationKind::DivideAndConquer, {}) == DeployStatus::Candidate);
    const auto parts = decompose_parts(sc.object_a);
    std::vector<int> owner(sc.object_a.blocks.size(), 0);
    for (int p : ex.state().conquered)
      for (int b : parts.parts[static_cast<std::size_t>(p)]) owner[static_cast<std::size_t>(b)]++;
    for (int o : owner) CHECK(o == 1);
    CHECK(ex.state().candidate == GroundTruth::Same);
  }
}

TEST_CASE("AlternatingFixation keeps the head still; AlternatingView moves it") {
  int fixation_runs = 0;
  for (std::uint64_t s = 0; s < 10; ++s) {
    const Scene sc = scene_with(GroundTruth::Same, Complexity::Medium, s * 7);
    for (bool view : {false, true}) {
      Executive ex(sc, NoiseModel{}, s);
      ex.initialize();
      const std::size_t before = ex.trace().records.size();
      const auto kind = view ? OperationKind::AlternatingView : OperationKind::AlternatingFixation;
      const auto st = ex.deploy(kind, {{"part", "0"}, {"reps", "2"}});
      if (st == DeployStatus::NotApplicable) {
        CHECK(ex.trace().records.size() == before);
        continue;
      }
      std::vector<FixationRecord> run;
      for (std::size_t i = before; i < ex.trace().records.size(); ++i)
        if (ex.trace().records[i].annotation == kind) run.push_back(ex.trace().records[i]);
      REQUIRE(run.size() >= 4);
      int alternations = 0;
      double max_move = 0.0, max_rot = 0.0;
      for (std::size_t i = 1; i < run.size(); ++i) {
        if (run[i].target != run[i - 1].target) ++alternations;
        max_move = std::max(max_move, (run[i].head.position - run[0].head.position).norm());
        max_rot = std::max(max_rot, angle_between_deg(run[i].head.forward(), run[0].head.forward()));
      }
      CHECK(alternations >= 3);
      for (const auto& r : run) CHECK(r.element->part == 0);
      if (!view) {
        ++fixation_runs;
        CHECK(max_move < 0.10);
        CHECK(max_rot < 10.0);
      } else {
        CHECK(max_move >= 0.10);
      }
    }
  }
  CHECK(fixation_runs > 0);
}

TEST_CASE("noise-free trials answer exactly with at least six target fixations") {
  const auto lib = default_library();
  int n = 0;
  for (std::uint64_t s = 0; s < 8; ++s)
    for (const auto& cfg : sample_session(objects(), s)) {
      const auto r = run_trial(cfg, objects(), lib, NoiseModel{}, mix_seed(s, cfg.trial_index));
      CHECK(r.answer == cfg.ground_truth);
      CHECK(r.trace.correct);
      const auto m = trace_metrics(r.trace);
      CHECK(m.fixation_count >= 6);
      for (const auto& rec : r.trace.records) CHECK(rec.annotation.has_value());
      ++n;
    }
  CHECK(n == 144);
}

TEST_CASE("trials are deterministic and write stable bytes") {
  const auto lib = default_library();
  const auto cfg = sample_session(objects(), 3)[4];
  for (const auto& noise : {NoiseModel{}, NoiseModel::measured()}) {
    const auto a = run_trial(cfg, objects(), lib, noise, 99);
    const auto b = run_trial(cfg, objects(), lib, noise, 99);
    CHECK(write_trace(a.trace) == write_trace(b.trace));
    CHECK(read_trace_string(write_trace(a.trace)) == a.trace);
  }
}

TEST_CASE("different answers carry a genuine outlier") {
  const auto lib = default_library();
  for (std::uint64_t s = 0; s < 10; ++s) {
    const Scene sc = scene_with(GroundTruth::Different, kComplexities[s % 3], s * 3);
    const auto r = run_trial(sc, lib, NoiseModel{}, s);
    REQUIRE(r.answer == GroundTruth::Different);
    // The OutlierDetection fixations look at a part pair whose voxels differ.
    std::vector<int> pa, pb;
    for (const auto& rec : r.trace.records)
      if (rec.annotation == OperationKind::OutlierDetection && rec.element)
        (rec.target == Target::A ? pa : pb).push_back(rec.element->part);
    REQUIRE_FALSE(pa.empty());
    REQUIRE_FALSE(pb.empty());
    const auto da = decompose_parts(sc.object_a), db = decompose_parts(sc.object_b);
    const int a = pa.back(), b = pb.back();
    const bool differ = a != b || a >= db.count() || da.part_voxels(sc.object_a, a) != db.part_voxels(sc.object_b, b);
    CHECK(differ);
  }
}
