#include <sstream>

#include "doctest.h"
#include "pesao/tracefmt.hpp"

using namespace pesao;

namespace {

TraceMeta meta() {
  TraceMeta m;
  m.config.object_a = "E2";
  m.config.object_b = "E2";
  m.config.start = StartPosition::Short;
  m.config.seed = 77;
  m.engine_version = "test";
  m.seed = 77;
  return m;
}

FixationRecord fix(double t, double dur, Target target, std::optional<OperationKind> k = std::nullopt) {
  FixationRecord r;
  r.t_start = t;
  r.duration_ms = dur;
  r.head.position = {0.3, 2.75, 1.65};
  r.gaze = {2.8, 2.75, 1.5};
  r.target = target;
  if (target != Target::Environment) {
    r.sector = 1;
    r.element = ElementRef{0, 1, 2};
  }
  r.annotation = k;
  return r;
}

Trace random_trace(std::uint64_t seed) {
  auto rng = make_rng(seed);
  Trace t;
  t.meta = meta();
  t.meta.seed = seed;
  double clock = uniform01(rng) * 3;
  const int n = static_cast<int>(uniform_index(rng, 40));
  for (int i = 0; i < n; ++i) {
    FixationRecord r;
    r.t_start = clock;
    r.duration_ms = 50 + 900 * uniform01(rng);
    clock += r.duration_ms / 1000.0 + uniform01(rng);
    r.head.position = {4.3 * uniform01(rng), 3.4 * uniform01(rng), 1.1 + uniform01(rng)};
    r.head.yaw = 360 * uniform01(rng) - 180;
    r.head.pitch = 60 * uniform01(rng) - 30;
    r.head.roll = 1e-3 * standard_normal(rng);
    r.gaze = {4.3 * uniform01(rng), 3.4 * uniform01(rng), 1.4 + 0.3 * uniform01(rng)};
    r.target = static_cast<Target>(uniform_index(rng, 3));
    if (r.on_object()) {
      r.sector = static_cast<int>(uniform_index(rng, 8));
      if (uniform_index(rng, 4) != 0)
        r.element = ElementRef{static_cast<int>(uniform_index(rng, 8)), static_cast<int>(uniform_index(rng, 15)),
                               static_cast<int>(uniform_index(rng, 6))};
    }
    if (uniform_index(rng, 5) != 0) r.annotation = static_cast<OperationKind>(uniform_index(rng, 14));
    t.records.push_back(r);
  }
  double mt = 0;
  for (int i = 0; i < static_cast<int>(uniform_index(rng, 10)); ++i) {
    mt += uniform01(rng) * 5;
    t.motions.push_back({mt, uniform_index(rng, 2) ? MotionKind::Walk : MotionKind::HeadTurn, 3 * uniform01(rng)});
  }
  static const char* notes[] = {"outlier", "dismiss", "candidate_same", "confirmed"};
  for (int i = 0; i < static_cast<int>(uniform_index(rng, 4)); ++i) t.notes.push_back({i * 1.5, notes[i]});
  if (uniform_index(rng, 3) != 0) {
    t.answer = uniform_index(rng, 2) ? GroundTruth::Same : GroundTruth::Different;
    t.correct = uniform_index(rng, 2) == 1;
  }
  quantize(t);
  return t;
}

}  // namespace

TEST_CASE("empty trace writes header and answer only") {
  Trace t;
  t.meta = meta();
  t.answer = GroundTruth::Same;
  t.correct = true;
  const auto text = write_trace(t);
  std::istringstream is(text);
  std::string line;
  int lines = 0, headers = 0;
  while (std::getline(is, line)) {
    ++lines;
    if (line[0] == '#') ++headers;
  }
  CHECK(headers == 4);
  CHECK(lines == 6);
  CHECK(text.find("answer same 1\nend\n") != std::string::npos);
  CHECK(text.rfind("# pesao-sim/1\n", 0) == 0);
}

TEST_CASE("round trip on generated traces") {
  for (std::uint64_t s = 0; s < 300; ++s) {
    const auto t = random_trace(s);
    const auto text = write_trace(t);
    const auto back = read_trace_string(text);
    CHECK(back == t);
    CHECK(write_trace(back) == text);
    if (t.complete() && response_clock_zero(t)) {
      CHECK(trace_metrics(back).head_path_m == trace_metrics(t).head_path_m);
      // Response time covers every fixation inside the response window.
      const auto m = trace_metrics(t);
      double sum = 0.0;
      for (std::size_t i = *response_clock_zero(t); i < t.records.size(); ++i) sum += t.records[i].duration_ms / 1000.0;
      CHECK(m.response_time_s + 1e-9 >= sum);
    }
  }
}

TEST_CASE("reader rejects malformed input") {
  Trace t;
  t.meta = meta();
  t.records = {fix(1.0, 300, Target::A, OperationKind::LocateTargets), fix(2.0, 300, Target::B)};
  t.answer = GroundTruth::Same;
  const auto good = write_trace(t);

  SUBCASE("out-of-order timestamps") {
    std::string bad = good;
    const auto pos = bad.find("F 2 ");
    REQUIRE(pos != std::string::npos);
    bad.replace(pos, 4, "F 0 ");
    CHECK_THROWS_AS(read_trace_string(bad), Error);
    try {
      read_trace_string(bad);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::Validation);
    }
  }
  SUBCASE("unknown operation token") {
    std::string bad = good;
    bad.replace(bad.find("LocateTargets"), 13, "LocateTarget");
    try {
      read_trace_string(bad);
      FAIL("expected parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 5);
    }
  }
  SUBCASE("truncated file") {
    const std::string bad = good.substr(0, good.find("answer"));
    CHECK_THROWS_AS(read_trace_string(bad), ParseError);
    CHECK_THROWS_AS(read_trace_string(good.substr(0, good.size() / 2)), ParseError);
  }
  SUBCASE("sector on environment fixation") {
    Trace u = t;
    u.records[0].target = Target::Environment;
    u.records[0].element.reset();
    CHECK_THROWS_AS(write_trace(u), Error);
  }
  SUBCASE("zero duration") {
    Trace u = t;
    u.records[1].duration_ms = 0;
    CHECK_THROWS_AS(write_trace(u), Error);
  }
}

TEST_CASE("metrics on a hand-built short-start trial") {
  // Observer starts on the post axis, turns round, scans, then compares the
  // two objects from a walk-up position.
  Trace t;
  t.meta = meta();
  t.motions.push_back({0.0, MotionKind::HeadTurn, 0.0});
  t.records.push_back(fix(2.0, 300, Target::Environment, OperationKind::ThreeDLayout));
  t.records.push_back(fix(2.5, 300, Target::Environment, OperationKind::ThreeDLayout));
  t.records.push_back(fix(3.0, 200, Target::A, OperationKind::LocateTargets));  // clock zero
  t.records.push_back(fix(3.2, 200, Target::B, OperationKind::LocateTargets));
  t.motions.push_back({3.4, MotionKind::Walk, 2.0});
  t.records.push_back(fix(5.9, 300, Target::A, OperationKind::AlternatingFixation));
  t.records.push_back(fix(6.2, 300, Target::B, OperationKind::AlternatingFixation));
  t.records.push_back(fix(6.5, 300, Target::Environment));
  t.motions.push_back({6.8, MotionKind::Walk, 3.0});
  t.records.push_back(fix(10.3, 300, Target::A, OperationKind::AlternatingView));
  t.records.push_back(fix(10.6, 400, Target::B, OperationKind::AlternatingView));
  t.answer = GroundTruth::Same;
  t.correct = true;
  const auto m = trace_metrics(read_trace_string(write_trace(t)));
  CHECK(m.fixation_count == 6);
  CHECK(m.head_path_m == doctest::Approx(5.0));
  CHECK(m.response_time_s == doctest::Approx(11.0 - 3.0));

  Trace incomplete = t;
  incomplete.answer.reset();
  CHECK_THROWS_AS(trace_metrics(incomplete), Error);
}
