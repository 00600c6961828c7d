#include <algorithm>
#include <set>
#include <sstream>

#include "doctest.h"
#include "pesao/objectgen.hpp"

using namespace pesao;

namespace {

// Brute-force congruence: try each quarter turn of b (clockwise, built from an
// explicit rotation matrix) and compare translate-normalized sets.
std::set<std::array<int, 3>> norm_set(const std::vector<std::array<int, 3>>& pts) {
  int mx = 1 << 20, my = 1 << 20, mz = 1 << 20;
  for (const auto& p : pts) {
    mx = std::min(mx, p[0]);
    my = std::min(my, p[1]);
    mz = std::min(mz, p[2]);
  }
  std::set<std::array<int, 3>> out;
  for (const auto& p : pts) out.insert({p[0] - mx, p[1] - my, p[2] - mz});
  return out;
}

bool brute_force_same(const BlockObject& a, const BlockObject& b) {
  std::vector<std::array<int, 3>> pa, pb;
  for (const auto& v : a.voxels()) pa.push_back({v.x, v.y, v.z});
  for (const auto& v : b.voxels()) pb.push_back({v.x, v.y, v.z});
  const auto target = norm_set(pa);
  static const int rot[4][2][2] = {{{1, 0}, {0, 1}}, {{0, 1}, {-1, 0}}, {{-1, 0}, {0, -1}},
                                   {{0, -1}, {1, 0}}};
  for (const auto& r : rot) {
    std::vector<std::array<int, 3>> q;
    for (const auto& p : pb)
      q.push_back({r[0][0] * p[0] + r[0][1] * p[1], r[1][0] * p[0] + r[1][1] * p[1], p[2]});
    if (norm_set(q) == target) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("block count ranges are disjoint and ordered") {
  const auto e = block_count_range(Complexity::Easy);
  const auto m = block_count_range(Complexity::Medium);
  const auto h = block_count_range(Complexity::Hard);
  CHECK(e.min == 4);
  CHECK(e.max == 6);
  CHECK(e.max < m.min);
  CHECK(m.max < h.min);
  CHECK(h.max == 15);
}

TEST_CASE("generate_object is deterministic and valid") {
  for (std::uint64_t s = 0; s < 40; ++s)
    for (auto c : kComplexities) {
      const auto a = generate_object(c, s);
      const auto b = generate_object(c, s);
      CHECK(a.voxels() == b.voxels());
      CHECK_FALSE(validate(a).has_value());
      CHECK(block_count_range(c).contains(a.block_count()));
    }
  for (std::uint64_t s = 0; s < 40; ++s)
    CHECK(generate_object(Complexity::Hard, s).block_count() >
          generate_object(Complexity::Easy, s).block_count());
}

TEST_CASE("validate rejects broken objects") {
  BlockObject obj;
  CHECK(validate(obj).has_value());
  obj.complexity = Complexity::Easy;
  obj.blocks = {{{0, 0, 0}}, {{1, 0, 0}}, {{2, 0, 0}}, {{4, 0, 0}}};
  CHECK(validate(obj).value().find("connected") != std::string::npos);
  obj.blocks = {{{0, 0, 1}}, {{1, 0, 1}}, {{2, 0, 1}}, {{3, 0, 1}}};
  CHECK(validate(obj).value().find("base") != std::string::npos);
  obj.blocks = {{{0, 0, 0}}, {{1, 0, 0}}, {{2, 0, 0}}};
  CHECK(validate(obj).value().find("range") != std::string::npos);
}

TEST_CASE("canonical form is yaw invariant and idempotent") {
  for (std::uint64_t s = 0; s < 30; ++s) {
    const auto a = generate_object(Complexity::Medium, s);
    const auto canon = canonical_form(a);
    for (int t = 0; t < 4; ++t) CHECK(canonical_form(rotate_yaw(a, t)) == canon);
    CHECK(canonical_form(canonical_object(a)) == canon);
    CHECK(canonical_object(a).voxels() == canon);
    // Rotated copies agree on the block list too.
    CHECK(canonical_object(rotate_yaw(a, 2)).blocks == canonical_object(a).blocks);
  }
}

TEST_CASE("is_same agrees with brute-force rotation oracle on 200 random pairs") {
  int agreements = 0;
  for (std::uint64_t s = 0; s < 200; ++s) {
    const auto a = generate_object(Complexity::Easy, s);
    BlockObject b;
    if (s % 3 == 0)
      b = rotate_yaw(a, static_cast<int>(s % 4));
    else if (s % 3 == 1)
      b = generate_object(Complexity::Easy, s + 1000);
    else
      b = mutate_different(a, s);
    if (is_same(a, b) == brute_force_same(a, b)) ++agreements;
  }
  CHECK(agreements == 200);
}

TEST_CASE("is_same is an equivalence relation") {
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto a = generate_object(Complexity::Easy, s % 7);
    const auto b = rotate_yaw(generate_object(Complexity::Easy, (s / 7) % 7), static_cast<int>(s));
    const auto c = rotate_yaw(generate_object(Complexity::Easy, s % 5), 3);
    CHECK(is_same(a, a));
    CHECK(is_same(a, b) == is_same(b, a));
    if (is_same(a, b) && is_same(b, c)) CHECK(is_same(a, c));
  }
}

TEST_CASE("mutate_different keeps class and breaks congruence with a small edit") {
  for (std::uint64_t s = 0; s < 60; ++s) {
    const auto c = kComplexities[s % 3];
    auto obj = generate_object(c, s);
    obj.id = "X";
    const auto m = mutate_different(obj, s * 13 + 1);
    CHECK_FALSE(is_same(obj, m));
    CHECK_FALSE(brute_force_same(obj, m));
    CHECK(m.complexity == obj.complexity);
    CHECK_FALSE(validate(m).has_value());
    CHECK(block_edit_distance(obj, m) <= 2);
    CHECK(block_edit_distance(obj, m) >= 1);
    CHECK(m.voxels() == mutate_different(obj, s * 13 + 1).voxels());
    CHECK(m.id == mutant_id("X", s * 13 + 1));
  }
}

TEST_CASE("mutate_different signals exhaustion") {
  // Six blocks labelled hard: every single edit leaves the count outside 11-15.
  BlockObject obj;
  obj.complexity = Complexity::Hard;
  obj.id = "tower";
  obj.blocks = {{{0, 0, 0}, 2, 2, 1}, {{0, 0, 1}, 2, 2, 1}, {{0, 0, 2}, 2, 2, 1},
                {{0, 0, 3}, 2, 2, 1}, {{0, 0, 4}, 2, 2, 1}, {{0, 0, 5}, 2, 2, 1}};
  try {
    (void)mutate_different(obj, 1);
    FAIL("expected generation-exhausted error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::GenerationExhausted);
  }
}

TEST_CASE("part decomposition partitions the blocks") {
  for (std::uint64_t s = 0; s < 30; ++s) {
    const auto obj = canonical_object(generate_object(kComplexities[s % 3], s));
    const auto parts = decompose_parts(obj);
    std::vector<int> seen(obj.blocks.size(), 0);
    for (const auto& p : parts.parts)
      for (int b : p) seen[static_cast<std::size_t>(b)]++;
    for (int n : seen) CHECK(n == 1);
    std::size_t total = 0;
    for (int p = 0; p < parts.count(); ++p) total += parts.part_voxels(obj, p).size();
    CHECK(total == obj.voxels().size());
  }
}

TEST_CASE("library holds four pairwise-different objects per class") {
  const auto lib = generate_library(7);
  CHECK_FALSE(validate(lib).has_value());
  CHECK(lib.objects.size() == 12);
  CHECK(lib.find("E1") != nullptr);
  CHECK(lib.find("H4") != nullptr);
  const auto m = resolve_object(lib, mutant_id("M2", 5));
  CHECK_FALSE(is_same(m, *lib.find("M2")));
  CHECK_THROWS_AS(resolve_object(lib, "Z9"), Error);
  CHECK_THROWS_AS(resolve_object(lib, "E1/mxx"), Error);
}

TEST_CASE("configuration counting") {
  const auto lib = generate_library(1);
  CHECK(count_configurations(lib) == 378);
  CHECK(count_configurations(lib) == 3 * (2 * 16 + 10) * 3);
  CHECK(count_configurations(lib, {StartPosition::Long, Complexity::Easy, 0}) == 10);
  CHECK(count_configurations(lib, {StartPosition::Short, Complexity::Easy, std::nullopt}) +
            count_configurations(lib, {StartPosition::Corner, Complexity::Easy, std::nullopt}) ==
        96);
}

TEST_CASE("library export format") {
  const auto lib = generate_library(3);
  std::ostringstream os;
  write_library(os, lib);
  const std::string text = os.str();
  CHECK(text.rfind("object E1 easy ", 0) == 0);
  std::istringstream is(text);
  const auto recs = read_library(is);
  REQUIRE(recs.size() == 12);
  for (std::size_t i = 0; i < recs.size(); ++i) {
    CHECK(recs[i].id == lib.objects[i].id);
    CHECK(recs[i].voxels == lib.objects[i].voxels());
  }
  std::istringstream bad("object E1 easy 3\n1 2\n");
  CHECK_THROWS_AS(read_library(bad), ParseError);
}
