#include "pesao/objectgen.hpp"

#include <algorithm>
#include <array>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "pesao/geometry.hpp"

namespace pesao {

BlockCountRange block_count_range(Complexity c) {
  switch (c) {
    case Complexity::Easy: return {4, 6};
    case Complexity::Medium: return {7, 10};
    case Complexity::Hard: return {11, 15};
  }
  return {};
}

std::vector<Voxel> Block::voxels() const {
  std::vector<Voxel> out;
  for (int z = 0; z < sz; ++z)
    for (int y = 0; y < sy; ++y)
      for (int x = 0; x < sx; ++x) out.push_back({origin.x + x, origin.y + y, origin.z + z});
  return out;
}

std::vector<Voxel> BlockObject::voxels() const {
  std::vector<Voxel> out;
  for (const auto& b : blocks) {
    auto v = b.voxels();
    out.insert(out.end(), v.begin(), v.end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Voxel> BlockObject::base() const {
  std::vector<Voxel> out;
  for (const auto& v : voxels())
    if (v.z == 0) out.push_back(v);
  return out;
}

int BlockObject::block_of(const Voxel& v) const {
  for (std::size_t i = 0; i < blocks.size(); ++i)
    if (blocks[i].contains(v)) return static_cast<int>(i);
  return -1;
}

VoxelGrid BlockObject::grid() const {
  VoxelGrid g;
  for (const auto& v : voxels())
    if (g.in_bounds(v.x, v.y, v.z)) g.set(v);
  return g;
}

namespace {

bool face_connected(const std::vector<Voxel>& voxels) {
  if (voxels.empty()) return false;
  std::set<Voxel> all(voxels.begin(), voxels.end());
  std::set<Voxel> seen{voxels.front()};
  std::vector<Voxel> stack{voxels.front()};
  while (!stack.empty()) {
    const Voxel v = stack.back();
    stack.pop_back();
    for (int f = 0; f < 6; ++f) {
      const Voxel n = face_neighbor(v, f);
      if (all.count(n) && seen.insert(n).second) stack.push_back(n);
    }
  }
  return seen.size() == all.size();
}

bool blocks_touch(const Block& a, const Block& b) {
  for (const auto& v : a.voxels())
    for (int f = 0; f < 6; ++f)
      if (b.contains(face_neighbor(v, f))) return true;
  return false;
}

// Every block shows at least one face to one of the eight sector stations.
bool all_blocks_observable(const BlockObject& obj) {
  const VoxelGrid grid = obj.grid();
  const auto vox = obj.voxels();
  int minx = kGridExtent, maxx = 0, miny = kGridExtent, maxy = 0, maxz = 0;
  for (const auto& v : vox) {
    minx = std::min(minx, v.x);
    maxx = std::max(maxx, v.x);
    miny = std::min(miny, v.y);
    maxy = std::max(maxy, v.y);
    maxz = std::max(maxz, v.z);
  }
  const Vec3 center{(minx + maxx + 1) / 2.0, (miny + maxy + 1) / 2.0, (maxz + 1) / 2.0};
  std::vector<bool> seen(obj.blocks.size(), false);
  for (int s = 0; s < 8; ++s) {
    const Vec3 eye = center + sector_station_offset(s) * (1.0 / kVoxelEdge);
    for (const auto& f : visible_faces(grid, eye)) {
      const int b = obj.block_of(f.voxel);
      if (b >= 0) seen[static_cast<std::size_t>(b)] = true;
    }
  }
  return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
}

constexpr std::array<std::array<int, 2>, 4> kFootprints{{{1, 1}, {2, 1}, {1, 2}, {2, 2}}};

// All placements of a block with footprint (sx, sy) sharing a face with `parent`.
std::vector<Block> adjacent_placements(const Block& parent, int sx, int sy) {
  std::vector<Block> out;
  const Voxel& p = parent.origin;
  // Same layer, beside the parent.
  for (int y = p.y - sy + 1; y <= p.y + parent.sy - 1; ++y) {
    out.push_back({{p.x + parent.sx, y, p.z}, sx, sy, 1});
    out.push_back({{p.x - sx, y, p.z}, sx, sy, 1});
  }
  for (int x = p.x - sx + 1; x <= p.x + parent.sx - 1; ++x) {
    out.push_back({{x, p.y + parent.sy, p.z}, sx, sy, 1});
    out.push_back({{x, p.y - sy, p.z}, sx, sy, 1});
  }
  // Stacked above or hung below.
  for (int x = p.x - sx + 1; x <= p.x + parent.sx - 1; ++x)
    for (int y = p.y - sy + 1; y <= p.y + parent.sy - 1; ++y) {
      out.push_back({{x, y, p.z + 1}, sx, sy, 1});
      if (p.z > 0) out.push_back({{x, y, p.z - 1}, sx, sy, 1});
    }
  return out;
}

bool fits(const VoxelGrid& grid, const Block& b) {
  for (const auto& v : b.voxels())
    if (!grid.in_bounds(v.x, v.y, v.z) || grid.occupied(v)) return false;
  return true;
}

VoxelGrid grid_without(const BlockObject& obj, int skip) {
  VoxelGrid g;
  for (std::size_t i = 0; i < obj.blocks.size(); ++i) {
    if (static_cast<int>(i) == skip) continue;
    for (const auto& v : obj.blocks[i].voxels()) g.set(v);
  }
  return g;
}

Block rotate_block(const Block& b) {
  return {{-b.origin.y - b.sy, b.origin.x, b.origin.z}, b.sy, b.sx, b.sz};
}

Voxel rotate_voxel(const Voxel& v) { return {-v.y - 1, v.x, v.z}; }

std::vector<Voxel> normalized(std::vector<Voxel> v) {
  if (v.empty()) return v;
  int mx = v[0].x, my = v[0].y, mz = v[0].z;
  for (const auto& p : v) {
    mx = std::min(mx, p.x);
    my = std::min(my, p.y);
    mz = std::min(mz, p.z);
  }
  for (auto& p : v) p = {p.x - mx, p.y - my, p.z - mz};
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

std::optional<std::string> validate(const BlockObject& obj) {
  if (obj.blocks.empty()) return "object has no blocks";
  VoxelGrid g;
  std::size_t total = 0;
  for (const auto& b : obj.blocks) {
    if (b.sx < 1 || b.sy < 1 || b.sz < 1) return "block with empty extent";
    for (const auto& v : b.voxels()) {
      if (!g.in_bounds(v.x, v.y, v.z)) return "voxel outside the object grid";
      if (g.occupied(v)) return "overlapping blocks";
      g.set(v);
      ++total;
    }
  }
  const auto vox = obj.voxels();
  if (vox.size() != total) return "overlapping blocks";
  if (!face_connected(vox)) return "voxel set is not face-connected";
  if (obj.base().empty()) return "no voxel rests on the base plane";
  if (!block_count_range(obj.complexity).contains(obj.block_count()))
    return "block count outside the complexity range";
  return std::nullopt;
}

BlockObject generate_object(Complexity c, std::uint64_t seed) {
  const auto range = block_count_range(c);
  for (std::uint64_t attempt = 0;; ++attempt) {
    Rng rng = make_rng(mix_seed(seed, static_cast<std::uint64_t>(c) + 1, attempt));
    const int n = range.min + static_cast<int>(uniform_index(rng, range.max - range.min + 1));

    BlockObject obj;
    obj.complexity = c;
    obj.seed = seed;
    const auto& base_fp = kFootprints[1 + uniform_index(rng, 3)];
    obj.blocks.push_back({{2 + static_cast<int>(uniform_index(rng, 2)),
                           2 + static_cast<int>(uniform_index(rng, 2)), 0},
                          base_fp[0], base_fp[1], 1});
    VoxelGrid grid = obj.grid();

    for (int tries = 0; obj.block_count() < n && tries < 500; ++tries) {
      const Block& parent = obj.blocks[uniform_index(rng, obj.blocks.size())];
      // Mostly unit and bar blocks; plates are rarer.
      const std::size_t fp_pick = uniform_index(rng, 7);
      const auto& fp = kFootprints[fp_pick < 3 ? 0 : fp_pick < 5 ? 1 : fp_pick < 6 ? 2 : 3];
      const auto options = adjacent_placements(parent, fp[0], fp[1]);
      const Block cand = options[uniform_index(rng, options.size())];
      if (!fits(grid, cand)) continue;
      obj.blocks.push_back(cand);
      for (const auto& v : cand.voxels()) grid.set(v);
    }
    if (obj.block_count() != n) continue;
    if (validate(obj)) continue;
    if (!all_blocks_observable(obj)) continue;
    return obj;
  }
}

BlockObject rotate_yaw(const BlockObject& obj, int quarter_turns) {
  BlockObject out = obj;
  const int turns = ((quarter_turns % 4) + 4) % 4;
  for (int t = 0; t < turns; ++t)
    for (auto& b : out.blocks) b = rotate_block(b);
  int mx = kGridExtent, my = kGridExtent, mz = kGridExtent;
  for (const auto& b : out.blocks) {
    mx = std::min(mx, b.origin.x);
    my = std::min(my, b.origin.y);
    mz = std::min(mz, b.origin.z);
  }
  for (auto& b : out.blocks) b.origin = {b.origin.x - mx, b.origin.y - my, b.origin.z - mz};
  return out;
}

std::vector<Voxel> canonical_form(std::span<const Voxel> voxels) {
  std::vector<Voxel> cur(voxels.begin(), voxels.end());
  std::vector<Voxel> best = normalized(cur);
  for (int t = 1; t < 4; ++t) {
    for (auto& v : cur) v = rotate_voxel(v);
    auto cand = normalized(cur);
    if (cand < best) best = std::move(cand);
  }
  return best;
}

std::vector<Voxel> canonical_form(const BlockObject& obj) {
  const auto v = obj.voxels();
  return canonical_form(std::span<const Voxel>(v));
}

BlockObject canonical_object(const BlockObject& obj) {
  BlockObject best;
  std::vector<Voxel> best_vox;
  for (int t = 0; t < 4; ++t) {
    BlockObject cand = rotate_yaw(obj, t);
    std::sort(cand.blocks.begin(), cand.blocks.end());
    auto vox = cand.voxels();
    if (t == 0 || vox < best_vox || (vox == best_vox && cand.blocks < best.blocks)) {
      best = std::move(cand);
      best_vox = std::move(vox);
    }
  }
  return best;
}

bool is_same(const BlockObject& a, const BlockObject& b) {
  return canonical_form(a) == canonical_form(b);
}

int block_edit_distance(const BlockObject& a, const BlockObject& b) {
  std::multiset<Block> sa(a.blocks.begin(), a.blocks.end());
  std::multiset<Block> sb(b.blocks.begin(), b.blocks.end());
  std::vector<Block> diff;
  std::set_symmetric_difference(sa.begin(), sa.end(), sb.begin(), sb.end(),
                                std::back_inserter(diff));
  return static_cast<int>(diff.size());
}

BlockObject mutate_different(const BlockObject& obj, std::uint64_t seed) {
  const auto range = block_count_range(obj.complexity);
  std::vector<BlockObject> candidates;
  auto with_blocks = [&](std::vector<Block> blocks) {
    BlockObject m = obj;
    m.blocks = std::move(blocks);
    return m;
  };

  const int n = obj.block_count();
  // remove
  if (n - 1 >= range.min)
    for (int k = 0; k < n; ++k) {
      auto blocks = obj.blocks;
      blocks.erase(blocks.begin() + k);
      candidates.push_back(with_blocks(std::move(blocks)));
    }
  // add
  if (n + 1 <= range.max) {
    const VoxelGrid grid = obj.grid();
    for (const auto& parent : obj.blocks)
      for (const auto& fp : kFootprints)
        for (const auto& b : adjacent_placements(parent, fp[0], fp[1]))
          if (fits(grid, b)) {
            auto blocks = obj.blocks;
            blocks.push_back(b);
            candidates.push_back(with_blocks(std::move(blocks)));
          }
  }
  // resize and move
  for (int k = 0; k < n; ++k) {
    const VoxelGrid rest = grid_without(obj, k);
    for (const auto& fp : kFootprints) {
      Block resized = obj.blocks[static_cast<std::size_t>(k)];
      if (resized.sx == fp[0] && resized.sy == fp[1]) continue;
      resized.sx = fp[0];
      resized.sy = fp[1];
      if (fits(rest, resized)) {
        auto blocks = obj.blocks;
        blocks[static_cast<std::size_t>(k)] = resized;
        candidates.push_back(with_blocks(std::move(blocks)));
      }
    }
    const Block& moving = obj.blocks[static_cast<std::size_t>(k)];
    for (int j = 0; j < n; ++j) {
      if (j == k) continue;
      for (const auto& b :
           adjacent_placements(obj.blocks[static_cast<std::size_t>(j)], moving.sx, moving.sy)) {
        if (b == moving || !fits(rest, b)) continue;
        auto blocks = obj.blocks;
        blocks[static_cast<std::size_t>(k)] = b;
        candidates.push_back(with_blocks(std::move(blocks)));
      }
    }
  }

  Rng rng = make_rng(mix_seed(seed, 0x6d757461ULL));
  for (std::size_t i = candidates.size(); i > 1; --i)
    std::swap(candidates[i - 1], candidates[uniform_index(rng, i)]);

  for (auto& cand : candidates) {
    if (validate(cand)) continue;
    if (is_same(obj, cand)) continue;
    if (!all_blocks_observable(cand)) continue;
    cand.id = mutant_id(obj.id, seed);
    cand.seed = seed;
    return cand;
  }
  throw Error(ErrorCode::GenerationExhausted,
              "no single-block edit of object '" + obj.id + "' keeps the class invariants");
}

std::vector<Voxel> PartDecomposition::part_voxels(const BlockObject& obj, int p) const {
  std::vector<Voxel> out;
  for (int b : parts[static_cast<std::size_t>(p)]) {
    auto v = obj.blocks[static_cast<std::size_t>(b)].voxels();
    out.insert(out.end(), v.begin(), v.end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

PartDecomposition decompose_parts(const BlockObject& obj) {
  const auto vox = obj.voxels();
  std::array<int, 3> lo{kGridExtent, kGridExtent, kGridExtent};
  std::array<int, 3> hi{0, 0, 0};
  for (const auto& v : vox) {
    const std::array<int, 3> c{v.x, v.y, v.z};
    for (int a = 0; a < 3; ++a) {
      lo[a] = std::min(lo[a], c[a]);
      hi[a] = std::max(hi[a], c[a]);
    }
  }
  // Doubled coordinates keep the comparison in integers.
  auto octant = [&](const Block& b) {
    const std::array<int, 3> center{2 * b.origin.x + b.sx, 2 * b.origin.y + b.sy,
                                    2 * b.origin.z + b.sz};
    int o = 0;
    for (int a = 0; a < 3; ++a)
      if (center[a] > lo[a] + hi[a] + 1) o |= 1 << a;
    return o;
  };

  const int n = obj.block_count();
  PartDecomposition out;
  out.part_of_block.assign(static_cast<std::size_t>(n), -1);
  for (int oct = 0; oct < 8; ++oct) {
    for (int seed_block = 0; seed_block < n; ++seed_block) {
      if (out.part_of_block[static_cast<std::size_t>(seed_block)] >= 0) continue;
      if (octant(obj.blocks[static_cast<std::size_t>(seed_block)]) != oct) continue;
      const int part = out.count();
      out.parts.emplace_back();
      std::vector<int> stack{seed_block};
      out.part_of_block[static_cast<std::size_t>(seed_block)] = part;
      while (!stack.empty()) {
        const int b = stack.back();
        stack.pop_back();
        out.parts.back().push_back(b);
        for (int o = 0; o < n; ++o) {
          if (out.part_of_block[static_cast<std::size_t>(o)] >= 0) continue;
          if (octant(obj.blocks[static_cast<std::size_t>(o)]) != oct) continue;
          if (!blocks_touch(obj.blocks[static_cast<std::size_t>(b)],
                            obj.blocks[static_cast<std::size_t>(o)]))
            continue;
          out.part_of_block[static_cast<std::size_t>(o)] = part;
          stack.push_back(o);
        }
      }
      std::sort(out.parts.back().begin(), out.parts.back().end());
    }
  }
  return out;
}

std::vector<const BlockObject*> ObjectLibrary::of_class(Complexity c) const {
  std::vector<const BlockObject*> out;
  for (const auto& o : objects)
    if (o.complexity == c) out.push_back(&o);
  return out;
}

const BlockObject* ObjectLibrary::find(std::string_view id) const {
  for (const auto& o : objects)
    if (o.id == id) return &o;
  return nullptr;
}

ObjectLibrary generate_library(std::uint64_t seed) {
  ObjectLibrary lib;
  lib.seed = seed;
  for (auto c : kComplexities) {
    const char prefix = "EMH"[static_cast<int>(c)];
    std::vector<BlockObject> chosen;
    for (std::uint64_t k = 0; chosen.size() < static_cast<std::size_t>(kObjectsPerClass); ++k) {
      BlockObject obj = generate_object(c, mix_seed(seed, static_cast<std::uint64_t>(c), k));
      const bool duplicate = std::any_of(chosen.begin(), chosen.end(),
                                         [&](const BlockObject& o) { return is_same(o, obj); });
      if (duplicate) continue;
      obj.id = std::string(1, prefix) + std::to_string(chosen.size() + 1);
      chosen.push_back(std::move(obj));
    }
    for (auto& o : chosen) lib.objects.push_back(std::move(o));
  }
  return lib;
}

std::optional<std::string> validate(const ObjectLibrary& lib) {
  for (auto c : kComplexities) {
    const auto objs = lib.of_class(c);
    if (objs.size() != static_cast<std::size_t>(kObjectsPerClass))
      return "class " + std::string(to_string(c)) + " does not hold exactly 4 objects";
    for (std::size_t i = 0; i < objs.size(); ++i) {
      if (auto err = validate(*objs[i])) return objs[i]->id + ": " + *err;
      for (std::size_t j = i + 1; j < objs.size(); ++j)
        if (is_same(*objs[i], *objs[j])) return objs[i]->id + " and " + objs[j]->id + " are the same";
    }
  }
  return std::nullopt;
}

std::string mutant_id(std::string_view base_id, std::uint64_t seed) {
  return std::string(base_id) + "/m" + std::to_string(seed);
}

BlockObject resolve_object(const ObjectLibrary& lib, std::string_view id) {
  const auto slash = id.find("/m");
  const std::string_view base = id.substr(0, slash);
  const BlockObject* obj = lib.find(base);
  if (!obj) throw Error(ErrorCode::InvalidArgument, "unknown object id '" + std::string(id) + "'");
  if (slash == std::string_view::npos) return *obj;
  const std::string seed_text(id.substr(slash + 2));
  std::size_t used = 0;
  std::uint64_t seed = 0;
  try {
    seed = std::stoull(seed_text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != seed_text.size() || seed_text.empty())
    throw Error(ErrorCode::InvalidArgument, "malformed mutant id '" + std::string(id) + "'");
  return mutate_different(*obj, seed);
}

std::uint64_t count_configurations(const ObjectLibrary& lib, const ConfigurationFilter& filter) {
  std::uint64_t orientations = 0;
  for (int o : kOrientationDiffs)
    if (!filter.orientation_diff || *filter.orientation_diff == o) ++orientations;
  std::uint64_t total = 0;
  for (auto c : kComplexities) {
    if (filter.complexity && *filter.complexity != c) continue;
    const std::uint64_t k = lib.of_class(c).size();
    for (auto s : kStartPositions) {
      if (filter.start && *filter.start != s) continue;
      // The long start sees both posts at equal distance, so pair order is
      // not distinguishable there.
      const std::uint64_t pairs = s == StartPosition::Long ? k * (k + 1) / 2 : k * k;
      total += pairs * orientations;
    }
  }
  return total;
}

void write_object(std::ostream& os, const BlockObject& obj) {
  os << "object " << obj.id << ' ' << to_string(obj.complexity) << ' ' << obj.seed << '\n';
  for (const auto& v : obj.voxels()) os << v.x << ' ' << v.y << ' ' << v.z << '\n';
}

void write_library(std::ostream& os, const ObjectLibrary& lib) {
  for (std::size_t i = 0; i < lib.objects.size(); ++i) {
    if (i) os << '\n';
    write_object(os, lib.objects[i]);
  }
}

std::vector<ObjectRecord> read_library(std::istream& is) {
  std::vector<ObjectRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    if (line.rfind("object ", 0) == 0) {
      ObjectRecord rec;
      std::string tag, cls;
      if (!(ls >> tag >> rec.id >> cls >> rec.seed)) throw ParseError(lineno, "malformed object header");
      auto c = parse_complexity(cls);
      if (!c) throw ParseError(lineno, "unknown complexity '" + cls + "'");
      rec.complexity = *c;
      out.push_back(std::move(rec));
      continue;
    }
    if (out.empty()) throw ParseError(lineno, "voxel line before any object header");
    Voxel v;
    std::string extra;
    if (!(ls >> v.x >> v.y >> v.z) || (ls >> extra)) throw ParseError(lineno, "malformed voxel line");
    out.back().voxels.push_back(v);
  }
  return out;
}

}  // namespace pesao
