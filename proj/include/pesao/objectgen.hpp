#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pesao/types.hpp"
#include "pesao/voxelgrid.hpp"

namespace pesao {

struct BlockCountRange {
  int min = 0;
  int max = 0;
  bool contains(int n) const { return n >= min && n <= max; }
};

BlockCountRange block_count_range(Complexity c);

/// Axis-aligned cuboid of voxels. Blocks are one voxel tall; footprints are
/// 1x1, 1x2, 2x1 or 2x2.
struct Block {
  Voxel origin;
  int sx = 1;
  int sy = 1;
  int sz = 1;

  std::vector<Voxel> voxels() const;
  bool contains(const Voxel& v) const {
    return v.x >= origin.x && v.x < origin.x + sx && v.y >= origin.y && v.y < origin.y + sy &&
           v.z >= origin.z && v.z < origin.z + sz;
  }
  auto operator<=>(const Block&) const = default;
};

struct BlockObject {
  std::string id;
  std::vector<Block> blocks;
  Complexity complexity = Complexity::Easy;
  std::uint64_t seed = 0;

  /// Sorted voxel set.
  std::vector<Voxel> voxels() const;
  /// Voxels resting on the base plane (z = 0).
  std::vector<Voxel> base() const;
  int block_count() const { return static_cast<int>(blocks.size()); }
  /// Index of the block holding v, or -1.
  int block_of(const Voxel& v) const;
  VoxelGrid grid() const;
};

/// Checks every BlockObject invariant; returns a description of the first
/// violation.
std::optional<std::string> validate(const BlockObject& obj);

BlockObject generate_object(Complexity c, std::uint64_t seed);

/// Rotates about the vertical axis by quarter_turns * 90 degrees and
/// re-normalizes into the grid.
BlockObject rotate_yaw(const BlockObject& obj, int quarter_turns);

/// Lexicographically least translate-normalized voxel set over the four yaw
/// rotations.
std::vector<Voxel> canonical_form(std::span<const Voxel> voxels);
std::vector<Voxel> canonical_form(const BlockObject& obj);

/// The object re-posed so its voxels equal canonical_form(obj). Ties between
/// rotations with equal voxel sets are broken on the sorted block list, so two
/// yaw-rotated copies of one object map to identical block lists.
BlockObject canonical_object(const BlockObject& obj);

bool is_same(const BlockObject& a, const BlockObject& b);

/// Same-class object differing from obj by one block edit (move, resize, add
/// or remove). Throws Error(GenerationExhausted) when no edit qualifies.
BlockObject mutate_different(const BlockObject& obj, std::uint64_t seed);

/// Blocks present in exactly one of the two objects (both compared in their
/// own frames as given).
int block_edit_distance(const BlockObject& a, const BlockObject& b);

/// Part decomposition: blocks grouped by the octant of the bounding box their
/// center falls in, then split into face-connected clusters.
struct PartDecomposition {
  std::vector<std::vector<int>> parts;  // block indices per part
  std::vector<int> part_of_block;

  /// Sorted voxels of part p.
  std::vector<Voxel> part_voxels(const BlockObject& obj, int p) const;
  int count() const { return static_cast<int>(parts.size()); }
};

PartDecomposition decompose_parts(const BlockObject& obj);

struct ObjectLibrary {
  std::vector<BlockObject> objects;
  std::uint64_t seed = 0;

  std::vector<const BlockObject*> of_class(Complexity c) const;
  const BlockObject* find(std::string_view id) const;
};

inline constexpr int kObjectsPerClass = 4;

ObjectLibrary generate_library(std::uint64_t seed);
std::optional<std::string> validate(const ObjectLibrary& lib);

/// Identifier of the mutant of base_id under mutation seed.
std::string mutant_id(std::string_view base_id, std::uint64_t seed);

/// Resolves a library id or a mutant id ("<base>/m<seed>").
BlockObject resolve_object(const ObjectLibrary& lib, std::string_view id);

struct ConfigurationFilter {
  std::optional<StartPosition> start;
  std::optional<Complexity> complexity;
  std::optional<int> orientation_diff;
};

/// Distinct (object pair, start, orientation) configurations: ordered pairs
/// with replacement for short and corner starts, unordered pairs with
/// replacement for the equidistant long start.
std::uint64_t count_configurations(const ObjectLibrary& lib, const ConfigurationFilter& filter = {});

/// Text export: header "object <id> <class> <seed>" then one "x y z" line per
/// voxel. Libraries separate objects with a blank line.
void write_object(std::ostream& os, const BlockObject& obj);
void write_library(std::ostream& os, const ObjectLibrary& lib);

struct ObjectRecord {
  std::string id;
  Complexity complexity = Complexity::Easy;
  std::uint64_t seed = 0;
  std::vector<Voxel> voxels;
};

std::vector<ObjectRecord> read_library(std::istream& is);

}  // namespace pesao
