#pragma once

#include <bitset>
#include <optional>

#include "pesao/common.hpp"

namespace pesao {

/// Edge length of the object bounding grid, in voxels.
inline constexpr int kGridExtent = 7;

/// Face indices in the object-local frame.
enum Face : int { kPosX = 0, kNegX, kPosY, kNegY, kPosZ, kNegZ };

struct Voxel {
  int x = 0;
  int y = 0;
  int z = 0;

  auto operator<=>(const Voxel&) const = default;
};

Vec3 face_normal(int face);
Voxel face_neighbor(const Voxel& v, int face);
/// Face center in voxel units (voxel v spans [v, v+1] on each axis).
Vec3 face_center(const Voxel& v, int face);

/// Occupancy of the kGridExtent^3 grid an object lives in.
class VoxelGrid {
 public:
  bool in_bounds(int x, int y, int z) const {
    return x >= 0 && y >= 0 && z >= 0 && x < kGridExtent && y < kGridExtent && z < kGridExtent;
  }
  bool occupied(int x, int y, int z) const { return in_bounds(x, y, z) && bits_[index(x, y, z)]; }
  bool occupied(const Voxel& v) const { return occupied(v.x, v.y, v.z); }
  void set(const Voxel& v, bool on = true) { bits_[index(v.x, v.y, v.z)] = on; }

 private:
  static int index(int x, int y, int z) { return (z * kGridExtent + y) * kGridExtent + x; }
  std::bitset<kGridExtent * kGridExtent * kGridExtent> bits_;
};

struct GridHit {
  Voxel voxel;
  int face = 0;      // face of `voxel` through which the ray entered
  double t = 0.0;    // ray parameter at entry
};

/// True if the segment from->to passes through an occupied voxel at a
/// parameter strictly below t_limit (t in [0, 1] along the segment).
/// Integer grid traversal.
bool segment_blocked(const VoxelGrid& grid, Vec3 from, Vec3 to, double t_limit = 1.0 - 1e-9);

/// First occupied voxel entered by the ray origin + t * dir, t > 0.
std::optional<GridHit> first_hit(const VoxelGrid& grid, Vec3 origin, Vec3 dir);

}  // namespace pesao
