#include "pesao/geometry.hpp"

#include <cmath>

namespace pesao {

Vec3 sector_station_offset(int sector) {
  const double h = kStationHorizontal / std::sqrt(2.0);
  return {(sector & 1) ? h : -h, (sector & 2) ? h : -h,
          (sector & 4) ? kStationVertical : -kStationVertical};
}

bool face_exposed(const VoxelGrid& grid, const Voxel& v, int face) {
  if (face == kNegZ && v.z == 0) return false;
  return !grid.occupied(face_neighbor(v, face));
}

std::vector<LocalFace> visible_faces(const VoxelGrid& grid, Vec3 eye) {
  std::vector<LocalFace> out;
  for (int z = 0; z < kGridExtent; ++z)
    for (int y = 0; y < kGridExtent; ++y)
      for (int x = 0; x < kGridExtent; ++x) {
        const Voxel v{x, y, z};
        if (!grid.occupied(v)) continue;
        for (int f = 0; f < 6; ++f) {
          if (!face_exposed(grid, v, f)) continue;
          const Vec3 c = face_center(v, f);
          if (face_normal(f).dot(eye - c) <= 0.0) continue;
          if (segment_blocked(grid, eye, c)) continue;
          out.push_back({v, f});
        }
      }
  return out;
}

}  // namespace pesao
