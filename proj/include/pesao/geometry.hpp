#pragma once

#include <array>

#include "pesao/common.hpp"
#include "pesao/voxelgrid.hpp"

namespace pesao {

/// Physical edge length of one voxel, meters.
inline constexpr double kVoxelEdge = 0.04;
/// Height of the post top the base plate rests on, meters.
inline constexpr double kMountHeight = 1.4;
/// Sector observation stations sit this far from the object center
/// horizontally and vertically, meters.
inline constexpr double kStationHorizontal = 0.6;
inline constexpr double kStationVertical = 0.3;

/// Offset (meters, world axes) from an object center to the observation
/// station at the middle of viewing-sphere sector `sector`.
/// Sector bits: 1 = +x half, 2 = +y half, 4 = upper half.
Vec3 sector_station_offset(int sector);

/// Faces of `grid` visible from `eye` (object-local voxel units): the face is
/// exposed, turned toward the eye, and the segment eye -> face center does not
/// pass through another occupied voxel. Bottom faces at z = 0 rest on the
/// mounting plate and never count as exposed.
struct LocalFace {
  Voxel voxel;
  int face = 0;
};
std::vector<LocalFace> visible_faces(const VoxelGrid& grid, Vec3 eye);

bool face_exposed(const VoxelGrid& grid, const Voxel& v, int face);

}  // namespace pesao
