#include "pesao/voxelgrid.hpp"

#include <array>
#include <limits>

namespace pesao {

Vec3 face_normal(int face) {
  static constexpr std::array<Vec3, 6> normals{
      Vec3{1, 0, 0}, Vec3{-1, 0, 0}, Vec3{0, 1, 0}, Vec3{0, -1, 0}, Vec3{0, 0, 1}, Vec3{0, 0, -1}};
  return normals[static_cast<std::size_t>(face)];
}

Voxel face_neighbor(const Voxel& v, int face) {
  const Vec3 n = face_normal(face);
  return {v.x + static_cast<int>(n.x), v.y + static_cast<int>(n.y), v.z + static_cast<int>(n.z)};
}

Vec3 face_center(const Voxel& v, int face) {
  const Vec3 c{v.x + 0.5, v.y + 0.5, v.z + 0.5};
  return c + face_normal(face) * 0.5;
}

namespace {

double component(const Vec3& v, int axis) { return axis == 0 ? v.x : axis == 1 ? v.y : v.z; }

// Walks the cells pierced by origin + t*dir for t in [0, t_max]; returns the
// first occupied one.
std::optional<GridHit> traverse(const VoxelGrid& grid, Vec3 origin, Vec3 dir, double t_max) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  double t_enter = 0.0;
  double t_exit = t_max;
  int entry_axis = -1;
  for (int a = 0; a < 3; ++a) {
    const double o = component(origin, a);
    const double d = component(dir, a);
    if (d == 0.0) {
      if (o < 0.0 || o > kGridExtent) return std::nullopt;
      continue;
    }
    double t0 = (0.0 - o) / d;
    double t1 = (kGridExtent - o) / d;
    if (t0 > t1) std::swap(t0, t1);
    if (t0 > t_enter) {
      t_enter = t0;
      entry_axis = a;
    }
    t_exit = std::min(t_exit, t1);
  }
  if (t_enter > t_exit) return std::nullopt;

  const Vec3 p = origin + dir * t_enter;
  std::array<int, 3> cell{};
  std::array<int, 3> step{};
  std::array<double, 3> t_next{};
  std::array<double, 3> t_delta{};
  for (int a = 0; a < 3; ++a) {
    const double d = component(dir, a);
    int c = static_cast<int>(std::floor(component(p, a)));
    if (a == entry_axis) c = d > 0 ? 0 : kGridExtent - 1;
    c = std::clamp(c, 0, kGridExtent - 1);
    cell[a] = c;
    if (d > 0) {
      step[a] = 1;
      t_next[a] = (c + 1 - component(origin, a)) / d;
      t_delta[a] = 1.0 / d;
    } else if (d < 0) {
      step[a] = -1;
      t_next[a] = (c - component(origin, a)) / d;
      t_delta[a] = -1.0 / d;
    } else {
      step[a] = 0;
      t_next[a] = kInf;
      t_delta[a] = kInf;
    }
  }

  int face = -1;
  if (entry_axis >= 0) face = 2 * entry_axis + (component(dir, entry_axis) > 0 ? 1 : 0);
  double t = t_enter;
  while (true) {
    if (grid.occupied(cell[0], cell[1], cell[2]))
      return GridHit{{cell[0], cell[1], cell[2]}, face, t};
    int a = 0;
    if (t_next[1] < t_next[a]) a = 1;
    if (t_next[2] < t_next[a]) a = 2;
    t = t_next[a];
    if (t > t_exit) return std::nullopt;
    cell[a] += step[a];
    if (cell[a] < 0 || cell[a] >= kGridExtent) return std::nullopt;
    face = 2 * a + (step[a] > 0 ? 1 : 0);
    t_next[a] += t_delta[a];
  }
}

}  // namespace

bool segment_blocked(const VoxelGrid& grid, Vec3 from, Vec3 to, double t_limit) {
  auto hit = traverse(grid, from, to - from, t_limit);
  return hit && hit->t < t_limit;
}

std::optional<GridHit> first_hit(const VoxelGrid& grid, Vec3 origin, Vec3 dir) {
  return traverse(grid, origin, dir, std::numeric_limits<double>::max());
}

}  // namespace pesao
