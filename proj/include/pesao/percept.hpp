#pragma once

#include <array>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pesao/geometry.hpp"
#include "pesao/scenario.hpp"

namespace pesao {

struct HeadPose {
  Vec3 position;
  double yaw = 0.0;    // degrees, world, about +z
  double pitch = 0.0;  // degrees, positive looks up
  double roll = 0.0;

  Vec3 forward() const;
  friend bool operator==(const HeadPose&, const HeadPose&) = default;
};

struct ObserverPose {
  Vec2 body;
  double body_yaw = 0.0;
  HeadPose head;
  double gaze_az = 0.0;  // degrees relative to head, positive to the left
  double gaze_el = 0.0;  // degrees relative to head, positive up
  double fixation_depth = 0.0;

  Vec3 gaze_direction() const;
};

inline constexpr double kVisualFieldH = 180.0;
inline constexpr double kVisualFieldV = 100.0;
inline constexpr double kCrouchedEyeHeight = 1.2;

bool in_visual_field(double az, double el);

/// Gaze angles (az, el) relative to `head` pointing at world point p.
std::array<double, 2> gaze_angles_to(const HeadPose& head, Vec3 p);

/// Head yaw/pitch that center world point p in the visual field.
std::array<double, 2> head_angles_to(Vec3 from, Vec3 p);

/// Standing pose at the scene's start.
ObserverPose start_pose(const Scene& scene);

/// Local voxel-unit frame of a mounted object.
struct ObjectFrame {
  Vec3 origin;  // post top, world meters
  double yaw = 0.0;
  double cx = 0.0;  // bbox center, voxel units
  double cy = 0.0;
  double cz = 0.0;

  Vec3 to_world(Vec3 local) const;
  Vec3 to_local(Vec3 world) const;
  Vec3 direction_to_local(Vec3 dir) const;
  Vec3 center() const { return to_world({cx, cy, cz}); }
};

ObjectFrame object_frame(const Scene& scene, Target which);

/// One exposed voxel face of object A or B. The block and part ids refer to
/// the canonical object the scene stores.
struct Element {
  Target target = Target::A;
  int part = 0;
  int block = 0;
  Voxel voxel;
  int face = 0;
  Vec3 world;  // face center

  /// "p<part>.b<block>.f<face>"
  std::string token() const;
};

struct Percept {
  Target fixated = Target::Environment;
  std::optional<Element> fixated_element;
  std::vector<Element> visible;
  std::vector<std::size_t> foveal;  // indices into visible
};

inline constexpr double kFovealRadiusDeg = 5.0;

/// Precomputed per-scene data: frames, grids and part decompositions.
struct SceneView {
  explicit SceneView(const Scene& scene);

  const Scene* scene;
  std::array<ObjectFrame, 2> frame;
  std::array<VoxelGrid, 2> grid;
  std::array<PartDecomposition, 2> parts;

  const BlockObject& object(Target t) const { return t == Target::A ? scene->object_a : scene->object_b; }
  int slot(Target t) const { return t == Target::A ? 0 : 1; }
  Element make_element(Target t, const Voxel& v, int face) const;
  /// True if the world segment from -> to crosses an occupied voxel of either
  /// object before reaching `to`.
  bool blocked(Vec3 from, Vec3 to) const;
  /// Visible elements of one object from world eye point.
  std::vector<Element> visible(Target t, Vec3 eye) const;
  /// Element hit first by the world ray, if any.
  std::optional<Element> hit(Vec3 origin, Vec3 dir) const;
};

Percept visible_elements(const SceneView& view, const ObserverPose& pose,
                         double foveal_radius_deg = kFovealRadiusDeg);
Percept visible_elements(const Scene& scene, const ObserverPose& pose);

/// Octant of the viewing sphere around the target's center holding the head
/// position. World axes; bit 1 = +x, bit 2 = +y, bit 4 = above the center.
int sector_of(Vec3 center, Vec3 head);
int sector_index(const Scene& scene, const ObserverPose& pose, Target target);

struct Saccade {
  double az = 0.0;
  double el = 0.0;
  double duration_s = 0.3;  // saccade plus the fixation it lands
};
struct HeadTurn {
  double yaw = 0.0;  // absolute target orientation, degrees
  double pitch = 0.0;
};
struct Walk {
  Vec3 head;  // target head position
  double yaw = 0.0;
  double pitch = 0.0;
};
using Action = std::variant<Saccade, HeadTurn, Walk>;

struct ActionCosts {
  double head_deg_per_s = 90.0;
  double walk_m_per_s = 1.0;
  double walk_overhead_s = 0.5;
};

struct ActResult {
  ObserverPose pose;
  double elapsed_s = 0.0;
  double path_m = 0.0;
};

/// Throws Error(InvalidArgument) for saccades outside the visual field and
/// walks leaving the workspace.
ActResult act(const ObserverPose& pose, const Action& action, const Workspace& workspace = {},
              const ActionCosts& costs = {});

struct NoiseModel {
  bool enabled = false;
  double head_sigma_m = 0.0;     // per-axis standard deviation
  double gaze_sigma_deg = 0.0;   // per-axis angular standard deviation

  /// Head sigma putting 97% of 3D errors within 0.4 mm; gaze sigma giving a
  /// mean angular error of 1.42 degrees.
  static NoiseModel measured();
};

/// Per-axis sigma such that P(|e| <= radius) = coverage for an isotropic 3D
/// Gaussian error e.
double head_sigma_for(double radius_m, double coverage);
/// CDF of the chi distribution with three degrees of freedom.
double chi3_cdf(double x);

Vec3 perturb_head(Vec3 p, const NoiseModel& m, Rng& rng);
Vec3 perturb_direction(Vec3 dir, const NoiseModel& m, Rng& rng);

/// Seeded perturbation of the head position and gaze direction. A disabled
/// model returns the pose unchanged.
ObserverPose apply_noise(const ObserverPose& pose, const NoiseModel& m, std::uint64_t seed);

}  // namespace pesao
