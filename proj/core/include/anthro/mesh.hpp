#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include <Eigen/Core>

#include "anthro/landmarks.hpp"

namespace anthro {

using Faces = Eigen::Matrix<int, Eigen::Dynamic, 3, Eigen::RowMajor>;

/// Indexed triangle mesh, millimeters, counter-clockwise faces seen from outside.
struct TriMesh {
  Points vertices;
  Faces faces;
};

struct Plane {
  Eigen::Vector3d point = Eigen::Vector3d::Zero();
  Eigen::Vector3d normal = Eigen::Vector3d::UnitY();
};

/// Closed polylines where a plane cuts a mesh. Each loop is an N×3 matrix;
/// the closing segment back to row 0 is implicit.
struct CrossSection {
  std::vector<Points> loops;
  Plane source_plane;
};

// Consecutive loop points closer than this are merged.
inline constexpr double kLoopPointTolerance = 1e-9;

/// Intersects a mesh with the plane through `point` with normal `normal`.
///
/// Vertices are classified by the sign of their signed distance with zero
/// counted as positive, which is equivalent to shifting the plane by an
/// infinitesimal offset; every crossing edge then contributes one point that
/// lies on the exact plane. Segments are stitched through shared edges and
/// loops are ordered by centroid (lexicographic x, y, z).
///
/// Throws Error(EmptyCrossSection) when the plane misses the mesh and
/// Error(OpenCrossSection) when a crossing edge is a boundary or non-manifold
/// edge.
CrossSection plane_cross_section(const TriMesh& mesh, const Eigen::Vector3d& point, const Eigen::Vector3d& normal);

double loop_perimeter(const Points& loop);
Eigen::Vector3d loop_centroid(const Points& loop);

struct LoopLocation {
  std::size_t loop = 0;
  std::size_t segment = 0;  // segment from row `segment` to row `segment + 1` (mod n)
  double t = 0.0;           // parameter along that segment
  Eigen::Vector3d point = Eigen::Vector3d::Zero();
  double distance = 0.0;
};

/// Closest point on any loop polyline; ties go to the lower loop index.
LoopLocation nearest_loop_point(const CrossSection& section, const Eigen::Vector3d& p);

/// Point reached by walking `arc_length` along a loop from `from`;
/// direction +1 follows row order, -1 reverses it.
Eigen::Vector3d walk_loop(const Points& loop, const LoopLocation& from, double arc_length, int direction);

struct SurfacePoint {
  Eigen::Vector3d point = Eigen::Vector3d::Zero();
  Eigen::Vector3d normal = Eigen::Vector3d::UnitY();  // area-weighted normal of the nearest faces
  double distance = 0.0;
};

SurfacePoint closest_surface_point(const TriMesh& mesh, const Eigen::Vector3d& p);

struct PerturbOptions {
  // Sampled plane normals closer than this to the surface normal are redrawn,
  // since near-tangent planes produce sliver cross-sections.
  double min_angle_to_surface_normal_deg = 10.0;
  int max_attempts = 10;
  double max_surface_distance_mm = 1.0;
};

struct PerturbedLandmark {
  Eigen::Vector3d point = Eigen::Vector3d::Zero();
  double arc_length = 0.0;  // distance walked along the cross-section loop
  int attempts = 0;
};

/// Moves a landmark along the cross-section of the mesh with a random plane
/// through it, by an arc length uniform in [0, max_dist_mm] in a random
/// direction along the loop.
PerturbedLandmark perturb_landmark_on_surface(const TriMesh& mesh, const Eigen::Vector3d& landmark,
                                              double max_dist_mm, std::uint64_t seed,
                                              const PerturbOptions& options = {});

/// Minimal OFF reader. The first line is "OFF" optionally followed by a unit
/// ("mm", "cm" or "m"; default mm), then "nv nf [ne]", vertex lines and face
/// lines ("k i0 ... ik-1", polygons are fan-triangulated). '#' starts a comment.
TriMesh read_off(std::istream& in);
TriMesh read_off(const std::filesystem::path& path);
void write_off(std::ostream& out, const TriMesh& mesh);

// Closed primitive meshes used by tests and benchmarks.
TriMesh make_cylinder(double radius, double height, int segments, int rings = 1);
TriMesh make_box(double size);
TriMesh make_uv_sphere(double radius, int stacks, int slices);

/// Signed volume; positive for outward-oriented closed meshes.
double signed_volume(const TriMesh& mesh);

/// Number of edges not shared by exactly two faces (0 for watertight meshes).
std::size_t count_non_manifold_edges(const TriMesh& mesh);

}  // namespace anthro
