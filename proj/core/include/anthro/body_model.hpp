#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "anthro/landmarks.hpp"
#include "anthro/measurements.hpp"
#include "anthro/mesh.hpp"

namespace anthro {

inline constexpr std::string_view kBodyModelMagic = "anthro-body-model";
inline constexpr std::string_view kBodyModelVersion = "v1";

enum class MeasurementKind { Circumference, Length, Height, Stature };

const char* to_string(MeasurementKind kind) noexcept;
MeasurementKind measurement_kind_from_string(std::string_view text);

/// How one of the 11 measurements is taken on an A-pose mesh.
///  - Circumference: perimeter of the cross-section loop nearest the anchor,
///    cut by the plane through the anchor with `plane_normal`.
///  - Length: distance between two anchors.
///  - Height: anchor height above the lowest mesh point.
///  - Stature: vertical extent of the mesh.
struct MeasurementDef {
  std::string name;
  MeasurementKind kind = MeasurementKind::Length;
  std::vector<std::string> anchors;
  Eigen::Vector3d plane_normal = Eigen::Vector3d::UnitY();
};

struct Joint {
  std::string name;
  int parent = -1;  // parents precede children
  Eigen::Vector3d rest = Eigen::Vector3d::Zero();
};

struct ShapeParams {
  Eigen::VectorXd coeffs;

  static ShapeParams zero(std::size_t count) { return {Eigen::VectorXd::Zero(static_cast<Eigen::Index>(count))}; }
};

/// Per-joint local rotations as axis-angle vectors (radians, rest-frame
/// axes), plus a global translation in millimeters. All-zero is the A-pose.
struct PoseParams {
  Points joint_rotations;
  Eigen::Vector3d root_translation = Eigen::Vector3d::Zero();

  static PoseParams zero(std::size_t joints) {
    return {Points::Zero(static_cast<Eigen::Index>(joints), 3), Eigen::Vector3d::Zero()};
  }
};

/// Articulated body: template mesh in the A-pose, joint tree, linear blend
/// skinning weights and a linear shape basis acting on both the vertices and
/// the joint rest positions.
struct BodyModel {
  Points template_vertices;
  Faces faces;
  std::vector<Joint> joints;
  Eigen::MatrixXd skin_weights;       // V x J, rows sum to 1
  Eigen::MatrixXd shape_basis;        // 3V x S, rows 3v..3v+2 belong to vertex v
  Eigen::MatrixXd joint_shape_basis;  // 3J x S
  std::vector<std::string> shape_names;
  std::vector<int> landmark_vertex_ids;          // registry order
  std::vector<MeasurementDef> measurement_defs;  // measurement order
  std::uint64_t seed = 0;

  std::size_t num_vertices() const { return static_cast<std::size_t>(template_vertices.rows()); }
  std::size_t num_joints() const { return joints.size(); }
  std::size_t num_shape() const { return static_cast<std::size_t>(shape_basis.cols()); }

  /// Checks every structural invariant; throws Error(InvalidArgument).
  void validate() const;

  TriMesh template_mesh() const { return {template_vertices, faces}; }
  std::size_t joint_index(std::string_view name) const;
};

/// Deterministic humanoid with 16 joints and 8 shape coefficients.
BodyModel make_default_model(std::uint64_t seed = 0);

/// Same model restricted to the given shape basis columns.
BodyModel with_shape_subset(const BodyModel& model, const std::vector<std::size_t>& columns);

struct RigidTransform {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();
};

/// Exactly the identity for a zero vector.
Eigen::Matrix3d rotation_from_axis_angle(const Eigen::Vector3d& axis_angle);
Eigen::Vector3d axis_angle_from_rotation(const Eigen::Matrix3d& rotation);

Points shaped_vertices(const BodyModel& model, const ShapeParams& shape);
Points shaped_joints(const BodyModel& model, const ShapeParams& shape);

/// World transform of each joint's skinning frame.
std::vector<RigidTransform> joint_transforms(const BodyModel& model, const Points& joints, const PoseParams& pose);

/// Skinned mesh. Zero pose reproduces the shaped template exactly.
TriMesh pose_mesh(const BodyModel& model, const ShapeParams& shape, const PoseParams& pose);

/// The 70 posed landmark vertices, registry order.
LandmarkSet landmarks_of(const BodyModel& model, const ShapeParams& shape, const PoseParams& pose,
                         std::string subject_id = {}, std::string pose_id = {});

/// pose_mesh with the all-zero pose.
TriMesh repose_to_apose(const BodyModel& model, const ShapeParams& shape);

double evaluate_measurement(const MeasurementDef& def, const TriMesh& mesh, const LandmarkSet& landmarks);

/// Evaluates every measurement definition on an A-pose mesh of this model.
MeasurementVector measure_apose_mesh(const BodyModel& model, const TriMesh& apose_mesh);

/// measure_apose_mesh(repose_to_apose(model, shape)).
MeasurementVector measure_ground_truth(const BodyModel& model, const ShapeParams& shape);

/// Landmark pairs (i < j) whose vertices are both bound to one joint with
/// weight exactly 1; their distance is unchanged by any pose.
std::vector<std::pair<std::size_t, std::size_t>> rigid_landmark_pairs(const BodyModel& model);

void save_model(std::ostream& out, const BodyModel& model);
BodyModel load_model(std::istream& in);

void check_dimensions(const BodyModel& model, const ShapeParams& shape);
void check_dimensions(const BodyModel& model, const PoseParams& pose);

}  // namespace anthro
