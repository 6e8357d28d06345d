#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace anthro {

inline constexpr std::size_t kNumLandmarks = 70;
inline constexpr std::size_t kNumCoordinates = kNumLandmarks * 3;

/// N×3 point matrix, row-major so that row i is contiguous (x, y, z).
using Points = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;

/// The fixed ordered list of landmark names. Index i of every LandmarkSet
/// refers to names()[i].
class LandmarkRegistry {
 public:
  static const LandmarkRegistry& standard();

  const std::vector<std::string>& names() const { return names_; }
  std::string_view version() const { return version_; }
  std::size_t size() const { return names_.size(); }

  std::optional<std::size_t> find(std::string_view name) const;
  /// Throws Error(InvalidArgument) for unknown names.
  std::size_t index_of(std::string_view name) const;

  struct PelvisAnchors {
    std::size_t lt_psis, rt_psis, lt_asis, rt_asis, nuchale;
  };
  const PelvisAnchors& pelvis_anchors() const { return anchors_; }

 private:
  LandmarkRegistry();

  std::string version_;
  std::vector<std::string> names_;
  PelvisAnchors anchors_{};
};

/// The 70 landmarks of one subject in one pose, millimeters. Missing
/// coordinates are stored as NaN and rejected by normalize().
class LandmarkSet {
 public:
  LandmarkSet();
  /// Throws Error(DimensionMismatch) unless coords has 70 rows.
  explicit LandmarkSet(Points coords, std::string subject_id = {}, std::string pose_id = {});

  const Points& coords() const { return coords_; }
  Eigen::Vector3d point(std::size_t i) const { return coords_.row(static_cast<Eigen::Index>(i)).transpose(); }
  const std::string& subject_id() const { return subject_id_; }
  const std::string& pose_id() const { return pose_id_; }

  bool all_finite() const { return coords_.allFinite(); }

 private:
  Points coords_;
  std::string subject_id_;
  std::string pose_id_;
};

/// Rigid transform p' = rotation * p + translation.
struct PelvisFrame {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  Points apply(const Points& points) const;
  Eigen::Vector3d apply(const Eigen::Vector3d& p) const { return rotation * p + translation; }
};

struct NormalizedLandmarks {
  LandmarkSet landmarks;
  PelvisFrame frame;
};

/// Pelvis-frame normalization. The triangle {mid(Lt./Rt. Psis), Lt. Asis,
/// Rt. Asis} is centred at the origin, its normal (oriented towards Nuchale)
/// becomes +y, and Rt. Asis is rotated about y onto the +z half-plane.
///
/// Throws Error(NonFinite) for missing coordinates and Error(DegeneratePelvis)
/// for a collinear triangle, Nuchale in the triangle plane, or Rt. Asis with
/// no in-plane offset from the centroid.
NormalizedLandmarks normalize(const LandmarkSet& landmarks);

/// Coordinates in registry order: out[3i + c] = coord c of landmark i.
std::array<double, kNumCoordinates> flatten(const LandmarkSet& landmarks);
LandmarkSet unflatten(std::span<const double> values, std::string subject_id = {}, std::string pose_id = {});

inline constexpr double kMinPelvisArea = 1e-6;  // mm^2
inline constexpr double kMinAsisOffset = 1e-6;  // mm
inline constexpr double kMinNuchaleOffset = 1e-6;  // mm from the pelvis plane

}  // namespace anthro
