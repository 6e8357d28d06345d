#include "anthro/landmarks.hpp"

#include <Eigen/Geometry>

#include "anthro/error.hpp"

namespace anthro {
namespace {

// Order: head, neck and trunk, pelvis, left arm, right arm, left leg, right leg.
const char* const kLandmarkNames[kNumLandmarks] = {
    "Sellion",
    "Rt. Infraorbitale",
    "Lt. Infraorbitale",
    "Supramenton",
    "Rt. Tragion",
    "Lt. Tragion",
    "Rt. Gonion",
    "Lt. Gonion",
    "Nuchale",
    "Cervicale",
    "Rt. Clavicale",
    "Lt. Clavicale",
    "Suprasternale",
    "Substernale",
    "Rt. 10th Rib",
    "Lt. 10th Rib",
    "10th Rib Midspine",
    "Rt. Asis",
    "Lt. Asis",
    "Rt. Psis",
    "Lt. Psis",
    "Rt. Iliocristale",
    "Lt. Iliocristale",
    "Rt. Trochanterion",
    "Lt. Trochanterion",
    "Crotch",
    "Lt. Acromion",
    "Lt. Axilla Ant.",
    "Lt. Axilla Post.",
    "Lt. Olecranon",
    "Lt. Humeral Lateral Epicn",
    "Lt. Humeral Medial Epicn",
    "Lt. Radiale",
    "Lt. Radial Styloid",
    "Lt. Ulnar Styloid",
    "Lt. Metacarpal-Phal. II",
    "Lt. Metacarpal-Phal. V",
    "Lt. Dactylion",
    "Rt. Acromion",
    "Rt. Axilla Ant.",
    "Rt. Axilla Post.",
    "Rt. Olecranon",
    "Rt. Humeral Lateral Epicn",
    "Rt. Humeral Medial Epicn",
    "Rt. Radiale",
    "Rt. Radial Styloid",
    "Rt. Ulnar Styloid",
    "Rt. Metacarpal-Phal. II",
    "Rt. Metacarpal-Phal. V",
    "Rt. Dactylion",
    "Lt. Knee Crease",
    "Lt. Femoral Lateral Epicn",
    "Lt. Femoral Medial Epicn",
    "Lt. Lateral Malleolus",
    "Lt. Medial Malleolus",
    "Lt. Sphyrion",
    "Lt. Metatarsal-Phal. I",
    "Lt. Metatarsal-Phal. V",
    "Lt. Calcaneous Post.",
    "Lt. Digit II",
    "Rt. Knee Crease",
    "Rt. Femoral Lateral Epicn",
    "Rt. Femoral Medial Epicn",
    "Rt. Lateral Malleolus",
    "Rt. Medial Malleolus",
    "Rt. Sphyrion",
    "Rt. Metatarsal-Phal. I",
    "Rt. Metatarsal-Phal. V",
    "Rt. Calcaneous Post.",
    "Rt. Digit II",
};

}  // namespace

LandmarkRegistry::LandmarkRegistry() : version_("anthro-landmarks-70.v1") {
  names_.assign(std::begin(kLandmarkNames), std::end(kLandmarkNames));
  anchors_ = {index_of("Lt. Psis"), index_of("Rt. Psis"), index_of("Lt. Asis"), index_of("Rt. Asis"),
              index_of("Nuchale")};
}

const LandmarkRegistry& LandmarkRegistry::standard() {
  static const LandmarkRegistry registry;
  return registry;
}

std::optional<std::size_t> LandmarkRegistry::find(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return i;
  }
  return std::nullopt;
}

std::size_t LandmarkRegistry::index_of(std::string_view name) const {
  if (auto i = find(name)) return *i;
  throw Error(ErrorKind::InvalidArgument, "unknown landmark '" + std::string(name) + "'");
}

LandmarkSet::LandmarkSet() : coords_(Points::Zero(kNumLandmarks, 3)) {}

LandmarkSet::LandmarkSet(Points coords, std::string subject_id, std::string pose_id)
    : coords_(std::move(coords)), subject_id_(std::move(subject_id)), pose_id_(std::move(pose_id)) {
  if (coords_.rows() != static_cast<Eigen::Index>(kNumLandmarks)) {
    throw Error(ErrorKind::DimensionMismatch,
                "landmark set needs 70 points, got " + std::to_string(coords_.rows()));
  }
}

Points PelvisFrame::apply(const Points& points) const {
  Points out(points.rows(), 3);
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    out.row(i) = (rotation * points.row(i).transpose() + translation).transpose();
  }
  return out;
}

NormalizedLandmarks normalize(const LandmarkSet& landmarks) {
  if (!landmarks.all_finite()) {
    throw Error(ErrorKind::NonFinite, "landmark set '" + landmarks.subject_id() + "/" + landmarks.pose_id() +
                                          "' has missing or non-finite coordinates");
  }
  const auto& a = LandmarkRegistry::standard().pelvis_anchors();
  const Eigen::Vector3d middle_psis = 0.5 * (landmarks.point(a.lt_psis) + landmarks.point(a.rt_psis));
  const Eigen::Vector3d lt_asis = landmarks.point(a.lt_asis);
  const Eigen::Vector3d rt_asis = landmarks.point(a.rt_asis);
  const Eigen::Vector3d centroid = (middle_psis + lt_asis + rt_asis) / 3.0;

  const Eigen::Vector3d cross = (lt_asis - middle_psis).cross(rt_asis - middle_psis);
  if (0.5 * cross.norm() < kMinPelvisArea) {
    throw Error(ErrorKind::DegeneratePelvis, "pelvis triangle is collinear");
  }
  Eigen::Vector3d up = cross.normalized();
  const double nuchale_side = up.dot(landmarks.point(a.nuchale) - centroid);
  if (std::abs(nuchale_side) < kMinNuchaleOffset) {
    throw Error(ErrorKind::DegeneratePelvis, "Nuchale lies in the pelvis triangle plane");
  }
  if (nuchale_side < 0.0) up = -up;

  const Eigen::Vector3d asis_offset = rt_asis - centroid;
  const Eigen::Vector3d in_plane = asis_offset - asis_offset.dot(up) * up;
  if (in_plane.norm() < kMinAsisOffset) {
    throw Error(ErrorKind::DegeneratePelvis, "Rt. Asis has no offset from the pelvis centroid");
  }
  const Eigen::Vector3d forward = in_plane.normalized();
  const Eigen::Vector3d lateral = up.cross(forward);

  PelvisFrame frame;
  frame.rotation.row(0) = lateral.transpose();
  frame.rotation.row(1) = up.transpose();
  frame.rotation.row(2) = forward.transpose();
  frame.translation = -(frame.rotation * centroid);

  return {LandmarkSet(frame.apply(landmarks.coords()), landmarks.subject_id(), landmarks.pose_id()), frame};
}

std::array<double, kNumCoordinates> flatten(const LandmarkSet& landmarks) {
  std::array<double, kNumCoordinates> out{};
  std::copy(landmarks.coords().data(), landmarks.coords().data() + kNumCoordinates, out.begin());
  return out;
}

LandmarkSet unflatten(std::span<const double> values, std::string subject_id, std::string pose_id) {
  if (values.size() != kNumCoordinates) {
    throw Error(ErrorKind::DimensionMismatch, "flattened landmark vector needs 210 values");
  }
  Points coords(kNumLandmarks, 3);
  std::copy(values.begin(), values.end(), coords.data());
  return LandmarkSet(std::move(coords), std::move(subject_id), std::move(pose_id));
}

}  // namespace anthro
