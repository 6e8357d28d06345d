#pragma once

#include <Eigen/Geometry>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "anthro/body_model.hpp"
#include "anthro/landmarks.hpp"
#include "anthro/rng.hpp"

namespace anthro::test {

struct Rigid {
  Eigen::Matrix3d rotation;
  Eigen::Vector3d translation;
};

// Uniform random rotation from a normalized Gaussian quaternion.
inline Rigid random_rigid(Rng& rng, double max_translation = 1000.0) {
  Eigen::Quaterniond q(rng.normal(), rng.normal(), rng.normal(), rng.normal());
  q.normalize();
  Rigid r;
  r.rotation = q.toRotationMatrix();
  r.translation = Eigen::Vector3d(rng.uniform(-max_translation, max_translation),
                                  rng.uniform(-max_translation, max_translation),
                                  rng.uniform(-max_translation, max_translation));
  return r;
}

inline LandmarkSet transform(const LandmarkSet& l, const Rigid& r) {
  Points p = l.coords();
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    p.row(i) = (r.rotation * p.row(i).transpose() + r.translation).transpose();
  }
  return LandmarkSet(std::move(p), l.subject_id(), l.pose_id());
}

inline ShapeParams random_shape(const BodyModel& model, Rng& rng, double sigma = 1.0) {
  ShapeParams s = ShapeParams::zero(model.num_shape());
  for (Eigen::Index k = 0; k < s.coeffs.size(); ++k) s.coeffs[k] = sigma * rng.normal();
  return s;
}

inline PoseParams random_pose(const BodyModel& model, Rng& rng, double max_angle, double max_translation = 0.0) {
  PoseParams p = PoseParams::zero(model.num_joints());
  for (Eigen::Index j = 0; j < p.joint_rotations.rows(); ++j) {
    p.joint_rotations.row(j) = (rng.unit_vector() * rng.uniform(0.0, max_angle)).transpose();
  }
  for (int c = 0; c < 3; ++c) p.root_translation[c] = rng.uniform(-max_translation, max_translation);
  return p;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("anthro-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline double max_abs_diff(const Points& a, const Points& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace anthro::test
