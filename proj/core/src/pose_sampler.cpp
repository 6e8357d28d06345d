#include "anthro/pose_sampler.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "anthro/error.hpp"
#include "anthro/text_format.hpp"

namespace anthro {
namespace {

using Eigen::Vector3d;
constexpr double kDeg = std::numbers::pi / 180.0;

struct JointLimits {
  double jitter_deg;  // standing / sitting jitter
  double varied_deg;  // varied family limit
  bool hinge;
};

JointLimits limits_for(std::string_view name) {
  const auto base = name.size() > 2 && name[1] == '_' ? name.substr(2) : name;
  if (base == "pelvis") return {10.0, 180.0, false};
  if (base == "spine") return {10.0, 45.0, false};
  if (base == "neck" || base == "head") return {10.0, 40.0, false};
  if (base == "shoulder" || base == "hip") return {10.0, 90.0, false};
  if (base == "elbow" || base == "knee") return {10.0, 90.0, true};
  if (base == "wrist") return {10.0, 60.0, false};
  if (base == "ankle") return {10.0, 40.0, false};
  throw Error(ErrorKind::InvalidArgument, "no pose limits for joint '" + std::string(name) + "'");
}

// Hinge axis that flexes the bone starting at `joint` forward (+z) or backward.
Vector3d hinge_axis(const BodyModel& model, std::size_t joint, bool forward) {
  std::size_t child = joint;
  for (std::size_t j = 0; j < model.num_joints(); ++j) {
    if (model.joints[j].parent == static_cast<int>(joint)) child = j;
  }
  if (child == joint) throw Error(ErrorKind::InvalidArgument, "hinge joint without child");
  const Vector3d bone = (model.joints[child].rest - model.joints[joint].rest).normalized();
  return bone.cross(forward ? Vector3d::UnitZ() : Vector3d(-Vector3d::UnitZ())).normalized();
}

bool is_kind(std::string_view name, std::string_view kind) {
  return name.size() > 2 && name[1] == '_' && name.substr(2) == kind;
}

Vector3d random_rotation(Rng& rng, double max_rad) {
  const Vector3d axis = rng.unit_vector();
  return rng.uniform(0.0, max_rad) * axis;
}

}  // namespace

const char* to_string(PoseFamily family) noexcept {
  switch (family) {
    case PoseFamily::Standing: return "standing";
    case PoseFamily::Sitting: return "sitting";
    case PoseFamily::Varied: return "varied";
  }
  return "?";
}

const char* pose_id_prefix(PoseFamily family) noexcept {
  switch (family) {
    case PoseFamily::Standing: return "stand";
    case PoseFamily::Sitting: return "sit";
    case PoseFamily::Varied: return "vary";
  }
  return "?";
}

PoseFamily pose_family_from_string(std::string_view text) {
  if (text == "standing" || text == "stand") return PoseFamily::Standing;
  if (text == "sitting" || text == "sit") return PoseFamily::Sitting;
  if (text == "varied" || text == "vary") return PoseFamily::Varied;
  throw Error(ErrorKind::InvalidArgument, "unknown pose family '" + std::string(text) + "'");
}

void PoseMix::validate() const {
  for (double f : {standing, sitting, varied}) {
    if (!std::isfinite(f) || f < 0.0) throw Error(ErrorKind::InvalidArgument, "pose mix fractions must be >= 0");
  }
  if (std::abs(standing + sitting + varied - 1.0) > 1e-9) {
    throw Error(ErrorKind::InvalidArgument, "pose mix fractions must sum to 1");
  }
}

PoseMix parse_pose_mix(std::string_view text) {
  const auto parts = split(text, ',');
  if (parts.size() != 3) throw Error(ErrorKind::InvalidArgument, "pose mix needs three comma-separated fractions");
  std::array<double, 3> f{};
  for (std::size_t i = 0; i < 3; ++i) {
    const auto token = trim(parts[i]);
    const auto slash = token.find('/');
    if (slash == std::string_view::npos) {
      f[i] = parse_real(token);
    } else {
      const double den = parse_real(token.substr(slash + 1));
      if (den == 0.0) throw Error(ErrorKind::InvalidArgument, "pose mix denominator is zero");
      f[i] = parse_real(token.substr(0, slash)) / den;
    }
  }
  PoseMix mix{f[0], f[1], f[2]};
  mix.validate();
  return mix;
}

PoseParams sample_pose(const BodyModel& model, PoseFamily family, Rng& rng) {
  PoseParams pose = PoseParams::zero(model.num_joints());
  for (std::size_t j = 0; j < model.num_joints(); ++j) {
    const auto& name = model.joints[j].name;
    const auto lim = limits_for(name);
    Vector3d rotation = Vector3d::Zero();
    if (j == 0) {
      if (family == PoseFamily::Varied) {
        rotation = random_rotation(rng, std::numbers::pi);
      } else {
        const double yaw = rng.uniform(-std::numbers::pi, std::numbers::pi);
        const Eigen::Matrix3d r = rotation_from_axis_angle(yaw * Vector3d::UnitY()) *
                                  rotation_from_axis_angle(random_rotation(rng, lim.jitter_deg * kDeg));
        rotation = axis_angle_from_rotation(r);
      }
    } else if (lim.hinge) {
      const bool knee = is_kind(name, "knee");
      const Vector3d axis = hinge_axis(model, j, !knee);
      double angle = 0.0;
      if (family == PoseFamily::Varied) {
        angle = rng.uniform(0.0, lim.varied_deg * kDeg);
      } else if (family == PoseFamily::Sitting && knee) {
        angle = rng.uniform(70.0, 110.0) * kDeg;
      } else {
        angle = rng.uniform(0.0, lim.jitter_deg * kDeg);
      }
      rotation = angle * axis;
    } else if (family == PoseFamily::Varied) {
      rotation = random_rotation(rng, lim.varied_deg * kDeg);
    } else if (family == PoseFamily::Sitting && is_kind(name, "hip")) {
      const Eigen::Matrix3d flex =
          rotation_from_axis_angle(rng.uniform(70.0, 110.0) * kDeg * hinge_axis(model, j, true));
      rotation = axis_angle_from_rotation(flex * rotation_from_axis_angle(random_rotation(rng, lim.jitter_deg * kDeg)));
    } else {
      rotation = random_rotation(rng, lim.jitter_deg * kDeg);
    }
    pose.joint_rotations.row(static_cast<Eigen::Index>(j)) = rotation.transpose();
  }
  for (int c = 0; c < 3; ++c) pose.root_translation[c] = rng.uniform(-500.0, 500.0);
  return pose;
}

std::vector<PoseFamily> assign_families(std::size_t n, const PoseMix& mix, std::uint64_t seed) {
  mix.validate();
  const std::array<double, 3> fractions = {mix.standing, mix.sitting, mix.varied};
  std::array<std::size_t, 3> counts{};
  std::array<double, 3> remainder{};
  std::size_t assigned = 0;
  for (std::size_t f = 0; f < 3; ++f) {
    const double exact = fractions[f] * static_cast<double>(n);
    counts[f] = static_cast<std::size_t>(std::floor(exact));
    remainder[f] = exact - std::floor(exact);
    assigned += counts[f];
  }
  while (assigned < n) {
    std::size_t best = 0;
    for (std::size_t f = 1; f < 3; ++f) {
      if (remainder[f] > remainder[best]) best = f;
    }
    ++counts[best];
    remainder[best] = -1.0;
    ++assigned;
  }
  std::vector<PoseFamily> out;
  out.reserve(n);
  for (std::size_t f = 0; f < 3; ++f) out.insert(out.end(), counts[f], static_cast<PoseFamily>(f));
  Rng rng(derive_seed(seed, RngStream::FamilyAssignment));
  for (std::size_t i = out.size(); i > 1; --i) std::swap(out[i - 1], out[rng.below(i)]);
  return out;
}

}  // namespace anthro
