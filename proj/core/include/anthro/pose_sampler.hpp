#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "anthro/body_model.hpp"
#include "anthro/rng.hpp"

namespace anthro {

enum class PoseFamily { Standing, Sitting, Varied };

const char* to_string(PoseFamily family) noexcept;
/// Prefix used in pose ids: "stand", "sit", "vary".
const char* pose_id_prefix(PoseFamily family) noexcept;
PoseFamily pose_family_from_string(std::string_view text);

struct PoseMix {
  double standing = 1.0 / 12.0;
  double sitting = 1.0 / 12.0;
  double varied = 10.0 / 12.0;

  /// Throws Error(InvalidArgument) unless fractions are >= 0 and sum to 1.
  void validate() const;
};

/// Parses "a,b,c" where each entry is a real or a fraction "p/q".
PoseMix parse_pose_mix(std::string_view text);

/// Draws a pose for the standard 16-joint skeleton.
///  - Standing: every joint within 10 degrees of rest, elbows and knees flex
///    only, random heading.
///  - Sitting: hips and knees flexed 70-110 degrees, the rest as standing.
///  - Varied: per-joint random rotations up to the joint limit (90 degrees
///    at shoulders and hips, less along the spine), elbows and knees flex
///    0-90 degrees, arbitrary root orientation.
/// Root translation is uniform in +-500 mm per axis for every family.
PoseParams sample_pose(const BodyModel& model, PoseFamily family, Rng& rng);

/// Family of each of n records: counts by largest remainder of n * mix,
/// then a seeded shuffle.
std::vector<PoseFamily> assign_families(std::size_t n, const PoseMix& mix, std::uint64_t seed);

}  // namespace anthro
