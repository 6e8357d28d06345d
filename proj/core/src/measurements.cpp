#include "anthro/measurements.hpp"

#include <cmath>

namespace anthro {

const std::array<std::string, kNumMeasurements>& measurement_names() {
  static const std::array<std::string, kNumMeasurements> names = {
      "Ankle C.", "Shoulder-elbow L.", "Shoulder-wrist L.", "Spine-wrist L.", "Chest C.", "Crotch H.",
      "Head C.",  "Hip C. H.",         "Hip C.",            "Neck base C.",   "Stature"};
  return names;
}

const std::array<std::string, kNumMeasurements>& measurement_keys() {
  static const std::array<std::string, kNumMeasurements> keys = {
      "ankle_c", "shoulder_elbow_l", "shoulder_wrist_l", "spine_wrist_l", "chest_c", "crotch_h",
      "head_c",  "hip_c_h",          "hip_c",            "neck_base_c",   "stature"};
  return keys;
}

std::optional<std::size_t> find_measurement(std::string_view name_or_key) {
  for (std::size_t i = 0; i < kNumMeasurements; ++i) {
    if (measurement_names()[i] == name_or_key || measurement_keys()[i] == name_or_key) return i;
  }
  return std::nullopt;
}

bool MeasurementVector::all_finite() const {
  for (double v : values) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

}  // namespace anthro
