#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace anthro {

inline constexpr std::size_t kNumMeasurements = 11;

/// The 11 measurement names, in the fixed reporting order.
const std::array<std::string, kNumMeasurements>& measurement_names();

/// Machine-friendly column names (e.g. "ankle_c") in the same order.
const std::array<std::string, kNumMeasurements>& measurement_keys();

std::optional<std::size_t> find_measurement(std::string_view name_or_key);

/// 11 body measurements in millimeters.
struct MeasurementVector {
  std::array<double, kNumMeasurements> values{};

  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
  bool all_finite() const;
};

}  // namespace anthro
