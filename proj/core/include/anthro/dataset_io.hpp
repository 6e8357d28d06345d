#pragma once

#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "anthro/landmarks.hpp"
#include "anthro/measurements.hpp"

namespace anthro {

inline constexpr std::string_view kDatasetMagic = "anthro-landmarks";
inline constexpr std::string_view kDatasetVersion = "v1";

struct LandmarkRecord {
  LandmarkSet landmarks;
  std::optional<MeasurementVector> measurements;
  char sex = '-';  // 'M', 'F' or '-'
};

/// Line-delimited, tab-separated landmark dataset.
///
///   anthro-landmarks  v1  <unit>  <70 landmark names>
///   subject_id  pose_id  <210 reals>  [<11 reals>]  [M|F|-]
///
/// Units are "mm" or "cm"; everything is converted to millimeters on read
/// and written in millimeters. Columns are matched to the registry by name,
/// so files with a permuted landmark order load correctly. A missing landmark
/// is written as NA in each of its three coordinates.
std::vector<LandmarkRecord> read_dataset(std::istream& in, const std::string& source = "<stream>");
std::vector<LandmarkRecord> read_dataset(const std::filesystem::path& path);

void write_dataset(std::ostream& out, const std::vector<LandmarkRecord>& records);
void write_dataset(const std::filesystem::path& path, const std::vector<LandmarkRecord>& records);

/// Opens a file for writing, throwing Error(Io) on failure.
std::ofstream open_output(const std::filesystem::path& path);
std::ifstream open_input(const std::filesystem::path& path);

}  // namespace anthro
