#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "anthro/body_model.hpp"
#include "anthro/dataset_io.hpp"
#include "anthro/pose_sampler.hpp"

namespace anthro {

struct GenerateOptions {
  std::size_t n_subjects = 50;
  std::size_t poses_per_subject = 40;
  PoseMix mix;
  std::uint64_t seed = 0;
  // Adds one zero-pose record per subject with pose id "apose".
  bool include_apose = false;
  double shape_clamp = 2.5;
  // Subject ids start at S<first_subject + 1>; lets two runs with the same
  // seed produce disjoint subjects.
  std::size_t first_subject = 0;
  std::size_t threads = 0;
};

/// Generator parameters of one record, kept so that the posed mesh can be
/// rebuilt later (surface noise, baseline checks).
struct RecordParams {
  std::string subject_id;
  std::string pose_id;
  ShapeParams shape;
  PoseParams pose;
};

struct GeneratedDataset {
  std::vector<LandmarkRecord> records;
  std::vector<RecordParams> params;  // aligned with records
};

/// Seeded synthetic dataset: subject shapes are standard normal draws
/// (clamped to +-shape_clamp) around a small sex-dependent mean, poses come
/// from the three families in `mix`, and every record carries the subject's
/// A-pose ground-truth measurements. Records are ordered by subject, then
/// pose; the output does not depend on the thread count.
GeneratedDataset generate_dataset(const BodyModel& model, const GenerateOptions& options);

/// Subject ids in the test split: a seeded shuffle of the distinct ids,
/// round(fraction * n) of them.
std::vector<std::string> test_subjects(const std::vector<LandmarkRecord>& records, double fraction,
                                       std::uint64_t seed);

inline constexpr std::string_view kParamsMagic = "anthro-params";
inline constexpr std::string_view kParamsVersion = "v1";

void write_params(std::ostream& out, const std::vector<RecordParams>& params);
void write_params(const std::filesystem::path& path, const std::vector<RecordParams>& params);
std::vector<RecordParams> read_params(std::istream& in);
std::vector<RecordParams> read_params(const std::filesystem::path& path);

}  // namespace anthro
