#include "anthro/dataset_gen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <set>

#include "anthro/error.hpp"
#include "anthro/parallel.hpp"
#include "anthro/rng.hpp"
#include "anthro/text_format.hpp"

namespace anthro {
namespace {

std::string numbered(const char* prefix, std::size_t n) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%04zu", prefix, n);
  return buf;
}

struct Subject {
  ShapeParams shape;
  char sex = '-';
  MeasurementVector measurements;
};

Subject draw_subject(const BodyModel& model, const GenerateOptions& options, std::size_t index) {
  Rng rng(derive_seed(options.seed, RngStream::SubjectShape, index));
  Subject s;
  s.sex = rng.uniform() < 0.5 ? 'F' : 'M';
  const double sign = s.sex == 'M' ? 1.0 : -1.0;
  s.shape = ShapeParams::zero(model.num_shape());
  for (Eigen::Index k = 0; k < s.shape.coeffs.size(); ++k) {
    s.shape.coeffs[k] = std::clamp(rng.normal(), -options.shape_clamp, options.shape_clamp);
  }
  // Mild sex dimorphism on the named directions when present.
  for (std::size_t k = 0; k < model.num_shape(); ++k) {
    const auto& name = model.shape_names[k];
    const double shift = name == "scale" ? 0.6 : name == "chest" ? 0.3 : name == "hip" ? -0.5 : 0.0;
    s.shape.coeffs[static_cast<Eigen::Index>(k)] += sign * shift;
  }
  s.measurements = measure_ground_truth(model, s.shape);
  return s;
}

}  // namespace

GeneratedDataset generate_dataset(const BodyModel& model, const GenerateOptions& options) {
  if (options.n_subjects == 0 || options.poses_per_subject == 0) {
    throw Error(ErrorKind::InvalidArgument, "subject and pose counts must be >= 1");
  }
  options.mix.validate();
  const std::size_t threads = resolve_threads(options.threads);
  const std::size_t n_subjects = options.n_subjects;
  const std::size_t per_subject = options.poses_per_subject + (options.include_apose ? 1 : 0);

  std::vector<Subject> subjects(n_subjects);
  parallel_for(n_subjects, threads, [&](std::size_t i) {
    subjects[i] = draw_subject(model, options, options.first_subject + i);
  });

  const auto families = assign_families(n_subjects * options.poses_per_subject, options.mix,
                                        derive_seed(options.seed, options.first_subject));
  GeneratedDataset out;
  out.records.resize(n_subjects * per_subject);
  out.params.resize(n_subjects * per_subject);
  parallel_for(n_subjects * per_subject, threads, [&](std::size_t r) {
    const std::size_t i = r / per_subject, p = r % per_subject;
    const std::size_t global_subject = options.first_subject + i;
    const Subject& subject = subjects[i];
    RecordParams params;
    params.subject_id = numbered("S", global_subject + 1);
    params.shape = subject.shape;
    if (options.include_apose && p == 0) {
      params.pose_id = "apose";
      params.pose = PoseParams::zero(model.num_joints());
    } else {
      const std::size_t pose_index = p - (options.include_apose ? 1 : 0);
      const PoseFamily family = families[i * options.poses_per_subject + pose_index];
      Rng rng(derive_seed(options.seed, RngStream::Pose, global_subject * 1000003ULL + pose_index));
      params.pose_id = numbered((std::string(pose_id_prefix(family)) + "-").c_str(), pose_index + 1);
      params.pose = sample_pose(model, family, rng);
    }
    LandmarkRecord record{landmarks_of(model, params.shape, params.pose, params.subject_id, params.pose_id),
                          subject.measurements, subject.sex};
    out.records[r] = std::move(record);
    out.params[r] = std::move(params);
  });
  return out;
}

std::vector<std::string> test_subjects(const std::vector<LandmarkRecord>& records, double fraction,
                                       std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) throw Error(ErrorKind::InvalidArgument, "test fraction must be in [0, 1]");
  std::vector<std::string> ids;
  std::set<std::string> seen;
  for (const auto& r : records) {
    if (seen.insert(r.landmarks.subject_id()).second) ids.push_back(r.landmarks.subject_id());
  }
  Rng rng(derive_seed(seed, RngStream::Split));
  for (std::size_t i = ids.size(); i > 1; --i) std::swap(ids[i - 1], ids[rng.below(i)]);
  ids.resize(static_cast<std::size_t>(std::llround(fraction * static_cast<double>(ids.size()))));
  std::sort(ids.begin(), ids.end());
  return ids;
}

void write_params(std::ostream& out, const std::vector<RecordParams>& params) {
  const std::size_t S = params.empty() ? 0 : static_cast<std::size_t>(params[0].shape.coeffs.size());
  const std::size_t J = params.empty() ? 0 : static_cast<std::size_t>(params[0].pose.joint_rotations.rows());
  out << kParamsMagic << '\t' << kParamsVersion << '\t' << S << '\t' << J << '\n';
  for (const auto& p : params) {
    if (static_cast<std::size_t>(p.shape.coeffs.size()) != S ||
        static_cast<std::size_t>(p.pose.joint_rotations.rows()) != J) {
      throw Error(ErrorKind::DimensionMismatch, "params records disagree on dimensions");
    }
    out << p.subject_id << '\t' << p.pose_id;
    for (Eigen::Index k = 0; k < p.shape.coeffs.size(); ++k) out << '\t' << format_real(p.shape.coeffs[k]);
    for (Eigen::Index j = 0; j < p.pose.joint_rotations.rows(); ++j) {
      for (int c = 0; c < 3; ++c) out << '\t' << format_real(p.pose.joint_rotations(j, c));
    }
    for (int c = 0; c < 3; ++c) out << '\t' << format_real(p.pose.root_translation[c]);
    out << '\n';
  }
  if (!out) throw Error(ErrorKind::Io, "failed writing params");
}

void write_params(const std::filesystem::path& path, const std::vector<RecordParams>& params) {
  auto out = open_output(path);
  write_params(out, params);
}

std::vector<RecordParams> read_params(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::Parse, "params: empty file");
  const auto header = split(trim(line), '\t');
  if (header.size() != 4 || header[0] != kParamsMagic || header[1] != kParamsVersion) {
    throw Error(ErrorKind::Parse, "params: bad header");
  }
  const auto S = static_cast<std::size_t>(parse_integer(header[2]));
  const auto J = static_cast<std::size_t>(parse_integer(header[3]));
  std::vector<RecordParams> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto f = split(trim(line), '\t');
    if (f.size() != 2 + S + 3 * J + 3) {
      throw Error(ErrorKind::Parse, "params line " + std::to_string(line_no) + ": wrong field count");
    }
    RecordParams p;
    p.subject_id = std::string(f[0]);
    p.pose_id = std::string(f[1]);
    p.shape = ShapeParams::zero(S);
    p.pose = PoseParams::zero(J);
    std::size_t c = 2;
    for (std::size_t k = 0; k < S; ++k) p.shape.coeffs[static_cast<Eigen::Index>(k)] = parse_real(f[c++]);
    for (std::size_t j = 0; j < J; ++j) {
      for (int a = 0; a < 3; ++a) p.pose.joint_rotations(static_cast<Eigen::Index>(j), a) = parse_real(f[c++]);
    }
    for (int a = 0; a < 3; ++a) p.pose.root_translation[a] = parse_real(f[c++]);
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<RecordParams> read_params(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_params(in);
}

}  // namespace anthro
