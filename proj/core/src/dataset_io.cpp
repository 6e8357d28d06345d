#include "anthro/dataset_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "anthro/error.hpp"
#include "anthro/text_format.hpp"

namespace anthro {
namespace {

double unit_scale(std::string_view unit) {
  if (unit == "mm") return 1.0;
  if (unit == "cm") return 10.0;
  if (unit == "m") return 1000.0;
  throw Error(ErrorKind::Parse, "unsupported unit '" + std::string(unit) + "'");
}

}  // namespace

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
  return out;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "' for reading");
  return in;
}

std::vector<LandmarkRecord> read_dataset(std::istream& in, const std::string& source) {
  const auto& registry = LandmarkRegistry::standard();
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::Parse, source + ": empty dataset file");
  const auto header = split(trim(line), '\t');
  if (header.size() != 3 + kNumLandmarks || header[0] != kDatasetMagic) {
    throw Error(ErrorKind::Parse, source + ": not an anthro landmark dataset header");
  }
  if (header[1] != kDatasetVersion) {
    throw Error(ErrorKind::Parse, source + ": unsupported dataset version '" + std::string(header[1]) + "'");
  }
  const double scale = unit_scale(header[2]);

  // column landmark k of the file -> registry index
  std::vector<std::size_t> column_to_registry(kNumLandmarks);
  std::vector<bool> seen(kNumLandmarks, false);
  for (std::size_t k = 0; k < kNumLandmarks; ++k) {
    const auto idx = registry.find(header[3 + k]);
    if (!idx) throw Error(ErrorKind::Parse, source + ": unknown landmark '" + std::string(header[3 + k]) + "'");
    if (seen[*idx]) throw Error(ErrorKind::Parse, source + ": duplicate landmark '" + std::string(header[3 + k]) + "'");
    seen[*idx] = true;
    column_to_registry[k] = *idx;
  }

  std::vector<LandmarkRecord> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty()) continue;
    const auto fields = split(body, '\t');
    const std::string where = source + ":" + std::to_string(line_no);
    std::size_t n = fields.size();
    char sex = '-';
    if (n > 0 && (fields[n - 1] == "M" || fields[n - 1] == "F" || fields[n - 1] == "-")) {
      sex = fields[n - 1][0];
      --n;
    }
    if (n != 2 + kNumCoordinates && n != 2 + kNumCoordinates + kNumMeasurements) {
      throw Error(ErrorKind::Parse, where + ": expected 212 or 223 fields, got " + std::to_string(n));
    }
    Points coords(kNumLandmarks, 3);
    try {
      for (std::size_t k = 0; k < kNumLandmarks; ++k) {
        for (int c = 0; c < 3; ++c) {
          coords(static_cast<Eigen::Index>(column_to_registry[k]), c) = scale * parse_real(fields[2 + 3 * k + c]);
        }
      }
      LandmarkRecord record{LandmarkSet(std::move(coords), std::string(fields[0]), std::string(fields[1])),
                            std::nullopt, sex};
      if (n == 2 + kNumCoordinates + kNumMeasurements) {
        MeasurementVector m;
        for (std::size_t j = 0; j < kNumMeasurements; ++j) m[j] = scale * parse_real(fields[2 + kNumCoordinates + j]);
        record.measurements = m;
      }
      records.push_back(std::move(record));
    } catch (const Error& e) {
      throw Error(e.kind(), where + ": " + e.what());
    }
  }
  return records;
}

std::vector<LandmarkRecord> read_dataset(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_dataset(in, path.string());
}

void write_dataset(std::ostream& out, const std::vector<LandmarkRecord>& records) {
  out << kDatasetMagic << '\t' << kDatasetVersion << '\t' << "mm";
  for (const auto& name : LandmarkRegistry::standard().names()) out << '\t' << name;
  out << '\n';
  for (const auto& r : records) {
    out << r.landmarks.subject_id() << '\t' << r.landmarks.pose_id();
    const auto& coords = r.landmarks.coords();
    for (Eigen::Index i = 0; i < coords.size(); ++i) out << '\t' << format_real(coords.data()[i]);
    if (r.measurements) {
      for (double v : r.measurements->values) out << '\t' << format_real(v);
    }
    out << '\t' << r.sex << '\n';
  }
  if (!out) throw Error(ErrorKind::Io, "failed writing dataset");
}

void write_dataset(const std::filesystem::path& path, const std::vector<LandmarkRecord>& records) {
  auto out = open_output(path);
  write_dataset(out, records);
}

}  // namespace anthro
