#include "anthro/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include "anthro/dataset_io.hpp"
#include "anthro/error.hpp"
#include "anthro/parallel.hpp"
#include "anthro/text_format.hpp"

namespace anthro {

std::size_t pair_index(std::size_t i, std::size_t j) {
  if (!(i < j && j < kNumLandmarks)) throw Error(ErrorKind::InvalidArgument, "pair index needs i < j < 70");
  // Pairs before row i: sum_{r<i} (n - 1 - r).
  return i * (2 * kNumLandmarks - i - 1) / 2 + (j - i - 1);
}

LandmarkPair pair_at(std::size_t k) {
  if (k >= kNumPairs) throw Error(ErrorKind::InvalidArgument, "pair position out of range");
  std::size_t i = 0;
  while (k >= kNumLandmarks - 1 - i) {
    k -= kNumLandmarks - 1 - i;
    ++i;
  }
  return {i, i + 1 + k};
}

std::vector<double> pairwise_distances(const LandmarkSet& landmarks) {
  std::vector<double> out;
  out.reserve(kNumPairs);
  const Points& p = landmarks.coords();
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < p.rows(); ++j) out.push_back((p.row(i) - p.row(j)).norm());
  }
  return out;
}

std::string FeatureSelection::digest() const {
  const auto& registry = LandmarkRegistry::standard();
  std::string text(registry.version());
  text += '\n';
  for (const auto& [i, j] : pairs) {
    text += registry.names().at(i);
    text += '\t';
    text += registry.names().at(j);
    text += '\n';
  }
  return to_hex(fnv1a64(text));
}

FeatureSelection apply_threshold(const FeatureSelection& audit, double threshold_mm) {
  if (!(threshold_mm > 0.0)) throw Error(ErrorKind::InvalidArgument, "threshold must be positive");
  if (audit.per_pair_median_dev_mm.size() != kNumPairs) {
    throw Error(ErrorKind::DimensionMismatch, "selection needs 2415 per-pair medians");
  }
  FeatureSelection out = audit;
  out.threshold_mm = threshold_mm;
  out.pairs.clear();
  for (std::size_t k = 0; k < kNumPairs; ++k) {
    if (audit.per_pair_median_dev_mm[k] < threshold_mm) out.pairs.push_back(pair_at(k));
  }
  return out;
}

struct FeatureSelector::Spill {
  std::filesystem::path path;
  std::fstream file;
  std::size_t rows = 0;

  ~Spill() {
    file.close();
    std::error_code ec;
    std::filesystem::remove(path, ec);
  }
};

FeatureSelector::FeatureSelector(const LandmarkSet& reference, SelectorOptions options)
    : options_(std::move(options)), reference_(pairwise_distances(reference)),
      reference_subject_(reference.subject_id()) {
  if (!reference.all_finite()) throw Error(ErrorKind::NonFinite, "reference landmarks are not finite");
  if (options_.memory_cap_samples == 0) throw Error(ErrorKind::InvalidArgument, "memory cap must be >= 1 sample");
}

FeatureSelector::~FeatureSelector() = default;

void FeatureSelector::add(const LandmarkSet& sample) { add(std::span<const LandmarkSet>(&sample, 1)); }

void FeatureSelector::add(std::span<const LandmarkSet> samples) {
  std::size_t done = 0;
  while (done < samples.size()) {
    if (buffer_.size() / kNumPairs == options_.memory_cap_samples) flush();
    const std::size_t in_buffer = buffer_.size() / kNumPairs;
    const std::size_t take = std::min(samples.size() - done, options_.memory_cap_samples - in_buffer);
    buffer_.resize((in_buffer + take) * kNumPairs);
    parallel_for(take, resolve_threads(options_.threads), [&](std::size_t s) {
      const LandmarkSet& sample = samples[done + s];
      if (!sample.all_finite()) throw Error(ErrorKind::NonFinite, "posed sample is not finite");
      const auto d = pairwise_distances(sample);
      double* row = buffer_.data() + (in_buffer + s) * kNumPairs;
      for (std::size_t k = 0; k < kNumPairs; ++k) row[k] = std::abs(d[k] - reference_[k]);
    });
    done += take;
    count_ += take;
  }
}

void FeatureSelector::flush() {
  if (buffer_.empty()) return;
  if (!spill_) {
    spill_ = std::make_unique<Spill>();
    const auto dir = options_.spill_directory.empty() ? std::filesystem::temp_directory_path()
                                                      : options_.spill_directory;
    std::random_device entropy;
    spill_->path = dir / ("anthro-select-" + to_hex((static_cast<std::uint64_t>(entropy()) << 32) ^ entropy()) + ".bin");
    spill_->file.open(spill_->path, std::ios::binary | std::ios::in | std::ios::out | std::ios::trunc);
    if (!spill_->file) throw Error(ErrorKind::Io, "cannot create spill file " + spill_->path.string());
  }
  spill_->file.seekp(0, std::ios::end);
  spill_->file.write(reinterpret_cast<const char*>(buffer_.data()),
                     static_cast<std::streamsize>(buffer_.size() * sizeof(double)));
  if (!spill_->file) throw Error(ErrorKind::Io, "failed writing spill file");
  spill_->rows += buffer_.size() / kNumPairs;
  buffer_.clear();
}

namespace {

double lower_median(std::vector<double>& values) {
  const auto mid = values.begin() + static_cast<std::ptrdiff_t>((values.size() - 1) / 2);
  std::nth_element(values.begin(), mid, values.end());
  return *mid;
}

}  // namespace

FeatureSelection FeatureSelector::finish(double threshold_mm) {
  if (count_ == 0) throw Error(ErrorKind::EmptyStream, "no posed samples");
  if (!(threshold_mm > 0.0)) throw Error(ErrorKind::InvalidArgument, "threshold must be positive");
  FeatureSelection audit;
  audit.threshold_mm = threshold_mm;
  audit.reference_subject_id = reference_subject_;
  audit.n_poses = count_;
  audit.per_pair_median_dev_mm.assign(kNumPairs, 0.0);

  if (!spill_) {
    const std::size_t n = count_;
    parallel_for(kNumPairs, resolve_threads(options_.threads), [&](std::size_t k) {
      std::vector<double> column(n);
      for (std::size_t s = 0; s < n; ++s) column[s] = buffer_[s * kNumPairs + k];
      audit.per_pair_median_dev_mm[k] = lower_median(column);
    });
  } else {
    flush();
    const std::size_t n = spill_->rows;
    // Gather as many pair columns per pass as fit in the memory budget.
    const std::size_t block = std::clamp<std::size_t>(options_.memory_cap_samples * kNumPairs / n, 1, kNumPairs);
    std::vector<double> row(kNumPairs);
    for (std::size_t first = 0; first < kNumPairs; first += block) {
      const std::size_t width = std::min(block, kNumPairs - first);
      std::vector<std::vector<double>> columns(width, std::vector<double>(n));
      spill_->file.clear();
      spill_->file.seekg(0);
      for (std::size_t s = 0; s < n; ++s) {
        spill_->file.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(kNumPairs * sizeof(double)));
        if (!spill_->file) throw Error(ErrorKind::Io, "failed reading spill file");
        for (std::size_t c = 0; c < width; ++c) columns[c][s] = row[first + c];
      }
      parallel_for(width, resolve_threads(options_.threads), [&](std::size_t c) {
        audit.per_pair_median_dev_mm[first + c] = lower_median(columns[c]);
      });
    }
  }
  return apply_threshold(audit, threshold_mm);
}

FeatureSelection select_features(const LandmarkSet& reference_apose, std::span<const LandmarkSet> posed_samples,
                                 double threshold_mm, const SelectorOptions& options) {
  FeatureSelector selector(reference_apose, options);
  selector.add(posed_samples);
  return selector.finish(threshold_mm);
}

std::vector<double> feature_vector(const LandmarkSet& landmarks, const FeatureSelection& selection) {
  std::vector<double> out;
  out.reserve(selection.feature_count());
  const auto flat = flatten(landmarks);
  out.insert(out.end(), flat.begin(), flat.end());
  for (const auto& [i, j] : selection.pairs) out.push_back((landmarks.point(i) - landmarks.point(j)).norm());
  return out;
}

void save_selection(std::ostream& out, const FeatureSelection& selection) {
  const auto& registry = LandmarkRegistry::standard();
  const auto& names = registry.names();
  out << kSelectionMagic << '\t' << kSelectionVersion << '\n';
  out << "registry\t" << registry.version() << '\n';
  out << "threshold_mm\t" << format_real(selection.threshold_mm) << '\n';
  out << "reference_subject_id\t" << selection.reference_subject_id << '\n';
  out << "n_poses\t" << selection.n_poses << '\n';
  out << "median\tlower-middle\n";
  out << "digest\t" << selection.digest() << '\n';
  out << "pairs\t" << selection.pairs.size() << '\n';
  for (const auto& [i, j] : selection.pairs) out << names.at(i) << '\t' << names.at(j) << '\n';
  out << "medians\t" << selection.per_pair_median_dev_mm.size() << '\n';
  for (std::size_t k = 0; k < selection.per_pair_median_dev_mm.size(); ++k) {
    const auto [i, j] = pair_at(k);
    out << names[i] << '\t' << names[j] << '\t' << format_real(selection.per_pair_median_dev_mm[k]) << '\n';
  }
  if (!out) throw Error(ErrorKind::Io, "failed writing selection");
}

void save_selection(const std::filesystem::path& path, const FeatureSelection& selection) {
  auto out = open_output(path);
  save_selection(out, selection);
}

FeatureSelection load_selection(std::istream& in) {
  const auto& registry = LandmarkRegistry::standard();
  std::string line;
  std::size_t line_no = 0;
  const auto next = [&]() {
    if (!std::getline(in, line)) throw Error(ErrorKind::Parse, "selection: unexpected end of file");
    ++line_no;
    return split(trim(line), '\t');
  };
  const auto fail = [&](const std::string& msg) -> void {
    throw Error(ErrorKind::Parse, "selection line " + std::to_string(line_no) + ": " + msg);
  };
  const auto keyed = [&](std::string_view key) {
    auto f = next();
    if (f.size() != 2 || f[0] != key) fail("expected '" + std::string(key) + "'");
    return std::string(f[1]);
  };
  const auto index_pair = [&](std::string_view a, std::string_view b) {
    const auto i = registry.find(a), j = registry.find(b);
    if (!i || !j) fail("unknown landmark name");
    return *i < *j ? LandmarkPair{*i, *j} : LandmarkPair{*j, *i};
  };

  {
    const auto f = next();
    if (f.size() != 2 || f[0] != kSelectionMagic) fail("not a selection file");
    if (f[1] != kSelectionVersion) fail("unsupported selection version");
  }
  FeatureSelection sel;
  keyed("registry");
  sel.threshold_mm = parse_real(keyed("threshold_mm"));
  {
    const auto f = next();
    if (f.empty() || f[0] != "reference_subject_id") fail("expected 'reference_subject_id'");
    sel.reference_subject_id = f.size() > 1 ? std::string(f[1]) : std::string();
  }
  sel.n_poses = static_cast<std::size_t>(parse_integer(keyed("n_poses")));
  if (keyed("median") != "lower-middle") fail("unsupported median rule");
  const std::string digest = keyed("digest");
  const auto n_pairs = parse_integer(keyed("pairs"));
  for (long long p = 0; p < n_pairs; ++p) {
    const auto f = next();
    if (f.size() != 2) fail("pair line needs two names");
    sel.pairs.push_back(index_pair(f[0], f[1]));
  }
  std::sort(sel.pairs.begin(), sel.pairs.end());
  const auto n_medians = parse_integer(keyed("medians"));
  if (n_medians != static_cast<long long>(kNumPairs)) fail("expected 2415 medians");
  sel.per_pair_median_dev_mm.assign(kNumPairs, 0.0);
  std::vector<bool> seen(kNumPairs, false);
  for (std::size_t k = 0; k < kNumPairs; ++k) {
    const auto f = next();
    if (f.size() != 3) fail("median line needs two names and a value");
    const auto [i, j] = index_pair(f[0], f[1]);
    const auto idx = pair_index(i, j);
    if (seen[idx]) fail("duplicate median pair");
    seen[idx] = true;
    sel.per_pair_median_dev_mm[idx] = parse_real(f[2]);
  }
  if (sel.digest() != digest) throw Error(ErrorKind::Parse, "selection digest does not match its pairs");
  return sel;
}

FeatureSelection load_selection(const std::filesystem::path& path) {
  auto in = open_input(path);
  return load_selection(in);
}

}  // namespace anthro
