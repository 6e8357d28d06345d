#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "anthro/landmarks.hpp"

namespace anthro {

inline constexpr std::size_t kNumPairs = kNumLandmarks * (kNumLandmarks - 1) / 2;  // 2415

using LandmarkPair = std::pair<std::size_t, std::size_t>;

/// Position of (i, j), i < j, in lexicographic pair order.
std::size_t pair_index(std::size_t i, std::size_t j);
LandmarkPair pair_at(std::size_t k);

/// out[pair_index(i, j)] = |p_i - p_j|.
std::vector<double> pairwise_distances(const LandmarkSet& landmarks);

inline constexpr std::string_view kSelectionMagic = "anthro-selection";
inline constexpr std::string_view kSelectionVersion = "v1";

struct FeatureSelection {
  std::vector<LandmarkPair> pairs;  // lexicographic, median deviation < threshold_mm
  double threshold_mm = 10.0;
  std::vector<double> per_pair_median_dev_mm;  // all 2415 pairs
  std::string reference_subject_id;
  std::size_t n_poses = 0;

  /// Identifies the feature layout: FNV-1a over the registry version and
  /// the selected pair names, in order.
  std::string digest() const;
  std::size_t feature_count() const { return kNumCoordinates + pairs.size(); }
};

/// Pairs with median deviation strictly below `threshold_mm`.
FeatureSelection apply_threshold(const FeatureSelection& audit, double threshold_mm);

struct SelectorOptions {
  // Samples kept in memory; beyond this, deviation rows go to a temporary
  // file and medians are computed pair block by pair block.
  std::size_t memory_cap_samples = 20000;
  std::filesystem::path spill_directory;  // default: system temp directory
  std::size_t threads = 1;
};

/// Accumulates |d_k(sample) - d_k(reference)| for every pair and sample.
/// The median of n values is the lower-middle order statistic, element
/// (n - 1) / 2 of the sorted list.
class FeatureSelector {
 public:
  explicit FeatureSelector(const LandmarkSet& reference, SelectorOptions options = {});
  ~FeatureSelector();
  FeatureSelector(const FeatureSelector&) = delete;
  FeatureSelector& operator=(const FeatureSelector&) = delete;

  void add(const LandmarkSet& sample);
  void add(std::span<const LandmarkSet> samples);
  std::size_t count() const { return count_; }
  bool spilled() const { return spill_ != nullptr; }

  /// Throws Error(EmptyStream) when no sample was added.
  FeatureSelection finish(double threshold_mm);

 private:
  void flush();

  SelectorOptions options_;
  std::vector<double> reference_;
  std::string reference_subject_;
  std::vector<double> buffer_;  // sample-major, kNumPairs per sample
  std::size_t count_ = 0;
  struct Spill;
  std::unique_ptr<Spill> spill_;
};

/// One-shot form of FeatureSelector.
FeatureSelection select_features(const LandmarkSet& reference_apose, std::span<const LandmarkSet> posed_samples,
                                 double threshold_mm, const SelectorOptions& options = {});

/// flatten(landmarks) followed by the selected pair distances. The input is
/// used as is; normalizing is the caller's job.
std::vector<double> feature_vector(const LandmarkSet& landmarks, const FeatureSelection& selection);

void save_selection(std::ostream& out, const FeatureSelection& selection);
void save_selection(const std::filesystem::path& path, const FeatureSelection& selection);
FeatureSelection load_selection(std::istream& in);
FeatureSelection load_selection(const std::filesystem::path& path);

}  // namespace anthro
