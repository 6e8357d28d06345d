#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Core>

namespace anthro {

/// Derives an independent seed for (stream, index) from a user seed, so that
/// per-record draws do not depend on evaluation order or thread count.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index = 0);

// Streams used by the generators. Changing these changes every dataset.
enum class RngStream : std::uint64_t {
  ModelJitter = 1,
  SubjectShape = 2,
  Pose = 3,
  FamilyAssignment = 4,
  Split = 5,
  Noise = 6,
  Init = 7,
  Shuffle = 8,
  Restart = 9,
};

inline std::uint64_t derive_seed(std::uint64_t seed, RngStream stream, std::uint64_t index = 0) {
  return derive_seed(seed, static_cast<std::uint64_t>(stream), index);
}

// Distributions are written out by hand: the std:: ones are
// implementation-defined, and datasets must be byte-identical across
// standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform in [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);
  double normal();
  Eigen::Vector3d unit_vector();

 private:
  std::mt19937_64 engine_;
};

}  // namespace anthro
