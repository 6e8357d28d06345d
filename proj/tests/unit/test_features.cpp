#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "anthro/error.hpp"
#include "anthro/features.hpp"
#include "test_support.hpp"

using namespace anthro;

namespace {

LandmarkSet random_set(Rng& rng) {
  Points p(kNumLandmarks, 3);
  for (Eigen::Index i = 0; i < p.size(); ++i) p.data()[i] = rng.uniform(-500, 500);
  return LandmarkSet(p, "S1");
}

LandmarkSet with_point(Points p, std::size_t i, const Eigen::Vector3d& v) {
  p.row(static_cast<Eigen::Index>(i)) = v.transpose();
  return LandmarkSet(p, "S1");
}

}  // namespace

TEST_CASE("pair index formula") {
  CHECK(kNumPairs == 2415);
  CHECK(pair_index(0, 1) == 0);
  CHECK(pair_index(0, 69) == 68);
  CHECK(pair_index(1, 2) == 69);
  CHECK(pair_index(68, 69) == 2414);
  std::size_t k = 0;
  for (std::size_t i = 0; i < kNumLandmarks; ++i) {
    for (std::size_t j = i + 1; j < kNumLandmarks; ++j, ++k) {
      CHECK(pair_index(i, j) == k);
      CHECK(pair_at(k) == LandmarkPair{i, j});
    }
  }
}

TEST_CASE("pairwise distances") {
  const LandmarkSet zero(Points::Zero(kNumLandmarks, 3));
  const auto d0 = pairwise_distances(zero);
  CHECK(std::all_of(d0.begin(), d0.end(), [](double v) { return v == 0.0; }));

  const auto one = with_point(Points::Zero(kNumLandmarks, 3), 5, Eigen::Vector3d(0, 100, 0));
  Points p = one.coords();
  p.row(9).setZero();
  const auto d1 = pairwise_distances(one);
  CHECK(std::count(d1.begin(), d1.end(), 100.0) == static_cast<long>(kNumLandmarks - 1));
  CHECK(d1[pair_index(5, 9)] == 100.0);
  CHECK(d1[pair_index(4, 9)] == 0.0);

  const auto two = with_point(with_point(Points::Zero(kNumLandmarks, 3), 3, Eigen::Vector3d(60, 0, 0)).coords(), 7,
                              Eigen::Vector3d(60, 0, 80));
  // Landmark 3 and 7 are 80 apart and both away from the origin; only (3, 7) is 80.
  const auto d2 = pairwise_distances(two);
  CHECK(std::count(d2.begin(), d2.end(), 80.0) == 1);
  CHECK(d2[pair_index(3, 7)] == 80.0);

  Rng rng(1);
  for (int t = 0; t < 20; ++t) {
    const auto l = random_set(rng);
    const auto d = pairwise_distances(l);
    std::size_t k = 0;
    for (std::size_t i = 0; i < kNumLandmarks; ++i) {
      for (std::size_t j = i + 1; j < kNumLandmarks; ++j) {
        CHECK(d[k++] == (l.point(i) - l.point(j)).norm());
      }
    }
  }
}

TEST_CASE("hand-built deviation stream") {
  Rng rng(2);
  const Points base = random_set(rng).coords();
  Points ref = base;
  ref.row(0) << 0, 0, 0;
  ref.row(1) << 100, 0, 0;
  const LandmarkSet reference(ref, "S1");
  std::vector<LandmarkSet> samples;
  for (double dx : {0.0, 5.0, 20.0}) samples.push_back(with_point(ref, 1, Eigen::Vector3d(100 + dx, 0, 0)));

  const auto at10 = select_features(reference, samples, 10.0);
  CHECK(at10.per_pair_median_dev_mm[0] == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(std::find(at10.pairs.begin(), at10.pairs.end(), LandmarkPair{0, 1}) != at10.pairs.end());
  const auto at4 = select_features(reference, samples, 4.0);
  CHECK(std::find(at4.pairs.begin(), at4.pairs.end(), LandmarkPair{0, 1}) == at4.pairs.end());
  CHECK(apply_threshold(at10, 4.0).pairs == at4.pairs);
  CHECK(at10.n_poses == 3);
  CHECK(at10.reference_subject_id == "S1");
}

TEST_CASE("median of an even count is the lower middle") {
  Rng rng(3);
  Points ref = random_set(rng).coords();
  ref.row(0) << 0, 0, 0;
  ref.row(1) << 100, 0, 0;
  std::vector<LandmarkSet> samples;
  for (double dx : {1.0, 2.0, 3.0, 4.0}) samples.push_back(with_point(ref, 1, Eigen::Vector3d(100 + dx, 0, 0)));
  const auto sel = select_features(LandmarkSet(ref), samples, 10.0);
  CHECK(sel.per_pair_median_dev_mm[0] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("reference and rigid copies select every pair") {
  Rng rng(4);
  const auto ref = random_set(rng);
  const std::vector<LandmarkSet> self{ref};
  CHECK(select_features(ref, self, 10.0).pairs.size() == kNumPairs);
  std::vector<LandmarkSet> moved;
  for (int t = 0; t < 5; ++t) moved.push_back(test::transform(ref, test::random_rigid(rng)));
  const auto sel = select_features(ref, moved, 1e-6);
  CHECK(sel.pairs.size() == kNumPairs);
}

TEST_CASE("selection shrinks as the threshold drops") {
  Rng rng(5);
  const auto ref = random_set(rng);
  std::vector<LandmarkSet> samples;
  for (int t = 0; t < 10; ++t) {
    Points p = ref.coords();
    for (Eigen::Index i = 0; i < p.size(); ++i) p.data()[i] += rng.normal() * 10.0;
    samples.emplace_back(p);
  }
  const auto audit = select_features(ref, samples, 1e9);
  std::size_t previous = kNumPairs;
  for (double th : {50.0, 20.0, 10.0, 5.0, 1.0}) {
    const auto s = apply_threshold(audit, th);
    CHECK(s.pairs.size() <= previous);
    previous = s.pairs.size();
    for (const auto& [i, j] : s.pairs) CHECK(audit.per_pair_median_dev_mm[pair_index(i, j)] < th);
  }
}

TEST_CASE("spilling to disk gives the same selection") {
  Rng rng(6);
  const auto ref = random_set(rng);
  std::vector<LandmarkSet> samples;
  for (int t = 0; t < 23; ++t) {
    Points p = ref.coords();
    for (Eigen::Index i = 0; i < p.size(); ++i) p.data()[i] += rng.normal() * 8.0;
    samples.emplace_back(p);
  }
  const auto in_memory = select_features(ref, samples, 10.0);
  SelectorOptions opts;
  opts.memory_cap_samples = 4;
  opts.spill_directory = test::scratch_dir("spill");
  FeatureSelector selector(ref, opts);
  for (const auto& s : samples) selector.add(s);
  CHECK(selector.spilled());
  CHECK(selector.count() == samples.size());
  const auto spilled = selector.finish(10.0);
  CHECK(spilled.per_pair_median_dev_mm == in_memory.per_pair_median_dev_mm);
  CHECK(spilled.pairs == in_memory.pairs);
}

TEST_CASE("empty stream is an error") {
  Rng rng(7);
  FeatureSelector selector(random_set(rng));
  try {
    selector.finish(10.0);
    FAIL("expected EmptyStream");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EmptyStream);
  }
}

TEST_CASE("feature vector layout and invariance") {
  Rng rng(8);
  const auto ref = random_set(rng);
  FeatureSelection none;
  none.per_pair_median_dev_mm.assign(kNumPairs, 0.0);
  const auto f0 = feature_vector(ref, none);
  const auto flat = flatten(ref);
  CHECK(std::equal(f0.begin(), f0.end(), flat.begin(), flat.end()));

  FeatureSelection sel = none;
  for (std::size_t k = 0; k < 158; ++k) sel.pairs.push_back(pair_at(k * 15));
  const auto f = feature_vector(ref, sel);
  CHECK(f.size() == 368);
  CHECK(sel.feature_count() == 368);

  const auto moved = test::transform(ref, test::random_rigid(rng));
  const auto g = feature_vector(moved, sel);
  for (std::size_t k = kNumCoordinates; k < f.size(); ++k) CHECK(g[k] == doctest::Approx(f[k]).epsilon(1e-12));
}

TEST_CASE("selection file round trip and digest") {
  Rng rng(9);
  const auto ref = random_set(rng);
  std::vector<LandmarkSet> samples;
  for (int t = 0; t < 5; ++t) {
    Points p = ref.coords();
    for (Eigen::Index i = 0; i < p.size(); ++i) p.data()[i] += rng.normal() * 10.0;
    samples.emplace_back(p);
  }
  const auto sel = select_features(ref, samples, 10.0);
  std::stringstream ss;
  save_selection(ss, sel);
  const std::string text = ss.str();
  const auto back = load_selection(ss);
  CHECK(back.pairs == sel.pairs);
  CHECK(back.per_pair_median_dev_mm == sel.per_pair_median_dev_mm);
  CHECK(back.digest() == sel.digest());
  CHECK(apply_threshold(sel, 3.0).digest() != sel.digest());

  // Dropping a pair (with a consistent count) is caught by the digest.
  REQUIRE(sel.pairs.size() > 1);
  const std::string count_line = "\npairs\t" + std::to_string(sel.pairs.size()) + "\n";
  const auto pos = text.find(count_line);
  REQUIRE(pos != std::string::npos);
  const auto first_pair_end = text.find('\n', pos + count_line.size());
  std::string tampered = text.substr(0, pos) + "\npairs\t" + std::to_string(sel.pairs.size() - 1) + "\n" +
                         text.substr(first_pair_end + 1);
  std::stringstream bad(tampered);
  CHECK_THROWS_AS(load_selection(bad), Error);
}
