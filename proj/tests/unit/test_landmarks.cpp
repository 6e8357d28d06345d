#include <doctest.h>

#include <limits>

#include "anthro/error.hpp"
#include "test_support.hpp"

using namespace anthro;

namespace {

LandmarkSet sample_landmarks(std::uint64_t seed) {
  static const BodyModel model = make_default_model(0);
  Rng rng(seed);
  return landmarks_of(model, test::random_shape(model, rng), test::random_pose(model, rng, 0.8, 400.0));
}

}  // namespace

TEST_CASE("registry has 70 names and pelvis anchors") {
  const auto& reg = LandmarkRegistry::standard();
  CHECK(reg.size() == kNumLandmarks);
  CHECK(reg.index_of("Lt. Psis") == reg.pelvis_anchors().lt_psis);
  CHECK(reg.index_of("Rt. Asis") == reg.pelvis_anchors().rt_asis);
  CHECK(reg.index_of("Nuchale") == reg.pelvis_anchors().nuchale);
  CHECK_FALSE(reg.find("Nose").has_value());
  CHECK_THROWS_AS(reg.index_of("Nose"), Error);
}

TEST_CASE("LandmarkSet rejects wrong row count") {
  CHECK_THROWS_AS(LandmarkSet(Points::Zero(69, 3)), Error);
}

TEST_CASE("normalize puts the pelvis triangle in the canonical frame") {
  const auto& a = LandmarkRegistry::standard().pelvis_anchors();
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto n = normalize(sample_landmarks(seed)).landmarks;
    const Eigen::Vector3d mid = 0.5 * (n.point(a.lt_psis) + n.point(a.rt_psis));
    const Eigen::Vector3d centroid = (mid + n.point(a.lt_asis) + n.point(a.rt_asis)) / 3.0;
    CHECK(centroid.norm() < 1e-9);
    CHECK(std::abs(mid.y()) < 1e-9);
    CHECK(std::abs(n.point(a.lt_asis).y()) < 1e-9);
    CHECK(std::abs(n.point(a.rt_asis).x()) < 1e-6);
    CHECK(n.point(a.rt_asis).z() > 0.0);
    CHECK(n.point(a.nuchale).y() > 0.0);
  }
}

TEST_CASE("normalize is a fixed point on normalized input") {
  const auto once = normalize(sample_landmarks(3));
  const auto twice = normalize(once.landmarks);
  CHECK(test::max_abs_diff(once.landmarks.coords(), twice.landmarks.coords()) < 1e-9);
  CHECK((twice.frame.rotation - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(twice.frame.translation.norm() < 1e-9);
}

TEST_CASE("normalize frame maps the input onto the output") {
  const auto raw = sample_landmarks(4);
  const auto n = normalize(raw);
  CHECK(test::max_abs_diff(n.frame.apply(raw.coords()), n.landmarks.coords()) < 1e-9);
  CHECK((n.frame.rotation.transpose() * n.frame.rotation - Eigen::Matrix3d::Identity()).norm() < 1e-12);
  CHECK(n.frame.rotation.determinant() == doctest::Approx(1.0));
}

TEST_CASE("normalize is invariant under rigid motion") {
  Rng rng(42);
  const auto base = sample_landmarks(5);
  const auto ref = normalize(base).landmarks.coords();
  for (int t = 0; t < 100; ++t) {
    const auto moved = test::transform(base, test::random_rigid(rng));
    CHECK(test::max_abs_diff(normalize(moved).landmarks.coords(), ref) < 1e-6);
  }
}

TEST_CASE("normalize keeps ids") {
  const auto raw = sample_landmarks(6);
  const LandmarkSet tagged(raw.coords(), "S1", "p1");
  const auto n = normalize(tagged).landmarks;
  CHECK(n.subject_id() == "S1");
  CHECK(n.pose_id() == "p1");
}

TEST_CASE("normalize rejects bad pelvis geometry") {
  const auto& a = LandmarkRegistry::standard().pelvis_anchors();
  const auto base = sample_landmarks(7);

  SUBCASE("missing coordinate") {
    Points p = base.coords();
    p(10, 1) = std::numeric_limits<double>::quiet_NaN();
    try {
      normalize(LandmarkSet(p));
      FAIL("expected NonFinite");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::NonFinite);
    }
  }
  SUBCASE("collinear anchors") {
    Points p = base.coords();
    p.row(static_cast<Eigen::Index>(a.lt_psis)) << 0, 0, 0;
    p.row(static_cast<Eigen::Index>(a.rt_psis)) << 0, 0, 0;
    p.row(static_cast<Eigen::Index>(a.lt_asis)) << 100, 0, 0;
    p.row(static_cast<Eigen::Index>(a.rt_asis)) << 200, 0, 0;
    try {
      normalize(LandmarkSet(p));
      FAIL("expected DegeneratePelvis");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::DegeneratePelvis);
    }
  }
  SUBCASE("nuchale in the pelvis plane") {
    Points p = base.coords();
    const Eigen::Vector3d mid = 0.5 * (base.point(a.lt_psis) + base.point(a.rt_psis));
    p.row(static_cast<Eigen::Index>(a.nuchale)) = (mid + 0.5 * (base.point(a.lt_asis) - mid)).transpose();
    try {
      normalize(LandmarkSet(p));
      FAIL("expected DegeneratePelvis");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::DegeneratePelvis);
    }
  }
}

TEST_CASE("flatten layout") {
  Points p = Points::Zero(kNumLandmarks, 3);
  CHECK(flatten(LandmarkSet(p)) == std::array<double, kNumCoordinates>{});
  p.row(0) << 1, 2, 3;
  p.row(69) << 4, 5, 6;
  const auto f = flatten(LandmarkSet(p));
  CHECK(f[0] == 1);
  CHECK(f[1] == 2);
  CHECK(f[2] == 3);
  CHECK(f[207] == 4);
  CHECK(f[209] == 6);
}

TEST_CASE("flatten and unflatten round trip") {
  Rng rng(9);
  for (int t = 0; t < 50; ++t) {
    Points p(kNumLandmarks, 3);
    for (Eigen::Index i = 0; i < p.size(); ++i) p.data()[i] = rng.uniform(-1000, 1000);
    const LandmarkSet l(p, "S", "P");
    const auto f = flatten(l);
    const auto back = unflatten(f, "S", "P");
    CHECK(back.coords() == l.coords());
  }
  std::vector<double> short_vec(10);
  CHECK_THROWS_AS(unflatten(short_vec), Error);
}
