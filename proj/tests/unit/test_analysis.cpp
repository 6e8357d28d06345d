#include <doctest.h>

#include <map>
#include <numbers>
#include <sstream>

#include "anthro/analysis.hpp"
#include "anthro/error.hpp"
#include "test_support.hpp"

using namespace anthro;

namespace {

const BodyModel& model() {
  static const BodyModel m = make_default_model(0);
  return m;
}

MeasurementVector mv(double v) {
  MeasurementVector m;
  m.values.fill(v);
  return m;
}

LabeledMeasurements lm(const std::string& subject, const std::string& pose, double v, char sex = '-') {
  return {subject, pose, mv(v), sex};
}

OptimConfig quick_ambiguity() { return OptimConfig::ambiguity_defaults(); }

}  // namespace

TEST_CASE("landmark jacobian is exact at the A-pose") {
  const auto& m = model();
  const Eigen::MatrixXd b = landmark_shape_jacobian(m);
  CHECK(b.rows() == static_cast<Eigen::Index>(kNumCoordinates));
  CHECK(b.cols() == static_cast<Eigen::Index>(m.num_shape()));
  Rng rng(1);
  const auto zero = PoseParams::zero(m.num_joints());
  const auto base = flatten(landmarks_of(m, ShapeParams::zero(m.num_shape()), zero));
  const auto beta = test::random_shape(m, rng);
  const auto shaped = flatten(landmarks_of(m, beta, zero));
  const Eigen::VectorXd delta = b * beta.coeffs;
  for (std::size_t i = 0; i < kNumCoordinates; ++i) {
    CHECK(std::abs(shaped[i] - base[i] - delta[static_cast<Eigen::Index>(i)]) < 1e-9);
  }
}

TEST_CASE("ambiguity objective definition") {
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(6, 2);
  b(0, 0) = 3.0;
  b(1, 0) = 4.0;  // landmark 0 moves by 5 per unit of delta_0
  b(5, 1) = 2.0;  // landmark 1 moves by 2 per unit of delta_1
  CHECK(ambiguity_objective(b, Eigen::Vector2d(1, 0), 1.0) == 5.0);
  CHECK(ambiguity_objective(b, Eigen::Vector2d(0, 2), 1.0) == 4.0 + 1.0);
  CHECK(ambiguity_objective(b, Eigen::Vector2d(0, 0), 1.0) == 1.0);
  CHECK(ambiguity_objective(b, Eigen::Vector2d(1, 0)) == doctest::Approx(5e-3));
}

TEST_CASE("a null shape direction is found exactly") {
  BodyModel m = with_shape_subset(model(), {0, 1, 2});
  // Column 2 keeps its body effect but no longer moves any landmark.
  for (int v : m.landmark_vertex_ids) m.shape_basis.block(3 * v, 2, 3, 1).setZero();
  const auto dir = optimize_ambiguity_direction(m, ShapeParams::zero(3), quick_ambiguity(), 2);
  CHECK(std::abs(std::abs(dir.delta.coeffs[2]) - 1.0) < 1e-6);
  CHECK(std::abs(dir.delta.coeffs[0]) < 1e-4);
  CHECK(std::abs(dir.delta.coeffs[1]) < 1e-4);
  CHECK(dir.objective < 1e-5);
  CHECK(dir.delta.coeffs.norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("optimizer matches a unit-sphere grid oracle for three components") {
  for (const auto& cols : std::vector<std::vector<std::size_t>>{{0, 2, 3}, {1, 4, 6}, {2, 7}}) {
    const BodyModel m = with_shape_subset(model(), cols);
    const Eigen::MatrixXd b = landmark_shape_jacobian(m);
    double grid_best = std::numeric_limits<double>::infinity();
    const int n = 360;
    for (int i = 0; i <= n; ++i) {
      const double theta = std::numbers::pi * i / n;
      for (int j = 0; j < 2 * n; ++j) {
        const double phi = std::numbers::pi * j / n;
        Eigen::VectorXd d(static_cast<Eigen::Index>(cols.size()));
        if (cols.size() == 3) {
          d << std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta);
        } else {
          d << std::cos(phi), std::sin(phi);
        }
        grid_best = std::min(grid_best, ambiguity_objective(b, d));
      }
    }
    const auto dir = optimize_ambiguity_direction(m, ShapeParams::zero(cols.size()), quick_ambiguity(), 2);
    CAPTURE(cols.size());
    CHECK(dir.objective <= grid_best * 1.01);
    CHECK(dir.objective == doctest::Approx(ambiguity_objective(b, dir.delta.coeffs)));
  }
}

TEST_CASE("ambiguity search is deterministic across thread counts") {
  const BodyModel m = with_shape_subset(model(), {0, 2, 3, 4});
  OptimConfig c = quick_ambiguity();
  c.max_iterations = 500;
  const auto a = optimize_ambiguity_direction(m, ShapeParams::zero(4), c, 1);
  const auto b = optimize_ambiguity_direction(m, ShapeParams::zero(4), c, 3);
  CHECK(a.delta.coeffs == b.delta.coeffs);
  CHECK(a.objective == b.objective);
  CHECK_THROWS_AS(optimize_ambiguity_direction(m, ShapeParams::zero(3), c, 1), Error);
}

TEST_CASE("sweep starts at zero and scales linearly for a scale direction") {
  const BodyModel m = with_shape_subset(model(), {0});
  ShapeParams delta = ShapeParams::zero(1);
  delta.coeffs[0] = 1.0;
  const std::vector<double> ks{0.0, 0.5, 1.0, 2.0, 4.0};
  const auto curve = sweep_ambiguity(m, ShapeParams::zero(1), delta, ks, 2);
  REQUIRE(curve.steps == ks);
  CHECK(curve.max_landmark_dist_mm[0] == 0.0);
  for (double v : curve.measurement_err_mm[0].values) CHECK(v == 0.0);
  const auto check_double = [&](std::size_t k, std::size_t k2) {
    CHECK(std::abs(curve.max_landmark_dist_mm[k2] - 2 * curve.max_landmark_dist_mm[k]) <=
          1e-6 * curve.max_landmark_dist_mm[k2]);
    for (std::size_t i = 0; i < kNumMeasurements; ++i) {
      if (m.measurement_defs[i].kind != MeasurementKind::Length) continue;
      const double a = curve.measurement_err_mm[k][i], b = curve.measurement_err_mm[k2][i];
      CHECK(std::abs(b - 2 * a) <= 1e-6 * b);
    }
  };
  check_double(1, 2);
  check_double(2, 3);
  check_double(3, 4);
  for (std::size_t k = 1; k < ks.size(); ++k) CHECK(curve.max_landmark_dist_mm[k] > curve.max_landmark_dist_mm[k - 1]);
}

TEST_CASE("sweep validation and curve file") {
  const auto& m = model();
  const auto zero = ShapeParams::zero(m.num_shape());
  ShapeParams delta = zero;
  delta.coeffs[2] = 1.0;
  CHECK_THROWS_AS(sweep_ambiguity(m, zero, delta, {1.0, 0.5}, 1), Error);
  const auto ks = default_k_values();
  CHECK(ks.size() == 51);
  CHECK(ks.front() == 0.0);
  CHECK(ks.back() == 25.0);
  const auto curve = sweep_ambiguity(m, zero, delta, {0.0, 1.0}, 1);
  std::ostringstream ss;
  write_curve_csv(ss, curve);
  const std::string text = ss.str();
  CHECK(text.rfind("# anthro-ambiguity v1", 0) == 0);
  CHECK(text.find("k,max_landmark_dist_mm,ankle_c_err_mm") != std::string::npos);
  CHECK(text.find("\n0,0,0,0,0,0,0,0,0,0,0,0,0\n") != std::string::npos);
}

TEST_CASE("mae hand computation") {
  MeasurementVector g1, g2, e1, e2;
  g1[0] = 100;
  g2[0] = 200;
  e1[0] = 90;
  e2[0] = 210;
  const auto r = mae({g1, g2}, {e1, e2});
  CHECK(r.per_measurement[0] == 10.0);
  CHECK(r.per_measurement[1] == 0.0);
  CHECK(r.average == doctest::Approx(10.0 / 11.0));
  CHECK(mae({e1, e2}, {g1, g2}).per_measurement == r.per_measurement);
  const auto self = mae({g1, g2}, {g1, g2});
  CHECK(self.average == 0.0);
}

TEST_CASE("mae errors") {
  try {
    mae(std::vector<MeasurementVector>{mv(1)}, std::vector<MeasurementVector>{mv(1), mv(2)});
    FAIL("expected LengthMismatch");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::LengthMismatch);
  }
  CHECK_THROWS_AS(mae(std::vector<MeasurementVector>{}, std::vector<MeasurementVector>{}), Error);
  try {
    mae(std::vector<LabeledMeasurements>{lm("S1", "a", 1)}, std::vector<LabeledMeasurements>{lm("S2", "a", 1)});
    FAIL("expected IdMismatch");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::IdMismatch);
  }
}

TEST_CASE("mae strata by sex") {
  const std::vector<LabeledMeasurements> gt{lm("S1", "a", 10, 'M'), lm("S2", "a", 10, 'F'), lm("S2", "b", 10, 'F')};
  const std::vector<LabeledMeasurements> est{lm("S1", "a", 14), lm("S2", "a", 11), lm("S2", "b", 12)};
  const auto r = mae(gt, est, true);
  CHECK(r.average == doctest::Approx(7.0 / 3.0));
  CHECK(r.n_subjects == 2);
  CHECK(r.n_records == 3);
  REQUIRE(r.strata.size() == 2);
  std::map<std::string, double> by;
  for (const auto& [name, s] : r.strata) by[name] = s.average;
  CHECK(by["M"] == doctest::Approx(4.0));
  CHECK(by["F"] == doctest::Approx(1.5));
}

TEST_CASE("sequence std hand computation") {
  const auto s = sequence_std({mv(10), mv(12), mv(8)});
  for (double v : s) CHECK(v == 2.0);
  for (double v : sequence_std({mv(7), mv(7), mv(7), mv(7)})) CHECK(v == 0.0);
  try {
    sequence_std({mv(1)});
    FAIL("expected TooFewFrames");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::TooFewFrames);
  }
  // A constant offset of every frame does not change the result.
  const auto shifted = sequence_std({mv(110), mv(112), mv(108)});
  CHECK(shifted == s);
}

TEST_CASE("sequence report averages subjects") {
  const std::vector<LabeledMeasurements> frames{lm("S1", "a", 10), lm("S1", "b", 12), lm("S1", "c", 8),
                                                lm("S2", "a", 5), lm("S2", "b", 5)};
  const auto r = sequence_report(frames);
  CHECK(r.mode == "sequence");
  CHECK(r.n_subjects == 2);
  CHECK(r.per_measurement[0] == doctest::Approx(1.0));
}

TEST_CASE("predictions csv round trip") {
  std::vector<LabeledMeasurements> rows{lm("S1", "a", 1.25), lm("S2", "b", 1.0 / 3.0)};
  std::stringstream ss;
  write_predictions_csv(ss, rows);
  CHECK(ss.str().rfind("# anthro-predictions v1", 0) == 0);
  const auto back = read_predictions_csv(ss);
  REQUIRE(back.size() == 2);
  CHECK(back[1].values.values == rows[1].values.values);
  CHECK(back[1].pose_id == "b");
  std::stringstream bad("# anthro-predictions v1 unit=mm\nsubject_id,pose_id\n");
  CHECK_THROWS_AS(read_predictions_csv(bad), Error);
}

TEST_CASE("report writers") {
  const auto r = mae(std::vector<MeasurementVector>{mv(1)}, std::vector<MeasurementVector>{mv(3)});
  std::ostringstream csv, txt;
  write_report_csv(csv, r);
  write_report_text(txt, r);
  CHECK(csv.str().rfind("# anthro-eval v1 mode=static", 0) == 0);
  CHECK(csv.str().find("Chest C.,2") != std::string::npos);
  CHECK(txt.str().find("amae_mm: 2") != std::string::npos);
}
