#include <doctest.h>

#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "anthro/dataset_gen.hpp"
#include "anthro/dataset_io.hpp"
#include "anthro/error.hpp"
#include "anthro/pose_sampler.hpp"
#include "test_support.hpp"

using namespace anthro;

namespace {

const BodyModel& model() {
  static const BodyModel m = make_default_model(0);
  return m;
}

std::string dataset_text(const GeneratedDataset& d) {
  std::ostringstream ss;
  write_dataset(ss, d.records);
  return ss.str();
}

}  // namespace

TEST_CASE("pose mix parsing") {
  const auto mix = parse_pose_mix("1/12,1/12,10/12");
  CHECK(mix.standing == doctest::Approx(1000.0 / 12000.0));
  CHECK(mix.sitting == doctest::Approx(1000.0 / 12000.0));
  CHECK(mix.varied == doctest::Approx(10000.0 / 12000.0));
  CHECK(parse_pose_mix("0.5, 0.5, 0").varied == 0.0);
  CHECK_THROWS_AS(parse_pose_mix("0.5,0.6,0"), Error);
  CHECK_THROWS_AS(parse_pose_mix("1,0"), Error);
  CHECK_THROWS_AS(parse_pose_mix("-0.5,0.5,1"), Error);
}

TEST_CASE("family assignment follows the mix exactly") {
  const auto fam = assign_families(12000, PoseMix{}, 1);
  std::map<PoseFamily, int> counts;
  for (auto f : fam) counts[f]++;
  CHECK(counts[PoseFamily::Standing] == 1000);
  CHECK(counts[PoseFamily::Sitting] == 1000);
  CHECK(counts[PoseFamily::Varied] == 10000);
  const auto small = assign_families(40, PoseMix{}, 1);
  std::map<PoseFamily, int> c40;
  for (auto f : small) c40[f]++;
  CHECK(c40[PoseFamily::Standing] + c40[PoseFamily::Sitting] + c40[PoseFamily::Varied] == 40);
  CHECK(c40[PoseFamily::Varied] >= 33);
  CHECK(c40[PoseFamily::Varied] <= 34);
  CHECK(c40[PoseFamily::Standing] >= 3);
  CHECK(assign_families(40, PoseMix{}, 1) == small);
}

TEST_CASE("sampled poses respect family limits") {
  const auto& m = model();
  Rng rng(2);
  const auto knee = m.joint_index("l_knee");
  const auto hip = m.joint_index("l_hip");
  for (int t = 0; t < 50; ++t) {
    const auto stand = sample_pose(m, PoseFamily::Standing, rng);
    CHECK(stand.root_translation.cwiseAbs().maxCoeff() <= 500.0);
    CHECK(stand.joint_rotations.row(static_cast<Eigen::Index>(knee)).norm() <= 10.0 * std::numbers::pi / 180 + 1e-12);
    const auto sit = sample_pose(m, PoseFamily::Sitting, rng);
    const double hip_angle = sit.joint_rotations.row(static_cast<Eigen::Index>(hip)).norm();
    CHECK(hip_angle >= 60.0 * std::numbers::pi / 180);
    CHECK(hip_angle <= 120.0 * std::numbers::pi / 180);
    const auto vary = sample_pose(m, PoseFamily::Varied, rng);
    for (Eigen::Index j = 0; j < vary.joint_rotations.rows(); ++j) {
      CHECK(vary.joint_rotations.row(j).norm() <= std::numbers::pi + 1e-12);
    }
  }
}

TEST_CASE("generate_dataset counts and ids") {
  GenerateOptions o;
  o.n_subjects = 2;
  o.poses_per_subject = 3;
  o.seed = 5;
  const auto d = generate_dataset(model(), o);
  REQUIRE(d.records.size() == 6);
  REQUIRE(d.params.size() == 6);
  CHECK(d.records[0].landmarks.subject_id() == "S0001");
  CHECK(d.records[5].landmarks.subject_id() == "S0002");
  for (const auto& r : d.records) {
    CHECK(r.measurements.has_value());
    CHECK((r.sex == 'M' || r.sex == 'F'));
  }
  o.include_apose = true;
  const auto with_a = generate_dataset(model(), o);
  CHECK(with_a.records.size() == 8);
  CHECK(with_a.records[0].landmarks.pose_id() == "apose");
}

TEST_CASE("generate_dataset is deterministic and thread independent") {
  GenerateOptions o;
  o.n_subjects = 4;
  o.poses_per_subject = 5;
  o.seed = 9;
  o.threads = 1;
  const auto a = dataset_text(generate_dataset(model(), o));
  o.threads = 3;
  const auto b = dataset_text(generate_dataset(model(), o));
  CHECK(a == b);
  o.seed = 10;
  CHECK(dataset_text(generate_dataset(model(), o)) != a);
}

TEST_CASE("records agree with their generator parameters") {
  GenerateOptions o;
  o.n_subjects = 3;
  o.poses_per_subject = 4;
  o.seed = 11;
  const auto d = generate_dataset(model(), o);
  for (std::size_t i = 0; i < d.records.size(); ++i) {
    const auto& p = d.params[i];
    CHECK(p.subject_id == d.records[i].landmarks.subject_id());
    CHECK(p.pose_id == d.records[i].landmarks.pose_id());
    CHECK(landmarks_of(model(), p.shape, p.pose).coords() == d.records[i].landmarks.coords());
    CHECK(measure_ground_truth(model(), p.shape).values == d.records[i].measurements->values);
    CHECK(p.shape.coeffs.cwiseAbs().maxCoeff() <= o.shape_clamp);
  }
}

TEST_CASE("first_subject offsets ids and draws") {
  GenerateOptions o;
  o.n_subjects = 2;
  o.poses_per_subject = 2;
  const auto full = generate_dataset(model(), o);
  o.n_subjects = 1;
  o.first_subject = 1;
  const auto tail = generate_dataset(model(), o);
  CHECK(tail.records[0].landmarks.subject_id() == "S0002");
  CHECK(tail.params[0].shape.coeffs == full.params[2].shape.coeffs);
}

TEST_CASE("test split by subject") {
  GenerateOptions o;
  o.n_subjects = 10;
  o.poses_per_subject = 2;
  const auto d = generate_dataset(model(), o);
  const auto ids = test_subjects(d.records, 0.2, 3);
  CHECK(ids.size() == 2);
  CHECK(std::is_sorted(ids.begin(), ids.end()));
  CHECK(test_subjects(d.records, 0.2, 3) == ids);
  CHECK(test_subjects(d.records, 0.0, 3).empty());
}

TEST_CASE("params round trip") {
  GenerateOptions o;
  o.n_subjects = 2;
  o.poses_per_subject = 2;
  const auto d = generate_dataset(model(), o);
  std::stringstream ss;
  write_params(ss, d.params);
  const auto back = read_params(ss);
  REQUIRE(back.size() == d.params.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].shape.coeffs == d.params[i].shape.coeffs);
    CHECK(back[i].pose.joint_rotations == d.params[i].pose.joint_rotations);
    CHECK(back[i].pose.root_translation == d.params[i].pose.root_translation);
  }
}
