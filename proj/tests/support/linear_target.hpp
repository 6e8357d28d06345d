#pragma once

#include <algorithm>
#include <numeric>

#include "anthro/dataset_gen.hpp"
#include "anthro/features.hpp"
#include "anthro/mlp.hpp"

namespace anthro::test {

// Feature/label matrices whose labels are an exact linear map of real
// featurized landmarks (158 pairs, 368 features), plus optional noise.
// Records are split by subject: the last `n_test_subjects` are held out.
struct LinearTask {
  FeatureSelection selection;
  TrainingData train;
  TrainingData held_out;
};

inline FeatureSelection lowest_median_pairs(const std::vector<LandmarkRecord>& records, std::size_t count) {
  std::vector<LandmarkSet> samples;
  for (const auto& r : records) {
    if (r.landmarks.subject_id() == records.front().landmarks.subject_id()) samples.push_back(r.landmarks);
  }
  const auto audit = select_features(samples.front(), samples, 1e9);
  std::vector<std::size_t> order(kNumPairs);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return audit.per_pair_median_dev_mm[a] < audit.per_pair_median_dev_mm[b];
  });
  order.resize(count);
  std::sort(order.begin(), order.end());
  FeatureSelection sel = audit;
  sel.pairs.clear();
  for (auto k : order) sel.pairs.push_back(pair_at(k));
  sel.threshold_mm = audit.per_pair_median_dev_mm[order.back()] + 1.0;
  return sel;
}

inline LinearTask make_linear_task(std::size_t n_train_subjects, std::size_t n_test_subjects, std::size_t poses,
                                   double noise_mm, std::uint64_t seed,
                                   std::size_t terms = 0, const PoseMix& mix = {}) {
  const BodyModel model = make_default_model(0);
  GenerateOptions g;
  g.n_subjects = n_train_subjects + n_test_subjects;
  g.poses_per_subject = poses;
  g.seed = seed;
  g.mix = mix;
  const auto data = generate_dataset(model, g);
  LinearTask task;
  task.selection = lowest_median_pairs(data.records, 158);
  const TrainingData all = build_training_data(data.records, task.selection, 1);

  // Random coefficients on the centred raw features (mm), rescaled so every
  // label has a 30 mm standard deviation around a plausible mean. With
  // `terms` > 0 each label uses only that many randomly chosen features.
  const Eigen::Index d = all.x.rows();
  const Eigen::MatrixXd centred = all.x.colwise() - all.x.rowwise().mean();
  Rng rng(derive_seed(seed, 100));
  Eigen::MatrixXd a(static_cast<Eigen::Index>(kNumMeasurements), d);
  if (terms == 0) {
    for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = rng.normal();
  } else {
    a.setZero();
    for (Eigen::Index m = 0; m < a.rows(); ++m) {
      for (std::size_t t = 0; t < terms; ++t) a(m, static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(d)))) = rng.normal();
    }
  }
  Eigen::MatrixXd y = a * centred;
  for (Eigen::Index m = 0; m < y.rows(); ++m) {
    const double sd = std::sqrt(y.row(m).squaredNorm() / static_cast<double>(y.cols()));
    y.row(m) = (y.row(m) * (30.0 / sd)).array() + (300.0 + 100.0 * static_cast<double>(m));
  }
  for (Eigen::Index i = 0; i < y.size(); ++i) y.data()[i] += noise_mm * rng.normal();

  const std::size_t per_subject = data.records.size() / g.n_subjects;
  const auto n_train = static_cast<Eigen::Index>(n_train_subjects * per_subject);
  task.train.x = all.x.leftCols(n_train);
  task.train.y = y.leftCols(n_train);
  task.train.groups.assign(all.groups.begin(), all.groups.begin() + n_train);
  task.held_out.x = all.x.rightCols(all.x.cols() - n_train);
  task.held_out.y = y.rightCols(all.x.cols() - n_train);
  task.held_out.groups.assign(all.groups.begin() + n_train, all.groups.end());
  return task;
}

// Per-output MAE of the model on the task's held-out part.
inline Eigen::VectorXd held_out_mae(const MlpModel& model, const TrainingData& data) {
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(data.y.rows());
  for (Eigen::Index s = 0; s < data.x.cols(); ++s) {
    sum += (forward(model, data.x.col(s)) - data.y.col(s)).cwiseAbs();
  }
  return sum / static_cast<double>(data.x.cols());
}

}  // namespace anthro::test
