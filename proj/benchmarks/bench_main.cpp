#include <benchmark/benchmark.h>

#include "anthro/body_model.hpp"
#include "anthro/dataset_gen.hpp"
#include "anthro/features.hpp"
#include "anthro/landmarks.hpp"
#include "anthro/mesh.hpp"
#include "anthro/mlp.hpp"

using namespace anthro;

namespace {

const BodyModel& model() {
  static const BodyModel m = make_default_model(0);
  return m;
}

const GeneratedDataset& dataset() {
  static const GeneratedDataset d = [] {
    GenerateOptions g;
    g.n_subjects = 10;
    g.poses_per_subject = 20;
    g.include_apose = true;
    return generate_dataset(model(), g);
  }();
  return d;
}

const FeatureSelection& selection() {
  static const FeatureSelection s = [] {
    const auto& d = dataset();
    std::vector<LandmarkSet> posed;
    for (std::size_t r = 1; r <= 20; ++r) posed.push_back(d.records[r].landmarks);
    return select_features(d.records[0].landmarks, posed, 10.0);
  }();
  return s;
}

void BM_Normalize(benchmark::State& state) {
  const LandmarkSet& l = dataset().records[3].landmarks;
  for (auto _ : state) benchmark::DoNotOptimize(normalize(l));
}
BENCHMARK(BM_Normalize);

void BM_PoseMesh(benchmark::State& state) {
  const auto& p = dataset().params[3];
  for (auto _ : state) benchmark::DoNotOptimize(pose_mesh(model(), p.shape, p.pose));
}
BENCHMARK(BM_PoseMesh)->Unit(benchmark::kMicrosecond);

void BM_LandmarksOf(benchmark::State& state) {
  const auto& p = dataset().params[3];
  for (auto _ : state) benchmark::DoNotOptimize(landmarks_of(model(), p.shape, p.pose));
}
BENCHMARK(BM_LandmarksOf)->Unit(benchmark::kMicrosecond);

void BM_CrossSection(benchmark::State& state) {
  const TriMesh mesh = repose_to_apose(model(), dataset().params[0].shape);
  const Eigen::Vector3d origin = mesh.vertices.colwise().mean().transpose();
  for (auto _ : state) benchmark::DoNotOptimize(plane_cross_section(mesh, origin, Eigen::Vector3d::UnitY()));
}
BENCHMARK(BM_CrossSection)->Unit(benchmark::kMicrosecond);

void BM_Featurize(benchmark::State& state) {
  const LandmarkSet& l = dataset().records[3].landmarks;
  for (auto _ : state) benchmark::DoNotOptimize(featurize(l, selection()));
}
BENCHMARK(BM_Featurize);

void BM_MlpForward(benchmark::State& state) {
  const MlpModel net = MlpModel::initialize({static_cast<int>(selection().feature_count()), 194, 97, static_cast<int>(kNumMeasurements)}, 1);
  const Eigen::VectorXd x = Eigen::VectorXd::Random(net.layer_dims.front());
  for (auto _ : state) benchmark::DoNotOptimize(forward(net, x));
}
BENCHMARK(BM_MlpForward);

void BM_MlpBatchGradient(benchmark::State& state) {
  const int in = static_cast<int>(selection().feature_count());
  const MlpModel net = MlpModel::initialize({in, 194, 97, static_cast<int>(kNumMeasurements)}, 1);
  const Eigen::MatrixXd x = Eigen::MatrixXd::Random(in, 256);
  const Eigen::MatrixXd y = Eigen::MatrixXd::Random(static_cast<Eigen::Index>(kNumMeasurements), 256);
  for (auto _ : state) benchmark::DoNotOptimize(loss_and_grad(net, x, y));
}
BENCHMARK(BM_MlpBatchGradient)->Unit(benchmark::kMicrosecond);

void BM_TrainEpoch(benchmark::State& state) {
  const TrainingData data = build_training_data(dataset().records, selection());
  TrainConfig config;
  config.epochs = 1;
  config.validation_fraction = 0.0;
  for (auto _ : state) benchmark::DoNotOptimize(train(data, config));
}
BENCHMARK(BM_TrainEpoch)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
