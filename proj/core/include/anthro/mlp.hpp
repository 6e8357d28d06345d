#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "anthro/dataset_io.hpp"
#include "anthro/features.hpp"
#include "anthro/measurements.hpp"

namespace anthro {

inline constexpr std::string_view kMlpMagic = "anthro-mlp";
inline constexpr std::string_view kMlpVersion = "v1";
// Input pipeline identifier stored with every model.
inline constexpr std::string_view kNormalizationId = "pelvis-frame.v1;grid=2^-10mm";

enum class OptimizerKind { Adam, SgdMomentum };
const char* to_string(OptimizerKind kind) noexcept;
OptimizerKind optimizer_from_string(std::string_view text);

struct TrainConfig {
  std::vector<int> hidden = {194, 97};
  double learning_rate = 1e-3;
  std::size_t batch_size = 256;
  std::size_t epochs = 500;
  std::uint64_t seed = 0;
  OptimizerKind optimizer = OptimizerKind::Adam;
  double beta1 = 0.9;  // also the SGD momentum
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double validation_fraction = 0.1;
  std::size_t early_stop_patience = 50;
  // Feature standard deviations are floored at this value (mm) so that
  // near-constant inputs are not blown up by standardization.
  double min_feature_scale = 1.0;
  std::size_t threads = 0;  // featurization only

  void validate() const;
};

/// Fully connected ReLU network; no activation on the output layer. Inputs
/// are standardized with (x - x_mean) / x_scale and outputs mapped back with
/// y_mean + y_scale * raw; both default to the identity.
struct MlpModel {
  std::vector<int> layer_dims;
  std::vector<Eigen::MatrixXd> weights;  // layer l: dims[l+1] x dims[l]
  std::vector<Eigen::VectorXd> biases;
  Eigen::VectorXd x_mean, x_scale, y_mean, y_scale;
  std::string registry_version;
  std::string selection_digest;
  std::string normalization_id;
  std::vector<std::string> output_names;
  // Free-form key/value training metadata, written in order.
  std::vector<std::pair<std::string, std::string>> meta;

  /// He-uniform weights and zero biases from a seeded stream.
  static MlpModel initialize(const std::vector<int>& dims, std::uint64_t seed);

  std::size_t num_layers() const { return weights.size(); }
  std::size_t num_parameters() const;
  void validate() const;
};

/// Network output for one input, standardization included.
Eigen::VectorXd forward(const MlpModel& model, const Eigen::VectorXd& x);
/// Raw network on a batch (columns are samples), no standardization.
Eigen::MatrixXd forward_raw(const MlpModel& model, const Eigen::MatrixXd& x);

struct Gradients {
  double mse = 0.0;
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;
};

/// MSE over the batch and all outputs of the raw network (columns of x and
/// y are samples) and its exact gradient.
Gradients loss_and_grad(const MlpModel& model, const Eigen::MatrixXd& x, const Eigen::MatrixXd& y);

/// normalize, snap coordinates to a 2^-10 mm grid, feature_vector. The snap
/// removes rounding noise of the frame computation, making features of
/// rigidly moved copies bitwise equal in practice.
std::vector<double> featurize(const LandmarkSet& landmarks, const FeatureSelection& selection);

struct TrainingData {
  Eigen::MatrixXd x;  // features x samples
  Eigen::MatrixXd y;  // outputs x samples
  std::vector<std::string> groups;  // subject id per sample
};

/// Featurizes labelled records. Throws Error(InsufficientData) for
/// unlabelled records or fewer than 2 records.
TrainingData build_training_data(const std::vector<LandmarkRecord>& records, const FeatureSelection& selection,
                                 std::size_t threads = 0);

struct EpochLog {
  std::size_t epoch = 0;
  double train_mse = 0.0;  // mm^2
  double val_mse = 0.0;    // mm^2, NaN without validation
};

struct TrainResult {
  MlpModel model;
  std::vector<EpochLog> log;
  std::size_t best_epoch = 0;
};

/// Mini-batch training. Validation subjects are a seeded fraction of the
/// distinct groups; with validation the best-validation parameters are
/// returned and training stops after `early_stop_patience` epochs without
/// improvement. Throws Error(NonFiniteLoss) naming the epoch on divergence.
TrainResult train(const TrainingData& data, const TrainConfig& config, const std::string& selection_digest = {});
TrainResult train(const std::vector<LandmarkRecord>& records, const FeatureSelection& selection,
                  const TrainConfig& config);

/// featurize then forward. Throws Error(SelectionMismatch) when the model
/// was trained on another selection.
MeasurementVector predict(const MlpModel& model, const LandmarkSet& landmarks, const FeatureSelection& selection);

void save_mlp(std::ostream& out, const MlpModel& model);
void save_mlp(const std::filesystem::path& path, const MlpModel& model);
MlpModel load_mlp(std::istream& in);
MlpModel load_mlp(const std::filesystem::path& path);

void write_training_log(std::ostream& out, const std::vector<EpochLog>& log);

}  // namespace anthro
