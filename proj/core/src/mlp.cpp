#include "anthro/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <set>

#include "anthro/error.hpp"
#include "anthro/parallel.hpp"
#include "anthro/rng.hpp"
#include "anthro/text_format.hpp"

namespace anthro {

const char* to_string(OptimizerKind kind) noexcept {
  return kind == OptimizerKind::Adam ? "adam" : "sgd-momentum";
}

OptimizerKind optimizer_from_string(std::string_view text) {
  if (text == "adam") return OptimizerKind::Adam;
  if (text == "sgd-momentum" || text == "sgd") return OptimizerKind::SgdMomentum;
  throw Error(ErrorKind::InvalidArgument, "unknown optimizer '" + std::string(text) + "'");
}

void TrainConfig::validate() const {
  const auto fail = [](const char* msg) { throw Error(ErrorKind::InvalidArgument, msg); };
  for (int h : hidden) {
    if (h <= 0) fail("hidden layer sizes must be positive");
  }
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) fail("learning_rate must be >= 0");
  if (batch_size == 0) fail("batch_size must be positive");
  if (epochs == 0) fail("epochs must be positive");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) fail("beta1/beta2 must be in [0, 1)");
  if (!(epsilon > 0.0)) fail("epsilon must be positive");
  if (!(validation_fraction >= 0.0 && validation_fraction <= 0.5)) fail("validation_fraction must be in [0, 0.5]");
  if (early_stop_patience == 0) fail("early_stop_patience must be positive");
  if (!(min_feature_scale > 0.0)) fail("min_feature_scale must be positive");
}

MlpModel MlpModel::initialize(const std::vector<int>& dims, std::uint64_t seed) {
  if (dims.size() < 2) throw Error(ErrorKind::InvalidArgument, "an MLP needs at least two layer sizes");
  for (int d : dims) {
    if (d <= 0) throw Error(ErrorKind::InvalidArgument, "layer sizes must be positive");
  }
  MlpModel m;
  m.layer_dims = dims;
  Rng rng(derive_seed(seed, RngStream::Init));
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const double limit = std::sqrt(6.0 / dims[l]);
    Eigen::MatrixXd w(dims[l + 1], dims[l]);
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = rng.uniform(-limit, limit);
    }
    m.weights.push_back(std::move(w));
    m.biases.push_back(Eigen::VectorXd::Zero(dims[l + 1]));
  }
  m.x_mean = Eigen::VectorXd::Zero(dims.front());
  m.x_scale = Eigen::VectorXd::Ones(dims.front());
  m.y_mean = Eigen::VectorXd::Zero(dims.back());
  m.y_scale = Eigen::VectorXd::Ones(dims.back());
  m.registry_version = std::string(LandmarkRegistry::standard().version());
  m.normalization_id = std::string(kNormalizationId);
  if (dims.back() == static_cast<int>(kNumMeasurements)) {
    m.output_names.assign(measurement_names().begin(), measurement_names().end());
  } else {
    for (int i = 0; i < dims.back(); ++i) m.output_names.push_back("y" + std::to_string(i));
  }
  return m;
}

std::size_t MlpModel::num_parameters() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) n += weights[l].size() + biases[l].size();
  return n;
}

void MlpModel::validate() const {
  const auto fail = [](const std::string& msg) { throw Error(ErrorKind::InvalidArgument, "mlp: " + msg); };
  if (layer_dims.size() < 2 || weights.size() + 1 != layer_dims.size() || biases.size() != weights.size()) {
    fail("layer count");
  }
  for (std::size_t l = 0; l < weights.size(); ++l) {
    if (weights[l].rows() != layer_dims[l + 1] || weights[l].cols() != layer_dims[l] ||
        biases[l].size() != layer_dims[l + 1]) {
      fail("layer " + std::to_string(l) + " shape does not match layer_dims");
    }
    if (!weights[l].allFinite() || !biases[l].allFinite()) fail("non-finite parameters");
  }
  if (x_mean.size() != layer_dims.front() || x_scale.size() != layer_dims.front() ||
      y_mean.size() != layer_dims.back() || y_scale.size() != layer_dims.back()) {
    fail("standardization vector sizes");
  }
  if ((x_scale.array() <= 0.0).any() || (y_scale.array() <= 0.0).any()) fail("standardization scales must be positive");
  if (output_names.size() != static_cast<std::size_t>(layer_dims.back())) fail("output names");
}

Eigen::MatrixXd forward_raw(const MlpModel& model, const Eigen::MatrixXd& x) {
  if (x.rows() != model.layer_dims.front()) {
    throw Error(ErrorKind::DimensionMismatch, "input has " + std::to_string(x.rows()) + " features, model expects " +
                                                  std::to_string(model.layer_dims.front()));
  }
  Eigen::MatrixXd h = x;
  for (std::size_t l = 0; l < model.weights.size(); ++l) {
    Eigen::MatrixXd z = model.weights[l] * h;
    z.colwise() += model.biases[l];
    h = l + 1 < model.weights.size() ? Eigen::MatrixXd(z.cwiseMax(0.0)) : z;
  }
  return h;
}

Eigen::VectorXd forward(const MlpModel& model, const Eigen::VectorXd& x) {
  if (x.size() != model.layer_dims.front()) {
    throw Error(ErrorKind::DimensionMismatch, "input has " + std::to_string(x.size()) + " features, model expects " +
                                                  std::to_string(model.layer_dims.front()));
  }
  const Eigen::VectorXd xs = (x - model.x_mean).cwiseQuotient(model.x_scale);
  const Eigen::VectorXd raw = forward_raw(model, xs);
  return model.y_mean + model.y_scale.cwiseProduct(raw);
}

Gradients loss_and_grad(const MlpModel& model, const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
  if (x.rows() != model.layer_dims.front() || y.rows() != model.layer_dims.back() || x.cols() != y.cols() ||
      x.cols() == 0) {
    throw Error(ErrorKind::DimensionMismatch, "batch shapes do not match the model");
  }
  const std::size_t L = model.weights.size();
  std::vector<Eigen::MatrixXd> activations(L + 1), pre(L);
  activations[0] = x;
  for (std::size_t l = 0; l < L; ++l) {
    pre[l] = model.weights[l] * activations[l];
    pre[l].colwise() += model.biases[l];
    activations[l + 1] = l + 1 < L ? Eigen::MatrixXd(pre[l].cwiseMax(0.0)) : pre[l];
  }
  const Eigen::MatrixXd diff = activations[L] - y;
  const double count = static_cast<double>(diff.size());
  Gradients g;
  g.mse = diff.squaredNorm() / count;
  g.weights.resize(L);
  g.biases.resize(L);
  Eigen::MatrixXd delta = (2.0 / count) * diff;  // d mse / d pre[L-1]
  for (std::size_t l = L; l-- > 0;) {
    g.weights[l] = delta * activations[l].transpose();
    g.biases[l] = delta.rowwise().sum();
    if (l > 0) {
      delta = (model.weights[l].transpose() * delta).cwiseProduct((pre[l - 1].array() > 0.0).cast<double>().matrix());
    }
  }
  return g;
}

std::vector<double> featurize(const LandmarkSet& landmarks, const FeatureSelection& selection) {
  const NormalizedLandmarks normalized = normalize(landmarks);
  Points snapped = normalized.landmarks.coords();
  snapped = (snapped.array() * 1024.0).round() / 1024.0;
  return feature_vector(LandmarkSet(std::move(snapped), landmarks.subject_id(), landmarks.pose_id()), selection);
}

TrainingData build_training_data(const std::vector<LandmarkRecord>& records, const FeatureSelection& selection,
                                 std::size_t threads) {
  if (records.size() < 2) throw Error(ErrorKind::InsufficientData, "training needs at least 2 labelled records");
  for (std::size_t r = 0; r < records.size(); ++r) {
    if (!records[r].measurements || !records[r].measurements->all_finite()) {
      throw Error(ErrorKind::InsufficientData, "record " + std::to_string(r + 1) + " (" +
                                                   records[r].landmarks.subject_id() + "/" +
                                                   records[r].landmarks.pose_id() + ") has no measurements");
    }
  }
  TrainingData data;
  const auto n = static_cast<Eigen::Index>(records.size());
  data.x.resize(static_cast<Eigen::Index>(selection.feature_count()), n);
  data.y.resize(static_cast<Eigen::Index>(kNumMeasurements), n);
  data.groups.resize(records.size());
  parallel_for(records.size(), resolve_threads(threads), [&](std::size_t r) {
    const auto f = featurize(records[r].landmarks, selection);
    const auto c = static_cast<Eigen::Index>(r);
    data.x.col(c) = Eigen::Map<const Eigen::VectorXd>(f.data(), static_cast<Eigen::Index>(f.size()));
    for (std::size_t m = 0; m < kNumMeasurements; ++m) data.y(static_cast<Eigen::Index>(m), c) = (*records[r].measurements)[m];
    data.groups[r] = records[r].landmarks.subject_id();
  });
  return data;
}

namespace {

struct Moments {
  std::vector<Eigen::MatrixXd> mw, vw;
  std::vector<Eigen::VectorXd> mb, vb;

  explicit Moments(const MlpModel& m) {
    for (std::size_t l = 0; l < m.weights.size(); ++l) {
      mw.push_back(Eigen::MatrixXd::Zero(m.weights[l].rows(), m.weights[l].cols()));
      vw.push_back(mw.back());
      mb.push_back(Eigen::VectorXd::Zero(m.biases[l].size()));
      vb.push_back(mb.back());
    }
  }
};

template <typename T>
void adam_update(T& param, T& m, T& v, const T& grad, const TrainConfig& c, double c1, double c2) {
  m = c.beta1 * m + (1.0 - c.beta1) * grad;
  v = c.beta2 * v + (1.0 - c.beta2) * grad.cwiseAbs2();
  param.array() -= c.learning_rate * (m.array() / c1) / ((v.array() / c2).sqrt() + c.epsilon);
}

template <typename T>
void momentum_update(T& param, T& m, const T& grad, const TrainConfig& c) {
  m = c.beta1 * m + grad;
  param -= c.learning_rate * m;
}

double mse_mm(const MlpModel& model, const Eigen::MatrixXd& xs, const Eigen::MatrixXd& y) {
  if (xs.cols() == 0) return std::numeric_limits<double>::quiet_NaN();
  Eigen::MatrixXd pred = forward_raw(model, xs);
  pred = (pred.array().colwise() * model.y_scale.array()).colwise() + model.y_mean.array();
  return (pred - y).squaredNorm() / static_cast<double>(pred.size());
}

Eigen::MatrixXd gather(const Eigen::MatrixXd& m, const std::vector<Eigen::Index>& cols) {
  Eigen::MatrixXd out(m.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < cols.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = m.col(cols[i]);
  return out;
}

}  // namespace

TrainResult train(const TrainingData& data, const TrainConfig& config, const std::string& selection_digest) {
  config.validate();
  const Eigen::Index n = data.x.cols();
  if (n < 2 || data.y.cols() != n || data.groups.size() != static_cast<std::size_t>(n)) {
    throw Error(ErrorKind::InsufficientData, "training needs at least 2 labelled records");
  }

  // Validation subjects.
  std::vector<std::string> groups;
  {
    std::set<std::string> seen;
    for (const auto& g : data.groups) {
      if (seen.insert(g).second) groups.push_back(g);
    }
  }
  std::set<std::string> val_groups;
  if (config.validation_fraction > 0.0 && groups.size() >= 2) {
    Rng rng(derive_seed(config.seed, RngStream::Split));
    for (std::size_t i = groups.size(); i > 1; --i) std::swap(groups[i - 1], groups[rng.below(i)]);
    auto n_val = static_cast<std::size_t>(std::llround(config.validation_fraction * static_cast<double>(groups.size())));
    n_val = std::clamp<std::size_t>(n_val, 1, groups.size() - 1);
    val_groups.insert(groups.begin(), groups.begin() + static_cast<std::ptrdiff_t>(n_val));
  }
  std::vector<Eigen::Index> train_idx, val_idx;
  for (Eigen::Index i = 0; i < n; ++i) {
    (val_groups.count(data.groups[static_cast<std::size_t>(i)]) ? val_idx : train_idx).push_back(i);
  }
  const Eigen::MatrixXd x_train = gather(data.x, train_idx), y_train = gather(data.y, train_idx);
  const Eigen::MatrixXd x_val = gather(data.x, val_idx), y_val = gather(data.y, val_idx);

  std::vector<int> dims = {static_cast<int>(data.x.rows())};
  dims.insert(dims.end(), config.hidden.begin(), config.hidden.end());
  dims.push_back(static_cast<int>(data.y.rows()));
  MlpModel model = MlpModel::initialize(dims, config.seed);
  model.selection_digest = selection_digest;

  const double nt = static_cast<double>(x_train.cols());
  model.x_mean = x_train.rowwise().mean();
  model.x_scale = ((x_train.colwise() - model.x_mean).rowwise().squaredNorm() / nt).cwiseSqrt().cwiseMax(config.min_feature_scale);
  model.y_mean = y_train.rowwise().mean();
  model.y_scale = ((y_train.colwise() - model.y_mean).rowwise().squaredNorm() / nt).cwiseSqrt().cwiseMax(1e-6);
  const auto standardize_x = [&](const Eigen::MatrixXd& x) {
    return Eigen::MatrixXd((x.colwise() - model.x_mean).array().colwise() / model.x_scale.array());
  };
  const Eigen::MatrixXd xs_train = standardize_x(x_train), xs_val = standardize_x(x_val);
  const Eigen::MatrixXd ys_train =
      ((y_train.colwise() - model.y_mean).array().colwise() / model.y_scale.array()).matrix();

  TrainResult result;
  MlpModel best = model;
  double best_val = std::numeric_limits<double>::infinity();
  std::size_t since_best = 0;
  Moments moments(model);
  std::size_t step = 0;
  std::vector<Eigen::Index> order(train_idx.size());
  const bool use_validation = !val_idx.empty();

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    Rng rng(derive_seed(config.seed, RngStream::Shuffle, epoch));
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      const std::vector<Eigen::Index> batch(order.begin() + static_cast<std::ptrdiff_t>(start),
                                            order.begin() + static_cast<std::ptrdiff_t>(end));
      const Gradients g = loss_and_grad(model, gather(xs_train, batch), gather(ys_train, batch));
      if (!std::isfinite(g.mse)) {
        throw Error(ErrorKind::NonFiniteLoss, "loss diverged in epoch " + std::to_string(epoch));
      }
      ++step;
      const double c1 = 1.0 - std::pow(config.beta1, static_cast<double>(step));
      const double c2 = 1.0 - std::pow(config.beta2, static_cast<double>(step));
      for (std::size_t l = 0; l < model.weights.size(); ++l) {
        if (config.optimizer == OptimizerKind::Adam) {
          adam_update(model.weights[l], moments.mw[l], moments.vw[l], g.weights[l], config, c1, c2);
          adam_update(model.biases[l], moments.mb[l], moments.vb[l], g.biases[l], config, c1, c2);
        } else {
          momentum_update(model.weights[l], moments.mw[l], g.weights[l], config);
          momentum_update(model.biases[l], moments.mb[l], g.biases[l], config);
        }
      }
    }
    EpochLog entry{epoch, mse_mm(model, xs_train, y_train), mse_mm(model, xs_val, y_val)};
    if (!std::isfinite(entry.train_mse)) {
      throw Error(ErrorKind::NonFiniteLoss, "loss diverged in epoch " + std::to_string(epoch));
    }
    result.log.push_back(entry);
    if (use_validation) {
      if (entry.val_mse < best_val) {
        best_val = entry.val_mse;
        best = model;
        result.best_epoch = epoch;
        since_best = 0;
      } else if (++since_best >= config.early_stop_patience) {
        break;
      }
    }
  }
  if (use_validation) {
    model = std::move(best);
  } else {
    result.best_epoch = result.log.size();
  }
  model.meta = {{"optimizer", to_string(config.optimizer)},
                {"learning_rate", format_real(config.learning_rate)},
                {"batch_size", std::to_string(config.batch_size)},
                {"epochs", std::to_string(config.epochs)},
                {"epochs_run", std::to_string(result.log.size())},
                {"best_epoch", std::to_string(result.best_epoch)},
                {"seed", std::to_string(config.seed)},
                {"validation_fraction", format_real(config.validation_fraction)},
                {"train_records", std::to_string(train_idx.size())},
                {"validation_records", std::to_string(val_idx.size())}};
  result.model = std::move(model);
  return result;
}

TrainResult train(const std::vector<LandmarkRecord>& records, const FeatureSelection& selection,
                  const TrainConfig& config) {
  config.validate();
  return train(build_training_data(records, selection, config.threads), config, selection.digest());
}

MeasurementVector predict(const MlpModel& model, const LandmarkSet& landmarks, const FeatureSelection& selection) {
  if (model.selection_digest != selection.digest()) {
    throw Error(ErrorKind::SelectionMismatch, "model was trained with selection " + model.selection_digest +
                                                  ", got " + selection.digest());
  }
  if (model.layer_dims.back() != static_cast<int>(kNumMeasurements)) {
    throw Error(ErrorKind::DimensionMismatch, "model does not output 11 measurements");
  }
  const auto f = featurize(landmarks, selection);
  const Eigen::VectorXd y = forward(model, Eigen::Map<const Eigen::VectorXd>(f.data(), static_cast<Eigen::Index>(f.size())));
  MeasurementVector out;
  for (std::size_t m = 0; m < kNumMeasurements; ++m) out[m] = y[static_cast<Eigen::Index>(m)];
  return out;
}

// --- persistence ---------------------------------------------------------

namespace {

void write_vector(std::ostream& out, std::string_view key, const Eigen::VectorXd& v) {
  out << key;
  for (Eigen::Index i = 0; i < v.size(); ++i) out << '\t' << format_real(v[i]);
  out << '\n';
}

}  // namespace

void save_mlp(std::ostream& out, const MlpModel& model) {
  model.validate();
  out << kMlpMagic << '\t' << kMlpVersion << '\n';
  out << "registry\t" << model.registry_version << '\n';
  out << "selection_digest\t" << model.selection_digest << '\n';
  out << "normalization\t" << model.normalization_id << '\n';
  out << "layers\t" << model.layer_dims.size();
  for (int d : model.layer_dims) out << '\t' << d;
  out << '\n';
  out << "outputs";
  for (const auto& n : model.output_names) out << '\t' << n;
  out << '\n';
  out << "meta\t" << model.meta.size() << '\n';
  for (const auto& [k, v] : model.meta) out << k << '\t' << v << '\n';
  write_vector(out, "x_mean", model.x_mean);
  write_vector(out, "x_scale", model.x_scale);
  write_vector(out, "y_mean", model.y_mean);
  write_vector(out, "y_scale", model.y_scale);
  for (std::size_t l = 0; l < model.weights.size(); ++l) {
    out << "layer\t" << l << '\n';
    for (Eigen::Index r = 0; r < model.weights[l].rows(); ++r) write_vector(out, "w", model.weights[l].row(r).transpose());
    write_vector(out, "b", model.biases[l]);
  }
  out << "end\n";
  if (!out) throw Error(ErrorKind::Io, "failed writing model");
}

void save_mlp(const std::filesystem::path& path, const MlpModel& model) {
  auto out = open_output(path);
  save_mlp(out, model);
}

MlpModel load_mlp(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  const auto next = [&]() {
    if (!std::getline(in, line)) throw Error(ErrorKind::Parse, "model: unexpected end of file");
    ++line_no;
    return split(line, '\t');
  };
  const auto fail = [&](const std::string& msg) -> void {
    throw Error(ErrorKind::Parse, "model line " + std::to_string(line_no) + ": " + msg);
  };
  const auto keyed = [&](std::string_view key) {
    const auto f = next();
    if (f.empty() || f[0] != key) fail("expected '" + std::string(key) + "'");
    return f;
  };
  const auto vector_line = [&](std::string_view key, int size) {
    const auto f = keyed(key);
    if (static_cast<int>(f.size()) != size + 1) fail("'" + std::string(key) + "' needs " + std::to_string(size) + " values");
    Eigen::VectorXd v(size);
    for (int i = 0; i < size; ++i) v[i] = parse_real(f[static_cast<std::size_t>(i) + 1]);
    return v;
  };

  {
    const auto f = next();
    if (f.size() != 2 || f[0] != kMlpMagic) fail("not an MLP model file");
    if (f[1] != kMlpVersion) fail("unsupported model version");
  }
  MlpModel m;
  const auto single = [&](std::string_view key) {
    const auto f = keyed(key);
    return f.size() > 1 ? std::string(f[1]) : std::string();
  };
  m.registry_version = single("registry");
  m.selection_digest = single("selection_digest");
  m.normalization_id = single("normalization");
  {
    const auto f = keyed("layers");
    if (f.size() < 2) fail("layers line");
    const auto count = parse_integer(f[1]);
    if (count < 2 || static_cast<long long>(f.size()) != count + 2) fail("layers line");
    for (long long i = 0; i < count; ++i) m.layer_dims.push_back(static_cast<int>(parse_integer(f[2 + i])));
    for (int d : m.layer_dims) {
      if (d <= 0) fail("layer sizes must be positive");
    }
  }
  {
    const auto f = keyed("outputs");
    for (std::size_t i = 1; i < f.size(); ++i) m.output_names.emplace_back(f[i]);
  }
  {
    const auto n = parse_integer(keyed("meta").at(1));
    for (long long i = 0; i < n; ++i) {
      const auto f = next();
      if (f.size() != 2) fail("meta line");
      m.meta.emplace_back(std::string(f[0]), std::string(f[1]));
    }
  }
  m.x_mean = vector_line("x_mean", m.layer_dims.front());
  m.x_scale = vector_line("x_scale", m.layer_dims.front());
  m.y_mean = vector_line("y_mean", m.layer_dims.back());
  m.y_scale = vector_line("y_scale", m.layer_dims.back());
  for (std::size_t l = 0; l + 1 < m.layer_dims.size(); ++l) {
    const auto f = keyed("layer");
    if (f.size() != 2 || parse_integer(f[1]) != static_cast<long long>(l)) fail("layer index");
    Eigen::MatrixXd w(m.layer_dims[l + 1], m.layer_dims[l]);
    for (Eigen::Index r = 0; r < w.rows(); ++r) w.row(r) = vector_line("w", m.layer_dims[l]).transpose();
    m.weights.push_back(std::move(w));
    m.biases.push_back(vector_line("b", m.layer_dims[l + 1]));
  }
  keyed("end");
  if (m.registry_version != LandmarkRegistry::standard().version()) {
    throw Error(ErrorKind::Parse, "model was built for landmark registry '" + m.registry_version + "'");
  }
  try {
    m.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::Parse, e.what());
  }
  return m;
}

MlpModel load_mlp(const std::filesystem::path& path) {
  auto in = open_input(path);
  return load_mlp(in);
}

void write_training_log(std::ostream& out, const std::vector<EpochLog>& log) {
  out << "# anthro-train-log v1\n";
  out << "epoch,train_mse,val_mse\n";
  for (const auto& e : log) {
    out << e.epoch << ',' << format_real(e.train_mse) << ',' << format_real(e.val_mse) << '\n';
  }
  if (!out) throw Error(ErrorKind::Io, "failed writing training log");
}

}  // namespace anthro
