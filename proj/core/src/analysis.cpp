#include "anthro/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <set>

#include "anthro/error.hpp"
#include "anthro/parallel.hpp"
#include "anthro/rng.hpp"
#include "anthro/text_format.hpp"

namespace anthro {

Eigen::MatrixXd landmark_shape_jacobian(const BodyModel& model) {
  Eigen::MatrixXd b(static_cast<Eigen::Index>(kNumCoordinates), model.shape_basis.cols());
  for (std::size_t i = 0; i < kNumLandmarks; ++i) {
    b.middleRows<3>(3 * static_cast<Eigen::Index>(i)) = model.shape_basis.middleRows<3>(3 * model.landmark_vertex_ids[i]);
  }
  return b;
}

double ambiguity_objective(const Eigen::MatrixXd& jacobian, const Eigen::VectorXd& delta, double scale) {
  const Eigen::VectorXd d = jacobian * delta;
  double sum = 0.0;
  for (Eigen::Index i = 0; i < d.size(); i += 3) sum += d.segment<3>(i).norm();
  return scale * sum + std::abs(delta.norm() - 1.0);
}

namespace {

Eigen::VectorXd objective_gradient(const Eigen::MatrixXd& b, const Eigen::VectorXd& delta, double scale) {
  const Eigen::VectorXd d = b * delta;
  Eigen::VectorXd g = Eigen::VectorXd::Zero(delta.size());
  for (Eigen::Index i = 0; i < d.size(); i += 3) {
    const double n = d.segment<3>(i).norm();
    if (n > 0.0) g += scale * b.middleRows<3>(i).transpose() * (d.segment<3>(i) / n);
  }
  const double norm = delta.norm();
  if (norm > 0.0 && norm != 1.0) g += (norm > 1.0 ? 1.0 : -1.0) * delta / norm;
  return g;
}

struct StartResult {
  Eigen::VectorXd unit;
  double objective = std::numeric_limits<double>::infinity();
};

StartResult run_start(const Eigen::MatrixXd& b, const OptimConfig& config, std::size_t start) {
  const Eigen::Index s = b.cols();
  Rng rng(derive_seed(config.seed, RngStream::Restart, start));
  Eigen::VectorXd x(s);
  do {
    for (Eigen::Index k = 0; k < s; ++k) x[k] = rng.normal();
  } while (x.norm() == 0.0);
  x.normalize();

  const auto unit_objective = [&](const Eigen::VectorXd& v) {
    const double n = v.norm();
    return n > 0.0 ? ambiguity_objective(b, v / n) : std::numeric_limits<double>::infinity();
  };
  StartResult best{x, unit_objective(x)};
  Eigen::VectorXd m = Eigen::VectorXd::Zero(s), v = Eigen::VectorXd::Zero(s);
  const double decay = std::pow(config.final_lr_fraction, 1.0 / config.max_iterations);
  double lr = config.learning_rate;
  double window_start = best.objective;
  for (int it = 1; it <= config.max_iterations; ++it) {
    // The norm penalty has slope 1 while the landmark term's slope is far
    // below it, so the minimizer lies on the unit sphere. Steps use the
    // tangential gradient and are retracted onto the sphere; otherwise the
    // penalty's sign flips dominate Adam's scaling and the direction barely moves.
    Eigen::VectorXd g = objective_gradient(b, x, kAmbiguityLandmarkScale);
    g -= g.dot(x) * x;
    m = config.beta1 * m + (1.0 - config.beta1) * g;
    v = config.beta2 * v + (1.0 - config.beta2) * g.cwiseAbs2();
    const double c1 = 1.0 - std::pow(config.beta1, it), c2 = 1.0 - std::pow(config.beta2, it);
    x.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + config.epsilon);
    if (x.norm() == 0.0) break;
    x.normalize();
    lr *= decay;
    const double f = unit_objective(x);
    if (f < best.objective) best = {x / x.norm(), f};
    if (config.tolerance > 0.0 && it % config.window == 0) {
      if (window_start - best.objective <= config.tolerance * window_start) break;
      window_start = best.objective;
    }
  }
  return best;
}

}  // namespace

AmbiguityDirection optimize_ambiguity_direction(const BodyModel& model, const ShapeParams& beta_ref,
                                                const OptimConfig& config, std::size_t threads) {
  config.validate();
  check_dimensions(model, beta_ref);
  if (!beta_ref.coeffs.allFinite()) throw Error(ErrorKind::NonFinite, "beta_ref is not finite");
  if (model.num_shape() == 0) throw Error(ErrorKind::InvalidArgument, "model has no shape coefficients");
  const Eigen::MatrixXd b = landmark_shape_jacobian(model);
  std::vector<StartResult> starts(static_cast<std::size_t>(config.restarts));
  parallel_for(starts.size(), resolve_threads(threads), [&](std::size_t i) { starts[i] = run_start(b, config, i); });
  std::size_t best = 0;
  for (std::size_t i = 1; i < starts.size(); ++i) {
    if (starts[i].objective < starts[best].objective) best = i;
  }
  return {ShapeParams{starts[best].unit}, starts[best].objective, best};
}

std::vector<double> default_k_values() {
  std::vector<double> k(51);
  for (std::size_t i = 0; i < k.size(); ++i) k[i] = 25.0 * static_cast<double>(i) / 50.0;
  return k;
}

AmbiguityCurve sweep_ambiguity(const BodyModel& model, const ShapeParams& beta_ref, const ShapeParams& delta,
                               const std::vector<double>& k_values, std::size_t threads) {
  check_dimensions(model, beta_ref);
  check_dimensions(model, delta);
  if (k_values.empty()) throw Error(ErrorKind::InvalidArgument, "no k values");
  for (std::size_t i = 1; i < k_values.size(); ++i) {
    if (!(k_values[i] > k_values[i - 1])) throw Error(ErrorKind::InvalidArgument, "k values must be strictly increasing");
  }
  const PoseParams apose = PoseParams::zero(model.num_joints());
  const LandmarkSet ref_landmarks = landmarks_of(model, beta_ref, apose);
  const MeasurementVector ref_measurements = measure_ground_truth(model, beta_ref);

  AmbiguityCurve curve;
  curve.steps = k_values;
  curve.delta = delta;
  curve.max_landmark_dist_mm.resize(k_values.size());
  curve.measurement_err_mm.resize(k_values.size());
  parallel_for(k_values.size(), resolve_threads(threads), [&](std::size_t i) {
    const ShapeParams beta{beta_ref.coeffs + k_values[i] * delta.coeffs};
    const LandmarkSet landmarks = landmarks_of(model, beta, apose);
    curve.max_landmark_dist_mm[i] = (landmarks.coords() - ref_landmarks.coords()).rowwise().norm().maxCoeff();
    const MeasurementVector m = measure_ground_truth(model, beta);
    for (std::size_t j = 0; j < kNumMeasurements; ++j) curve.measurement_err_mm[i][j] = std::abs(m[j] - ref_measurements[j]);
  });
  return curve;
}

void write_curve_csv(std::ostream& out, const AmbiguityCurve& curve) {
  out << "# anthro-ambiguity v1 objective=" << format_real(curve.residual) << " delta=";
  for (Eigen::Index k = 0; k < curve.delta.coeffs.size(); ++k) {
    out << (k ? ";" : "") << format_real(curve.delta.coeffs[k]);
  }
  out << '\n';
  out << "k,max_landmark_dist_mm";
  for (const auto& key : measurement_keys()) out << ',' << key << "_err_mm";
  out << '\n';
  for (std::size_t i = 0; i < curve.steps.size(); ++i) {
    out << format_real(curve.steps[i]) << ',' << format_real(curve.max_landmark_dist_mm[i]);
    for (double e : curve.measurement_err_mm[i].values) out << ',' << format_real(e);
    out << '\n';
  }
  if (!out) throw Error(ErrorKind::Io, "failed writing curve");
}

// --- metrics -------------------------------------------------------------

namespace {

double mean_of(const std::array<double, kNumMeasurements>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(kNumMeasurements);
}

}  // namespace

EvalReport mae(const std::vector<MeasurementVector>& gt, const std::vector<MeasurementVector>& est) {
  if (gt.size() != est.size()) {
    throw Error(ErrorKind::LengthMismatch, std::to_string(gt.size()) + " ground-truth vs " +
                                               std::to_string(est.size()) + " estimated entries");
  }
  if (gt.empty()) throw Error(ErrorKind::LengthMismatch, "no entries to evaluate");
  EvalReport r;
  r.n_records = gt.size();
  r.n_subjects = gt.size();
  for (std::size_t j = 0; j < kNumMeasurements; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < gt.size(); ++i) s += std::abs(gt[i][j] - est[i][j]);
    r.per_measurement[j] = s / static_cast<double>(gt.size());
  }
  r.average = mean_of(r.per_measurement);
  return r;
}

EvalReport mae(const std::vector<LabeledMeasurements>& gt, const std::vector<LabeledMeasurements>& est,
               bool by_sex) {
  if (gt.size() != est.size()) {
    throw Error(ErrorKind::LengthMismatch, std::to_string(gt.size()) + " ground-truth vs " +
                                               std::to_string(est.size()) + " estimated entries");
  }
  std::vector<MeasurementVector> g, e;
  std::set<std::string> subjects;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (gt[i].subject_id != est[i].subject_id) {
      throw Error(ErrorKind::IdMismatch, "entry " + std::to_string(i + 1) + ": subject '" + gt[i].subject_id +
                                             "' vs '" + est[i].subject_id + "'");
    }
    g.push_back(gt[i].values);
    e.push_back(est[i].values);
    subjects.insert(gt[i].subject_id);
  }
  EvalReport r = mae(g, e);
  r.n_subjects = subjects.size();
  if (by_sex) {
    std::map<char, std::pair<std::vector<LabeledMeasurements>, std::vector<LabeledMeasurements>>> groups;
    for (std::size_t i = 0; i < gt.size(); ++i) {
      groups[gt[i].sex].first.push_back(gt[i]);
      groups[gt[i].sex].second.push_back(est[i]);
    }
    for (const auto& [sex, pair] : groups) r.strata.emplace_back(std::string(1, sex), mae(pair.first, pair.second));
  }
  return r;
}

std::array<double, kNumMeasurements> sequence_std(const std::vector<MeasurementVector>& frames) {
  if (frames.size() < 2) throw Error(ErrorKind::TooFewFrames, "sequence_std needs at least 2 frames");
  std::array<double, kNumMeasurements> out{};
  const double n = static_cast<double>(frames.size() - 1);
  for (std::size_t j = 0; j < kNumMeasurements; ++j) {
    double mean = 0.0;
    for (std::size_t t = 1; t < frames.size(); ++t) mean += frames[t][j] - frames[0][j];
    mean /= n;
    double var = 0.0;
    for (std::size_t t = 1; t < frames.size(); ++t) {
      const double d = frames[t][j] - frames[0][j] - mean;
      var += d * d;
    }
    out[j] = std::sqrt(var / n);
  }
  return out;
}

EvalReport sequence_report(const std::vector<LabeledMeasurements>& frames, bool by_sex) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<MeasurementVector>> sequences;
  std::map<std::string, char> sex_of;
  for (const auto& f : frames) {
    if (!sequences.count(f.subject_id)) order.push_back(f.subject_id);
    sequences[f.subject_id].push_back(f.values);
    sex_of[f.subject_id] = f.sex;
  }
  if (order.empty()) throw Error(ErrorKind::TooFewFrames, "no frames");
  const auto summarize = [&](const std::vector<std::string>& ids) {
    EvalReport r;
    r.mode = "sequence";
    r.n_subjects = ids.size();
    for (const auto& id : ids) {
      const auto s = sequence_std(sequences.at(id));
      r.n_records += sequences.at(id).size();
      for (std::size_t j = 0; j < kNumMeasurements; ++j) r.per_measurement[j] += s[j] / static_cast<double>(ids.size());
    }
    r.average = mean_of(r.per_measurement);
    return r;
  };
  EvalReport r = summarize(order);
  if (by_sex) {
    std::map<char, std::vector<std::string>> groups;
    for (const auto& id : order) groups[sex_of[id]].push_back(id);
    for (const auto& [sex, ids] : groups) r.strata.emplace_back(std::string(1, sex), summarize(ids));
  }
  return r;
}

void write_predictions_csv(std::ostream& out, const std::vector<LabeledMeasurements>& rows) {
  out << "# anthro-predictions v1 unit=mm\n";
  out << "subject_id,pose_id";
  for (const auto& key : measurement_keys()) out << ',' << key;
  out << '\n';
  for (const auto& r : rows) {
    out << r.subject_id << ',' << r.pose_id;
    for (double v : r.values.values) out << ',' << format_real(v);
    out << '\n';
  }
  if (!out) throw Error(ErrorKind::Io, "failed writing predictions");
}

std::vector<LabeledMeasurements> read_predictions_csv(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  const auto fail = [&](const std::string& msg) {
    throw Error(ErrorKind::Parse, source + ":" + std::to_string(line_no) + ": " + msg);
  };
  bool header_seen = false;
  std::vector<std::size_t> column_of(kNumMeasurements);
  std::vector<LabeledMeasurements> rows;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto f = split(text, ',');
    if (!header_seen) {
      if (f.size() != 2 + kNumMeasurements || f[0] != "subject_id" || f[1] != "pose_id") fail("bad predictions header");
      std::vector<bool> seen(kNumMeasurements, false);
      for (std::size_t c = 2; c < f.size(); ++c) {
        const auto m = find_measurement(trim(f[c]));
        if (!m || seen[*m]) fail("unknown or duplicate measurement column '" + std::string(f[c]) + "'");
        seen[*m] = true;
        column_of[*m] = c;
      }
      header_seen = true;
      continue;
    }
    if (f.size() != 2 + kNumMeasurements) fail("expected " + std::to_string(2 + kNumMeasurements) + " fields");
    LabeledMeasurements r;
    r.subject_id = std::string(f[0]);
    r.pose_id = std::string(f[1]);
    try {
      for (std::size_t m = 0; m < kNumMeasurements; ++m) r.values[m] = parse_real(f[column_of[m]]);
    } catch (const Error& e) {
      fail(e.what());
    }
    rows.push_back(std::move(r));
  }
  if (!header_seen) fail("missing predictions header");
  return rows;
}

void write_report_csv(std::ostream& out, const EvalReport& report) {
  const bool seq = report.mode == "sequence";
  const std::string column = seq ? "std_mm" : "mae_mm";
  out << "# anthro-eval v1 mode=" << report.mode << (seq ? " std=population" : "") << '\n';
  out << "measurement," << column;
  for (const auto& [name, sub] : report.strata) out << ',' << column << '_' << name;
  out << '\n';
  for (std::size_t j = 0; j < kNumMeasurements; ++j) {
    out << measurement_names()[j] << ',' << format_real(report.per_measurement[j]);
    for (const auto& [name, sub] : report.strata) out << ',' << format_real(sub.per_measurement[j]);
    out << '\n';
  }
  out << (seq ? "mean" : "aMAE") << ',' << format_real(report.average);
  for (const auto& [name, sub] : report.strata) out << ',' << format_real(sub.average);
  out << '\n';
  if (!out) throw Error(ErrorKind::Io, "failed writing report");
}

namespace {

void write_text_block(std::ostream& out, const EvalReport& r, const std::string& indent) {
  const bool seq = r.mode == "sequence";
  out << indent << "n_subjects: " << r.n_subjects << '\n';
  out << indent << "n_records: " << r.n_records << '\n';
  for (std::size_t j = 0; j < kNumMeasurements; ++j) {
    out << indent << measurement_keys()[j] << (seq ? "_std_mm: " : "_mae_mm: ") << format_real(r.per_measurement[j])
        << '\n';
  }
  out << indent << (seq ? "mean_std_mm: " : "amae_mm: ") << format_real(r.average) << '\n';
}

}  // namespace

void write_report_text(std::ostream& out, const EvalReport& report) {
  out << "format: anthro-eval v1\n";
  out << "mode: " << report.mode << '\n';
  if (report.mode == "sequence") out << "std: population\n";
  write_text_block(out, report, "");
  for (const auto& [name, sub] : report.strata) {
    out << "stratum: sex=" << name << '\n';
    write_text_block(out, sub, "  ");
  }
  if (!out) throw Error(ErrorKind::Io, "failed writing report");
}

}  // namespace anthro
