#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "anthro/body_model.hpp"
#include "anthro/fitting.hpp"
#include "anthro/measurements.hpp"

namespace anthro {

// Landmark displacements enter the ambiguity objective in meters so that a
// unit shape step and a 1 m landmark shift weigh the same.
inline constexpr double kAmbiguityLandmarkScale = 1e-3;

/// 210 x S map from shape coefficients to A-pose landmark coordinates (mm):
/// landmarks_of(beta, A-pose) = landmarks_of(0, A-pose) + B * beta exactly.
Eigen::MatrixXd landmark_shape_jacobian(const BodyModel& model);

/// scale * sum_i |B_i delta| + | |delta| - 1 |, B_i the 3 rows of landmark i.
double ambiguity_objective(const Eigen::MatrixXd& jacobian, const Eigen::VectorXd& delta,
                           double scale = kAmbiguityLandmarkScale);

struct AmbiguityDirection {
  ShapeParams delta;  // unit norm
  double objective = 0.0;
  std::size_t best_start = 0;
};

/// Multi-start Adam on ambiguity_objective from seeded unit directions,
/// taking tangential steps that are renormalized onto the unit sphere.
/// Starts run in parallel; the lowest objective wins, ties to the lower
/// start index. The landmark map is linear at the A-pose, so the result does
/// not depend on beta_ref, which is only checked for dimensions.
AmbiguityDirection optimize_ambiguity_direction(const BodyModel& model, const ShapeParams& beta_ref,
                                                const OptimConfig& config = OptimConfig::ambiguity_defaults(),
                                                std::size_t threads = 0);

struct AmbiguityCurve {
  std::vector<double> steps;
  std::vector<double> max_landmark_dist_mm;
  std::vector<MeasurementVector> measurement_err_mm;
  ShapeParams delta;
  double residual = 0.0;
};

/// 51 uniform steps over [0, 25].
std::vector<double> default_k_values();

/// Evaluates beta_ref + k * delta for every k (strictly increasing).
AmbiguityCurve sweep_ambiguity(const BodyModel& model, const ShapeParams& beta_ref, const ShapeParams& delta,
                               const std::vector<double>& k_values, std::size_t threads = 0);

void write_curve_csv(std::ostream& out, const AmbiguityCurve& curve);

/// Measurements tagged with the record they belong to.
struct LabeledMeasurements {
  std::string subject_id;
  std::string pose_id;
  MeasurementVector values;
  char sex = '-';
};

struct EvalReport {
  std::string mode = "static";  // "static": MAE, "sequence": frame-difference std
  std::array<double, kNumMeasurements> per_measurement{};
  double average = 0.0;  // aMAE in static mode
  std::size_t n_subjects = 0;
  std::size_t n_records = 0;
  std::vector<std::pair<std::string, EvalReport>> strata;
};

/// Per-measurement mean absolute error and its average over the 11
/// measurements. Throws Error(LengthMismatch) for different lengths or an
/// empty input.
EvalReport mae(const std::vector<MeasurementVector>& gt, const std::vector<MeasurementVector>& est);

/// As above, pairing entries by position and requiring identical subject
/// ids (Error(IdMismatch)). With `by_sex`, adds one sub-report per sex tag
/// present in `gt`.
EvalReport mae(const std::vector<LabeledMeasurements>& gt, const std::vector<LabeledMeasurements>& est,
               bool by_sex = false);

/// Population standard deviation over frames t >= 1 of m(t) - m(0).
/// Throws Error(TooFewFrames) for fewer than 2 frames.
std::array<double, kNumMeasurements> sequence_std(const std::vector<MeasurementVector>& frames);

/// sequence_std per subject (frames in input order), averaged over subjects.
EvalReport sequence_report(const std::vector<LabeledMeasurements>& frames, bool by_sex = false);

/// Predictions CSV: a format header line, then
/// subject_id,pose_id,<11 measurement keys>.
void write_predictions_csv(std::ostream& out, const std::vector<LabeledMeasurements>& rows);
std::vector<LabeledMeasurements> read_predictions_csv(std::istream& in, const std::string& source = "<stream>");

void write_report_csv(std::ostream& out, const EvalReport& report);
void write_report_text(std::ostream& out, const EvalReport& report);

}  // namespace anthro
