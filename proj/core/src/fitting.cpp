#include "anthro/fitting.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "anthro/error.hpp"

namespace anthro {
namespace {

// Step scale per parameter group relative to OptimConfig::learning_rate.
constexpr double kShapeScale = 1.0;
constexpr double kRotationScale = 0.5;
constexpr double kTranslationScale = 100.0;
constexpr double kFiniteDifferenceStep = 1e-6;

Eigen::VectorXd pack(const ShapeParams& shape, const PoseParams& pose) {
  const Eigen::Index S = shape.coeffs.size(), J = pose.joint_rotations.rows();
  Eigen::VectorXd x(S + 3 * J + 3);
  x.head(S) = shape.coeffs;
  for (Eigen::Index j = 0; j < J; ++j) x.segment<3>(S + 3 * j) = pose.joint_rotations.row(j).transpose();
  x.tail<3>() = pose.root_translation;
  return x;
}

void unpack(const Eigen::VectorXd& x, ShapeParams& shape, PoseParams& pose) {
  const Eigen::Index S = shape.coeffs.size(), J = pose.joint_rotations.rows();
  shape.coeffs = x.head(S);
  for (Eigen::Index j = 0; j < J; ++j) pose.joint_rotations.row(j) = x.segment<3>(S + 3 * j).transpose();
  pose.root_translation = x.tail<3>();
}

}  // namespace

void OptimConfig::validate() const {
  const auto fail = [](const char* msg) { throw Error(ErrorKind::InvalidArgument, msg); };
  if (max_iterations <= 0) fail("max_iterations must be positive");
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) fail("learning_rate must be >= 0");
  if (!(final_lr_fraction > 0.0 && final_lr_fraction <= 1.0)) fail("final_lr_fraction must be in (0, 1]");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) fail("beta1/beta2 must be in [0, 1)");
  if (!(epsilon > 0.0)) fail("epsilon must be positive");
  if (!(tolerance >= 0.0)) fail("tolerance must be >= 0");
  if (window <= 0) fail("window must be positive");
  if (restarts <= 0) fail("restarts must be positive");
}

double landmark_loss(const BodyModel& model, const LandmarkSet& observed, const ShapeParams& shape,
                     const PoseParams& pose) {
  const LandmarkSet fitted = landmarks_of(model, shape, pose);
  return (fitted.coords() - observed.coords()).rowwise().squaredNorm().mean();
}

FitResult fit_body_to_landmarks(const BodyModel& model, const LandmarkSet& observed, const ShapeParams& init_shape,
                                const PoseParams& init_pose, const OptimConfig& config) {
  config.validate();
  check_dimensions(model, init_shape);
  check_dimensions(model, init_pose);
  if (!observed.all_finite()) throw Error(ErrorKind::NonFinite, "observed landmarks are not finite");

  ShapeParams shape = init_shape;
  PoseParams pose = init_pose;
  const Eigen::Index S = shape.coeffs.size();
  const Eigen::Index n = S + 3 * pose.joint_rotations.rows() + 3;
  Eigen::VectorXd scale(n);
  scale.head(S).setConstant(kShapeScale);
  scale.segment(S, n - S - 3).setConstant(kRotationScale);
  scale.tail<3>().setConstant(kTranslationScale);

  Eigen::VectorXd x = pack(shape, pose);
  const auto loss_at = [&](const Eigen::VectorXd& params) {
    unpack(params, shape, pose);
    return landmark_loss(model, observed, shape, pose);
  };

  Eigen::VectorXd m = Eigen::VectorXd::Zero(n), v = Eigen::VectorXd::Zero(n), grad(n);
  Eigen::VectorXd best_x = x;
  double best = loss_at(x);
  double window_start_best = best;
  int iterations = 0;
  const double decay = std::pow(config.final_lr_fraction, 1.0 / config.max_iterations);
  double lr = config.learning_rate;
  for (int it = 1; it <= config.max_iterations && best > 0.0; ++it) {
    iterations = it;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double h = kFiniteDifferenceStep * scale[i];
      Eigen::VectorXd probe = x;
      probe[i] = x[i] + h;
      const double up = loss_at(probe);
      probe[i] = x[i] - h;
      const double down = loss_at(probe);
      grad[i] = (up - down) / (2.0 * h);
    }
    m = config.beta1 * m + (1.0 - config.beta1) * grad;
    v = config.beta2 * v + (1.0 - config.beta2) * grad.cwiseAbs2();
    const double c1 = 1.0 - std::pow(config.beta1, it), c2 = 1.0 - std::pow(config.beta2, it);
    for (Eigen::Index i = 0; i < n; ++i) {
      x[i] -= lr * scale[i] * (m[i] / c1) / (std::sqrt(v[i] / c2) + config.epsilon);
    }
    lr *= decay;
    const double current = loss_at(x);
    if (!std::isfinite(current)) break;
    if (current < best) {
      best = current;
      best_x = x;
    }
    if (config.tolerance > 0.0 && it % config.window == 0) {
      if (window_start_best - best <= config.tolerance * window_start_best) break;
      window_start_best = best;
    }
  }
  unpack(best_x, shape, pose);
  return {shape, pose, std::sqrt(best), iterations};
}

}  // namespace anthro
