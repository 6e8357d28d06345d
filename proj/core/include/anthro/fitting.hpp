#pragma once

#include <cstdint>

#include "anthro/body_model.hpp"

namespace anthro {

/// Settings for the first-order optimizers (body fitting and the ambiguity
/// direction search). Adam-style updates; the step size decays
/// geometrically from learning_rate to learning_rate * final_lr_fraction.
struct OptimConfig {
  int max_iterations = 2000;
  double learning_rate = 0.1;
  double final_lr_fraction = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  // Stop when the best objective improved by less than this fraction over
  // the last `window` iterations; 0 disables the check.
  double tolerance = 1e-8;
  int window = 50;
  int restarts = 5;
  std::uint64_t seed = 0;

  void validate() const;
  static OptimConfig fitting_defaults() { return {}; }
  static OptimConfig ambiguity_defaults() {
    OptimConfig c;
    c.max_iterations = 5000;
    c.learning_rate = 0.01;
    c.final_lr_fraction = 0.001;
    // Near a kink of the objective Adam hops around the optimum without
    // improving the best value for many steps; only the decaying step
    // size settles it, so the search always runs to max_iterations.
    c.tolerance = 0.0;
    return c;
  }
};

struct FitResult {
  ShapeParams shape;
  PoseParams pose;
  double rms_residual_mm = 0.0;
  int iterations = 0;
};

/// Mean squared landmark distance (mm^2) between the model and `observed`.
double landmark_loss(const BodyModel& model, const LandmarkSet& observed, const ShapeParams& shape,
                     const PoseParams& pose);

/// Minimizes the mean squared landmark distance over shape coefficients,
/// joint rotations and root translation, starting from `init_shape` and
/// `init_pose`. Gradients are central differences. Rotation and translation
/// steps are scaled relative to learning_rate (radians and millimeters per
/// unit step respectively). Returns the best parameters visited; failing to
/// converge is not an error, the residual tells.
FitResult fit_body_to_landmarks(const BodyModel& model, const LandmarkSet& observed, const ShapeParams& init_shape,
                                const PoseParams& init_pose, const OptimConfig& config = OptimConfig::fitting_defaults());

}  // namespace anthro
