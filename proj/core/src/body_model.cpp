#include "anthro/body_model.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>

#include <Eigen/Geometry>

#include "anthro/error.hpp"
#include "anthro/text_format.hpp"

namespace anthro {

const char* to_string(MeasurementKind kind) noexcept {
  switch (kind) {
    case MeasurementKind::Circumference: return "circumference";
    case MeasurementKind::Length: return "length";
    case MeasurementKind::Height: return "height";
    case MeasurementKind::Stature: return "stature";
  }
  return "?";
}

MeasurementKind measurement_kind_from_string(std::string_view text) {
  if (text == "circumference") return MeasurementKind::Circumference;
  if (text == "length") return MeasurementKind::Length;
  if (text == "height") return MeasurementKind::Height;
  if (text == "stature") return MeasurementKind::Stature;
  throw Error(ErrorKind::Parse, "unknown measurement kind '" + std::string(text) + "'");
}

std::size_t BodyModel::joint_index(std::string_view name) const {
  for (std::size_t j = 0; j < joints.size(); ++j) {
    if (joints[j].name == name) return j;
  }
  throw Error(ErrorKind::InvalidArgument, "unknown joint '" + std::string(name) + "'");
}

void BodyModel::validate() const {
  const auto fail = [](const std::string& msg) { throw Error(ErrorKind::InvalidArgument, "body model: " + msg); };
  const auto V = static_cast<Eigen::Index>(num_vertices());
  const auto J = static_cast<Eigen::Index>(num_joints());
  if (V == 0 || J == 0) fail("empty model");
  if (!template_vertices.allFinite()) fail("non-finite template vertex");
  for (Eigen::Index f = 0; f < faces.rows(); ++f) {
    for (int c = 0; c < 3; ++c) {
      if (faces(f, c) < 0 || faces(f, c) >= V) fail("face index out of range");
    }
  }
  int roots = 0;
  for (Eigen::Index j = 0; j < J; ++j) {
    const int p = joints[static_cast<std::size_t>(j)].parent;
    if (p < 0) {
      ++roots;
    } else if (p >= j) {
      fail("joint parents must precede children");
    }
  }
  if (roots != 1 || joints[0].parent != -1) fail("joint tree must have a single root at index 0");
  if (skin_weights.rows() != V || skin_weights.cols() != J) fail("skin weight shape");
  for (Eigen::Index v = 0; v < V; ++v) {
    if ((skin_weights.row(v).array() < 0.0).any()) fail("negative skin weight");
    if (std::abs(skin_weights.row(v).sum() - 1.0) > 1e-9) fail("skin weights do not sum to 1");
  }
  if (shape_basis.rows() != 3 * V) fail("shape basis rows");
  if (joint_shape_basis.rows() != 3 * J || joint_shape_basis.cols() != shape_basis.cols()) {
    fail("joint shape basis shape");
  }
  if (shape_names.size() != num_shape()) fail("shape names");
  if (landmark_vertex_ids.size() != kNumLandmarks) fail("needs 70 landmark vertices");
  std::set<int> distinct;
  for (int id : landmark_vertex_ids) {
    if (id < 0 || id >= V) fail("landmark vertex out of range");
    distinct.insert(id);
  }
  if (distinct.size() != kNumLandmarks) fail("landmark vertices must be distinct");
  if (measurement_defs.size() != kNumMeasurements) fail("needs 11 measurement definitions");
  const auto& registry = LandmarkRegistry::standard();
  for (std::size_t m = 0; m < measurement_defs.size(); ++m) {
    const auto& def = measurement_defs[m];
    if (def.name != measurement_names()[m]) fail("measurement '" + def.name + "' out of order");
    std::size_t expected = 0;
    switch (def.kind) {
      case MeasurementKind::Circumference:
      case MeasurementKind::Height: expected = 1; break;
      case MeasurementKind::Length: expected = 2; break;
      case MeasurementKind::Stature: expected = 0; break;
    }
    if (def.anchors.size() != expected) fail("measurement '" + def.name + "' anchor count");
    for (const auto& a : def.anchors) {
      if (!registry.find(a)) fail("measurement anchor '" + a + "' not in registry");
    }
    if (def.kind == MeasurementKind::Circumference && std::abs(def.plane_normal.norm() - 1.0) > 1e-9) {
      fail("plane normal must be unit length");
    }
  }
}

BodyModel with_shape_subset(const BodyModel& model, const std::vector<std::size_t>& columns) {
  BodyModel out = model;
  const auto S = static_cast<Eigen::Index>(columns.size());
  out.shape_basis.resize(model.shape_basis.rows(), S);
  out.joint_shape_basis.resize(model.joint_shape_basis.rows(), S);
  out.shape_names.clear();
  for (Eigen::Index k = 0; k < S; ++k) {
    const auto c = columns[static_cast<std::size_t>(k)];
    if (c >= model.num_shape()) throw Error(ErrorKind::InvalidArgument, "shape column out of range");
    out.shape_basis.col(k) = model.shape_basis.col(static_cast<Eigen::Index>(c));
    out.joint_shape_basis.col(k) = model.joint_shape_basis.col(static_cast<Eigen::Index>(c));
    out.shape_names.push_back(model.shape_names[c]);
  }
  return out;
}

Eigen::Matrix3d rotation_from_axis_angle(const Eigen::Vector3d& axis_angle) {
  const double angle = axis_angle.norm();
  if (angle == 0.0) return Eigen::Matrix3d::Identity();
  return Eigen::AngleAxisd(angle, axis_angle / angle).toRotationMatrix();
}

Eigen::Vector3d axis_angle_from_rotation(const Eigen::Matrix3d& rotation) {
  const Eigen::AngleAxisd aa(rotation);
  return aa.angle() * aa.axis();
}

void check_dimensions(const BodyModel& model, const ShapeParams& shape) {
  if (static_cast<std::size_t>(shape.coeffs.size()) != model.num_shape()) {
    throw Error(ErrorKind::DimensionMismatch, "expected " + std::to_string(model.num_shape()) +
                                                  " shape coefficients, got " + std::to_string(shape.coeffs.size()));
  }
}

void check_dimensions(const BodyModel& model, const PoseParams& pose) {
  if (static_cast<std::size_t>(pose.joint_rotations.rows()) != model.num_joints()) {
    throw Error(ErrorKind::DimensionMismatch, "expected " + std::to_string(model.num_joints()) +
                                                  " joint rotations, got " +
                                                  std::to_string(pose.joint_rotations.rows()));
  }
}

Points shaped_vertices(const BodyModel& model, const ShapeParams& shape) {
  check_dimensions(model, shape);
  Points out = model.template_vertices;
  const Eigen::VectorXd offsets = model.shape_basis * shape.coeffs;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    out.row(i) += offsets.segment<3>(3 * i).transpose();
  }
  return out;
}

Points shaped_joints(const BodyModel& model, const ShapeParams& shape) {
  check_dimensions(model, shape);
  Points out(static_cast<Eigen::Index>(model.num_joints()), 3);
  const Eigen::VectorXd offsets = model.joint_shape_basis * shape.coeffs;
  for (Eigen::Index j = 0; j < out.rows(); ++j) {
    out.row(j) = model.joints[static_cast<std::size_t>(j)].rest.transpose() + offsets.segment<3>(3 * j).transpose();
  }
  return out;
}

std::vector<RigidTransform> joint_transforms(const BodyModel& model, const Points& joints, const PoseParams& pose) {
  check_dimensions(model, pose);
  std::vector<RigidTransform> out(model.num_joints());
  for (std::size_t j = 0; j < model.num_joints(); ++j) {
    const auto row = static_cast<Eigen::Index>(j);
    const Eigen::Matrix3d local = rotation_from_axis_angle(pose.joint_rotations.row(row).transpose());
    const Eigen::Vector3d center = joints.row(row).transpose();
    // Rotation about the joint centre: v -> R v + (c - R c).
    const Eigen::Vector3d local_t = center - local * center;
    const int parent = model.joints[j].parent;
    if (parent < 0) {
      out[j] = {local, local_t};
    } else {
      const auto& p = out[static_cast<std::size_t>(parent)];
      out[j] = {p.rotation * local, p.rotation * local_t + p.translation};
    }
  }
  return out;
}

namespace {

Eigen::Vector3d skin_vertex(const BodyModel& model, Eigen::Index v, const Eigen::Vector3d& rest,
                            const std::vector<RigidTransform>& transforms, const Eigen::Vector3d& root) {
  Eigen::Matrix3d blended_r = Eigen::Matrix3d::Zero();
  Eigen::Vector3d blended_t = Eigen::Vector3d::Zero();
  for (Eigen::Index j = 0; j < model.skin_weights.cols(); ++j) {
    const double w = model.skin_weights(v, j);
    if (w == 0.0) continue;
    blended_r += w * transforms[static_cast<std::size_t>(j)].rotation;
    blended_t += w * transforms[static_cast<std::size_t>(j)].translation;
  }
  return blended_r * rest + blended_t + root;
}

}  // namespace

TriMesh pose_mesh(const BodyModel& model, const ShapeParams& shape, const PoseParams& pose) {
  check_dimensions(model, pose);
  const Points rest = shaped_vertices(model, shape);
  const auto transforms = joint_transforms(model, shaped_joints(model, shape), pose);
  TriMesh mesh{Points(rest.rows(), 3), model.faces};
  for (Eigen::Index v = 0; v < rest.rows(); ++v) {
    mesh.vertices.row(v) = skin_vertex(model, v, rest.row(v).transpose(), transforms, pose.root_translation).transpose();
  }
  return mesh;
}

LandmarkSet landmarks_of(const BodyModel& model, const ShapeParams& shape, const PoseParams& pose,
                         std::string subject_id, std::string pose_id) {
  check_dimensions(model, shape);
  check_dimensions(model, pose);
  const auto transforms = joint_transforms(model, shaped_joints(model, shape), pose);
  Points coords(kNumLandmarks, 3);
  for (std::size_t i = 0; i < kNumLandmarks; ++i) {
    const Eigen::Index v = model.landmark_vertex_ids[i];
    const Eigen::Vector3d rest =
        model.template_vertices.row(v).transpose() + model.shape_basis.middleRows<3>(3 * v) * shape.coeffs;
    coords.row(static_cast<Eigen::Index>(i)) = skin_vertex(model, v, rest, transforms, pose.root_translation).transpose();
  }
  return LandmarkSet(std::move(coords), std::move(subject_id), std::move(pose_id));
}

TriMesh repose_to_apose(const BodyModel& model, const ShapeParams& shape) {
  return pose_mesh(model, shape, PoseParams::zero(model.num_joints()));
}

double evaluate_measurement(const MeasurementDef& def, const TriMesh& mesh, const LandmarkSet& landmarks) {
  const auto& registry = LandmarkRegistry::standard();
  switch (def.kind) {
    case MeasurementKind::Length:
      return (landmarks.point(registry.index_of(def.anchors.at(0))) -
              landmarks.point(registry.index_of(def.anchors.at(1))))
          .norm();
    case MeasurementKind::Height:
      return landmarks.point(registry.index_of(def.anchors.at(0))).y() - mesh.vertices.col(1).minCoeff();
    case MeasurementKind::Stature:
      return mesh.vertices.col(1).maxCoeff() - mesh.vertices.col(1).minCoeff();
    case MeasurementKind::Circumference: {
      const Eigen::Vector3d anchor = landmarks.point(registry.index_of(def.anchors.at(0)));
      const CrossSection section = plane_cross_section(mesh, anchor, def.plane_normal);
      const LoopLocation nearest = nearest_loop_point(section, anchor);
      return loop_perimeter(section.loops[nearest.loop]);
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

MeasurementVector measure_apose_mesh(const BodyModel& model, const TriMesh& apose_mesh) {
  Points coords(kNumLandmarks, 3);
  for (std::size_t i = 0; i < kNumLandmarks; ++i) {
    coords.row(static_cast<Eigen::Index>(i)) = apose_mesh.vertices.row(model.landmark_vertex_ids[i]);
  }
  const LandmarkSet landmarks(std::move(coords));
  MeasurementVector out;
  for (std::size_t m = 0; m < kNumMeasurements; ++m) {
    out[m] = evaluate_measurement(model.measurement_defs[m], apose_mesh, landmarks);
  }
  return out;
}

MeasurementVector measure_ground_truth(const BodyModel& model, const ShapeParams& shape) {
  return measure_apose_mesh(model, repose_to_apose(model, shape));
}

std::vector<std::pair<std::size_t, std::size_t>> rigid_landmark_pairs(const BodyModel& model) {
  std::vector<int> bound_joint(kNumLandmarks, -1);
  for (std::size_t i = 0; i < kNumLandmarks; ++i) {
    const auto w = model.skin_weights.row(model.landmark_vertex_ids[i]);
    Eigen::Index j = 0;
    if (w.maxCoeff(&j) == 1.0 && (w.array() != 0.0).count() == 1) bound_joint[i] = static_cast<int>(j);
  }
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < kNumLandmarks; ++i) {
    for (std::size_t j = i + 1; j < kNumLandmarks; ++j) {
      if (bound_joint[i] >= 0 && bound_joint[i] == bound_joint[j]) pairs.emplace_back(i, j);
    }
  }
  return pairs;
}

// --- serialization -------------------------------------------------------

namespace {

void write_row(std::ostream& out, const auto& values) {
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (i) out << '\t';
    out << format_real(values(i));
  }
  out << '\n';
}

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  std::vector<std::string_view> fields() {
    if (!std::getline(in_, line_)) throw Error(ErrorKind::Parse, "body model: unexpected end of file");
    ++line_no_;
    return split(trim(line_), '\t');
  }

  void expect(std::string_view keyword) {
    const auto f = fields();
    if (f.empty() || f[0] != keyword) {
      throw Error(ErrorKind::Parse, "body model line " + std::to_string(line_no_) + ": expected '" +
                                        std::string(keyword) + "'");
    }
  }

  std::vector<double> reals(std::size_t count) {
    const auto f = fields();
    if (f.size() != count) {
      throw Error(ErrorKind::Parse, "body model line " + std::to_string(line_no_) + ": expected " +
                                        std::to_string(count) + " values");
    }
    std::vector<double> out;
    out.reserve(count);
    for (auto t : f) out.push_back(parse_real(t));
    return out;
  }

 private:
  std::istream& in_;
  std::string line_;
  std::size_t line_no_ = 0;
};

}  // namespace

void save_model(std::ostream& out, const BodyModel& model) {
  const auto V = model.num_vertices(), J = model.num_joints(), S = model.num_shape();
  out << kBodyModelMagic << '\t' << kBodyModelVersion << '\n';
  out << "seed\t" << model.seed << '\n';
  out << "counts\t" << V << '\t' << model.faces.rows() << '\t' << J << '\t' << S << '\t'
      << model.landmark_vertex_ids.size() << '\t' << model.measurement_defs.size() << '\n';
  out << "vertices\n";
  for (Eigen::Index v = 0; v < model.template_vertices.rows(); ++v) write_row(out, model.template_vertices.row(v));
  out << "faces\n";
  for (Eigen::Index f = 0; f < model.faces.rows(); ++f) {
    out << model.faces(f, 0) << '\t' << model.faces(f, 1) << '\t' << model.faces(f, 2) << '\n';
  }
  out << "joints\n";
  for (const auto& j : model.joints) {
    out << j.name << '\t' << j.parent << '\t' << format_real(j.rest.x()) << '\t' << format_real(j.rest.y()) << '\t'
        << format_real(j.rest.z()) << '\n';
  }
  out << "weights\n";
  for (Eigen::Index v = 0; v < model.skin_weights.rows(); ++v) {
    const auto nonzero = (model.skin_weights.row(v).array() != 0.0).count();
    out << nonzero;
    for (Eigen::Index j = 0; j < model.skin_weights.cols(); ++j) {
      if (model.skin_weights(v, j) != 0.0) out << '\t' << j << '\t' << format_real(model.skin_weights(v, j));
    }
    out << '\n';
  }
  out << "shape_names";
  for (const auto& n : model.shape_names) out << '\t' << n;
  out << '\n';
  out << "basis\n";
  for (Eigen::Index r = 0; r < model.shape_basis.rows(); ++r) write_row(out, model.shape_basis.row(r));
  out << "joint_basis\n";
  for (Eigen::Index r = 0; r < model.joint_shape_basis.rows(); ++r) write_row(out, model.joint_shape_basis.row(r));
  out << "landmarks\n";
  const auto& names = LandmarkRegistry::standard().names();
  for (std::size_t i = 0; i < model.landmark_vertex_ids.size(); ++i) {
    out << names[i] << '\t' << model.landmark_vertex_ids[i] << '\n';
  }
  out << "measurements\n";
  for (const auto& def : model.measurement_defs) {
    out << def.name << '\t' << to_string(def.kind) << '\t' << def.anchors.size();
    for (const auto& a : def.anchors) out << '\t' << a;
    out << '\t' << format_real(def.plane_normal.x()) << '\t' << format_real(def.plane_normal.y()) << '\t'
        << format_real(def.plane_normal.z()) << '\n';
  }
  out << "end\n";
  if (!out) throw Error(ErrorKind::Io, "failed writing body model");
}

BodyModel load_model(std::istream& in) {
  LineReader reader(in);
  {
    const auto header = reader.fields();
    if (header.size() != 2 || header[0] != kBodyModelMagic) throw Error(ErrorKind::Parse, "not a body model file");
    if (header[1] != kBodyModelVersion) throw Error(ErrorKind::Parse, "unsupported body model version");
  }
  BodyModel model;
  {
    const auto f = reader.fields();
    if (f.size() != 2 || f[0] != "seed") throw Error(ErrorKind::Parse, "body model: seed line");
    model.seed = static_cast<std::uint64_t>(parse_integer(f[1]));
  }
  const auto counts = reader.fields();
  if (counts.size() != 7 || counts[0] != "counts") throw Error(ErrorKind::Parse, "body model: counts line");
  const auto V = parse_integer(counts[1]), F = parse_integer(counts[2]), J = parse_integer(counts[3]),
             S = parse_integer(counts[4]), L = parse_integer(counts[5]), M = parse_integer(counts[6]);
  if (V <= 0 || F < 0 || J <= 0 || S < 0 || L < 0 || M < 0) throw Error(ErrorKind::Parse, "body model: bad counts");

  reader.expect("vertices");
  model.template_vertices.resize(V, 3);
  for (Eigen::Index v = 0; v < V; ++v) {
    const auto r = reader.reals(3);
    model.template_vertices.row(v) << r[0], r[1], r[2];
  }
  reader.expect("faces");
  model.faces.resize(F, 3);
  for (Eigen::Index f = 0; f < F; ++f) {
    const auto r = reader.fields();
    if (r.size() != 3) throw Error(ErrorKind::Parse, "body model: face line");
    for (int c = 0; c < 3; ++c) model.faces(f, c) = static_cast<int>(parse_integer(r[static_cast<std::size_t>(c)]));
  }
  reader.expect("joints");
  for (Eigen::Index j = 0; j < J; ++j) {
    const auto r = reader.fields();
    if (r.size() != 5) throw Error(ErrorKind::Parse, "body model: joint line");
    model.joints.push_back({std::string(r[0]), static_cast<int>(parse_integer(r[1])),
                            Eigen::Vector3d(parse_real(r[2]), parse_real(r[3]), parse_real(r[4]))});
  }
  reader.expect("weights");
  model.skin_weights = Eigen::MatrixXd::Zero(V, J);
  for (Eigen::Index v = 0; v < V; ++v) {
    const auto r = reader.fields();
    const auto n = parse_integer(r.at(0));
    if (static_cast<long long>(r.size()) != 1 + 2 * n) throw Error(ErrorKind::Parse, "body model: weight line");
    for (long long k = 0; k < n; ++k) {
      const auto j = parse_integer(r[static_cast<std::size_t>(1 + 2 * k)]);
      if (j < 0 || j >= J) throw Error(ErrorKind::Parse, "body model: weight joint out of range");
      model.skin_weights(v, j) = parse_real(r[static_cast<std::size_t>(2 + 2 * k)]);
    }
  }
  {
    const auto r = reader.fields();
    if (r.empty() || r[0] != "shape_names" || static_cast<long long>(r.size()) != 1 + S) {
      throw Error(ErrorKind::Parse, "body model: shape names");
    }
    for (std::size_t k = 1; k < r.size(); ++k) model.shape_names.emplace_back(r[k]);
  }
  reader.expect("basis");
  model.shape_basis.resize(3 * V, S);
  for (Eigen::Index row = 0; row < 3 * V; ++row) {
    const auto r = reader.reals(static_cast<std::size_t>(S));
    for (Eigen::Index k = 0; k < S; ++k) model.shape_basis(row, k) = r[static_cast<std::size_t>(k)];
  }
  reader.expect("joint_basis");
  model.joint_shape_basis.resize(3 * J, S);
  for (Eigen::Index row = 0; row < 3 * J; ++row) {
    const auto r = reader.reals(static_cast<std::size_t>(S));
    for (Eigen::Index k = 0; k < S; ++k) model.joint_shape_basis(row, k) = r[static_cast<std::size_t>(k)];
  }
  reader.expect("landmarks");
  const auto& registry = LandmarkRegistry::standard();
  model.landmark_vertex_ids.assign(kNumLandmarks, -1);
  for (long long i = 0; i < L; ++i) {
    const auto r = reader.fields();
    if (r.size() != 2) throw Error(ErrorKind::Parse, "body model: landmark line");
    const auto idx = registry.find(r[0]);
    if (!idx) throw Error(ErrorKind::Parse, "body model: unknown landmark '" + std::string(r[0]) + "'");
    model.landmark_vertex_ids[*idx] = static_cast<int>(parse_integer(r[1]));
  }
  reader.expect("measurements");
  for (long long m = 0; m < M; ++m) {
    const auto r = reader.fields();
    if (r.size() < 3) throw Error(ErrorKind::Parse, "body model: measurement line");
    MeasurementDef def;
    def.name = std::string(r[0]);
    def.kind = measurement_kind_from_string(r[1]);
    const auto n = static_cast<std::size_t>(parse_integer(r[2]));
    if (r.size() != 3 + n + 3) throw Error(ErrorKind::Parse, "body model: measurement line");
    for (std::size_t a = 0; a < n; ++a) def.anchors.emplace_back(r[3 + a]);
    def.plane_normal = {parse_real(r[3 + n]), parse_real(r[4 + n]), parse_real(r[5 + n])};
    model.measurement_defs.push_back(std::move(def));
  }
  reader.expect("end");
  model.validate();
  return model;
}

}  // namespace anthro
