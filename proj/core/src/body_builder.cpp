#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "anthro/body_model.hpp"
#include "anthro/error.hpp"
#include "anthro/rng.hpp"

namespace anthro {
namespace {

using Eigen::Vector3d;
constexpr double kPi = std::numbers::pi;
constexpr double kDeg = kPi / 180.0;

enum class Part { Torso, Arm, Leg, Foot };

struct ProfileKey {
  double s, a, b;
};

// Elliptical tube: ring centre origin + s*axis (+ b(s)*lift), semi-axis a
// along `lateral` and b along `front`.
struct TubeSpec {
  Part part;
  Vector3d origin, axis, lateral, front, lift;
  std::vector<ProfileKey> keys;
  double spacing;
  int segments;
};

struct VertexInfo {
  Part part = Part::Torso;
  int side = 0;  // +1 left, -1 right, 0 torso
  double s = 0.0;
  double phi = 0.0;
  Vector3d center = Vector3d::Zero();
  Vector3d radial = Vector3d::Zero();  // zero for cap centres
};

struct Tube {
  std::vector<Vector3d> vertices;
  std::vector<VertexInfo> info;
  std::vector<std::array<int, 3>> faces;
  std::vector<double> ring_s;
  int segments = 0;
  int start_cap = 0, end_cap = 0;

  int ring_vertex(std::size_t ring, int seg) const {
    return static_cast<int>(ring) * segments + ((seg % segments) + segments) % segments;
  }
};

std::pair<double, double> profile_at(const std::vector<ProfileKey>& keys, double s) {
  if (s <= keys.front().s) return {keys.front().a, keys.front().b};
  for (std::size_t k = 1; k < keys.size(); ++k) {
    if (s <= keys[k].s) {
      const double t = (s - keys[k - 1].s) / (keys[k].s - keys[k - 1].s);
      return {keys[k - 1].a + t * (keys[k].a - keys[k - 1].a), keys[k - 1].b + t * (keys[k].b - keys[k - 1].b)};
    }
  }
  return {keys.back().a, keys.back().b};
}

double signed_volume_of(const Tube& tube) {
  double v = 0.0;
  for (const auto& f : tube.faces) {
    v += tube.vertices[f[0]].dot(tube.vertices[f[1]].cross(tube.vertices[f[2]]));
  }
  return v / 6.0;
}

Tube build_tube(const TubeSpec& spec, int side) {
  Tube tube;
  tube.segments = spec.segments;
  const double s0 = spec.keys.front().s, s1 = spec.keys.back().s;
  const int n_rings = static_cast<int>(std::lround((s1 - s0) / spec.spacing)) + 1;
  for (int i = 0; i < n_rings; ++i) {
    tube.ring_s.push_back(i + 1 == n_rings ? s1 : s0 + i * spec.spacing);
  }
  const auto center_at = [&](double s) {
    return Vector3d(spec.origin + s * spec.axis + profile_at(spec.keys, s).second * spec.lift);
  };
  for (double s : tube.ring_s) {
    const auto [a, b] = profile_at(spec.keys, s);
    const Vector3d c = center_at(s);
    for (int k = 0; k < spec.segments; ++k) {
      const double phi = 2.0 * kPi * k / spec.segments;
      const Vector3d radial = std::sin(phi) * spec.lateral + std::cos(phi) * spec.front;
      tube.vertices.push_back(c + a * std::sin(phi) * spec.lateral + b * std::cos(phi) * spec.front);
      tube.info.push_back({spec.part, side, s, phi, c, radial});
    }
  }
  tube.start_cap = static_cast<int>(tube.vertices.size());
  tube.vertices.push_back(center_at(s0));
  tube.info.push_back({spec.part, side, s0, 0.0, center_at(s0), Vector3d::Zero()});
  tube.end_cap = static_cast<int>(tube.vertices.size());
  tube.vertices.push_back(center_at(s1));
  tube.info.push_back({spec.part, side, s1, 0.0, center_at(s1), Vector3d::Zero()});

  for (std::size_t i = 0; i + 1 < tube.ring_s.size(); ++i) {
    for (int k = 0; k < spec.segments; ++k) {
      const int a = tube.ring_vertex(i, k), b = tube.ring_vertex(i, k + 1);
      const int c = tube.ring_vertex(i + 1, k + 1), d = tube.ring_vertex(i + 1, k);
      tube.faces.push_back({a, c, b});
      tube.faces.push_back({a, d, c});
    }
  }
  const std::size_t last = tube.ring_s.size() - 1;
  for (int k = 0; k < spec.segments; ++k) {
    tube.faces.push_back({tube.start_cap, tube.ring_vertex(0, k), tube.ring_vertex(0, k + 1)});
    tube.faces.push_back({tube.end_cap, tube.ring_vertex(last, k + 1), tube.ring_vertex(last, k)});
  }
  if (signed_volume_of(tube) < 0.0) {
    for (auto& f : tube.faces) std::swap(f[1], f[2]);
  }
  return tube;
}

Tube mirror_tube(Tube tube) {
  for (auto& v : tube.vertices) v.x() = -v.x();
  for (auto& i : tube.info) {
    i.side = -i.side;
    i.center.x() = -i.center.x();
    i.radial.x() = -i.radial.x();
  }
  for (auto& f : tube.faces) std::swap(f[1], f[2]);
  return tube;
}

// Vertex on the ring nearest `s` whose angle is nearest `phi_deg`.
int tube_vertex(const Tube& tube, double s, double phi_deg) {
  std::size_t ring = 0;
  for (std::size_t i = 1; i < tube.ring_s.size(); ++i) {
    if (std::abs(tube.ring_s[i] - s) < std::abs(tube.ring_s[ring] - s)) ring = i;
  }
  const int seg = static_cast<int>(std::lround(phi_deg / 360.0 * tube.segments));
  return tube.ring_vertex(ring, seg);
}

double smoothstep(double lo, double hi, double x) {
  const double t = std::clamp((x - lo) / (hi - lo), 0.0, 1.0);
  return t * t * (3.0 - 2.0 * t);
}

// Weight of the distal joint in a blend zone, on a 1/1024 grid so that
// complementary weights sum to exactly 1.
double blend_weight(double lo, double hi, double x) { return std::round(smoothstep(lo, hi, x) * 1024.0) / 1024.0; }

double bump(double x, double mu, double width) {
  const double t = (x - mu) / width;
  return std::abs(t) >= 1.0 ? 0.0 : (1.0 - t * t) * (1.0 - t * t);
}

enum JointId {
  kPelvis, kSpine, kNeck, kHead,
  kLShoulder, kLElbow, kLWrist, kLHip, kLKnee, kLAnkle,
  kRShoulder, kRElbow, kRWrist, kRHip, kRKnee, kRAnkle,
  kNumJoints
};

struct Skeleton {
  Vector3d arm_dir[2];  // [0] left, [1] right
  Vector3d leg_dir[2];
};

int side_slot(int side) { return side > 0 ? 0 : 1; }

// Skinning weights of a vertex as (joint, weight) pairs.
std::vector<std::pair<int, double>> vertex_weights(const VertexInfo& v) {
  const int off = v.side > 0 ? 0 : 6;
  const auto chain = [](int a, int b, double w) -> std::vector<std::pair<int, double>> {
    if (w == 0.0) return {{a, 1.0}};
    if (w == 1.0) return {{b, 1.0}};
    return {{a, 1.0 - w}, {b, w}};
  };
  switch (v.part) {
    case Part::Torso: {
      const double y = v.s;
      if (y < 1300.0) return chain(kPelvis, kSpine, blend_weight(1090.0, 1210.0, y));
      if (y < 1510.0) return chain(kSpine, kNeck, blend_weight(1420.0, 1480.0, y));
      return chain(kNeck, kHead, blend_weight(1540.0, 1580.0, y));
    }
    case Part::Arm: {
      if (v.s < 420.0) return chain(kLShoulder + off, kLElbow + off, blend_weight(250.0, 330.0, v.s));
      return chain(kLElbow + off, kLWrist + off, blend_weight(510.0, 570.0, v.s));
    }
    case Part::Leg: {
      if (v.s < 200.0) return chain(kPelvis, kLHip + off, blend_weight(-40.0, 60.0, v.s));
      if (v.s < 600.0) return chain(kLHip + off, kLKnee + off, blend_weight(390.0, 470.0, v.s));
      return chain(kLKnee + off, kLAnkle + off, blend_weight(780.0, 840.0, v.s));
    }
    case Part::Foot: return {{kLAnkle + off, 1.0}};
  }
  return {};
}

constexpr int kNumShape = 8;

// Displacement of shape component k at a point described by `v` with
// position p. Joints use p = centre and a zero radial direction.
Vector3d shape_field(int k, const VertexInfo& v, const Vector3d& p, const Skeleton& sk) {
  const Vector3d radial_offset = p - v.center;
  const Vector3d x_side = Vector3d::UnitX() * static_cast<double>(v.side);
  switch (k) {
    case 0: return 0.035 * p;
    case 1: return (v.part == Part::Foot ? 0.03 : 0.07) * radial_offset;
    case 2:
      if (v.part != Part::Torso) return Vector3d::Zero();
      // Mostly lateral, with some depth so the sternum moves forward.
      return bump(v.s, 1290.0, 150.0) * (0.6 * std::pow(std::sin(v.phi), 2) + 0.4 * std::pow(std::cos(v.phi), 2)) *
             20.0 * v.radial;
    case 3: {
      if (v.part != Part::Torso) return Vector3d::Zero();
      const double back = std::max(0.0, -std::cos(v.phi));
      return bump(v.s, 920.0, 110.0) * (0.6 * std::pow(std::sin(v.phi), 2) + 0.4 * back * back) * 20.0 * v.radial;
    }
    case 4:
      if (v.part != Part::Arm) return Vector3d::Zero();
      return 0.06 * std::max(v.s, 0.0) * sk.arm_dir[side_slot(v.side)];
    case 5:
      if (v.part == Part::Leg) return 0.05 * std::max(v.s, 0.0) * sk.leg_dir[side_slot(v.side)];
      if (v.part == Part::Foot) return 0.05 * 810.0 * sk.leg_dir[side_slot(v.side)];
      return Vector3d::Zero();
    case 6:
      if (v.part == Part::Arm) return 12.0 * x_side;
      if (v.part == Part::Torso) return bump(v.s, 1400.0, 90.0) * 12.0 * std::sin(v.phi) * Vector3d::UnitX();
      return Vector3d::Zero();
    case 7:
      if (v.part != Part::Torso) return Vector3d::Zero();
      return smoothstep(1540.0, 1580.0, v.s) * 0.06 * (p - Vector3d(0.0, 1645.0, 0.0));
  }
  return Vector3d::Zero();
}

const std::vector<std::string> kShapeNames = {"scale",  "girth",      "chest",          "hip",
                                              "arm_length", "leg_length", "shoulder_width", "head"};

std::vector<ProfileKey> jitter(std::vector<ProfileKey> keys, Rng& rng) {
  for (auto& k : keys) {
    k.a *= 1.0 + 0.03 * rng.uniform(-1.0, 1.0);
    k.b *= 1.0 + 0.03 * rng.uniform(-1.0, 1.0);
  }
  return keys;
}

}  // namespace

BodyModel make_default_model(std::uint64_t seed) {
  Rng rng(derive_seed(seed, RngStream::ModelJitter));

  const double arm_angle = 45.0 * kDeg, leg_angle = 5.0 * kDeg;
  Skeleton sk;
  sk.arm_dir[0] = {std::sin(arm_angle), -std::cos(arm_angle), 0.0};
  sk.leg_dir[0] = {std::sin(leg_angle), -std::cos(leg_angle), 0.0};
  sk.arm_dir[1] = {-sk.arm_dir[0].x(), sk.arm_dir[0].y(), 0.0};
  sk.leg_dir[1] = {-sk.leg_dir[0].x(), sk.leg_dir[0].y(), 0.0};

  const Vector3d l_shoulder(170.0, 1420.0, 0.0), l_hip(90.0, 900.0, 0.0);
  const Vector3d z = Vector3d::UnitZ();

  const std::vector<ProfileKey> torso_keys = {
      {820, 95, 80},    {850, 150, 105},  {900, 178, 122},  {950, 180, 125},  {1000, 168, 112},
      {1080, 142, 100}, {1160, 145, 105}, {1250, 158, 115}, {1330, 165, 118}, {1390, 170, 110},
      {1430, 150, 90},  {1460, 80, 65},   {1480, 58, 55},   {1530, 54, 54},   {1560, 62, 70},
      {1600, 76, 92},   {1650, 78, 96},   {1700, 68, 84},   {1730, 45, 55},   {1740, 20, 25}};
  const std::vector<ProfileKey> arm_keys = {{-30, 40, 40}, {0, 55, 55},   {60, 50, 52},  {200, 44, 44},
                                            {290, 37, 35}, {380, 40, 38}, {500, 30, 24}, {540, 27, 20},
                                            {580, 42, 14}, {680, 40, 12}, {720, 22, 9},  {730, 10, 6}};
  const std::vector<ProfileKey> leg_keys = {{-40, 60, 60},  {0, 85, 85},   {150, 76, 78}, {380, 56, 58},
                                            {430, 52, 54},  {520, 55, 58}, {650, 44, 46}, {760, 34, 36},
                                            {810, 32, 34},  {850, 28, 30}};
  const std::vector<ProfileKey> foot_keys = {{0, 28, 30},   {30, 38, 38},  {80, 44, 36},
                                             {160, 48, 26}, {230, 42, 16}, {260, 22, 10}};

  const TubeSpec torso_spec{Part::Torso, Vector3d::Zero(), Vector3d::UnitY(), Vector3d::UnitX(), z,
                            Vector3d::Zero(), jitter(torso_keys, rng), 10.0, 32};
  const TubeSpec arm_spec{Part::Arm, l_shoulder, sk.arm_dir[0], z.cross(sk.arm_dir[0]), z,
                          Vector3d::Zero(), jitter(arm_keys, rng), 10.0, 16};
  const TubeSpec leg_spec{Part::Leg, l_hip, sk.leg_dir[0], z.cross(sk.leg_dir[0]), z,
                          Vector3d::Zero(), jitter(leg_keys, rng), 10.0, 16};
  const Vector3d l_ankle = l_hip + 810.0 * sk.leg_dir[0];
  const TubeSpec foot_spec{Part::Foot, Vector3d(l_ankle.x(), 0.0, -70.0), z, Vector3d::UnitX(),
                           Vector3d::UnitY(), Vector3d::UnitY(), jitter(foot_keys, rng), 10.0, 12};

  const Tube torso = build_tube(torso_spec, 0);
  const Tube l_arm = build_tube(arm_spec, +1);
  const Tube l_leg = build_tube(leg_spec, +1);
  const Tube l_foot = build_tube(foot_spec, +1);
  const Tube r_arm = mirror_tube(l_arm), r_leg = mirror_tube(l_leg), r_foot = mirror_tube(l_foot);

  const std::vector<const Tube*> tubes = {&torso, &l_arm, &r_arm, &l_leg, &r_leg, &l_foot, &r_foot};
  std::vector<int> base;
  std::size_t n_vertices = 0, n_faces = 0;
  for (const Tube* t : tubes) {
    base.push_back(static_cast<int>(n_vertices));
    n_vertices += t->vertices.size();
    n_faces += t->faces.size();
  }

  BodyModel model;
  model.seed = seed;
  model.template_vertices.resize(static_cast<Eigen::Index>(n_vertices), 3);
  model.faces.resize(static_cast<Eigen::Index>(n_faces), 3);
  std::vector<VertexInfo> info;
  info.reserve(n_vertices);
  Eigen::Index f_row = 0;
  for (std::size_t t = 0; t < tubes.size(); ++t) {
    const Tube& tube = *tubes[t];
    for (std::size_t v = 0; v < tube.vertices.size(); ++v) {
      model.template_vertices.row(base[t] + static_cast<Eigen::Index>(v)) = tube.vertices[v].transpose();
      info.push_back(tube.info[v]);
    }
    for (const auto& f : tube.faces) {
      model.faces.row(f_row++) << f[0] + base[t], f[1] + base[t], f[2] + base[t];
    }
  }

  // Skeleton.
  const auto mirror = [](Vector3d p) { p.x() = -p.x(); return p; };
  std::array<Vector3d, kNumJoints> rest;
  rest[kPelvis] = {0.0, 950.0, 0.0};
  rest[kSpine] = {0.0, 1150.0, 0.0};
  rest[kNeck] = {0.0, 1450.0, 0.0};
  rest[kHead] = {0.0, 1560.0, 0.0};
  rest[kLShoulder] = l_shoulder;
  rest[kLElbow] = l_shoulder + 290.0 * sk.arm_dir[0];
  rest[kLWrist] = l_shoulder + 540.0 * sk.arm_dir[0];
  rest[kLHip] = l_hip;
  rest[kLKnee] = l_hip + 430.0 * sk.leg_dir[0];
  rest[kLAnkle] = l_ankle;
  for (int j = 0; j < 6; ++j) rest[kRShoulder + j] = mirror(rest[kLShoulder + j]);
  const std::array<const char*, kNumJoints> names = {
      "pelvis",     "spine",   "neck",    "head",  "l_shoulder", "l_elbow", "l_wrist", "l_hip",
      "l_knee",     "l_ankle", "r_shoulder", "r_elbow", "r_wrist", "r_hip", "r_knee", "r_ankle"};
  const std::array<int, kNumJoints> parents = {-1,        kPelvis,    kSpine,     kNeck,
                                               kSpine,    kLShoulder, kLElbow,    kPelvis,
                                               kLHip,     kLKnee,     kSpine,     kRShoulder,
                                               kRElbow,   kPelvis,    kRHip,      kRKnee};
  for (int j = 0; j < kNumJoints; ++j) model.joints.push_back({names[j], parents[j], rest[j]});

  // Joints sit on the centre line of the part that carries them.
  std::array<VertexInfo, kNumJoints> joint_info;
  for (int j = kPelvis; j <= kHead; ++j) joint_info[j] = {Part::Torso, 0, rest[j].y(), 0.0, rest[j], Vector3d::Zero()};
  for (int side : {+1, -1}) {
    const int off = side > 0 ? 0 : 6;
    const double arm_s[3] = {0.0, 290.0, 540.0}, leg_s[3] = {0.0, 430.0, 810.0};
    for (int k = 0; k < 3; ++k) {
      joint_info[kLShoulder + off + k] = {Part::Arm, side, arm_s[k], 0.0, rest[kLShoulder + off + k], Vector3d::Zero()};
      joint_info[kLHip + off + k] = {Part::Leg, side, leg_s[k], 0.0, rest[kLHip + off + k], Vector3d::Zero()};
    }
  }

  model.skin_weights = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_vertices), kNumJoints);
  model.shape_basis.resize(static_cast<Eigen::Index>(3 * n_vertices), kNumShape);
  for (std::size_t v = 0; v < n_vertices; ++v) {
    const auto row = static_cast<Eigen::Index>(v);
    for (const auto& [j, w] : vertex_weights(info[v])) model.skin_weights(row, j) = w;
    const Vector3d p = model.template_vertices.row(row).transpose();
    for (int k = 0; k < kNumShape; ++k) model.shape_basis.block<3, 1>(3 * row, k) = shape_field(k, info[v], p, sk);
  }
  model.joint_shape_basis.resize(3 * kNumJoints, kNumShape);
  for (int j = 0; j < kNumJoints; ++j) {
    for (int k = 0; k < kNumShape; ++k) {
      model.joint_shape_basis.block<3, 1>(3 * j, k) = shape_field(k, joint_info[j], rest[j], sk);
    }
  }
  model.shape_names = kShapeNames;

  // Landmarks.
  const auto& registry = LandmarkRegistry::standard();
  model.landmark_vertex_ids.assign(kNumLandmarks, -1);
  const auto put = [&](std::string_view name, int vertex) {
    model.landmark_vertex_ids[registry.index_of(name)] = vertex;
  };
  const auto torso_at = [&](double y, double phi) { return base[0] + tube_vertex(torso, y, phi < 0 ? phi + 360 : phi); };
  const auto bilateral_torso = [&](const std::string& name, double y, double phi) {
    put("Lt. " + name, torso_at(y, phi));
    put("Rt. " + name, torso_at(y, -phi));
  };
  put("Sellion", torso_at(1650, 0));
  bilateral_torso("Infraorbitale", 1640, 25);
  put("Supramenton", torso_at(1590, 0));
  bilateral_torso("Tragion", 1640, 90);
  bilateral_torso("Gonion", 1590, 56.25);
  put("Nuchale", torso_at(1560, 180));
  put("Cervicale", torso_at(1470, 180));
  bilateral_torso("Clavicale", 1440, 22.5);
  put("Suprasternale", torso_at(1440, 0));
  put("Substernale", torso_at(1250, 0));
  bilateral_torso("10th Rib", 1170, 45);
  put("10th Rib Midspine", torso_at(1170, 180));
  bilateral_torso("Asis", 950, 33.75);
  bilateral_torso("Psis", 970, 157.5);
  bilateral_torso("Iliocristale", 1030, 90);
  bilateral_torso("Trochanterion", 900, 90);
  put("Crotch", base[0] + torso.start_cap);

  const struct { const char* name; double s, phi; } arm_marks[] = {
      {"Acromion", 0, 90},        {"Axilla Ant.", 60, 292.5},           {"Axilla Post.", 60, 247.5},
      {"Olecranon", 290, 180},    {"Humeral Lateral Epicn", 280, 90},   {"Humeral Medial Epicn", 280, 270},
      {"Radiale", 300, 45},       {"Radial Styloid", 540, 22.5},        {"Ulnar Styloid", 540, 202.5},
      {"Metacarpal-Phal. II", 640, 90}, {"Metacarpal-Phal. V", 640, 270}};
  const struct { const char* name; double s, phi; } leg_marks[] = {
      {"Knee Crease", 430, 180},           {"Femoral Lateral Epicn", 420, 90},
      {"Femoral Medial Epicn", 420, 270},  {"Lateral Malleolus", 800, 90},
      {"Medial Malleolus", 790, 270}};
  const struct { const char* name; double s, phi; } foot_marks[] = {
      {"Sphyrion", 60, 300}, {"Metatarsal-Phal. I", 190, 270}, {"Metatarsal-Phal. V", 170, 90}};
  for (int side : {+1, -1}) {
    const std::string prefix = side > 0 ? "Lt. " : "Rt. ";
    const int arm_base = base[side > 0 ? 1 : 2], leg_base = base[side > 0 ? 3 : 4], foot_base = base[side > 0 ? 5 : 6];
    const Tube& arm = side > 0 ? l_arm : r_arm;
    const Tube& leg = side > 0 ? l_leg : r_leg;
    const Tube& foot = side > 0 ? l_foot : r_foot;
    for (const auto& m : arm_marks) put(prefix + m.name, arm_base + tube_vertex(arm, m.s, m.phi));
    put(prefix + "Dactylion", arm_base + arm.end_cap);
    for (const auto& m : leg_marks) put(prefix + m.name, leg_base + tube_vertex(leg, m.s, m.phi));
    for (const auto& m : foot_marks) put(prefix + m.name, foot_base + tube_vertex(foot, m.s, m.phi));
    put(prefix + "Calcaneous Post.", foot_base + foot.start_cap);
    put(prefix + "Digit II", foot_base + foot.end_cap);
  }

  // Measurements, in reporting order.
  const double tilt = 20.0 * kDeg;
  model.measurement_defs = {
      {"Ankle C.", MeasurementKind::Circumference, {"Lt. Lateral Malleolus"}, sk.leg_dir[0]},
      {"Shoulder-elbow L.", MeasurementKind::Length, {"Rt. Acromion", "Rt. Olecranon"}, Vector3d::UnitY()},
      {"Shoulder-wrist L.", MeasurementKind::Length, {"Rt. Acromion", "Rt. Ulnar Styloid"}, Vector3d::UnitY()},
      {"Spine-wrist L.", MeasurementKind::Length, {"Cervicale", "Rt. Ulnar Styloid"}, Vector3d::UnitY()},
      {"Chest C.", MeasurementKind::Circumference, {"Substernale"}, Vector3d::UnitY()},
      {"Crotch H.", MeasurementKind::Height, {"Crotch"}, Vector3d::UnitY()},
      {"Head C.", MeasurementKind::Circumference, {"Sellion"}, Vector3d::UnitY()},
      {"Hip C. H.", MeasurementKind::Height, {"Rt. Trochanterion"}, Vector3d::UnitY()},
      {"Hip C.", MeasurementKind::Circumference, {"Rt. Trochanterion"}, Vector3d::UnitY()},
      {"Neck base C.", MeasurementKind::Circumference, {"Cervicale"},
       Vector3d(0.0, std::cos(tilt), std::sin(tilt))},
      {"Stature", MeasurementKind::Stature, {}, Vector3d::UnitY()},
  };

  model.validate();
  return model;
}

}  // namespace anthro
