#include "anthro/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "anthro/error.hpp"
#include "anthro/rng.hpp"
#include "anthro/text_format.hpp"

namespace anthro {
namespace {

std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) | static_cast<std::uint32_t>(b);
}

Eigen::Vector3d row(const Points& p, Eigen::Index i) { return p.row(i).transpose(); }

// Closest point on segment ab to p; returns parameter t in [0, 1].
double closest_on_segment(const Eigen::Vector3d& a, const Eigen::Vector3d& b, const Eigen::Vector3d& p) {
  const Eigen::Vector3d ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return 0.0;
  return std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
}

// Ericson, Real-Time Collision Detection 5.1.5.
Eigen::Vector3d closest_on_triangle(const Eigen::Vector3d& p, const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                                    const Eigen::Vector3d& c) {
  const Eigen::Vector3d ab = b - a, ac = c - a, ap = p - a;
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0 && d2 <= 0) return a;
  const Eigen::Vector3d bp = p - b;
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0 && d4 <= d3) return b;
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0 && d1 >= 0 && d3 <= 0) return a + (d1 / (d1 - d3)) * ab;
  const Eigen::Vector3d cp = p - c;
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0 && d5 <= d6) return c;
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0 && d2 >= 0 && d6 <= 0) return a + (d2 / (d2 - d6)) * ac;
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0) return b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b);
  const double denom = 1.0 / (va + vb + vc);
  return a + ab * (vb * denom) + ac * (vc * denom);
}

}  // namespace

CrossSection plane_cross_section(const TriMesh& mesh, const Eigen::Vector3d& point, const Eigen::Vector3d& normal) {
  const double nn = normal.norm();
  if (!(nn > 0.0) || !std::isfinite(nn)) throw Error(ErrorKind::InvalidArgument, "plane normal must be nonzero");
  const Eigen::Vector3d n = normal / nn;

  const Eigen::Index nv = mesh.vertices.rows();
  std::vector<double> dist(static_cast<std::size_t>(nv));
  for (Eigen::Index i = 0; i < nv; ++i) dist[static_cast<std::size_t>(i)] = n.dot(row(mesh.vertices, i) - point);
  const auto positive = [&](int v) { return dist[static_cast<std::size_t>(v)] >= 0.0; };

  std::unordered_map<std::uint64_t, int> edge_point;  // edge -> index into points
  std::vector<Eigen::Vector3d> points;
  const auto crossing_point = [&](int a, int b) {
    const auto key = edge_key(a, b);
    auto it = edge_point.find(key);
    if (it != edge_point.end()) return it->second;
    const int lo = std::min(a, b), hi = std::max(a, b);
    const double dlo = dist[static_cast<std::size_t>(lo)], dhi = dist[static_cast<std::size_t>(hi)];
    const double t = dlo / (dlo - dhi);
    points.push_back(row(mesh.vertices, lo) + t * (row(mesh.vertices, hi) - row(mesh.vertices, lo)));
    const int idx = static_cast<int>(points.size()) - 1;
    edge_point.emplace(key, idx);
    return idx;
  };

  std::vector<std::array<int, 2>> segments;
  for (Eigen::Index f = 0; f < mesh.faces.rows(); ++f) {
    const int v[3] = {mesh.faces(f, 0), mesh.faces(f, 1), mesh.faces(f, 2)};
    const bool s[3] = {positive(v[0]), positive(v[1]), positive(v[2])};
    if (s[0] == s[1] && s[1] == s[2]) continue;
    int ends[2], k = 0;
    for (int e = 0; e < 3; ++e) {
      const int a = v[e], b = v[(e + 1) % 3];
      if (s[e] != s[(e + 1) % 3]) ends[k++] = crossing_point(a, b);
    }
    segments.push_back({ends[0], ends[1]});
  }
  if (segments.empty()) throw Error(ErrorKind::EmptyCrossSection, "plane does not intersect the mesh");

  std::vector<std::array<int, 2>> incident(points.size(), {-1, -1});
  for (std::size_t s = 0; s < segments.size(); ++s) {
    for (int end : segments[s]) {
      auto& slot = incident[static_cast<std::size_t>(end)];
      if (slot[0] < 0) {
        slot[0] = static_cast<int>(s);
      } else if (slot[1] < 0) {
        slot[1] = static_cast<int>(s);
      } else {
        throw Error(ErrorKind::OpenCrossSection, "non-manifold edge along the cut");
      }
    }
  }
  for (const auto& slot : incident) {
    if (slot[1] < 0) throw Error(ErrorKind::OpenCrossSection, "cut crosses a boundary edge");
  }

  CrossSection section;
  section.source_plane = {point, n};
  std::vector<bool> used(segments.size(), false);
  for (std::size_t start = 0; start < segments.size(); ++start) {
    if (used[start]) continue;
    std::vector<int> chain;
    std::size_t seg = start;
    int current = segments[start][0];
    while (!used[seg]) {
      used[seg] = true;
      chain.push_back(current);
      const int next = segments[seg][0] == current ? segments[seg][1] : segments[seg][0];
      const auto& inc = incident[static_cast<std::size_t>(next)];
      seg = static_cast<std::size_t>(inc[0] == static_cast<int>(seg) ? inc[1] : inc[0]);
      current = next;
    }
    std::vector<Eigen::Vector3d> loop;
    for (int idx : chain) {
      const Eigen::Vector3d& p = points[static_cast<std::size_t>(idx)];
      if (loop.empty() || (p - loop.back()).norm() > kLoopPointTolerance) loop.push_back(p);
    }
    while (loop.size() > 1 && (loop.front() - loop.back()).norm() <= kLoopPointTolerance) loop.pop_back();
    if (loop.size() < 3) continue;
    Points m(static_cast<Eigen::Index>(loop.size()), 3);
    for (std::size_t i = 0; i < loop.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = loop[i].transpose();
    section.loops.push_back(std::move(m));
  }
  if (section.loops.empty()) throw Error(ErrorKind::EmptyCrossSection, "plane only touches the mesh");

  std::vector<std::pair<Eigen::Vector3d, std::size_t>> order;
  for (std::size_t i = 0; i < section.loops.size(); ++i) order.emplace_back(loop_centroid(section.loops[i]), i);
  std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
    return std::lexicographical_compare(a.first.data(), a.first.data() + 3, b.first.data(), b.first.data() + 3);
  });
  std::vector<Points> sorted;
  for (const auto& [c, i] : order) sorted.push_back(std::move(section.loops[i]));
  section.loops = std::move(sorted);
  return section;
}

double loop_perimeter(const Points& loop) {
  double total = 0.0;
  const Eigen::Index n = loop.rows();
  for (Eigen::Index i = 0; i < n; ++i) total += (loop.row((i + 1) % n) - loop.row(i)).norm();
  return total;
}

Eigen::Vector3d loop_centroid(const Points& loop) {
  return loop.colwise().mean().transpose();
}

LoopLocation nearest_loop_point(const CrossSection& section, const Eigen::Vector3d& p) {
  LoopLocation best;
  best.distance = std::numeric_limits<double>::infinity();
  for (std::size_t l = 0; l < section.loops.size(); ++l) {
    const Points& loop = section.loops[l];
    const Eigen::Index n = loop.rows();
    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::Vector3d a = row(loop, i), b = row(loop, (i + 1) % n);
      const double t = closest_on_segment(a, b, p);
      const Eigen::Vector3d q = a + t * (b - a);
      const double d = (q - p).norm();
      if (d < best.distance) best = {l, static_cast<std::size_t>(i), t, q, d};
    }
  }
  return best;
}

Eigen::Vector3d walk_loop(const Points& loop, const LoopLocation& from, double arc_length, int direction) {
  const Eigen::Index n = loop.rows();
  const double perimeter = loop_perimeter(loop);
  if (perimeter > 0.0 && arc_length >= perimeter) arc_length = std::fmod(arc_length, perimeter);
  Eigen::Index seg = static_cast<Eigen::Index>(from.segment);
  double t = from.t;
  double remaining = arc_length;
  while (true) {
    const Eigen::Vector3d a = row(loop, seg), b = row(loop, (seg + 1) % n);
    const double len = (b - a).norm();
    if (direction >= 0) {
      const double available = (1.0 - t) * len;
      if (remaining <= available) {
        return len > 0.0 ? Eigen::Vector3d(a + (t + remaining / len) * (b - a)) : a;
      }
      remaining -= available;
      seg = (seg + 1) % n;
      t = 0.0;
    } else {
      const double available = t * len;
      if (remaining <= available) {
        return len > 0.0 ? Eigen::Vector3d(a + (t - remaining / len) * (b - a)) : a;
      }
      remaining -= available;
      seg = (seg - 1 + n) % n;
      t = 1.0;
    }
  }
}

SurfacePoint closest_surface_point(const TriMesh& mesh, const Eigen::Vector3d& p) {
  std::vector<double> face_dist(static_cast<std::size_t>(mesh.faces.rows()));
  SurfacePoint best;
  best.distance = std::numeric_limits<double>::infinity();
  for (Eigen::Index f = 0; f < mesh.faces.rows(); ++f) {
    const Eigen::Vector3d q = closest_on_triangle(p, row(mesh.vertices, mesh.faces(f, 0)),
                                                  row(mesh.vertices, mesh.faces(f, 1)),
                                                  row(mesh.vertices, mesh.faces(f, 2)));
    const double d = (q - p).norm();
    face_dist[static_cast<std::size_t>(f)] = d;
    if (d < best.distance) {
      best.distance = d;
      best.point = q;
    }
  }
  Eigen::Vector3d normal = Eigen::Vector3d::Zero();
  for (Eigen::Index f = 0; f < mesh.faces.rows(); ++f) {
    if (face_dist[static_cast<std::size_t>(f)] > best.distance + 1e-9) continue;
    const Eigen::Vector3d a = row(mesh.vertices, mesh.faces(f, 0));
    normal += (row(mesh.vertices, mesh.faces(f, 1)) - a).cross(row(mesh.vertices, mesh.faces(f, 2)) - a);
  }
  if (normal.norm() > 0.0) best.normal = normal.normalized();
  return best;
}

PerturbedLandmark perturb_landmark_on_surface(const TriMesh& mesh, const Eigen::Vector3d& landmark,
                                              double max_dist_mm, std::uint64_t seed,
                                              const PerturbOptions& options) {
  if (!(max_dist_mm >= 0.0) || !std::isfinite(max_dist_mm)) {
    throw Error(ErrorKind::InvalidArgument, "max_dist_mm must be finite and nonnegative");
  }
  const SurfacePoint surface = closest_surface_point(mesh, landmark);
  if (surface.distance > options.max_surface_distance_mm) {
    throw Error(ErrorKind::InvalidArgument, "landmark is " + format_real(surface.distance) +
                                                " mm from the mesh surface");
  }
  const double max_cos = std::cos(options.min_angle_to_surface_normal_deg * std::numbers::pi / 180.0);
  Rng rng(seed);
  std::string last_error = "no attempts";
  for (int attempt = 1; attempt <= options.max_attempts; ++attempt) {
    Eigen::Vector3d normal = rng.unit_vector();
    while (std::abs(normal.dot(surface.normal)) > max_cos) normal = rng.unit_vector();
    const double arc = rng.uniform(0.0, max_dist_mm);
    const int direction = (rng.next() & 1u) ? 1 : -1;
    try {
      const CrossSection section = plane_cross_section(mesh, landmark, normal);
      const LoopLocation at = nearest_loop_point(section, landmark);
      // At a convex vertex the plane can touch the surface only there; the
      // nearest loop then belongs to some other part of the body.
      if (at.distance > surface.distance + 1e-3) {
        last_error = "plane touches the surface only at the landmark";
        continue;
      }
      const Points& loop = section.loops[at.loop];
      return {walk_loop(loop, at, arc, direction), arc, attempt};
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::EmptyCrossSection && e.kind() != ErrorKind::OpenCrossSection) throw;
      last_error = e.what();
    }
  }
  throw Error(ErrorKind::EmptyCrossSection,
              "no usable cross-section after " + std::to_string(options.max_attempts) + " planes: " + last_error);
}

TriMesh read_off(std::istream& in) {
  std::vector<std::vector<std::string>> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::vector<std::string> tokens;
    for (std::string tok; ls >> tok;) tokens.push_back(tok);
    if (!tokens.empty()) lines.push_back(std::move(tokens));
  }
  if (lines.empty() || lines[0][0] != "OFF") throw Error(ErrorKind::Parse, "OFF header missing");
  double scale = 1.0;
  if (lines[0].size() > 1) {
    const std::string& unit = lines[0][1];
    if (unit == "mm") scale = 1.0;
    else if (unit == "cm") scale = 10.0;
    else if (unit == "m") scale = 1000.0;
    else throw Error(ErrorKind::Parse, "unsupported OFF unit '" + unit + "'");
  }
  if (lines.size() < 2 || lines[1].size() < 2) throw Error(ErrorKind::Parse, "OFF counts line missing");
  const long long nv = parse_integer(lines[1][0]);
  const long long nf = parse_integer(lines[1][1]);
  if (nv < 0 || nf < 0) throw Error(ErrorKind::Parse, "negative OFF counts");
  if (static_cast<long long>(lines.size()) < 2 + nv + nf) throw Error(ErrorKind::Parse, "truncated OFF file");

  TriMesh mesh;
  mesh.vertices.resize(nv, 3);
  for (long long i = 0; i < nv; ++i) {
    const auto& tokens = lines[static_cast<std::size_t>(2 + i)];
    if (tokens.size() < 3) throw Error(ErrorKind::Parse, "OFF vertex line needs 3 coordinates");
    for (int c = 0; c < 3; ++c) mesh.vertices(i, c) = scale * parse_real(tokens[static_cast<std::size_t>(c)]);
  }
  std::vector<std::array<int, 3>> faces;
  for (long long f = 0; f < nf; ++f) {
    const auto& tokens = lines[static_cast<std::size_t>(2 + nv + f)];
    const long long k = parse_integer(tokens[0]);
    if (k < 3 || static_cast<long long>(tokens.size()) < k + 1) throw Error(ErrorKind::Parse, "malformed OFF face");
    std::vector<int> idx(static_cast<std::size_t>(k));
    for (long long j = 0; j < k; ++j) {
      const long long value = parse_integer(tokens[static_cast<std::size_t>(j + 1)]);
      if (value < 0 || value >= nv) throw Error(ErrorKind::Parse, "OFF face index out of range");
      idx[static_cast<std::size_t>(j)] = static_cast<int>(value);
    }
    for (std::size_t j = 1; j + 1 < idx.size(); ++j) faces.push_back({idx[0], idx[j], idx[j + 1]});
  }
  mesh.faces.resize(static_cast<Eigen::Index>(faces.size()), 3);
  for (std::size_t f = 0; f < faces.size(); ++f) {
    mesh.faces.row(static_cast<Eigen::Index>(f)) << faces[f][0], faces[f][1], faces[f][2];
  }
  return mesh;
}

TriMesh read_off(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "'");
  return read_off(in);
}

void write_off(std::ostream& out, const TriMesh& mesh) {
  out << "OFF mm\n" << mesh.vertices.rows() << ' ' << mesh.faces.rows() << " 0\n";
  for (Eigen::Index i = 0; i < mesh.vertices.rows(); ++i) {
    out << format_real(mesh.vertices(i, 0)) << ' ' << format_real(mesh.vertices(i, 1)) << ' '
        << format_real(mesh.vertices(i, 2)) << '\n';
  }
  for (Eigen::Index f = 0; f < mesh.faces.rows(); ++f) {
    out << "3 " << mesh.faces(f, 0) << ' ' << mesh.faces(f, 1) << ' ' << mesh.faces(f, 2) << '\n';
  }
}

TriMesh make_cylinder(double radius, double height, int segments, int rings) {
  TriMesh mesh;
  const int ring_count = rings + 1;
  mesh.vertices.resize(ring_count * segments + 2, 3);
  for (int r = 0; r < ring_count; ++r) {
    const double y = height * r / rings;
    for (int s = 0; s < segments; ++s) {
      const double phi = 2.0 * std::numbers::pi * s / segments;
      mesh.vertices.row(r * segments + s) << radius * std::cos(phi), y, -radius * std::sin(phi);
    }
  }
  const int bottom = ring_count * segments, top = bottom + 1;
  mesh.vertices.row(bottom) << 0.0, 0.0, 0.0;
  mesh.vertices.row(top) << 0.0, height, 0.0;
  std::vector<std::array<int, 3>> faces;
  for (int r = 0; r < rings; ++r) {
    for (int s = 0; s < segments; ++s) {
      const int a = r * segments + s, b = r * segments + (s + 1) % segments;
      const int c = a + segments, d = b + segments;
      faces.push_back({a, b, d});
      faces.push_back({a, d, c});
    }
  }
  for (int s = 0; s < segments; ++s) {
    faces.push_back({bottom, (s + 1) % segments, s});
    faces.push_back({top, rings * segments + s, rings * segments + (s + 1) % segments});
  }
  mesh.faces.resize(static_cast<Eigen::Index>(faces.size()), 3);
  for (std::size_t f = 0; f < faces.size(); ++f) {
    mesh.faces.row(static_cast<Eigen::Index>(f)) << faces[f][0], faces[f][1], faces[f][2];
  }
  return mesh;
}

TriMesh make_box(double size) {
  TriMesh mesh;
  mesh.vertices.resize(8, 3);
  for (int i = 0; i < 8; ++i) {
    mesh.vertices.row(i) << (i & 1 ? size : 0.0), (i & 2 ? size : 0.0), (i & 4 ? size : 0.0);
  }
  mesh.faces.resize(12, 3);
  mesh.faces << 0, 2, 3, 0, 3, 1,  // z = 0
      4, 5, 7, 4, 7, 6,            // z = size
      0, 1, 5, 0, 5, 4,            // y = 0
      2, 6, 7, 2, 7, 3,            // y = size
      0, 4, 6, 0, 6, 2,            // x = 0
      1, 3, 7, 1, 7, 5;            // x = size
  return mesh;
}

TriMesh make_uv_sphere(double radius, int stacks, int slices) {
  TriMesh mesh;
  const int inner = stacks - 1;
  mesh.vertices.resize(inner * slices + 2, 3);
  for (int i = 0; i < inner; ++i) {
    const double theta = std::numbers::pi * (i + 1) / stacks;
    for (int j = 0; j < slices; ++j) {
      const double phi = 2.0 * std::numbers::pi * j / slices;
      mesh.vertices.row(i * slices + j) << radius * std::sin(theta) * std::cos(phi), radius * std::cos(theta),
          -radius * std::sin(theta) * std::sin(phi);
    }
  }
  const int north = inner * slices, south = north + 1;
  mesh.vertices.row(north) << 0.0, radius, 0.0;
  mesh.vertices.row(south) << 0.0, -radius, 0.0;
  std::vector<std::array<int, 3>> faces;
  for (int j = 0; j < slices; ++j) faces.push_back({north, j, (j + 1) % slices});
  for (int i = 0; i + 1 < inner; ++i) {
    for (int j = 0; j < slices; ++j) {
      const int a = i * slices + j, b = i * slices + (j + 1) % slices;
      const int c = a + slices, d = b + slices;
      faces.push_back({a, c, d});
      faces.push_back({a, d, b});
    }
  }
  for (int j = 0; j < slices; ++j) {
    faces.push_back({south, (inner - 1) * slices + (j + 1) % slices, (inner - 1) * slices + j});
  }
  mesh.faces.resize(static_cast<Eigen::Index>(faces.size()), 3);
  for (std::size_t f = 0; f < faces.size(); ++f) {
    mesh.faces.row(static_cast<Eigen::Index>(f)) << faces[f][0], faces[f][1], faces[f][2];
  }
  return mesh;
}

double signed_volume(const TriMesh& mesh) {
  double v = 0.0;
  for (Eigen::Index f = 0; f < mesh.faces.rows(); ++f) {
    v += row(mesh.vertices, mesh.faces(f, 0)).dot(
        row(mesh.vertices, mesh.faces(f, 1)).cross(row(mesh.vertices, mesh.faces(f, 2))));
  }
  return v / 6.0;
}

std::size_t count_non_manifold_edges(const TriMesh& mesh) {
  std::unordered_map<std::uint64_t, int> count;
  for (Eigen::Index f = 0; f < mesh.faces.rows(); ++f) {
    for (int e = 0; e < 3; ++e) ++count[edge_key(mesh.faces(f, e), mesh.faces(f, (e + 1) % 3))];
  }
  std::size_t bad = 0;
  for (const auto& [k, c] : count) bad += (c != 2);
  return bad;
}

}  // namespace anthro
