#include "hallufix/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "hallufix/errors.hpp"
#include "hallufix/rng.hpp"

namespace hallufix {

namespace {

constexpr double kMinFaceArea = 1e-12;

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

void format_double(std::string& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}

}  // namespace

double face_area(const TriangleMesh& mesh, int face) {
  return 0.5 * face_normal_scaled(mesh, face).norm();
}

Vec3 face_normal_scaled(const TriangleMesh& mesh, int face) {
  const auto& f = mesh.faces[face];
  const Vec3& a = mesh.vertices[f[0]];
  return (mesh.vertices[f[1]] - a).cross(mesh.vertices[f[2]] - a);
}

int validate_mesh(TriangleMesh& mesh) {
  const int vc = mesh.vertex_count();
  for (const auto& f : mesh.faces) {
    for (int idx : f) {
      if (idx < 0 || idx >= vc)
        throw ParseError("face index " + std::to_string(idx) + " out of range [0, " +
                         std::to_string(vc) + ")");
    }
  }
  if (!mesh.vertex_colors.empty() && static_cast<int>(mesh.vertex_colors.size()) != vc)
    throw ParseError("vertex color count does not match vertex count");

  int dropped = 0;
  std::vector<std::array<int, 3>> kept;
  kept.reserve(mesh.faces.size());
  for (int i = 0; i < mesh.face_count(); ++i) {
    if (face_area(mesh, i) < kMinFaceArea) {
      ++dropped;
    } else {
      kept.push_back(mesh.faces[i]);
    }
  }
  mesh.faces = std::move(kept);
  if (mesh.faces.empty()) throw EmptyMesh("mesh has no non-degenerate faces");
  return dropped;
}

// ---------------------------------------------------------------------------
// File I/O

namespace {

TriangleMesh load_obj(std::istream& in) {
  TriangleMesh mesh;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag)) continue;
    if (tag == "v") {
      double x, y, z;
      if (!(ls >> x >> y >> z)) throw ParseError("OBJ line " + std::to_string(lineno) + ": bad vertex");
      mesh.vertices.emplace_back(x, y, z);
      double r, g, b;
      if (ls >> r >> g >> b) mesh.vertex_colors.emplace_back(r, g, b);
    } else if (tag == "f") {
      std::vector<long> idx;
      std::string item;
      while (ls >> item) {
        // accept v, v/vt, v//vn, v/vt/vn; only the position index is used
        std::size_t slash = item.find('/');
        std::string head = slash == std::string::npos ? item : item.substr(0, slash);
        char* end = nullptr;
        long v = std::strtol(head.c_str(), &end, 10);
        if (end == head.c_str()) throw ParseError("OBJ line " + std::to_string(lineno) + ": bad face index");
        if (v < 0) v = static_cast<long>(mesh.vertices.size()) + 1 + v;  // negative = relative
        idx.push_back(v);
      }
      if (idx.size() < 3) throw ParseError("OBJ line " + std::to_string(lineno) + ": face needs >= 3 indices");
      for (std::size_t i = 1; i + 1 < idx.size(); ++i) {  // fan-triangulate polygons
        mesh.faces.push_back({static_cast<int>(idx[0] - 1), static_cast<int>(idx[i] - 1),
                              static_cast<int>(idx[i + 1] - 1)});
      }
    }
  }
  if (!mesh.vertex_colors.empty() && mesh.vertex_colors.size() != mesh.vertices.size())
    throw ParseError("OBJ: vertex colors present on some vertices only");
  return mesh;
}

struct PlyProperty {
  std::string type;
  std::string name;
  bool list = false;
  std::string count_type;
  std::string item_type;
};

struct PlyElement {
  std::string name;
  long count = 0;
  std::vector<PlyProperty> props;
};

double read_scalar_binary(std::istream& in, const std::string& type) {
  auto read_as = [&](auto value) -> double {
    in.read(reinterpret_cast<char*>(&value), sizeof(value));
    if (!in) throw ParseError("PLY: unexpected end of binary data");
    return static_cast<double>(value);
  };
  if (type == "float" || type == "float32") return read_as(float{});
  if (type == "double" || type == "float64") return read_as(double{});
  if (type == "uchar" || type == "uint8") return read_as(std::uint8_t{});
  if (type == "char" || type == "int8") return read_as(std::int8_t{});
  if (type == "ushort" || type == "uint16") return read_as(std::uint16_t{});
  if (type == "short" || type == "int16") return read_as(std::int16_t{});
  if (type == "uint" || type == "uint32") return read_as(std::uint32_t{});
  if (type == "int" || type == "int32") return read_as(std::int32_t{});
  throw ParseError("PLY: unsupported property type " + type);
}

TriangleMesh load_ply(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.substr(0, 3) != "ply") throw ParseError("PLY: missing magic");
  std::string format;
  std::vector<PlyElement> elements;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "comment") continue;
    if (tag == "format") {
      ls >> format;
    } else if (tag == "element") {
      PlyElement e;
      ls >> e.name >> e.count;
      elements.push_back(e);
    } else if (tag == "property") {
      if (elements.empty()) throw ParseError("PLY: property before element");
      PlyProperty p;
      std::string t;
      ls >> t;
      if (t == "list") {
        p.list = true;
        ls >> p.count_type >> p.item_type >> p.name;
      } else {
        p.type = t;
        ls >> p.name;
      }
      elements.back().props.push_back(p);
    } else if (tag == "end_header") {
      break;
    }
  }
  bool ascii = format == "ascii";
  if (!ascii && format != "binary_little_endian")
    throw UnsupportedFormat("PLY: format " + format + " not supported");

  TriangleMesh mesh;
  auto read_scalar = [&](const std::string& type) -> double {
    if (ascii) {
      double v;
      if (!(in >> v)) throw ParseError("PLY: unexpected end of ASCII data");
      return v;
    }
    return read_scalar_binary(in, type);
  };

  for (const auto& elem : elements) {
    if (elem.name == "vertex") {
      int xi = -1, yi = -1, zi = -1, ri = -1, gi = -1, bi = -1;
      for (std::size_t i = 0; i < elem.props.size(); ++i) {
        const std::string& n = elem.props[i].name;
        if (n == "x") xi = static_cast<int>(i);
        if (n == "y") yi = static_cast<int>(i);
        if (n == "z") zi = static_cast<int>(i);
        if (n == "red") ri = static_cast<int>(i);
        if (n == "green") gi = static_cast<int>(i);
        if (n == "blue") bi = static_cast<int>(i);
      }
      if (xi < 0 || yi < 0 || zi < 0) throw ParseError("PLY: vertex element lacks x/y/z");
      bool colors = ri >= 0 && gi >= 0 && bi >= 0;
      for (long v = 0; v < elem.count; ++v) {
        std::vector<double> vals(elem.props.size());
        for (std::size_t i = 0; i < elem.props.size(); ++i) {
          if (elem.props[i].list) throw ParseError("PLY: list property on vertex element");
          vals[i] = read_scalar(elem.props[i].type);
        }
        mesh.vertices.emplace_back(vals[xi], vals[yi], vals[zi]);
        if (colors)
          mesh.vertex_colors.emplace_back(vals[ri] / 255.0, vals[gi] / 255.0, vals[bi] / 255.0);
      }
    } else if (elem.name == "face") {
      for (long f = 0; f < elem.count; ++f) {
        for (const auto& p : elem.props) {
          if (!p.list) {
            read_scalar(p.type);
            continue;
          }
          long n = static_cast<long>(read_scalar(p.count_type));
          std::vector<long> idx(n);
          for (long i = 0; i < n; ++i) idx[i] = static_cast<long>(read_scalar(p.item_type));
          for (long i = 1; i + 1 < n; ++i)
            mesh.faces.push_back({static_cast<int>(idx[0]), static_cast<int>(idx[i]),
                                  static_cast<int>(idx[i + 1])});
        }
      }
    } else {
      // skip unknown elements
      for (long r = 0; r < elem.count; ++r) {
        for (const auto& p : elem.props) {
          if (p.list) {
            long n = static_cast<long>(read_scalar(p.count_type));
            for (long i = 0; i < n; ++i) read_scalar(p.item_type);
          } else {
            read_scalar(p.type);
          }
        }
      }
    }
  }
  return mesh;
}

}  // namespace

TriangleMesh load_mesh(const std::filesystem::path& path, LoadStats* stats) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string ext = lower(path.extension().string());
  TriangleMesh mesh;
  if (ext == ".obj") {
    mesh = load_obj(in);
  } else if (ext == ".ply") {
    mesh = load_ply(in);
  } else {
    throw UnsupportedFormat("unsupported mesh format: " + path.string());
  }
  if (mesh.faces.empty()) throw EmptyMesh("no faces in " + path.string());
  int dropped = validate_mesh(mesh);
  if (stats) stats->degenerate_faces_dropped = dropped;
  return mesh;
}

void save_mesh(const TriangleMesh& mesh, const std::filesystem::path& path, MeshFormat format) {
  if (mesh.faces.empty()) throw EmptyMesh("refusing to save a mesh with no faces");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");

  if (format == MeshFormat::OBJ) {
    std::string buf;
    buf.reserve(mesh.vertices.size() * 48);
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
      const Vec3& v = mesh.vertices[i];
      buf += "v ";
      format_double(buf, v.x());
      buf += ' ';
      format_double(buf, v.y());
      buf += ' ';
      format_double(buf, v.z());
      if (mesh.has_colors()) {
        const Vec3& c = mesh.vertex_colors[i];
        buf += ' ';
        format_double(buf, c.x());
        buf += ' ';
        format_double(buf, c.y());
        buf += ' ';
        format_double(buf, c.z());
      }
      buf += '\n';
    }
    for (const auto& f : mesh.faces) {
      buf += "f " + std::to_string(f[0] + 1) + ' ' + std::to_string(f[1] + 1) + ' ' +
             std::to_string(f[2] + 1) + '\n';
    }
    out << buf;
  } else {
    out << "ply\nformat binary_little_endian 1.0\n";
    out << "element vertex " << mesh.vertices.size() << "\n";
    out << "property float x\nproperty float y\nproperty float z\n";
    if (mesh.has_colors())
      out << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
    out << "element face " << mesh.faces.size() << "\n";
    out << "property list uchar int vertex_indices\n";
    out << "end_header\n";
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
      float xyz[3] = {static_cast<float>(mesh.vertices[i].x()),
                      static_cast<float>(mesh.vertices[i].y()),
                      static_cast<float>(mesh.vertices[i].z())};
      out.write(reinterpret_cast<const char*>(xyz), sizeof(xyz));
      if (mesh.has_colors()) {
        const Vec3& c = mesh.vertex_colors[i];
        auto q = [](double v) {
          return static_cast<std::uint8_t>(std::clamp(v, 0.0, 1.0) * 255.0 + 0.5);
        };
        std::uint8_t rgb[3] = {q(c.x()), q(c.y()), q(c.z())};
        out.write(reinterpret_cast<const char*>(rgb), sizeof(rgb));
      }
    }
    for (const auto& f : mesh.faces) {
      std::uint8_t n = 3;
      out.write(reinterpret_cast<const char*>(&n), 1);
      std::int32_t idx[3] = {f[0], f[1], f[2]};
      out.write(reinterpret_cast<const char*>(idx), sizeof(idx));
    }
  }
  if (!out) throw IoError("write failed for " + path.string());
}

// ---------------------------------------------------------------------------
// Geometry

TriangleMesh normalize_to_unit_box(const TriangleMesh& mesh) {
  if (mesh.vertices.empty()) throw EmptyMesh("cannot normalize an empty mesh");
  Vec3 mn = mesh.vertices[0], mx = mesh.vertices[0];
  for (const Vec3& v : mesh.vertices) {
    mn = mn.cwiseMin(v);
    mx = mx.cwiseMax(v);
  }
  Vec3 ext = mx - mn;
  double longest = ext.maxCoeff();
  if (longest <= 0.0) throw DegenerateExtent("all vertices coincide");
  Vec3 center = 0.5 * (mn + mx);
  double scale = 1.0 / longest;
  TriangleMesh out = mesh;
  for (Vec3& v : out.vertices) v = (v - center) * scale;
  return out;
}

std::vector<Vec3> vertex_normals(const TriangleMesh& mesh, std::vector<int>* isolated) {
  std::vector<Vec3> sums(mesh.vertices.size(), Vec3::Zero());
  for (int f = 0; f < mesh.face_count(); ++f) {
    Vec3 n = face_normal_scaled(mesh, f);  // magnitude 2*area: area weighting for free
    for (int k = 0; k < 3; ++k) sums[mesh.faces[f][k]] += n;
  }
  std::vector<Vec3> normals(sums.size());
  for (std::size_t i = 0; i < sums.size(); ++i) {
    double len = sums[i].norm();
    if (len < 1e-20) {
      normals[i] = Vec3(0, 0, 1);
      if (isolated) isolated->push_back(static_cast<int>(i));
    } else {
      normals[i] = sums[i] / len;
    }
  }
  return normals;
}

std::vector<Vec3> vertex_normals_backward(const TriangleMesh& mesh,
                                          const std::vector<Vec3>& normal_grads) {
  // Forward: n_v = s_v/|s_v|, s_v = sum of cross(b-a, c-a) over incident faces.
  std::vector<Vec3> sums(mesh.vertices.size(), Vec3::Zero());
  for (int f = 0; f < mesh.face_count(); ++f) {
    Vec3 n = face_normal_scaled(mesh, f);
    for (int k = 0; k < 3; ++k) sums[mesh.faces[f][k]] += n;
  }
  std::vector<Vec3> g_sum(mesh.vertices.size(), Vec3::Zero());
  for (std::size_t i = 0; i < sums.size(); ++i) {
    double len = sums[i].norm();
    if (len < 1e-20) continue;  // isolated vertices carry no gradient
    Vec3 n = sums[i] / len;
    g_sum[i] = (normal_grads[i] - n * n.dot(normal_grads[i])) / len;
  }
  std::vector<Vec3> g_pos(mesh.vertices.size(), Vec3::Zero());
  for (int f = 0; f < mesh.face_count(); ++f) {
    const auto& fv = mesh.faces[f];
    // cross(u, v) with u = b-a, v = c-a contributes to s of all three corners
    Vec3 g_c = g_sum[fv[0]] + g_sum[fv[1]] + g_sum[fv[2]];
    if (g_c.isZero(0.0)) continue;
    const Vec3& a = mesh.vertices[fv[0]];
    Vec3 u = mesh.vertices[fv[1]] - a;
    Vec3 v = mesh.vertices[fv[2]] - a;
    g_pos[fv[0]] += (u - v).cross(g_c);
    g_pos[fv[1]] += v.cross(g_c);
    g_pos[fv[2]] += -u.cross(g_c);
  }
  return g_pos;
}

PointCloud sample_surface(const TriangleMesh& mesh, int count, std::uint64_t seed) {
  if (count < 1) throw ShapeMismatch("sample count must be >= 1");
  std::vector<double> cdf(mesh.face_count());
  double acc = 0.0;
  for (int f = 0; f < mesh.face_count(); ++f) {
    acc += face_area(mesh, f);
    cdf[f] = acc;
  }
  Rng rng(seed);
  PointCloud cloud;
  cloud.points.reserve(count);
  cloud.source_faces.reserve(count);
  for (int i = 0; i < count; ++i) {
    double r = rng.uniform() * acc;
    int f = static_cast<int>(std::lower_bound(cdf.begin(), cdf.end(), r) - cdf.begin());
    if (f >= mesh.face_count()) f = mesh.face_count() - 1;
    double u = rng.uniform(), v = rng.uniform();
    if (u + v > 1.0) {
      u = 1.0 - u;
      v = 1.0 - v;
    }
    const auto& fv = mesh.faces[f];
    const Vec3& a = mesh.vertices[fv[0]];
    Vec3 p = a + u * (mesh.vertices[fv[1]] - a) + v * (mesh.vertices[fv[2]] - a);
    cloud.points.push_back(p);
    cloud.source_faces.push_back(f);
  }
  return cloud;
}

// ---------------------------------------------------------------------------
// Fixtures

TriangleMesh icosphere(int subdivisions, double radius) {
  if (subdivisions < 0 || subdivisions > 6)
    throw SizeLimit("icosphere subdivisions must be in [0, 6]");
  if (radius <= 0.0) throw ShapeMismatch("icosphere radius must be positive");

  // Pole-aligned icosahedron: north/south poles on +-Y, two staggered
  // pentagonal rings at latitude +-atan(1/2).
  TriangleMesh mesh;
  const double lat = std::atan(0.5);
  mesh.vertices.emplace_back(0.0, 1.0, 0.0);
  for (int ring = 0; ring < 2; ++ring) {
    double y = ring == 0 ? std::sin(lat) : -std::sin(lat);
    double r = std::cos(lat);
    double offset = ring == 0 ? 0.0 : M_PI / 5.0;
    for (int i = 0; i < 5; ++i) {
      double a = offset + 2.0 * M_PI * i / 5.0;
      mesh.vertices.emplace_back(r * std::sin(a), y, r * std::cos(a));
    }
  }
  mesh.vertices.emplace_back(0.0, -1.0, 0.0);
  const int N = 0, S = 11;
  auto U = [](int i) { return 1 + i; };         // upper ring
  auto L = [](int i) { return 6 + i; };         // lower ring
  for (int i = 0; i < 5; ++i) {
    int j = (i + 1) % 5;
    mesh.faces.push_back({N, U(i), U(j)});
    mesh.faces.push_back({U(j), U(i), L(i)});
    mesh.faces.push_back({U(j), L(i), L(j)});
    mesh.faces.push_back({L(j), L(i), S});
  }

  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      Vec3 m = (mesh.vertices[a] + mesh.vertices[b]).normalized();
      int idx = mesh.vertex_count();
      mesh.vertices.push_back(m);
      midpoint.emplace(key, idx);
      return idx;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(mesh.faces.size() * 4);
    for (const auto& f : mesh.faces) {
      int ab = mid(f[0], f[1]), bc = mid(f[1], f[2]), ca = mid(f[2], f[0]);
      next.push_back({f[0], ab, ca});
      next.push_back({f[1], bc, ab});
      next.push_back({f[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    mesh.faces = std::move(next);
  }
  for (Vec3& v : mesh.vertices) v = v.normalized() * radius;
  return mesh;
}

TriangleMesh beveled_cube(int divisions, double bevel, std::vector<int>* ridge_vertices,
                          std::vector<int>* flat_vertices) {
  if (divisions < 1) throw ShapeMismatch("beveled_cube needs divisions >= 1");
  const double a = 0.5;
  double c = std::clamp(bevel, 0.05, 0.45);

  // Cross-section in the XZ plane, walked counterclockwise when seen from +Y.
  // The (+x,+z) corner is chamfered; all other corners stay square.
  struct Corner {
    Vec3 pos;       // (x, 0, z)
    bool ridge;     // chamfer crease
  };
  std::vector<Corner> corners = {
      {{a, 0, a - c}, true},   // chamfer start
      {{a, 0, -a}, false},
      {{-a, 0, -a}, false},
      {{-a, 0, a}, false},
      {{a - c, 0, a}, true},   // chamfer end
  };

  // Sample the perimeter: each wall split into `divisions` segments, the
  // chamfer strip into max(1, divisions/2).
  std::vector<Vec3> loop;
  std::vector<bool> loop_is_corner;
  std::vector<bool> loop_is_ridge;
  std::vector<bool> loop_on_chamfer;
  auto add_segment = [&](const Vec3& from, const Vec3& to, int segs, bool from_ridge,
                         bool chamfer) {
    for (int i = 0; i < segs; ++i) {
      double t = static_cast<double>(i) / segs;
      loop.push_back(from + t * (to - from));
      loop_is_corner.push_back(i == 0);
      loop_is_ridge.push_back(i == 0 && from_ridge);
      loop_on_chamfer.push_back(chamfer);
    }
  };
  for (std::size_t i = 0; i < corners.size(); ++i) {
    const Corner& from = corners[i];
    const Corner& to = corners[(i + 1) % corners.size()];
    bool chamfer = from.ridge && to.ridge;  // the short strip between the two creases
    add_segment(from.pos, to.pos, chamfer ? std::max(1, divisions / 2) : divisions,
                from.ridge, chamfer);
  }
  const int P = static_cast<int>(loop.size());
  const int rows = divisions + 1;  // vertical samples from y=-a to y=+a

  TriangleMesh mesh;
  std::vector<int> ridge, flat;
  for (int r = 0; r < rows; ++r) {
    double y = -a + (2.0 * a) * r / (rows - 1);
    for (int p = 0; p < P; ++p) {
      int idx = mesh.vertex_count();
      mesh.vertices.emplace_back(loop[p].x(), y, loop[p].z());
      if (loop_is_ridge[p]) ridge.push_back(idx);
      // wall interior: away from the creases, the corners and the caps
      if (!loop_is_corner[p] && !loop_on_chamfer[p] && r > 0 && r + 1 < rows)
        flat.push_back(idx);
    }
  }
  auto vid = [&](int r, int p) { return r * P + ((p % P) + P) % P; };
  for (int r = 0; r + 1 < rows; ++r) {
    for (int p = 0; p < P; ++p) {
      int v00 = vid(r, p), v01 = vid(r, p + 1);
      int v10 = vid(r + 1, p), v11 = vid(r + 1, p + 1);
      // outward-facing winding (counterclockwise from outside)
      mesh.faces.push_back({v00, v01, v11});
      mesh.faces.push_back({v00, v11, v10});
    }
  }
  // caps: fan from center
  int bottom_center = mesh.vertex_count();
  mesh.vertices.emplace_back(0.0, -a, 0.0);
  int top_center = mesh.vertex_count();
  mesh.vertices.emplace_back(0.0, a, 0.0);
  for (int p = 0; p < P; ++p) {
    mesh.faces.push_back({bottom_center, vid(0, p + 1), vid(0, p)});
    mesh.faces.push_back({top_center, vid(rows - 1, p), vid(rows - 1, p + 1)});
  }
  if (ridge_vertices) *ridge_vertices = std::move(ridge);
  if (flat_vertices) *flat_vertices = std::move(flat);
  return mesh;
}

CorruptResult corrupt(const TriangleMesh& mesh, double fraction, double magnitude,
                      CorruptMode mode, std::uint64_t seed) {
  if (fraction <= 0.0 || fraction > 1.0) throw ShapeMismatch("corrupt fraction must be in (0,1]");
  const int vc = mesh.vertex_count();
  int n = static_cast<int>(std::ceil(fraction * vc));
  if (n < 1) throw ShapeMismatch("fraction * vertex_count must be >= 1");
  n = std::min(n, vc);

  // partial Fisher-Yates over the index array
  std::vector<int> indices(vc);
  std::iota(indices.begin(), indices.end(), 0);
  Rng rng(seed);
  for (int i = 0; i < n; ++i) {
    std::size_t j = i + rng.index(vc - i);
    std::swap(indices[i], indices[j]);
  }
  std::vector<int> affected(indices.begin(), indices.begin() + n);
  std::sort(affected.begin(), affected.end());

  std::vector<Vec3> normals = vertex_normals(mesh);
  double dir = mode == CorruptMode::SPIKE ? 1.0 : -1.0;
  CorruptResult result;
  result.mesh = mesh;
  for (int idx : affected) result.mesh.vertices[idx] += dir * magnitude * normals[idx];
  result.affected = std::move(affected);
  return result;
}

}  // namespace hallufix
