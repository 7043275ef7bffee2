#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hallufix/image.hpp"

namespace hallufix {

// Indexed triangle mesh. Immutable by convention once validated: operations
// return new meshes instead of mutating their input.
struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> faces;
  std::vector<Vec3> vertex_colors;  // empty or one RGB in [0,1] per vertex

  bool has_colors() const { return !vertex_colors.empty(); }
  int vertex_count() const { return static_cast<int>(vertices.size()); }
  int face_count() const { return static_cast<int>(faces.size()); }
};

struct PointCloud {
  std::vector<Vec3> points;
  std::vector<int> source_faces;  // empty or one face index per point

  int size() const { return static_cast<int>(points.size()); }
};

enum class MeshFormat { OBJ, PLY };
enum class CorruptMode { SPIKE, DENT };

// Drops faces with out-of-plane area below 1e-12 and verifies index bounds
// and color-count consistency. Returns the number of faces dropped.
int validate_mesh(TriangleMesh& mesh);

struct LoadStats {
  int degenerate_faces_dropped = 0;
};

// ASCII OBJ (v/f records, 1-based indices) or PLY (ASCII or
// binary_little_endian; float32 positions, optional uchar RGB).
TriangleMesh load_mesh(const std::filesystem::path& path, LoadStats* stats = nullptr);

// OBJ vertices are written with 17 significant digits (doubles round-trip
// exactly); PLY stores float32 per the format contract.
void save_mesh(const TriangleMesh& mesh, const std::filesystem::path& path, MeshFormat format);

// Uniform scale + translation so the AABB is centered at the origin and the
// longest axis spans exactly [-0.5, 0.5].
TriangleMesh normalize_to_unit_box(const TriangleMesh& mesh);

double face_area(const TriangleMesh& mesh, int face);
Vec3 face_normal_scaled(const TriangleMesh& mesh, int face);  // cross(e1,e2), |.| = 2*area

// Area-weighted average of incident face normals, normalized per vertex.
// Isolated vertices get (0,0,1) and are reported through `isolated`.
std::vector<Vec3> vertex_normals(const TriangleMesh& mesh, std::vector<int>* isolated = nullptr);

// Adjoint of vertex_normals: maps d(loss)/d(normals) to d(loss)/d(positions).
std::vector<Vec3> vertex_normals_backward(const TriangleMesh& mesh,
                                          const std::vector<Vec3>& normal_grads);

// Area-weighted uniform surface sampling, deterministic given seed.
PointCloud sample_surface(const TriangleMesh& mesh, int count, std::uint64_t seed);

// Geodesic sphere fixture; the base icosahedron is pole-aligned (a vertex on
// +Y), so the mesh is exactly invariant under 72-degree rotations about Y.
TriangleMesh icosphere(int subdivisions, double radius);

// Box fixture with one vertical edge replaced by a chamfer strip: a prism
// over a chamfered-square cross-section, extruded along Y with capped ends.
// `ridge_vertices` are the vertices on the two chamfer crease lines,
// `flat_vertices` the wall-interior vertices away from every crease.
TriangleMesh beveled_cube(int divisions, double bevel,
                          std::vector<int>* ridge_vertices = nullptr,
                          std::vector<int>* flat_vertices = nullptr);

struct CorruptResult {
  TriangleMesh mesh;
  std::vector<int> affected;  // sorted vertex indices
};

// Displaces ceil(fraction * vertex_count) distinct random vertices along
// (SPIKE) or against (DENT) their vertex normal by `magnitude`.
CorruptResult corrupt(const TriangleMesh& mesh, double fraction, double magnitude,
                      CorruptMode mode, std::uint64_t seed);

}  // namespace hallufix
