#pragma once

#include <cstdint>
#include <vector>

#include "hallufix/image.hpp"
#include "hallufix/mesh.hpp"

namespace hallufix {

// Orthographic camera description. Conventions, fixed across the toolkit:
//   - world up axis is +Y; azimuth rotates about +Y with azimuth 0 on +Z,
//     elevation tilts toward +Y;
//   - the camera sits at distance (near+far)/2 from the origin along the
//     view direction, looking at the origin;
//   - camera space is right-handed with +Z pointing from the scene toward
//     the camera, so surfaces facing the camera have normal z > 0;
//   - depth is the distance from the camera plane along the view axis;
//     background pixels carry the far-plane sentinel.
struct ViewSpec {
  double azimuth_deg = 0.0;
  double elevation_deg = 0.0;
  double ortho_half_extent = 0.9;
  int width = 64;
  int height = 64;
  double near_plane = 1.0;
  double far_plane = 3.0;
};

struct Camera {
  Vec3 right, up, toward;  // camera axes in world space; `toward` points at the camera
  double plane_dist;       // camera-plane distance from the origin
  double extent;
  int width, height;
  double near_plane, far_plane;

  static Camera from_view(const ViewSpec& view);

  double depth_of(const Vec3& p) const { return plane_dist - p.dot(toward); }
  // Continuous pixel coordinates; pixel (i,j) covers [i,i+1)x[j,j+1), row 0 on top.
  Eigen::Vector2d to_pixels(const Vec3& p) const;
  Eigen::Vector2d plane_coords(const Vec3& p) const {
    return {p.dot(right), p.dot(up)};
  }
  Vec3 to_camera_dir(const Vec3& d) const { return {d.dot(right), d.dot(up), d.dot(toward)}; }
  Vec3 to_world_dir(const Vec3& d) const {
    return d.x() * right + d.y() * up + d.z() * toward;
  }
};

struct ViewRing {
  std::vector<ViewSpec> views;
  double angular_step = 0.0;
};

// Supported counts: 24, 36, 72, 120 (integral or exact half-degree steps).
ViewRing make_ring(int count, double elevation_deg, const ViewSpec& tmpl);

struct RenderBuffers {
  ImageF depth;     // camera-plane distance; far sentinel on background
  Image3 normal;    // camera-space unit normals; (0,0,0) on background
  ImageF mask;      // 1 on covered pixels
  ImageI face_id;   // -1 on background
  Image3 bary;      // barycentric coordinates of the covering face
  bool clipped = false;  // some vertex fell outside the view volume
};

// Hard z-buffered rasterization with backface culling. Deterministic:
// faces are processed in index order and depth ties keep the lower index.
RenderBuffers rasterize(const TriangleMesh& mesh, const ViewSpec& view);

struct VertexViewStats {
  std::vector<std::uint8_t> visible;    // any incident face present in face_id
  std::vector<double> projected_area;   // camera-plane area (world units^2) of those faces
};

VertexViewStats vertex_view_stats(const TriangleMesh& mesh, const ViewSpec& view,
                                  const RenderBuffers& buffers);

// Soft silhouette coverage: value = logistic(signed pixel distance / sigma),
// positive inside. The per-pixel record (nearest silhouette edge, projection
// parameter, inside sign) is the frozen state for gradient evaluation.
struct SoftMask {
  ImageF value;
  struct Support {
    int v0 = -1, v1 = -1;  // mesh vertex indices of the nearest silhouette edge
    float t = 0.0f;        // clamped projection parameter along the edge
    std::int8_t sign = -1; // +1 inside, -1 outside
  };
  std::vector<Support> support;  // per pixel, row-major
  double sigma_px = 1.0;
};

SoftMask soft_mask(const TriangleMesh& mesh, const ViewSpec& view, double sigma_px);

// d(sum_p pixel_grad * soft_mask)/d(vertices) with the support record frozen
// (edge identity and inside sign held; the projection onto the edge re-solves,
// which contributes nothing to first order).
std::vector<Vec3> soft_mask_backward(const TriangleMesh& mesh, const ViewSpec& view,
                                     const SoftMask& sm, const ImageF& pixel_grad);

// d(sum_p pixel_grad * depth)/d(vertices) under frozen coverage: per covered
// pixel, the view-axis term through the barycentric combination of vertex
// depths plus the in-plane term from the barycentric dependence on the
// projected vertex positions.
std::vector<Vec3> backproject_depth_gradients(const TriangleMesh& mesh, const ViewSpec& view,
                                              const RenderBuffers& buffers,
                                              const ImageF& pixel_grad);

// Same contract for the rendered normal image: chains through the
// renormalized barycentric interpolation of camera-space vertex normals and
// through vertex_normals_backward into vertex positions.
std::vector<Vec3> backproject_normal_gradients(const TriangleMesh& mesh, const ViewSpec& view,
                                               const RenderBuffers& buffers,
                                               const Image3& pixel_grad);

// Frozen-coverage re-evaluation: recompute buffers from perturbed vertex
// positions while keeping pixel-to-face assignments (and for the soft mask,
// the support record) fixed. Used by finite-difference oracles.
ImageF depth_under_frozen_coverage(const TriangleMesh& mesh, const ViewSpec& view,
                                   const RenderBuffers& buffers);
Image3 normals_under_frozen_coverage(const TriangleMesh& mesh, const ViewSpec& view,
                                     const RenderBuffers& buffers);
ImageF soft_mask_under_frozen_support(const TriangleMesh& mesh, const ViewSpec& view,
                                      const SoftMask& sm);

// Flat-shaded grayscale of a render: intensity = max(camera-space normal z, 0)
// replicated to RGB; background black.
Image3 render_shaded(const RenderBuffers& buffers);

}  // namespace hallufix
