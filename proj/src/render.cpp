#include "hallufix/render.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "hallufix/errors.hpp"

namespace hallufix {

namespace {

constexpr double kDegToRad = M_PI / 180.0;

double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

Eigen::Vector2d perp(const Eigen::Vector2d& u) { return {-u.y(), u.x()}; }

double cross2(const Eigen::Vector2d& u, const Eigen::Vector2d& v) {
  return u.x() * v.y() - u.y() * v.x();
}

// Barycentric coordinates of p in the 2D triangle (a,b,c) and their
// derivatives with respect to the triangle vertices.
struct BaryDiff {
  double w[3];
  Eigen::Vector2d dw[3][3];  // dw[j][v] = d w_j / d vertex_v
  bool ok = false;
};

BaryDiff bary_diff(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c,
                   const Eigen::Vector2d& p) {
  BaryDiff out;
  double area2 = cross2(b - a, c - a);
  if (std::abs(area2) < 1e-30) return out;
  double n0 = cross2(b - p, c - p);
  double n1 = cross2(c - p, a - p);
  double n2 = cross2(a - p, b - p);
  out.w[0] = n0 / area2;
  out.w[1] = n1 / area2;
  out.w[2] = n2 / area2;

  Eigen::Vector2d dn[3][3];
  dn[0][0] = Eigen::Vector2d::Zero();
  dn[0][1] = -perp(c - p);
  dn[0][2] = perp(b - p);
  dn[1][0] = perp(c - p);
  dn[1][1] = Eigen::Vector2d::Zero();
  dn[1][2] = -perp(a - p);
  dn[2][0] = -perp(b - p);
  dn[2][1] = perp(a - p);
  dn[2][2] = Eigen::Vector2d::Zero();
  Eigen::Vector2d dA[3] = {perp(c - b), -perp(c - a), perp(b - a)};
  for (int j = 0; j < 3; ++j)
    for (int v = 0; v < 3; ++v) out.dw[j][v] = (dn[j][v] - out.w[j] * dA[v]) / area2;
  out.ok = true;
  return out;
}

}  // namespace

Camera Camera::from_view(const ViewSpec& view) {
  if (view.width < 8 || view.height < 8) throw ShapeMismatch("view resolution must be >= 8");
  if (!(view.near_plane < view.far_plane)) throw ShapeMismatch("near must be < far");
  if (!(view.ortho_half_extent > 0.0)) throw ShapeMismatch("ortho_half_extent must be > 0");
  double az = view.azimuth_deg * kDegToRad;
  double el = view.elevation_deg * kDegToRad;
  Camera cam;
  cam.toward = Vec3(std::cos(el) * std::sin(az), std::sin(el), std::cos(el) * std::cos(az));
  Vec3 up_world(0, 1, 0);
  Vec3 r = up_world.cross(cam.toward);
  if (r.norm() < 1e-9) r = Vec3(1, 0, 0);  // looking straight up/down
  cam.right = r.normalized();
  cam.up = cam.toward.cross(cam.right);
  cam.plane_dist = 0.5 * (view.near_plane + view.far_plane);
  cam.extent = view.ortho_half_extent;
  cam.width = view.width;
  cam.height = view.height;
  cam.near_plane = view.near_plane;
  cam.far_plane = view.far_plane;
  return cam;
}

Eigen::Vector2d Camera::to_pixels(const Vec3& p) const {
  Eigen::Vector2d s = plane_coords(p);
  return {(s.x() / extent + 1.0) * 0.5 * width, (1.0 - s.y() / extent) * 0.5 * height};
}

ViewRing make_ring(int count, double elevation_deg, const ViewSpec& tmpl) {
  if (count != 24 && count != 36 && count != 72 && count != 120)
    throw UnsupportedCount("ring count must be one of 24, 36, 72, 120");
  ViewRing ring;
  ring.angular_step = 360.0 / count;
  ring.views.reserve(count);
  for (int i = 0; i < count; ++i) {
    ViewSpec v = tmpl;
    v.azimuth_deg = ring.angular_step * i;
    v.elevation_deg = elevation_deg;
    ring.views.push_back(v);
  }
  return ring;
}

RenderBuffers rasterize(const TriangleMesh& mesh, const ViewSpec& view) {
  Camera cam = Camera::from_view(view);
  const int W = cam.width, H = cam.height;

  RenderBuffers buf;
  buf.depth = ImageF(W, H, cam.far_plane);
  buf.normal = Image3(W, H, Vec3::Zero());
  buf.mask = ImageF(W, H, 0.0);
  buf.face_id = ImageI(W, H, -1);
  buf.bary = Image3(W, H, Vec3::Zero());

  const int nv = mesh.vertex_count();
  std::vector<Eigen::Vector2d> plane(nv);
  std::vector<double> depth(nv);
  for (int i = 0; i < nv; ++i) {
    plane[i] = cam.plane_coords(mesh.vertices[i]);
    depth[i] = cam.depth_of(mesh.vertices[i]);
    if (depth[i] < cam.near_plane || depth[i] > cam.far_plane ||
        std::abs(plane[i].x()) > cam.extent || std::abs(plane[i].y()) > cam.extent)
      buf.clipped = true;
  }

  std::vector<Vec3> world_normals = vertex_normals(mesh);
  std::vector<Vec3> cam_normals(nv);
  for (int i = 0; i < nv; ++i) cam_normals[i] = cam.to_camera_dir(world_normals[i]);

  auto px_x = [&](double sx) { return (sx / cam.extent + 1.0) * 0.5 * W; };
  auto px_y = [&](double sy) { return (1.0 - sy / cam.extent) * 0.5 * H; };

  for (int f = 0; f < mesh.face_count(); ++f) {
    const auto& fv = mesh.faces[f];
    const Eigen::Vector2d& a = plane[fv[0]];
    const Eigen::Vector2d& b = plane[fv[1]];
    const Eigen::Vector2d& c = plane[fv[2]];
    double area2 = cross2(b - a, c - a);
    if (area2 <= 0.0) continue;  // backfacing or degenerate in projection

    double xmin = std::min({a.x(), b.x(), c.x()});
    double xmax = std::max({a.x(), b.x(), c.x()});
    double ymin = std::min({a.y(), b.y(), c.y()});
    double ymax = std::max({a.y(), b.y(), c.y()});
    int ix0 = std::max(0, static_cast<int>(std::floor(px_x(xmin) - 0.5)));
    int ix1 = std::min(W - 1, static_cast<int>(std::ceil(px_x(xmax) - 0.5)));
    // pixel y decreases as sy grows
    int iy0 = std::max(0, static_cast<int>(std::floor(px_y(ymax) - 0.5)));
    int iy1 = std::min(H - 1, static_cast<int>(std::ceil(px_y(ymin) - 0.5)));

    for (int iy = iy0; iy <= iy1; ++iy) {
      double sy = (1.0 - (iy + 0.5) * 2.0 / H) * cam.extent;
      for (int ix = ix0; ix <= ix1; ++ix) {
        double sx = ((ix + 0.5) * 2.0 / W - 1.0) * cam.extent;
        Eigen::Vector2d p(sx, sy);
        double n0 = cross2(b - p, c - p);
        double n1 = cross2(c - p, a - p);
        double n2 = cross2(a - p, b - p);
        if (n0 < 0.0 || n1 < 0.0 || n2 < 0.0) continue;
        double w0 = n0 / area2, w1 = n1 / area2, w2 = n2 / area2;
        double d = w0 * depth[fv[0]] + w1 * depth[fv[1]] + w2 * depth[fv[2]];
        if (d >= buf.depth.at(ix, iy)) continue;  // ties keep the earlier (lower) face
        buf.depth.at(ix, iy) = d;
        buf.face_id.at(ix, iy) = f;
        buf.mask.at(ix, iy) = 1.0;
        buf.bary.at(ix, iy) = Vec3(w0, w1, w2);
        Vec3 m = w0 * cam_normals[fv[0]] + w1 * cam_normals[fv[1]] + w2 * cam_normals[fv[2]];
        double len = m.norm();
        if (len < 1e-12) {
          Vec3 gn = cam.to_camera_dir(face_normal_scaled(mesh, f));
          double gl = gn.norm();
          m = gl < 1e-30 ? Vec3(0, 0, 1) : Vec3(gn / gl);
          buf.normal.at(ix, iy) = m;
        } else {
          buf.normal.at(ix, iy) = m / len;
        }
      }
    }
  }
  return buf;
}

VertexViewStats vertex_view_stats(const TriangleMesh& mesh, const ViewSpec& view,
                                  const RenderBuffers& buffers) {
  Camera cam = Camera::from_view(view);
  std::vector<std::uint8_t> face_seen(mesh.face_count(), 0);
  for (std::size_t i = 0; i < buffers.face_id.size(); ++i) {
    int f = buffers.face_id[i];
    if (f >= 0) face_seen[f] = 1;
  }
  VertexViewStats stats;
  stats.visible.assign(mesh.vertex_count(), 0);
  stats.projected_area.assign(mesh.vertex_count(), 0.0);
  for (int f = 0; f < mesh.face_count(); ++f) {
    if (!face_seen[f]) continue;
    const auto& fv = mesh.faces[f];
    Eigen::Vector2d a = cam.plane_coords(mesh.vertices[fv[0]]);
    Eigen::Vector2d b = cam.plane_coords(mesh.vertices[fv[1]]);
    Eigen::Vector2d c = cam.plane_coords(mesh.vertices[fv[2]]);
    double signed_area = 0.5 * cross2(b - a, c - a);
    double area = std::max(signed_area, 0.0);  // backfacing clamps to zero
    for (int k = 0; k < 3; ++k) {
      stats.visible[fv[k]] = 1;
      stats.projected_area[fv[k]] += area;
    }
  }
  return stats;
}

// ---------------------------------------------------------------------------
// Soft silhouette mask

namespace {

// Silhouette edges in pixel coordinates: mesh edges where front-facing
// coverage flips (front/back pairs and front-facing boundary edges). Fold
// edges that project inside the silhouette are included as well; they only
// soften the mask locally and keep the support record well defined.
struct SilhouetteEdges {
  std::vector<int> v0, v1;
  std::vector<Eigen::Vector2d> p0, p1;
};

SilhouetteEdges silhouette_edges(const TriangleMesh& mesh, const Camera& cam,
                                 const std::vector<Eigen::Vector2d>& plane) {
  std::map<std::pair<int, int>, std::pair<int, int>> edges;  // (front count, total count)
  for (int f = 0; f < mesh.face_count(); ++f) {
    const auto& fv = mesh.faces[f];
    double area2 = cross2(plane[fv[1]] - plane[fv[0]], plane[fv[2]] - plane[fv[0]]);
    bool front = area2 > 0.0;
    for (int k = 0; k < 3; ++k) {
      auto key = std::minmax(fv[k], fv[(k + 1) % 3]);
      auto& e = edges[key];
      e.first += front ? 1 : 0;
      e.second += 1;
    }
  }
  SilhouetteEdges out;
  for (const auto& [key, counts] : edges) {
    if (counts.first >= 1 && counts.first < counts.second) {
      out.v0.push_back(key.first);
      out.v1.push_back(key.second);
    } else if (counts.first == 1 && counts.second == 1) {
      out.v0.push_back(key.first);
      out.v1.push_back(key.second);
    }
  }
  auto to_px = [&](int v) {
    Eigen::Vector2d s = plane[v];
    return Eigen::Vector2d((s.x() / cam.extent + 1.0) * 0.5 * cam.width,
                           (1.0 - s.y() / cam.extent) * 0.5 * cam.height);
  };
  out.p0.reserve(out.v0.size());
  out.p1.reserve(out.v1.size());
  for (std::size_t i = 0; i < out.v0.size(); ++i) {
    out.p0.push_back(to_px(out.v0[i]));
    out.p1.push_back(to_px(out.v1[i]));
  }
  return out;
}

// Coverage of pixel centers by any front-facing projected triangle.
std::vector<std::uint8_t> coverage_bitmap(const TriangleMesh& mesh, const Camera& cam,
                                          const std::vector<Eigen::Vector2d>& plane) {
  const int W = cam.width, H = cam.height;
  std::vector<std::uint8_t> inside(static_cast<std::size_t>(W) * H, 0);
  auto px_x = [&](double sx) { return (sx / cam.extent + 1.0) * 0.5 * W; };
  auto px_y = [&](double sy) { return (1.0 - sy / cam.extent) * 0.5 * H; };
  for (int f = 0; f < mesh.face_count(); ++f) {
    const auto& fv = mesh.faces[f];
    const Eigen::Vector2d& a = plane[fv[0]];
    const Eigen::Vector2d& b = plane[fv[1]];
    const Eigen::Vector2d& c = plane[fv[2]];
    double area2 = cross2(b - a, c - a);
    if (area2 <= 0.0) continue;
    double xmin = std::min({a.x(), b.x(), c.x()});
    double xmax = std::max({a.x(), b.x(), c.x()});
    double ymin = std::min({a.y(), b.y(), c.y()});
    double ymax = std::max({a.y(), b.y(), c.y()});
    int ix0 = std::max(0, static_cast<int>(std::floor(px_x(xmin) - 0.5)));
    int ix1 = std::min(W - 1, static_cast<int>(std::ceil(px_x(xmax) - 0.5)));
    int iy0 = std::max(0, static_cast<int>(std::floor(px_y(ymax) - 0.5)));
    int iy1 = std::min(H - 1, static_cast<int>(std::ceil(px_y(ymin) - 0.5)));
    for (int iy = iy0; iy <= iy1; ++iy) {
      double sy = (1.0 - (iy + 0.5) * 2.0 / H) * cam.extent;
      for (int ix = ix0; ix <= ix1; ++ix) {
        if (inside[static_cast<std::size_t>(iy) * W + ix]) continue;
        double sx = ((ix + 0.5) * 2.0 / W - 1.0) * cam.extent;
        Eigen::Vector2d p(sx, sy);
        if (cross2(b - p, c - p) >= 0.0 && cross2(c - p, a - p) >= 0.0 &&
            cross2(a - p, b - p) >= 0.0)
          inside[static_cast<std::size_t>(iy) * W + ix] = 1;
      }
    }
  }
  return inside;
}

}  // namespace

SoftMask soft_mask(const TriangleMesh& mesh, const ViewSpec& view, double sigma_px) {
  if (!(sigma_px > 0.0)) throw ShapeMismatch("soft_mask sigma must be > 0");
  Camera cam = Camera::from_view(view);
  const int W = cam.width, H = cam.height;

  std::vector<Eigen::Vector2d> plane(mesh.vertex_count());
  for (int i = 0; i < mesh.vertex_count(); ++i) plane[i] = cam.plane_coords(mesh.vertices[i]);

  SoftMask sm;
  sm.sigma_px = sigma_px;
  sm.value = ImageF(W, H, 0.0);
  sm.support.assign(static_cast<std::size_t>(W) * H, SoftMask::Support{});

  SilhouetteEdges edges = silhouette_edges(mesh, cam, plane);
  if (edges.v0.empty()) return sm;  // nothing front-facing: hard zero mask

  std::vector<std::uint8_t> inside = coverage_bitmap(mesh, cam, plane);

  for (int iy = 0; iy < H; ++iy) {
    for (int ix = 0; ix < W; ++ix) {
      Eigen::Vector2d q(ix + 0.5, iy + 0.5);
      double best_d2 = std::numeric_limits<double>::infinity();
      int best = -1;
      double best_t = 0.0;
      for (std::size_t e = 0; e < edges.v0.size(); ++e) {
        Eigen::Vector2d ab = edges.p1[e] - edges.p0[e];
        double len2 = ab.squaredNorm();
        double t = len2 > 0.0 ? std::clamp((q - edges.p0[e]).dot(ab) / len2, 0.0, 1.0) : 0.0;
        double d2 = (q - (edges.p0[e] + t * ab)).squaredNorm();
        if (d2 < best_d2) {
          best_d2 = d2;
          best = static_cast<int>(e);
          best_t = t;
        }
      }
      std::size_t pi = static_cast<std::size_t>(iy) * W + ix;
      SoftMask::Support& sup = sm.support[pi];
      sup.v0 = edges.v0[best];
      sup.v1 = edges.v1[best];
      sup.t = static_cast<float>(best_t);
      sup.sign = inside[pi] ? 1 : -1;
      sm.value[pi] = logistic(sup.sign * std::sqrt(best_d2) / sigma_px);
    }
  }
  return sm;
}

std::vector<Vec3> soft_mask_backward(const TriangleMesh& mesh, const ViewSpec& view,
                                     const SoftMask& sm, const ImageF& pixel_grad) {
  Camera cam = Camera::from_view(view);
  const int W = cam.width, H = cam.height;
  if (pixel_grad.width() != W || pixel_grad.height() != H)
    throw ShapeMismatch("soft_mask_backward: pixel_grad shape");

  const double sx_scale = 0.5 * W / cam.extent;
  const double sy_scale = 0.5 * H / cam.extent;
  std::vector<Vec3> grads(mesh.vertex_count(), Vec3::Zero());

  for (int iy = 0; iy < H; ++iy) {
    for (int ix = 0; ix < W; ++ix) {
      std::size_t pi = static_cast<std::size_t>(iy) * W + ix;
      double g = pixel_grad[pi];
      const SoftMask::Support& sup = sm.support[pi];
      if (g == 0.0 || sup.v0 < 0) continue;

      Eigen::Vector2d A = cam.to_pixels(mesh.vertices[sup.v0]);
      Eigen::Vector2d B = cam.to_pixels(mesh.vertices[sup.v1]);
      Eigen::Vector2d q(ix + 0.5, iy + 0.5);
      Eigen::Vector2d ab = B - A;
      double len2 = ab.squaredNorm();
      double t = len2 > 0.0 ? std::clamp((q - A).dot(ab) / len2, 0.0, 1.0) : 0.0;
      Eigen::Vector2d u = q - (A + t * ab);
      double d = u.norm();
      if (d < 1e-12) continue;

      double v = sm.value[pi];
      double dv_dd = v * (1.0 - v) * sup.sign / sm.sigma_px;
      // envelope: t solves the projection, so dd/dA = -(1-t) u/d, dd/dB = -t u/d
      Eigen::Vector2d dd_dA = -(1.0 - t) * u / d;
      Eigen::Vector2d dd_dB = -t * u / d;
      auto to_world = [&](const Eigen::Vector2d& gpix) {
        return Vec3(gpix.x() * sx_scale * cam.right - gpix.y() * sy_scale * cam.up);
      };
      grads[sup.v0] += g * dv_dd * to_world(dd_dA);
      grads[sup.v1] += g * dv_dd * to_world(dd_dB);
    }
  }
  return grads;
}

ImageF soft_mask_under_frozen_support(const TriangleMesh& mesh, const ViewSpec& view,
                                      const SoftMask& sm) {
  Camera cam = Camera::from_view(view);
  const int W = cam.width, H = cam.height;
  ImageF out(W, H, 0.0);
  for (int iy = 0; iy < H; ++iy) {
    for (int ix = 0; ix < W; ++ix) {
      std::size_t pi = static_cast<std::size_t>(iy) * W + ix;
      const SoftMask::Support& sup = sm.support[pi];
      if (sup.v0 < 0) continue;
      Eigen::Vector2d A = cam.to_pixels(mesh.vertices[sup.v0]);
      Eigen::Vector2d B = cam.to_pixels(mesh.vertices[sup.v1]);
      Eigen::Vector2d q(ix + 0.5, iy + 0.5);
      Eigen::Vector2d ab = B - A;
      double len2 = ab.squaredNorm();
      double t = len2 > 0.0 ? std::clamp((q - A).dot(ab) / len2, 0.0, 1.0) : 0.0;
      double d = (q - (A + t * ab)).norm();
      out[pi] = logistic(sup.sign * d / sm.sigma_px);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Frozen-coverage gradient backprojection

std::vector<Vec3> backproject_depth_gradients(const TriangleMesh& mesh, const ViewSpec& view,
                                              const RenderBuffers& buffers,
                                              const ImageF& pixel_grad) {
  Camera cam = Camera::from_view(view);
  const int W = cam.width, H = cam.height;
  if (pixel_grad.width() != W || pixel_grad.height() != H)
    throw ShapeMismatch("backproject_depth_gradients: pixel_grad shape");

  std::vector<Vec3> grads(mesh.vertex_count(), Vec3::Zero());
  for (int iy = 0; iy < H; ++iy) {
    for (int ix = 0; ix < W; ++ix) {
      double g = pixel_grad.at(ix, iy);
      int f = buffers.face_id.at(ix, iy);
      if (g == 0.0) continue;
      if (f < 0) throw ShapeMismatch("pixel_grad must be zero on background pixels");

      const auto& fv = mesh.faces[f];
      Eigen::Vector2d a = cam.plane_coords(mesh.vertices[fv[0]]);
      Eigen::Vector2d b = cam.plane_coords(mesh.vertices[fv[1]]);
      Eigen::Vector2d c = cam.plane_coords(mesh.vertices[fv[2]]);
      double sy = (1.0 - (iy + 0.5) * 2.0 / H) * cam.extent;
      double sx = ((ix + 0.5) * 2.0 / W - 1.0) * cam.extent;
      BaryDiff bd = bary_diff(a, b, c, {sx, sy});
      if (!bd.ok) continue;

      double dvert[3] = {cam.depth_of(mesh.vertices[fv[0]]), cam.depth_of(mesh.vertices[fv[1]]),
                         cam.depth_of(mesh.vertices[fv[2]])};
      for (int v = 0; v < 3; ++v) {
        // d depth / d vertex depth, along the view axis
        grads[fv[v]] += g * bd.w[v] * (-cam.toward);
        // in-plane term through the barycentrics
        Eigen::Vector2d gp = Eigen::Vector2d::Zero();
        for (int j = 0; j < 3; ++j) gp += dvert[j] * bd.dw[j][v];
        grads[fv[v]] += g * (gp.x() * cam.right + gp.y() * cam.up);
      }
    }
  }
  return grads;
}

std::vector<Vec3> backproject_normal_gradients(const TriangleMesh& mesh, const ViewSpec& view,
                                               const RenderBuffers& buffers,
                                               const Image3& pixel_grad) {
  Camera cam = Camera::from_view(view);
  const int W = cam.width, H = cam.height;
  if (pixel_grad.width() != W || pixel_grad.height() != H)
    throw ShapeMismatch("backproject_normal_gradients: pixel_grad shape");

  std::vector<Vec3> world_normals = vertex_normals(mesh);
  std::vector<Vec3> cam_normals(mesh.vertex_count());
  for (int i = 0; i < mesh.vertex_count(); ++i)
    cam_normals[i] = cam.to_camera_dir(world_normals[i]);

  std::vector<Vec3> grads(mesh.vertex_count(), Vec3::Zero());
  std::vector<Vec3> g_cam_normal(mesh.vertex_count(), Vec3::Zero());

  for (int iy = 0; iy < H; ++iy) {
    for (int ix = 0; ix < W; ++ix) {
      const Vec3& G = pixel_grad.at(ix, iy);
      int f = buffers.face_id.at(ix, iy);
      if (G.isZero(0.0)) continue;
      if (f < 0) throw ShapeMismatch("pixel_grad must be zero on background pixels");

      const auto& fv = mesh.faces[f];
      Eigen::Vector2d a = cam.plane_coords(mesh.vertices[fv[0]]);
      Eigen::Vector2d b = cam.plane_coords(mesh.vertices[fv[1]]);
      Eigen::Vector2d c = cam.plane_coords(mesh.vertices[fv[2]]);
      double sy = (1.0 - (iy + 0.5) * 2.0 / H) * cam.extent;
      double sx = ((ix + 0.5) * 2.0 / W - 1.0) * cam.extent;
      BaryDiff bd = bary_diff(a, b, c, {sx, sy});
      if (!bd.ok) continue;

      Vec3 m = bd.w[0] * cam_normals[fv[0]] + bd.w[1] * cam_normals[fv[1]] +
               bd.w[2] * cam_normals[fv[2]];
      double len = m.norm();
      if (len < 1e-12) continue;
      Vec3 n = m / len;
      Vec3 g_m = (G - n * n.dot(G)) / len;

      for (int v = 0; v < 3; ++v) {
        g_cam_normal[fv[v]] += bd.w[v] * g_m;
        double gw = 0.0;
        Eigen::Vector2d gp = Eigen::Vector2d::Zero();
        for (int j = 0; j < 3; ++j) {
          gw = g_m.dot(cam_normals[fv[j]]);
          gp += gw * bd.dw[j][v];
        }
        grads[fv[v]] += gp.x() * cam.right + gp.y() * cam.up;
      }
    }
  }

  std::vector<Vec3> g_world_normal(mesh.vertex_count());
  for (int i = 0; i < mesh.vertex_count(); ++i)
    g_world_normal[i] = cam.to_world_dir(g_cam_normal[i]);
  std::vector<Vec3> through_normals = vertex_normals_backward(mesh, g_world_normal);
  for (int i = 0; i < mesh.vertex_count(); ++i) grads[i] += through_normals[i];
  return grads;
}

ImageF depth_under_frozen_coverage(const TriangleMesh& mesh, const ViewSpec& view,
                                   const RenderBuffers& buffers) {
  Camera cam = Camera::from_view(view);
  const int W = cam.width, H = cam.height;
  ImageF out(W, H, cam.far_plane);
  for (int iy = 0; iy < H; ++iy) {
    for (int ix = 0; ix < W; ++ix) {
      int f = buffers.face_id.at(ix, iy);
      if (f < 0) continue;
      const auto& fv = mesh.faces[f];
      Eigen::Vector2d a = cam.plane_coords(mesh.vertices[fv[0]]);
      Eigen::Vector2d b = cam.plane_coords(mesh.vertices[fv[1]]);
      Eigen::Vector2d c = cam.plane_coords(mesh.vertices[fv[2]]);
      double sy = (1.0 - (iy + 0.5) * 2.0 / H) * cam.extent;
      double sx = ((ix + 0.5) * 2.0 / W - 1.0) * cam.extent;
      BaryDiff bd = bary_diff(a, b, c, {sx, sy});
      if (!bd.ok) {
        out.at(ix, iy) = buffers.depth.at(ix, iy);
        continue;
      }
      out.at(ix, iy) = bd.w[0] * cam.depth_of(mesh.vertices[fv[0]]) +
                       bd.w[1] * cam.depth_of(mesh.vertices[fv[1]]) +
                       bd.w[2] * cam.depth_of(mesh.vertices[fv[2]]);
    }
  }
  return out;
}

Image3 normals_under_frozen_coverage(const TriangleMesh& mesh, const ViewSpec& view,
                                     const RenderBuffers& buffers) {
  Camera cam = Camera::from_view(view);
  const int W = cam.width, H = cam.height;
  std::vector<Vec3> world_normals = vertex_normals(mesh);
  std::vector<Vec3> cam_normals(mesh.vertex_count());
  for (int i = 0; i < mesh.vertex_count(); ++i)
    cam_normals[i] = cam.to_camera_dir(world_normals[i]);

  Image3 out(W, H, Vec3::Zero());
  for (int iy = 0; iy < H; ++iy) {
    for (int ix = 0; ix < W; ++ix) {
      int f = buffers.face_id.at(ix, iy);
      if (f < 0) continue;
      const auto& fv = mesh.faces[f];
      Eigen::Vector2d a = cam.plane_coords(mesh.vertices[fv[0]]);
      Eigen::Vector2d b = cam.plane_coords(mesh.vertices[fv[1]]);
      Eigen::Vector2d c = cam.plane_coords(mesh.vertices[fv[2]]);
      double sy = (1.0 - (iy + 0.5) * 2.0 / H) * cam.extent;
      double sx = ((ix + 0.5) * 2.0 / W - 1.0) * cam.extent;
      BaryDiff bd = bary_diff(a, b, c, {sx, sy});
      if (!bd.ok) {
        out.at(ix, iy) = buffers.normal.at(ix, iy);
        continue;
      }
      Vec3 m = bd.w[0] * cam_normals[fv[0]] + bd.w[1] * cam_normals[fv[1]] +
               bd.w[2] * cam_normals[fv[2]];
      double len = m.norm();
      out.at(ix, iy) = len < 1e-12 ? buffers.normal.at(ix, iy) : Vec3(m / len);
    }
  }
  return out;
}

Image3 render_shaded(const RenderBuffers& buffers) {
  Image3 out(buffers.normal.width(), buffers.normal.height(), Vec3::Zero());
  for (std::size_t i = 0; i < buffers.normal.size(); ++i) {
    if (buffers.face_id[i] < 0) continue;
    double g = std::clamp(buffers.normal[i].z(), 0.0, 1.0);
    out[i] = Vec3(g, g, g);
  }
  return out;
}

}  // namespace hallufix
