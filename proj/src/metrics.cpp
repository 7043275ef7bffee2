#include "hallufix/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "hallufix/errors.hpp"
#include "hallufix/kdtree.hpp"
#include "hallufix/losses.hpp"
#include "hallufix/parallel.hpp"
#include "hallufix/render.hpp"

namespace hallufix {

namespace {

// Mean nearest-neighbor distance from each point of `from` to `to`; sums in
// point-index order so the result matches a brute-force scan bit for bit.
double mean_nn(const PointCloud& from, const PointCloud& to, bool squared) {
  KdTree3 tree(to.points);
  double acc = 0.0;
  for (const Vec3& p : from.points) {
    double d2 = tree.nearest(p).dist2;
    acc += squared ? d2 : std::sqrt(d2);
  }
  return acc / static_cast<double>(from.points.size());
}

}  // namespace

double chamfer(const PointCloud& a, const PointCloud& b, bool squared) {
  if (a.points.empty() || b.points.empty()) throw EmptyCloud("chamfer: empty point cloud");
  return 0.5 * (mean_nn(a, b, squared) + mean_nn(b, a, squared));
}

double fscore(const PointCloud& a, const PointCloud& b, double tau) {
  if (a.points.empty() || b.points.empty()) throw EmptyCloud("fscore: empty point cloud");
  if (!(tau > 0.0)) throw ShapeMismatch("fscore: tau must be > 0");
  const double tau2 = tau * tau;
  auto fraction_within = [&](const PointCloud& from, const PointCloud& to) {
    KdTree3 tree(to.points);
    std::size_t hits = 0;
    for (const Vec3& p : from.points)
      if (tree.nearest(p).dist2 <= tau2) ++hits;
    return static_cast<double>(hits) / static_cast<double>(from.points.size());
  };
  double precision = fraction_within(a, b);
  double recall = fraction_within(b, a);
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

double psnr(const ImageF& a, const ImageF& b, double peak) {
  require_same_shape(a, b, "psnr");
  if (!(peak > 0.0)) throw ShapeMismatch("psnr: peak must be > 0");
  double mse = 0.0;
  for (std::size_t p = 0; p < a.size(); ++p) {
    double d = a[p] - b[p];
    mse += d * d;
  }
  mse /= static_cast<double>(a.size());
  if (mse == 0.0) return 99.0;
  return std::min(99.0, 10.0 * std::log10(peak * peak / mse));
}

EvalReport eval_pair(const TriangleMesh& gt_mesh, const TriangleMesh& test_mesh,
                     const EvalConfig& cfg) {
  EvalReport report;
  PointCloud pa = sample_surface(gt_mesh, cfg.sample_count, cfg.seed);
  PointCloud pb = sample_surface(test_mesh, cfg.sample_count, cfg.seed);
  report.geom.chamfer = chamfer(pa, pb, cfg.squared_chamfer);
  report.geom.fscore = fscore(pa, pb, cfg.tau);
  report.geom.tau = cfg.tau;
  report.geom.sample_count = cfg.sample_count;
  report.geom.seed = cfg.seed;

  // 24 appearance views: elevations {0,15,30} x 8 azimuths.
  std::vector<ViewSpec> views;
  for (double el : {0.0, 15.0, 30.0}) {
    for (int i = 0; i < 8; ++i) {
      ViewSpec v;
      v.azimuth_deg = 45.0 * i;
      v.elevation_deg = el;
      v.resolution_assign:;
      v.width = cfg.resolution;
      v.height = cfg.resolution;
      v.ortho_half_extent = cfg.ortho_half_extent;
      views.push_back(v);
    }
  }

  std::vector<double> psnrs(views.size(), 0.0), ssims(views.size(), 0.0);
  std::vector<char> usable(views.size(), 0);
  parallel_for(static_cast<int>(views.size()), [&](int vi) {
    RenderBuffers ra = rasterize(gt_mesh, views[vi]);
    RenderBuffers rb = rasterize(test_mesh, views[vi]);
    Image3 sa = render_shaded(ra);
    Image3 sb = render_shaded(rb);
    ImageF ga(sa.width(), sa.height()), gb(sb.width(), sb.height());
    ImageF inter(sa.width(), sa.height(), 0.0);
    std::size_t count = 0;
    for (std::size_t p = 0; p < sa.size(); ++p) {
      ga[p] = sa[p].x();
      gb[p] = sb[p].x();
      if (ra.mask[p] > 0.5 && rb.mask[p] > 0.5) {
        inter[p] = 1.0;
        ++count;
      }
    }
    if (count == 0) return;  // disjoint silhouettes: view skipped
    double mse = 0.0;
    for (std::size_t p = 0; p < inter.size(); ++p) {
      if (inter[p] <= 0.5) continue;
      double d = ga[p] - gb[p];
      mse += d * d;
    }
    mse /= static_cast<double>(count);
    psnrs[vi] = mse == 0.0 ? 99.0 : std::min(99.0, 10.0 * std::log10(1.0 / mse));
    SsimConfig scfg;
    scfg.dynamic_range = 1.0;
    ssims[vi] = ssim(ga, gb, scfg, inter);
    usable[vi] = 1;
  });

  int used = 0;
  double psum = 0.0, ssum = 0.0;
  for (std::size_t vi = 0; vi < views.size(); ++vi) {
    if (!usable[vi]) continue;
    ++used;
    psum += psnrs[vi];
    ssum += ssims[vi];
  }
  report.view_count = used;
  report.psnr_mean = used > 0 ? psum / used : 0.0;
  report.ssim_mean = used > 0 ? ssum / used : 0.0;
  return report;
}

}  // namespace hallufix
