#pragma once

#include <cstdint>

#include "hallufix/image.hpp"
#include "hallufix/mesh.hpp"

namespace hallufix {

struct GeomReport {
  double chamfer = 0.0;
  double fscore = 0.0;
  double tau = 0.05;
  int sample_count = 0;
  std::uint64_t seed = 0;
};

// Symmetric mean of L2 nearest-neighbor distances (non-squared by default;
// set `squared` for the squared-distance variant).
double chamfer(const PointCloud& a, const PointCloud& b, bool squared = false);

// Harmonic mean of precision/recall at distance threshold tau; 0 if P+R = 0.
double fscore(const PointCloud& a, const PointCloud& b, double tau);

// 10*log10(peak^2/MSE), capped at 99 dB for identical images.
double psnr(const ImageF& a, const ImageF& b, double peak);

struct EvalConfig {
  int sample_count = 16384;
  std::uint64_t seed = 0;
  double tau = 0.05;
  bool squared_chamfer = false;
  int resolution = 64;
  double ortho_half_extent = 0.9;
};

struct EvalReport {
  GeomReport geom;
  double psnr_mean = 0.0;
  double ssim_mean = 0.0;
  int view_count = 0;
};

// Samples both meshes with the same count/seed for CD and F-Score, then
// renders both from elevations {0,15,30} x 8 azimuths (24 views) and reports
// mean PSNR/SSIM of the shaded grayscale renders over mask-intersection
// regions.
EvalReport eval_pair(const TriangleMesh& gt_mesh, const TriangleMesh& test_mesh,
                     const EvalConfig& cfg);

}  // namespace hallufix
