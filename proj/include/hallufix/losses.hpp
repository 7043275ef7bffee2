#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "hallufix/image.hpp"
#include "hallufix/render.hpp"

namespace hallufix {

struct SsimConfig {
  int window = 11;
  double gaussian_sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
  double dynamic_range = 1.0;
};

struct LossReport {
  double total = 0.0;
  std::map<std::string, double> terms;
  std::vector<std::map<std::string, double>> per_view;  // optional breakdown
};

// Sum over views of the mean-per-pixel squared mask difference.
// Gradient w.r.t. each rendered mask: 2*(rendered - ref)/pixel_count.
std::pair<double, std::vector<ImageF>> mask_loss(const std::vector<ImageF>& ref_masks,
                                                 const std::vector<ImageF>& rendered_masks);

// Sum over views of the mean squared normal difference over pixels valid in
// both ref and rendered; background excluded.
std::pair<double, std::vector<Image3>> normal_loss(const std::vector<Image3>& ref_normals,
                                                   const std::vector<Image3>& rendered_normals,
                                                   const std::vector<ImageF>& valid);

// Per-view per-vertex reference normals (world space) with availability flags.
struct SeRefs {
  std::vector<std::vector<Vec3>> normals;          // [view][vertex]
  std::vector<std::vector<std::uint8_t>> has_ref;  // [view][vertex]
};

struct SeResult {
  double value = 0.0;
  std::vector<Vec3> normal_grads;          // d(loss)/d(current vertex normals)
  std::vector<std::array<double, 4>> weights;  // per-vertex view weights (rows sum to 1)
  std::vector<std::uint8_t> contributes;   // vertex visible with a reference in >= 1 view
};

// Surface-exposure weighted normal loss: per vertex, views are weighted by
// visibility * projected area, normalized to sum 1 across views.
SeResult se_loss(const std::vector<Vec3>& current_normals, const SeRefs& refs,
                 const std::vector<VertexViewStats>& stats);

// Gaussian-windowed mean SSIM over windows centered on valid pixels; window
// contents use all in-bounds pixels with border-renormalized weights.
// Gradients w.r.t. both images are optional outputs.
double ssim(const ImageF& a, const ImageF& b, const SsimConfig& cfg, const ImageF& valid,
            ImageF* grad_a = nullptr, ImageF* grad_b = nullptr);

// Cosine similarity of the flattened raw values over valid pixels.
double cosine_similarity(const ImageF& a, const ImageF& b, const ImageF& valid,
                         ImageF* grad_a = nullptr, ImageF* grad_b = nullptr);

struct DcResult {
  double total = 0.0;
  std::vector<double> pair_terms;   // one per cyclic pair (i, i+1 mod V)
  std::vector<ImageF> depth_grads;  // one per view
};

// Cyclic depth consistency: sum_i (1 - SSIM(D_i,D_j)*CS(D_i,D_j)) with
// j = i+1 mod V. Each pair is evaluated over the union of the two coverage
// masks; background pixels keep the far sentinel. The SSIM dynamic range is
// the per-pair max-min of depths over that union (floor 1e-6) and is held
// constant during differentiation, like the rest of the frozen coverage.
DcResult dc_loss(const std::vector<RenderBuffers>& ring_buffers, const SsimConfig& cfg);

// Edge-aware depth smoothness: sum over valid pixels (forward-difference
// stencil fully valid) of |grad D| * exp(-||grad I||). The color weight is a
// constant w.r.t. optimization.
std::pair<double, ImageF> ds_loss(const ImageF& depth, const Image3& color, const ImageF& valid);

// Aggregates only; gradient assembly lives with the optimization driver.
LossReport coarse_loss(const std::vector<ImageF>& ref_masks,
                       const std::vector<Image3>& ref_normals,
                       const std::vector<ImageF>& rendered_masks,
                       const std::vector<Image3>& rendered_normals,
                       const std::vector<ImageF>& valid, const std::vector<Vec3>& current_normals,
                       const SeRefs& se_refs, const std::vector<VertexViewStats>& stats);

LossReport cvcr_loss(const std::vector<ImageF>& ref_masks,
                     const std::vector<Image3>& ref_normals,
                     const std::vector<ImageF>& rendered_masks,
                     const std::vector<Image3>& rendered_normals,
                     const std::vector<ImageF>& valid,
                     const std::vector<RenderBuffers>& ring_buffers, double lambda1,
                     double lambda2, const SsimConfig& cfg);

}  // namespace hallufix
