#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "hallufix/losses.hpp"
#include "hallufix/mesh.hpp"
#include "hallufix/render.hpp"

namespace hallufix {

struct OptimConfig {
  int coarse_iters = 200;
  int cvcr_iters = 300;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  double lambda1 = 0.5;
  double lambda2 = 0.05;
  int ring_count = 72;
  double ring_elevation_deg = 0.0;
  double soft_sigma = 1.0;  // pixels
  int resolution = 64;
  double ortho_half_extent = 0.9;
  std::uint64_t seed = 0;

  void validate() const;
  ViewSpec view_template() const;
};

// References for the four orthographic views (azimuth 0/90/180/270 at
// elevation 0): coverage masks and camera-space normal images rendered from
// the ground-truth mesh.
struct ReferenceSet {
  std::vector<ViewSpec> views;
  std::vector<ImageF> masks;
  std::vector<Image3> normal_images;
};

ReferenceSet make_references(const TriangleMesh& gt_mesh, int resolution,
                             double ortho_half_extent = 0.9);

// Per-vertex reference normals for the current mesh: each vertex projects
// into each reference view and reads the normal image at the nearest covered
// pixel within 2 px (world space; no reference -> unavailable). Re-sampled
// every iteration together with the rest of the frozen coverage.
SeRefs sample_vertex_refs(const ReferenceSet& refs, const TriangleMesh& mesh);

struct IterRecord {
  int iteration = 0;
  std::string stage;
  double total = 0.0;
  std::map<std::string, double> terms;
};

struct StageResult {
  TriangleMesh mesh;
  std::vector<IterRecord> trace;
};

// First-order (Adam) updates on vertex positions; coverage, visibility and
// exposure weights are re-frozen every iteration before the gradient pass.
StageResult coarse_stage(const TriangleMesh& mesh, const ReferenceSet& refs,
                         const OptimConfig& cfg);
StageResult cvcr_stage(const TriangleMesh& mesh, const ReferenceSet& refs,
                       const OptimConfig& cfg);

// coarse_stage then cvcr_stage; traces concatenated and stage-tagged.
StageResult refine(const TriangleMesh& mesh, const ReferenceSet& refs, const OptimConfig& cfg);

// Central finite differences of an arbitrary loss functional per vertex
// coordinate. Test oracle; O(6 * vertex_count) loss evaluations.
std::vector<Vec3> finite_diff_oracle(const std::function<double(const TriangleMesh&)>& loss_fn,
                                     const TriangleMesh& mesh, double step);

}  // namespace hallufix
