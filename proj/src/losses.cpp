#include "hallufix/losses.hpp"

#include <algorithm>
#include <cmath>

#include "hallufix/errors.hpp"

namespace hallufix {

namespace {

// Separable convolution with a symmetric 1-d kernel, zero padding.
void sepconv(const ImageF& src, const std::vector<double>& kernel, ImageF& tmp, ImageF& dst) {
  const int W = src.width(), H = src.height();
  const int hw = static_cast<int>(kernel.size()) / 2;
  for (int y = 0; y < H; ++y) {
    for (int x = 0; x < W; ++x) {
      double acc = 0.0;
      int k0 = std::max(-hw, -x), k1 = std::min(hw, W - 1 - x);
      for (int k = k0; k <= k1; ++k) acc += kernel[k + hw] * src.at(x + k, y);
      tmp.at(x, y) = acc;
    }
  }
  for (int y = 0; y < H; ++y) {
    for (int x = 0; x < W; ++x) {
      double acc = 0.0;
      int k0 = std::max(-hw, -y), k1 = std::min(hw, H - 1 - y);
      for (int k = k0; k <= k1; ++k) acc += kernel[k + hw] * tmp.at(x, y + k);
      dst.at(x, y) = acc;
    }
  }
}

std::vector<double> gaussian_kernel(int window, double sigma) {
  std::vector<double> k(window);
  int hw = window / 2;
  double sum = 0.0;
  for (int i = 0; i < window; ++i) {
    double d = i - hw;
    k[i] = std::exp(-0.5 * d * d / (sigma * sigma));
    sum += k[i];
  }
  for (double& v : k) v /= sum;
  return k;
}

// In-bounds kernel mass per pixel; separable, so computed per axis.
ImageF window_weight(int W, int H, const std::vector<double>& kernel) {
  int hw = static_cast<int>(kernel.size()) / 2;
  auto axis_weight = [&](int n) {
    std::vector<double> w(n);
    for (int x = 0; x < n; ++x) {
      double acc = 0.0;
      int k0 = std::max(-hw, -x), k1 = std::min(hw, n - 1 - x);
      for (int k = k0; k <= k1; ++k) acc += kernel[k + hw];
      w[x] = acc;
    }
    return w;
  };
  std::vector<double> wx = axis_weight(W), wy = axis_weight(H);
  ImageF out(W, H);
  for (int y = 0; y < H; ++y)
    for (int x = 0; x < W; ++x) out.at(x, y) = wx[x] * wy[y];
  return out;
}

}  // namespace

std::pair<double, std::vector<ImageF>> mask_loss(const std::vector<ImageF>& ref_masks,
                                                 const std::vector<ImageF>& rendered_masks) {
  if (ref_masks.size() != rendered_masks.size())
    throw ShapeMismatch("mask_loss: view counts differ");
  double total = 0.0;
  std::vector<ImageF> grads;
  grads.reserve(ref_masks.size());
  for (std::size_t i = 0; i < ref_masks.size(); ++i) {
    const ImageF& ref = ref_masks[i];
    const ImageF& ren = rendered_masks[i];
    require_same_shape(ref, ren, "mask_loss");
    const double inv_n = 1.0 / static_cast<double>(ref.size());
    ImageF g(ref.width(), ref.height());
    double term = 0.0;
    for (std::size_t p = 0; p < ref.size(); ++p) {
      double d = ref[p] - ren[p];
      term += d * d;
      g[p] = 2.0 * (ren[p] - ref[p]) * inv_n;
    }
    total += term * inv_n;
    grads.push_back(std::move(g));
  }
  return {total, std::move(grads)};
}

std::pair<double, std::vector<Image3>> normal_loss(const std::vector<Image3>& ref_normals,
                                                   const std::vector<Image3>& rendered_normals,
                                                   const std::vector<ImageF>& valid) {
  if (ref_normals.size() != rendered_normals.size() || ref_normals.size() != valid.size())
    throw ShapeMismatch("normal_loss: view counts differ");
  double total = 0.0;
  std::vector<Image3> grads;
  grads.reserve(ref_normals.size());
  for (std::size_t i = 0; i < ref_normals.size(); ++i) {
    const Image3& ref = ref_normals[i];
    const Image3& ren = rendered_normals[i];
    require_same_shape(ref, ren, "normal_loss");
    if (valid[i].width() != ref.width() || valid[i].height() != ref.height())
      throw ShapeMismatch("normal_loss: valid mask shape");
    std::size_t count = 0;
    for (std::size_t p = 0; p < valid[i].size(); ++p) count += valid[i][p] > 0.5 ? 1 : 0;
    if (count == 0) throw NoValidPixels("normal_loss: view has no valid pixels");
    const double inv_n = 1.0 / static_cast<double>(count);
    Image3 g(ref.width(), ref.height(), Vec3::Zero());
    double term = 0.0;
    for (std::size_t p = 0; p < ref.size(); ++p) {
      if (valid[i][p] <= 0.5) continue;
      Vec3 d = ref[p] - ren[p];
      term += d.squaredNorm();
      g[p] = 2.0 * (ren[p] - ref[p]) * inv_n;
    }
    total += term * inv_n;
    grads.push_back(std::move(g));
  }
  return {total, std::move(grads)};
}

SeResult se_loss(const std::vector<Vec3>& current_normals, const SeRefs& refs,
                 const std::vector<VertexViewStats>& stats) {
  const std::size_t n_views = stats.size();
  if (refs.normals.size() != n_views || refs.has_ref.size() != n_views)
    throw ShapeMismatch("se_loss: view counts differ");
  const std::size_t n_verts = current_normals.size();

  SeResult out;
  out.normal_grads.assign(n_verts, Vec3::Zero());
  out.weights.assign(n_verts, {});
  out.contributes.assign(n_verts, 0);

  for (std::size_t v = 0; v < n_verts; ++v) {
    double weight_sum = 0.0;
    bool any_visible = false;
    for (std::size_t i = 0; i < n_views; ++i) {
      bool m = stats[i].visible[v] && refs.has_ref[i][v];
      if (!m) continue;
      any_visible = true;
      weight_sum += stats[i].projected_area[v];
    }
    if (!any_visible) continue;
    if (weight_sum <= 0.0)
      throw DegenerateWeights("se_loss: visible vertex with zero projected area");
    out.contributes[v] = 1;
    for (std::size_t i = 0; i < n_views; ++i) {
      bool m = stats[i].visible[v] && refs.has_ref[i][v];
      if (!m) continue;
      double eps = stats[i].projected_area[v] / weight_sum;
      if (i < 4) out.weights[v][i] = eps;
      Vec3 d = current_normals[v] - refs.normals[i][v];
      out.value += eps * d.squaredNorm();
      out.normal_grads[v] += eps * 2.0 * d;
    }
  }
  return out;
}

double ssim(const ImageF& a, const ImageF& b, const SsimConfig& cfg, const ImageF& valid,
            ImageF* grad_a, ImageF* grad_b) {
  require_same_shape(a, b, "ssim");
  require_same_shape(a, valid, "ssim valid");
  if (cfg.window < 3 || cfg.window % 2 == 0) throw ShapeMismatch("ssim window must be odd >= 3");
  if (!(cfg.dynamic_range > 0.0)) throw ShapeMismatch("ssim dynamic_range must be > 0");
  if (!(cfg.k1 > 0.0) || !(cfg.k2 > 0.0)) throw ShapeMismatch("ssim k1,k2 must be > 0");

  const int W = a.width(), H = a.height();
  const double C1 = (cfg.k1 * cfg.dynamic_range) * (cfg.k1 * cfg.dynamic_range);
  const double C2 = (cfg.k2 * cfg.dynamic_range) * (cfg.k2 * cfg.dynamic_range);

  std::vector<double> kernel = gaussian_kernel(cfg.window, cfg.gaussian_sigma);
  ImageF wsum = window_weight(W, H, kernel);

  ImageF tmp(W, H), ma(W, H), mb(W, H), maa(W, H), mbb(W, H), mab(W, H);
  ImageF prod(W, H);
  sepconv(a, kernel, tmp, ma);
  sepconv(b, kernel, tmp, mb);
  for (std::size_t p = 0; p < prod.size(); ++p) prod[p] = a[p] * a[p];
  sepconv(prod, kernel, tmp, maa);
  for (std::size_t p = 0; p < prod.size(); ++p) prod[p] = b[p] * b[p];
  sepconv(prod, kernel, tmp, mbb);
  for (std::size_t p = 0; p < prod.size(); ++p) prod[p] = a[p] * b[p];
  sepconv(prod, kernel, tmp, mab);

  std::size_t count = 0;
  for (std::size_t p = 0; p < valid.size(); ++p) count += valid[p] > 0.5 ? 1 : 0;
  if (count == 0) throw NoValidPixels("ssim: no valid window centers");
  const double inv_count = 1.0 / static_cast<double>(count);

  // per-center fields for the transpose pass
  ImageF y_mu_a, y_e2_a, y_ab_a, y_mu_b, y_e2_b, y_ab_b;
  if (grad_a) {
    y_mu_a = ImageF(W, H, 0.0);
    y_e2_a = ImageF(W, H, 0.0);
    y_ab_a = ImageF(W, H, 0.0);
  }
  if (grad_b) {
    y_mu_b = ImageF(W, H, 0.0);
    y_e2_b = ImageF(W, H, 0.0);
    y_ab_b = ImageF(W, H, 0.0);
  }

  double total = 0.0;
  for (std::size_t p = 0; p < valid.size(); ++p) {
    if (valid[p] <= 0.5) continue;
    double w = wsum[p];
    double mu_a = ma[p] / w, mu_b = mb[p] / w;
    double e_aa = maa[p] / w, e_bb = mbb[p] / w, e_ab = mab[p] / w;
    double var_a = e_aa - mu_a * mu_a;
    double var_b = e_bb - mu_b * mu_b;
    double cov = e_ab - mu_a * mu_b;
    double n1 = 2.0 * mu_a * mu_b + C1;
    double d1 = mu_a * mu_a + mu_b * mu_b + C1;
    double n2 = 2.0 * cov + C2;
    double d2 = var_a + var_b + C2;
    double s = (n1 * n2) / (d1 * d2);
    total += s;

    if (grad_a || grad_b) {
      double r1 = n1 / d1, r2 = n2 / d2;
      // intermediates treated independently: mu, E[x^2], E[ab]
      double ds_de_ab = r1 * (2.0 / d2);
      if (grad_a) {
        double ds_dmu_a =
            r2 * (2.0 * mu_b * d1 - n1 * 2.0 * mu_a) / (d1 * d1) +
            r1 * (-2.0 * mu_b * d2 + n2 * 2.0 * mu_a) / (d2 * d2);
        double ds_de_aa = r1 * (-n2 / (d2 * d2));
        double scale = inv_count / w;
        y_mu_a[p] = ds_dmu_a * scale;
        y_e2_a[p] = ds_de_aa * scale;
        y_ab_a[p] = ds_de_ab * scale;
      }
      if (grad_b) {
        double ds_dmu_b =
            r2 * (2.0 * mu_a * d1 - n1 * 2.0 * mu_b) / (d1 * d1) +
            r1 * (-2.0 * mu_a * d2 + n2 * 2.0 * mu_b) / (d2 * d2);
        double ds_de_bb = r1 * (-n2 / (d2 * d2));
        double scale = inv_count / w;
        y_mu_b[p] = ds_dmu_b * scale;
        y_e2_b[p] = ds_de_bb * scale;
        y_ab_b[p] = ds_de_ab * scale;
      }
    }
  }

  if (grad_a) {
    ImageF c_mu(W, H), c_e2(W, H), c_ab(W, H);
    sepconv(y_mu_a, kernel, tmp, c_mu);
    sepconv(y_e2_a, kernel, tmp, c_e2);
    sepconv(y_ab_a, kernel, tmp, c_ab);
    *grad_a = ImageF(W, H);
    for (std::size_t p = 0; p < grad_a->size(); ++p)
      (*grad_a)[p] = c_mu[p] + 2.0 * a[p] * c_e2[p] + b[p] * c_ab[p];
  }
  if (grad_b) {
    ImageF c_mu(W, H), c_e2(W, H), c_ab(W, H);
    sepconv(y_mu_b, kernel, tmp, c_mu);
    sepconv(y_e2_b, kernel, tmp, c_e2);
    sepconv(y_ab_b, kernel, tmp, c_ab);
    *grad_b = ImageF(W, H);
    for (std::size_t p = 0; p < grad_b->size(); ++p)
      (*grad_b)[p] = c_mu[p] + 2.0 * b[p] * c_e2[p] + a[p] * c_ab[p];
  }
  return total * inv_count;
}

double cosine_similarity(const ImageF& a, const ImageF& b, const ImageF& valid,
                         ImageF* grad_a, ImageF* grad_b) {
  require_same_shape(a, b, "cosine_similarity");
  require_same_shape(a, valid, "cosine_similarity valid");
  double dot = 0.0, na2 = 0.0, nb2 = 0.0;
  std::size_t count = 0;
  for (std::size_t p = 0; p < a.size(); ++p) {
    if (valid[p] <= 0.5) continue;
    ++count;
    dot += a[p] * b[p];
    na2 += a[p] * a[p];
    nb2 += b[p] * b[p];
  }
  if (count == 0) throw NoValidPixels("cosine_similarity: no valid pixels");
  if (na2 <= 0.0 || nb2 <= 0.0) throw ZeroVector("cosine_similarity: zero-norm input");
  double na = std::sqrt(na2), nb = std::sqrt(nb2);
  double value = dot / (na * nb);
  if (grad_a) {
    *grad_a = ImageF(a.width(), a.height(), 0.0);
    for (std::size_t p = 0; p < a.size(); ++p) {
      if (valid[p] <= 0.5) continue;
      (*grad_a)[p] = b[p] / (na * nb) - value * a[p] / na2;
    }
  }
  if (grad_b) {
    *grad_b = ImageF(a.width(), a.height(), 0.0);
    for (std::size_t p = 0; p < a.size(); ++p) {
      if (valid[p] <= 0.5) continue;
      (*grad_b)[p] = a[p] / (na * nb) - value * b[p] / nb2;
    }
  }
  return value;
}

DcResult dc_loss(const std::vector<RenderBuffers>& ring_buffers, const SsimConfig& cfg) {
  const int V = static_cast<int>(ring_buffers.size());
  if (V < 2) throw ShapeMismatch("dc_loss needs at least 2 views");
  DcResult out;
  out.depth_grads.reserve(V);
  for (int i = 0; i < V; ++i)
    out.depth_grads.emplace_back(ring_buffers[i].depth.width(), ring_buffers[i].depth.height(),
                                 0.0);

  for (int i = 0; i < V; ++i) {
    int j = (i + 1) % V;
    const ImageF& da = ring_buffers[i].depth;
    const ImageF& db = ring_buffers[j].depth;
    require_same_shape(da, db, "dc_loss");

    ImageF uni(da.width(), da.height(), 0.0);
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t p = 0; p < uni.size(); ++p) {
      bool in_union = ring_buffers[i].mask[p] > 0.5 || ring_buffers[j].mask[p] > 0.5;
      if (!in_union) continue;
      uni[p] = 1.0;
      lo = std::min({lo, da[p], db[p]});
      hi = std::max({hi, da[p], db[p]});
    }
    SsimConfig pair_cfg = cfg;
    pair_cfg.dynamic_range = std::max(hi - lo, 1e-6);

    ImageF gs_a, gs_b, gc_a, gc_b;
    double s = ssim(da, db, pair_cfg, uni, &gs_a, &gs_b);
    double c = cosine_similarity(da, db, uni, &gc_a, &gc_b);
    out.pair_terms.push_back(1.0 - s * c);
    out.total += 1.0 - s * c;
    for (std::size_t p = 0; p < uni.size(); ++p) {
      out.depth_grads[i][p] += -(c * gs_a[p] + s * gc_a[p]);
      out.depth_grads[j][p] += -(c * gs_b[p] + s * gc_b[p]);
    }
  }
  return out;
}

std::pair<double, ImageF> ds_loss(const ImageF& depth, const Image3& color, const ImageF& valid) {
  if (depth.width() != color.width() || depth.height() != color.height())
    throw ShapeMismatch("ds_loss: depth/color shapes differ");
  require_same_shape(depth, valid, "ds_loss valid");
  const int W = depth.width(), H = depth.height();

  double total = 0.0;
  ImageF grad(W, H, 0.0);
  for (int y = 0; y < H; ++y) {
    for (int x = 0; x < W; ++x) {
      if (valid.at(x, y) <= 0.5) continue;
      bool xr_in = x + 1 < W, yd_in = y + 1 < H;
      // the forward stencil must stay on the surface; replicate at borders
      if (xr_in && valid.at(x + 1, y) <= 0.5) continue;
      if (yd_in && valid.at(x, y + 1) <= 0.5) continue;
      double gx = xr_in ? depth.at(x + 1, y) - depth.at(x, y) : 0.0;
      double gy = yd_in ? depth.at(x, y + 1) - depth.at(x, y) : 0.0;
      double mag = std::sqrt(gx * gx + gy * gy);

      Vec3 cx = xr_in ? Vec3(color.at(x + 1, y) - color.at(x, y)) : Vec3::Zero();
      Vec3 cy = yd_in ? Vec3(color.at(x, y + 1) - color.at(x, y)) : Vec3::Zero();
      double cmag = std::sqrt(cx.squaredNorm() + cy.squaredNorm());
      double w = std::exp(-cmag);

      total += mag * w;
      if (mag < 1e-12) continue;
      double s = w / mag;
      if (xr_in) {
        grad.at(x + 1, y) += s * gx;
        grad.at(x, y) -= s * gx;
      }
      if (yd_in) {
        grad.at(x, y + 1) += s * gy;
        grad.at(x, y) -= s * gy;
      }
    }
  }
  return {total, std::move(grad)};
}

LossReport coarse_loss(const std::vector<ImageF>& ref_masks,
                       const std::vector<Image3>& ref_normals,
                       const std::vector<ImageF>& rendered_masks,
                       const std::vector<Image3>& rendered_normals,
                       const std::vector<ImageF>& valid, const std::vector<Vec3>& current_normals,
                       const SeRefs& se_refs, const std::vector<VertexViewStats>& stats) {
  LossReport report;
  report.terms["mask"] = mask_loss(ref_masks, rendered_masks).first;
  report.terms["normal"] = normal_loss(ref_normals, rendered_normals, valid).first;
  report.terms["SE"] = se_loss(current_normals, se_refs, stats).value;
  report.total = report.terms["mask"] + report.terms["normal"] + report.terms["SE"];
  return report;
}

LossReport cvcr_loss(const std::vector<ImageF>& ref_masks,
                     const std::vector<Image3>& ref_normals,
                     const std::vector<ImageF>& rendered_masks,
                     const std::vector<Image3>& rendered_normals,
                     const std::vector<ImageF>& valid,
                     const std::vector<RenderBuffers>& ring_buffers, double lambda1,
                     double lambda2, const SsimConfig& cfg) {
  if (lambda1 < 0.0 || lambda2 < 0.0) throw ShapeMismatch("cvcr_loss: lambdas must be >= 0");
  LossReport report;
  report.terms["mask"] = mask_loss(ref_masks, rendered_masks).first;
  report.terms["normal"] = normal_loss(ref_normals, rendered_normals, valid).first;
  report.terms["DC"] = lambda1 > 0.0 ? dc_loss(ring_buffers, cfg).total : 0.0;
  double ds_total = 0.0;
  if (lambda2 > 0.0) {
    for (const RenderBuffers& rb : ring_buffers)
      ds_total += ds_loss(rb.depth, render_shaded(rb), rb.mask).first;
  }
  report.terms["DS"] = ds_total;
  report.total = report.terms["mask"] + report.terms["normal"] + lambda1 * report.terms["DC"] +
                 lambda2 * report.terms["DS"];
  return report;
}

}  // namespace hallufix
