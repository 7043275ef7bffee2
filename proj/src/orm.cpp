#include "hallufix/orm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hallufix/errors.hpp"
#include "hallufix/kdtree.hpp"

namespace hallufix {

namespace {

// Neumaier compensated summation; exact enough that rational test cases
// (e.g. ten weights of 1/10) accumulate without drift.
class CompensatedSum {
 public:
  void add(double v) {
    double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v))
      comp_ += (sum_ - t) + v;
    else
      comp_ += (v - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace

void RiskDistribution::validate() const {
  if (risks.empty()) throw EmptyDistribution("risk distribution is empty");
  for (double r : risks)
    if (!std::isfinite(r)) throw EmptyDistribution("risk distribution contains non-finite values");
  if (!weights.empty()) {
    if (weights.size() != risks.size())
      throw ShapeMismatch("risk weights must match risk count");
    CompensatedSum s;
    for (double w : weights) {
      if (!(w > 0.0)) throw ShapeMismatch("risk weights must be positive");
      s.add(w);
    }
    if (std::abs(s.value() - 1.0) > 1e-9) throw ShapeMismatch("risk weights must sum to 1");
  }
}

void OrmConfig::validate() const {
  if (k < 1) throw ShapeMismatch("orm k must be >= 1");
  if (!(xi > 0.0 && xi < 1.0)) throw ShapeMismatch("orm xi must be in (0,1)");
  if (lambda < 0.0) throw ShapeMismatch("orm lambda must be >= 0");
  if (sample_count < 1) throw ShapeMismatch("orm sample_count must be >= 1");
}

// Cumulative probability of {r_j <= r}: uniform weights use count * weight
// (one rounding); explicit weights sum compensated in index order.
namespace {

double cumulative_at(const RiskDistribution& dist, double r) {
  if (dist.uniform()) {
    long count = 0;
    for (double rj : dist.risks)
      if (r >= rj) ++count;
    double w = 1.0 / static_cast<double>(dist.risks.size());
    return static_cast<double>(count) * w;
  }
  CompensatedSum s;
  for (std::size_t j = 0; j < dist.risks.size(); ++j)
    if (r >= dist.risks[j]) s.add(dist.weights[j]);
  return s.value();
}

}  // namespace

double var(const RiskDistribution& dist, double xi) {
  dist.validate();
  if (!(xi > 0.0 && xi < 1.0)) throw ShapeMismatch("xi must be in (0,1)");

  if (dist.uniform()) {
    // ranks give the same integer counts as the direct double loop
    std::vector<double> sorted = dist.risks;
    std::sort(sorted.begin(), sorted.end());
    double w = 1.0 / static_cast<double>(sorted.size());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      if (i + 1 < sorted.size() && sorted[i + 1] == sorted[i]) continue;  // last of a tie run
      double cum = static_cast<double>(i + 1) * w;
      if (cum >= xi) return sorted[i];
    }
    return sorted.back();  // float shortfall guard; exact math always reaches 1
  }

  double best = std::numeric_limits<double>::infinity();
  bool found = false;
  for (double ri : dist.risks) {
    if (ri >= best && found) continue;
    if (cumulative_at(dist, ri) >= xi) {
      best = ri;
      found = true;
    }
  }
  if (!found) {
    best = dist.risks[0];
    for (double r : dist.risks) best = std::max(best, r);
  }
  return best;
}

double cvar(const RiskDistribution& dist, double xi) {
  double threshold = var(dist, xi);
  double factor = 1.0 / (1.0 - xi);
  CompensatedSum tail;
  if (dist.uniform()) {
    double w = 1.0 / static_cast<double>(dist.risks.size());
    for (double ri : dist.risks)
      if (ri >= threshold) tail.add(w * ri);
  } else {
    for (std::size_t i = 0; i < dist.risks.size(); ++i)
      if (dist.risks[i] >= threshold) tail.add(dist.weights[i] * dist.risks[i]);
  }
  return factor * tail.value();
}

LocalRiskResult local_risks(const PointCloud& cloud, const OrmConfig& cfg) {
  cfg.validate();
  const int n = cloud.size();
  if (n <= cfg.k + 1) throw TooFewPoints("local_risks needs more than k+1 points");

  KdTree3 tree(cloud.points);
  const int k = cfg.k;

  std::vector<double> kth_dist(n);
  std::vector<std::vector<int>> neighbors(n);
  for (int i = 0; i < n; ++i) {
    auto hits = tree.knn(cloud.points[i], k, i);
    kth_dist[i] = std::sqrt(hits.back().dist2);
    neighbors[i].reserve(k);
    for (const auto& h : hits) neighbors[i].push_back(h.index);
  }

  LocalRiskResult out;
  out.dist.risks.resize(n);
  CompensatedSum mean;
  for (int i = 0; i < n; ++i) {
    double denom = 0.0;
    for (int j : neighbors[i]) denom += kth_dist[j];
    denom /= static_cast<double>(neighbors[i].size());
    double r = kth_dist[i] / std::max(denom, 1e-300);
    out.dist.risks[i] = r;
    mean.add(r);
  }
  out.s_l_mean = mean.value() / static_cast<double>(n);
  return out;
}

OrmResult orm(const TriangleMesh& mesh, const OrmConfig& cfg, const GlobalScorer* global_scorer) {
  cfg.validate();
  PointCloud cloud = sample_surface(mesh, cfg.sample_count, cfg.seed);
  LocalRiskResult local = local_risks(cloud, cfg);

  if (global_scorer && *global_scorer) {
    std::vector<double> scores;
    try {
      scores = (*global_scorer)(cloud);
    } catch (const std::exception& e) {
      throw ScorerFailure(std::string("global scorer failed: ") + e.what());
    }
    if (static_cast<int>(scores.size()) != cloud.size())
      throw ScorerFailure("global scorer returned wrong count");
    for (double s : scores)
      if (!std::isfinite(s) || s < 0.0)
        throw ScorerFailure("global scorer returned a non-finite or negative score");
    for (std::size_t i = 0; i < local.dist.risks.size(); ++i)
      local.dist.risks[i] += cfg.lambda * scores[i];
  }

  OrmResult out;
  out.dist = local.dist;
  out.s_l_mean = local.s_l_mean;
  out.var = var(out.dist, cfg.xi);
  out.orm = cvar(out.dist, cfg.xi);
  return out;
}

}  // namespace hallufix
