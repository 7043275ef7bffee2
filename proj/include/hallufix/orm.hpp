#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "hallufix/mesh.hpp"

namespace hallufix {

// Discrete risk distribution. An empty weight vector means the uniform
// empirical distribution 1/N; explicit weights must be positive and sum to 1.
struct RiskDistribution {
  std::vector<double> risks;
  std::vector<double> weights;

  bool uniform() const { return weights.empty(); }
  int size() const { return static_cast<int>(risks.size()); }
  void validate() const;
};

struct OrmConfig {
  int k = 10;              // k-th neighbor distance; neighborhood size is the same k
  double xi = 0.95;        // CVaR confidence level
  double lambda = 0.0;     // global-score weight
  int sample_count = 16384;
  std::uint64_t seed = 0;

  void validate() const;
};

// Floating-point convention for VaR/CVaR, shared with the test oracles:
// uniform-weight cumulative probabilities are computed as count * weight (a
// single rounding, so rational cases like ten risks at weight 1/10 evaluate
// exactly); explicit-weight cumulatives and all tail sums use Neumaier
// compensated summation in risk-index order.

// Smallest risk value whose weighted fraction of risks <= it reaches xi.
double var(const RiskDistribution& dist, double xi);

// Literal discrete tail form: (1/(1-xi)) * sum of weight*risk over risks >=
// VaR. Not renormalized by the actual tail mass, so the result can exceed the
// maximum risk when the tail mass exceeds 1-xi.
double cvar(const RiskDistribution& dist, double xi);

struct LocalRiskResult {
  RiskDistribution dist;
  double s_l_mean = 0.0;  // average of the per-point density-ratio risks
};

// Per-point risk = (distance to own k-th neighbor) / (mean of the k
// neighbors' k-th distances). k-NN ties break by point index.
LocalRiskResult local_risks(const PointCloud& cloud, const OrmConfig& cfg);

// Optional pluggable global scorer: one finite non-negative value per point.
using GlobalScorer = std::function<std::vector<double>(const PointCloud&)>;

struct OrmResult {
  double orm = 0.0;
  double var = 0.0;
  double s_l_mean = 0.0;
  RiskDistribution dist;
};

// sample_surface -> local_risks -> optional lambda-weighted global scores ->
// CVaR at confidence xi. Higher ORM means more outliers.
OrmResult orm(const TriangleMesh& mesh, const OrmConfig& cfg,
              const GlobalScorer* global_scorer = nullptr);

}  // namespace hallufix
