#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <vector>

#include "hallufix/image.hpp"

namespace hallufix {

// Compact 3-d kd-tree over a point set. Queries are exact; equal distances
// are ordered by point index, which makes k-NN results a unique set under a
// total order and therefore deterministic regardless of build order.
class KdTree3 {
 public:
  struct Hit {
    double dist2;
    int index;
    bool operator<(const Hit& o) const {
      return dist2 < o.dist2 || (dist2 == o.dist2 && index < o.index);
    }
  };

  explicit KdTree3(const std::vector<Vec3>& points) : pts_(points) {
    order_.resize(pts_.size());
    for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = static_cast<int>(i);
    nodes_.reserve(pts_.size());
    if (!pts_.empty()) root_ = build(0, static_cast<int>(pts_.size()));
  }

  // Single nearest neighbor, optionally skipping one index (for self-queries).
  Hit nearest(const Vec3& q, int skip = -1) const {
    Hit best{std::numeric_limits<double>::infinity(), -1};
    nearest_rec(root_, q, skip, best);
    return best;
  }

  // k nearest neighbors sorted by (dist2, index), `skip` excluded.
  std::vector<Hit> knn(const Vec3& q, int k, int skip = -1) const {
    std::vector<Hit> heap;  // max-heap on (dist2, index)
    heap.reserve(k + 1);
    knn_rec(root_, q, k, skip, heap);
    std::sort(heap.begin(), heap.end());
    return heap;
  }

 private:
  struct Node {
    Vec3 point;
    int index;
    int axis;
    int left = -1, right = -1;
  };

  int build(int lo, int hi) {
    // Split on the axis of largest extent; median element becomes the node.
    Vec3 mn = pts_[order_[lo]], mx = mn;
    for (int i = lo + 1; i < hi; ++i) {
      mn = mn.cwiseMin(pts_[order_[i]]);
      mx = mx.cwiseMax(pts_[order_[i]]);
    }
    Vec3 ext = mx - mn;
    int axis = 0;
    if (ext[1] > ext[axis]) axis = 1;
    if (ext[2] > ext[axis]) axis = 2;

    int mid = (lo + hi) / 2;
    std::nth_element(order_.begin() + lo, order_.begin() + mid, order_.begin() + hi,
                     [&](int a, int b) {
                       double pa = pts_[a][axis], pb = pts_[b][axis];
                       return pa < pb || (pa == pb && a < b);
                     });

    Node n;
    n.index = order_[mid];
    n.point = pts_[n.index];
    n.axis = axis;
    int self = static_cast<int>(nodes_.size());
    nodes_.push_back(n);
    if (lo < mid) nodes_[self].left = build(lo, mid);
    if (mid + 1 < hi) nodes_[self].right = build(mid + 1, hi);
    return self;
  }

  void nearest_rec(int ni, const Vec3& q, int skip, Hit& best) const {
    if (ni < 0) return;
    const Node& n = nodes_[ni];
    if (n.index != skip) {
      Hit h{(q - n.point).squaredNorm(), n.index};
      if (h < best) best = h;
    }
    double delta = q[n.axis] - n.point[n.axis];
    int first = delta < 0 ? n.left : n.right;
    int second = delta < 0 ? n.right : n.left;
    nearest_rec(first, q, skip, best);
    if (delta * delta <= best.dist2) nearest_rec(second, q, skip, best);
  }

  void knn_rec(int ni, const Vec3& q, int k, int skip, std::vector<Hit>& heap) const {
    if (ni < 0) return;
    const Node& n = nodes_[ni];
    if (n.index != skip) {
      Hit h{(q - n.point).squaredNorm(), n.index};
      if (static_cast<int>(heap.size()) < k) {
        heap.push_back(h);
        std::push_heap(heap.begin(), heap.end());
      } else if (h < heap.front()) {
        std::pop_heap(heap.begin(), heap.end());
        heap.back() = h;
        std::push_heap(heap.begin(), heap.end());
      }
    }
    double delta = q[n.axis] - n.point[n.axis];
    int first = delta < 0 ? n.left : n.right;
    int second = delta < 0 ? n.right : n.left;
    knn_rec(first, q, k, skip, heap);
    bool full = static_cast<int>(heap.size()) >= k;
    if (!full || delta * delta <= heap.front().dist2) knn_rec(second, q, k, skip, heap);
  }

  const std::vector<Vec3>& pts_;
  std::vector<int> order_;
  std::vector<Node> nodes_;
  int root_ = -1;
};

}  // namespace hallufix
