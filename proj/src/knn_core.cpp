#include "knnlab/knn_core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace knnlab::knn {

namespace {

double dist_sq(std::span<const double> a, const double* b, int dim) {
  double s = 0.0;
  for (int j = 0; j < dim; ++j) {
    const double d = a[j] - b[j];
    s += d * d;
  }
  return s;
}

}  // namespace

long k_schedule(double p, int d, long n) {
  if (!(p > 0.0)) throw std::invalid_argument("k_schedule: p must be positive");
  if (d < 1) throw std::invalid_argument("k_schedule: d must be >= 1");
  if (n < 1) throw std::invalid_argument("k_schedule: n must be >= 1");
  const long double e = 2.0L * p / (2.0L * p + d);
  const long double v = std::pow(static_cast<long double>(n), e);
  long k = static_cast<long>(std::floor(v + v * 1e-12L));
  return std::clamp(k, 1L, n);
}

KnnModel::KnnModel(sampling::Dataset data, IndexMode mode)
    : data_(std::move(data)) {
  if (data_.n < 1) throw std::invalid_argument("KnnModel: empty dataset");
  if (data_.dim < 1) throw std::invalid_argument("KnnModel: dim must be >= 1");
  if (data_.xs.size() != static_cast<std::size_t>(data_.n) * data_.dim ||
      data_.ys.size() != static_cast<std::size_t>(data_.n))
    throw std::invalid_argument("KnnModel: inconsistent dataset buffers");

  const bool want_tree =
      mode == IndexMode::tree ||
      (mode == IndexMode::automatic && data_.n > 512 && data_.dim < 8);
  if (!want_tree) return;

  orig_.resize(static_cast<std::size_t>(data_.n));
  for (long i = 0; i < data_.n; ++i) orig_[static_cast<std::size_t>(i)] = i;
  pts_ = data_.xs;  // reordered in place during the build
  nodes_.reserve(static_cast<std::size_t>(2 * data_.n / kLeafSize + 2));
  build(0, data_.n);
}

// Builds the subtree over pts_[begin, end); returns its node id. Splits at
// the median of the widest axis of the actual bounding box.
long KnnModel::build(long begin, long end) {
  const int d = data_.dim;
  const long id = static_cast<long>(nodes_.size());
  nodes_.emplace_back();
  box_lo_.resize(nodes_.size() * d);
  box_hi_.resize(nodes_.size() * d);

  double* lo = box_lo_.data() + id * d;
  double* hi = box_hi_.data() + id * d;
  for (int j = 0; j < d; ++j) {
    lo[j] = pts_[static_cast<std::size_t>(begin) * d + j];
    hi[j] = lo[j];
  }
  for (long i = begin + 1; i < end; ++i)
    for (int j = 0; j < d; ++j) {
      const double v = pts_[static_cast<std::size_t>(i) * d + j];
      lo[j] = std::min(lo[j], v);
      hi[j] = std::max(hi[j], v);
    }

  if (end - begin <= kLeafSize) {
    nodes_[static_cast<std::size_t>(id)].begin = begin;
    nodes_[static_cast<std::size_t>(id)].end = end;
    return id;
  }

  int axis = 0;
  double widest = -1.0;
  for (int j = 0; j < d; ++j) {
    const double w = hi[j] - lo[j];
    if (w > widest) {
      widest = w;
      axis = j;
    }
  }

  const long mid = begin + (end - begin) / 2;
  // partition by coordinate; pts_ rows and orig_ move together
  std::vector<long> idx(static_cast<std::size_t>(end - begin));
  for (long i = 0; i < end - begin; ++i) idx[static_cast<std::size_t>(i)] = begin + i;
  std::nth_element(idx.begin(), idx.begin() + (mid - begin), idx.end(),
                   [&](long a, long b) {
                     return pts_[static_cast<std::size_t>(a) * d + axis] <
                            pts_[static_cast<std::size_t>(b) * d + axis];
                   });
  // apply the permutation to pts_/orig_ within [begin, end)
  std::vector<double> tmp_pts(static_cast<std::size_t>(end - begin) * d);
  std::vector<long> tmp_orig(static_cast<std::size_t>(end - begin));
  for (long i = 0; i < end - begin; ++i) {
    const long src = idx[static_cast<std::size_t>(i)];
    for (int j = 0; j < d; ++j)
      tmp_pts[static_cast<std::size_t>(i) * d + j] =
          pts_[static_cast<std::size_t>(src) * d + j];
    tmp_orig[static_cast<std::size_t>(i)] = orig_[static_cast<std::size_t>(src)];
  }
  std::copy(tmp_pts.begin(), tmp_pts.end(),
            pts_.begin() + static_cast<std::ptrdiff_t>(begin) * d);
  std::copy(tmp_orig.begin(), tmp_orig.end(),
            orig_.begin() + static_cast<std::ptrdiff_t>(begin));

  nodes_[static_cast<std::size_t>(id)].axis = axis;
  const long left = build(begin, mid);
  const long right = build(mid, end);
  nodes_[static_cast<std::size_t>(id)].left = static_cast<int>(left);
  nodes_[static_cast<std::size_t>(id)].right = static_cast<int>(right);
  return id;
}

void KnnModel::scan_leaf(const Node& node, std::span<const double> x, long k,
                         std::vector<Neighbor>& heap) const {
  const int d = data_.dim;
  for (long i = node.begin; i < node.end; ++i) {
    const Neighbor cand{dist_sq(x, pts_.data() + i * d, d),
                        orig_[static_cast<std::size_t>(i)]};
    if (static_cast<long>(heap.size()) < k) {
      heap.push_back(cand);
      std::push_heap(heap.begin(), heap.end(), closer);
    } else if (closer(cand, heap.front())) {
      std::pop_heap(heap.begin(), heap.end(), closer);
      heap.back() = cand;
      std::push_heap(heap.begin(), heap.end(), closer);
    }
  }
}

void KnnModel::query(std::span<const double> x, long k,
                     std::vector<Neighbor>& heap) const {
  const int d = data_.dim;
  std::vector<long> stack;
  stack.reserve(64);
  stack.push_back(0);
  while (!stack.empty()) {
    const long id = stack.back();
    stack.pop_back();
    // prune on strict inequality only: a box at exactly the current k-th
    // distance may still hold an equal-distance point with a smaller index
    if (static_cast<long>(heap.size()) == k) {
      const double* lo = box_lo_.data() + id * d;
      const double* hi = box_hi_.data() + id * d;
      double mind = 0.0;
      for (int j = 0; j < d; ++j) {
        double gap = 0.0;
        if (x[j] < lo[j]) gap = lo[j] - x[j];
        else if (x[j] > hi[j]) gap = x[j] - hi[j];
        mind += gap * gap;
      }
      if (mind > heap.front().dist_sq) continue;
    }
    const Node& node = nodes_[static_cast<std::size_t>(id)];
    if (node.axis < 0) {
      scan_leaf(node, x, k, heap);
      continue;
    }
    // descend toward the query side first; boxes carry the true extents, so
    // the split value itself is not needed for the visit decision
    const double* llo = box_lo_.data() + static_cast<long>(node.left) * d;
    const double* lhi = box_hi_.data() + static_cast<long>(node.left) * d;
    const double ax = x[node.axis];
    const bool left_first =
        std::fabs(ax - std::clamp(ax, llo[node.axis], lhi[node.axis])) == 0.0;
    if (left_first) {
      stack.push_back(node.right);
      stack.push_back(node.left);
    } else {
      stack.push_back(node.left);
      stack.push_back(node.right);
    }
  }
}

std::vector<Neighbor> KnnModel::neighbors(std::span<const double> x,
                                          long k) const {
  if (!uses_tree()) return neighbors_brute(x, k);
  if (static_cast<int>(x.size()) != data_.dim)
    throw std::invalid_argument("neighbors: query dimension mismatch");
  if (k < 1 || k > data_.n)
    throw std::invalid_argument("neighbors: need 1 <= k <= n");
  std::vector<Neighbor> heap;
  heap.reserve(static_cast<std::size_t>(k));
  query(x, k, heap);
  std::sort(heap.begin(), heap.end(), closer);
  return heap;
}

std::vector<Neighbor> KnnModel::neighbors_brute(std::span<const double> x,
                                                long k) const {
  if (static_cast<int>(x.size()) != data_.dim)
    throw std::invalid_argument("neighbors: query dimension mismatch");
  if (k < 1 || k > data_.n)
    throw std::invalid_argument("neighbors: need 1 <= k <= n");
  const int d = data_.dim;
  std::vector<Neighbor> all(static_cast<std::size_t>(data_.n));
  for (long i = 0; i < data_.n; ++i)
    all[static_cast<std::size_t>(i)] = {dist_sq(x, data_.xs.data() + i * d, d), i};
  auto kth = all.begin() + static_cast<std::ptrdiff_t>(k);
  std::nth_element(all.begin(), kth - 1, all.end(), closer);
  all.resize(static_cast<std::size_t>(k));
  std::sort(all.begin(), all.end(), closer);
  return all;
}

double KnnModel::mean_over(const std::vector<Neighbor>& nbrs) const {
  double s = 0.0;
  for (const Neighbor& nb : nbrs)
    s += data_.ys[static_cast<std::size_t>(nb.index)];
  return s / static_cast<double>(nbrs.size());
}

double KnnModel::predict(std::span<const double> x, long k) const {
  return mean_over(neighbors(x, k));
}

double KnnModel::predict_brute(std::span<const double> x, long k) const {
  return mean_over(neighbors_brute(x, k));
}

}  // namespace knnlab::knn
