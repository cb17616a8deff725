#pragma once

#include <span>
#include <vector>

#include "knnlab/sampler.hpp"

// k-nearest-neighbour regression with an exact, total neighbour order:
// ascending squared Euclidean distance, ties broken toward the smaller
// original row index. Distances are compared exactly (no epsilon), so the
// spatial index and the brute-force scan return bitwise-identical results.

namespace knnlab::knn {

// Theorem schedule k = floor(n^{2p/(2p+d)}), clamped to [1, n]. The floor is
// taken with a 1e-12 relative nudge so that exactly-representable powers
// (e.g. 256^{3/4} = 64) do not fall to 63 through rounding.
long k_schedule(double p, int d, long n);

struct Neighbor {
  double dist_sq = 0.0;  // squared Euclidean distance to the query
  long index = 0;        // original row in the dataset
};

// The total order behind every neighbour decision in the library.
inline bool closer(const Neighbor& a, const Neighbor& b) {
  return a.dist_sq < b.dist_sq ||
         (a.dist_sq == b.dist_sq && a.index < b.index);
}

enum class IndexMode {
  automatic,  // tree when n > 512 and d < 8, brute force otherwise
  tree,
  brute
};

class KnnModel {
 public:
  explicit KnnModel(sampling::Dataset data, IndexMode mode = IndexMode::automatic);

  long size() const { return data_.n; }
  int dim() const { return data_.dim; }
  const sampling::Dataset& data() const { return data_; }
  bool uses_tree() const { return !nodes_.empty(); }

  // First k neighbours of x in the total order. Throws std::invalid_argument
  // unless 1 <= k <= size(). Result is sorted, nearest first.
  std::vector<Neighbor> neighbors(std::span<const double> x, long k) const;

  // Same contract, but always runs the linear scan. Used as the oracle for
  // the tree path in tests; the two must agree bitwise.
  std::vector<Neighbor> neighbors_brute(std::span<const double> x, long k) const;

  // Mean response over the k nearest neighbours, accumulated in neighbour
  // order so both index paths produce identical bits.
  double predict(std::span<const double> x, long k) const;
  double predict_brute(std::span<const double> x, long k) const;

 private:
  struct Node {
    int axis = -1;          // -1 marks a leaf
    int left = -1, right = -1;
    long begin = 0, end = 0;  // leaf point range
  };

  long build(long begin, long end);
  void query(std::span<const double> x, long k, std::vector<Neighbor>& heap) const;
  void scan_leaf(const Node& node, std::span<const double> x, long k,
                 std::vector<Neighbor>& heap) const;
  double mean_over(const std::vector<Neighbor>& nbrs) const;

  sampling::Dataset data_;
  // tree storage: points are reordered into pts_ for locality; orig_ maps
  // back to dataset rows for tie-breaking and response lookup
  std::vector<double> pts_;
  std::vector<long> orig_;
  std::vector<Node> nodes_;
  std::vector<double> box_lo_, box_hi_;  // per-node bounds, node*dim
  static constexpr long kLeafSize = 16;
};

}  // namespace knnlab::knn
