#pragma once

#include <optional>
#include <vector>

#include "common.hpp"

namespace ghost2 {

// KD-tree over a point matrix. Nodes split at the median of the axis with
// the largest spread; recursion stops once a node holds <= leaf_capacity
// points. Immutable after build; queries are read-only.
class KdTree {
public:
    static KdTree build(const Matrix& points, std::size_t leaf_capacity);

    // Indices of the k nearest eligible points to points[query], by Euclidean
    // distance, ties broken by lower index. A point is eligible if it is not
    // the query itself and, when labels are given, shares the query's label.
    std::vector<std::size_t> knn(std::size_t query, std::size_t k,
                                 const std::vector<int>* labels = nullptr) const;

    // Disjoint index sets covering {0..m-1}.
    std::vector<std::vector<std::size_t>> leaves() const;

    std::size_t size() const { return points_.rows; }
    std::size_t leaf_capacity() const { return leaf_capacity_; }

private:
    struct Node {
        std::size_t axis = 0;
        double split = 0.0;
        long left = -1;   // node index, -1 for leaf
        long right = -1;
        std::size_t begin = 0;  // range into order_
        std::size_t end = 0;
    };

    KdTree() = default;
    long build_node(std::size_t begin, std::size_t end);

    Matrix points_;
    std::size_t leaf_capacity_ = 1;
    std::vector<Node> nodes_;
    std::vector<std::size_t> order_;
    long root_ = -1;
};

// Convenience wrapper: build a tree over `points` and query it once.
std::vector<std::size_t> knn(const Matrix& points, std::size_t query, std::size_t k,
                             const std::vector<int>* labels = nullptr);

}  // namespace ghost2
