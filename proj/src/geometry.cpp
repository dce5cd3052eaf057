#include "geometry.hpp"

#include <algorithm>
#include <limits>

namespace ghost2 {

KdTree KdTree::build(const Matrix& points, std::size_t leaf_capacity) {
    if (points.rows == 0)
        throw Error(ErrorCode::EmptyPointSet, "build_kdtree: empty point set");
    if (leaf_capacity < 1)
        throw Error(ErrorCode::InvalidArgument, "leaf_capacity must be >= 1");
    KdTree tree;
    tree.points_ = points;
    tree.leaf_capacity_ = leaf_capacity;
    tree.order_.resize(points.rows);
    for (std::size_t i = 0; i < points.rows; ++i) tree.order_[i] = i;
    tree.nodes_.reserve(2 * points.rows / leaf_capacity + 1);
    tree.root_ = tree.build_node(0, points.rows);
    return tree;
}

long KdTree::build_node(std::size_t begin, std::size_t end) {
    Node node;
    node.begin = begin;
    node.end = end;
    const std::size_t count = end - begin;
    if (count <= leaf_capacity_) {
        nodes_.push_back(node);
        return static_cast<long>(nodes_.size() - 1);
    }

    // axis of largest spread
    std::size_t axis = 0;
    double best_spread = -1.0;
    for (std::size_t c = 0; c < points_.cols; ++c) {
        double lo = points_.at(order_[begin], c), hi = lo;
        for (std::size_t i = begin + 1; i < end; ++i) {
            const double v = points_.at(order_[i], c);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        if (hi - lo > best_spread) {
            best_spread = hi - lo;
            axis = c;
        }
    }

    const std::size_t mid = begin + count / 2;
    std::nth_element(order_.begin() + static_cast<long>(begin),
                     order_.begin() + static_cast<long>(mid),
                     order_.begin() + static_cast<long>(end),
                     [&](std::size_t a, std::size_t b) {
                         return points_.at(a, axis) < points_.at(b, axis);
                     });
    node.axis = axis;
    node.split = points_.at(order_[mid], axis);

    nodes_.push_back(node);
    const long self = static_cast<long>(nodes_.size() - 1);
    const long left = build_node(begin, mid);
    const long right = build_node(mid, end);
    nodes_[self].left = left;
    nodes_[self].right = right;
    return self;
}

std::vector<std::vector<std::size_t>> KdTree::leaves() const {
    std::vector<std::vector<std::size_t>> out;
    for (const Node& node : nodes_) {
        if (node.left < 0) {
            out.emplace_back(order_.begin() + static_cast<long>(node.begin),
                             order_.begin() + static_cast<long>(node.end));
        }
    }
    return out;
}

namespace {

struct Candidate {
    double dist2;
    std::size_t index;
    bool operator<(const Candidate& o) const {
        if (dist2 != o.dist2) return dist2 < o.dist2;
        return index < o.index;
    }
};

}  // namespace

std::vector<std::size_t> KdTree::knn(std::size_t query, std::size_t k,
                                     const std::vector<int>* labels) const {
    if (k < 1) throw Error(ErrorCode::InvalidArgument, "knn: k must be >= 1");
    const int want = labels ? (*labels)[query] : 0;
    std::size_t eligible = 0;
    for (std::size_t i = 0; i < points_.rows; ++i) {
        if (i == query) continue;
        if (labels && (*labels)[i] != want) continue;
        ++eligible;
    }
    if (eligible < k) {
        throw Error(ErrorCode::NotEnoughNeighbors,
                    "knn: requested " + std::to_string(k) + " neighbors, only " +
                        std::to_string(eligible) + " eligible");
    }

    const double* q = points_.row(query);
    std::vector<Candidate> best;  // sorted ascending, size <= k
    best.reserve(k + 1);

    auto consider = [&](std::size_t idx) {
        if (idx == query) return;
        if (labels && (*labels)[idx] != want) return;
        Candidate c{squared_distance(q, points_.row(idx), points_.cols), idx};
        if (best.size() == k && !(c < best.back())) return;
        best.insert(std::upper_bound(best.begin(), best.end(), c), c);
        if (best.size() > k) best.pop_back();
    };

    // Recursive descent. A subtree is skipped only when the squared distance
    // to its half-space strictly exceeds the current worst candidate, which
    // keeps results identical to brute force under the tie rule.
    auto visit = [&](auto&& self, long node_idx) -> void {
        const Node& node = nodes_[static_cast<std::size_t>(node_idx)];
        if (node.left < 0) {
            for (std::size_t i = node.begin; i < node.end; ++i) consider(order_[i]);
            return;
        }
        const double delta = q[node.axis] - node.split;
        const long near = delta < 0.0 ? node.left : node.right;
        const long far = delta < 0.0 ? node.right : node.left;
        self(self, near);
        const double gap2 = delta * delta;
        if (best.size() < k || gap2 <= best.back().dist2) self(self, far);
    };
    visit(visit, root_);

    std::vector<std::size_t> out;
    out.reserve(best.size());
    for (const Candidate& c : best) out.push_back(c.index);
    return out;
}

std::vector<std::size_t> knn(const Matrix& points, std::size_t query, std::size_t k,
                             const std::vector<int>* labels) {
    return KdTree::build(points, std::max<std::size_t>(1, points.rows / 16 + 1))
        .knn(query, k, labels);
}

}  // namespace ghost2
