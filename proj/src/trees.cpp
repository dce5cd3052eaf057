#include <algorithm>
#include <cmath>
#include <ostream>

#include "learners_impl.hpp"

namespace ghost2 {

namespace {

double impurity(double p1, bool entropy) {
    const double p0 = 1.0 - p1;
    if (entropy) {
        double h = 0.0;
        if (p0 > 0.0) h -= p0 * std::log2(p0);
        if (p1 > 0.0) h -= p1 * std::log2(p1);
        return h;
    }
    return 1.0 - p0 * p0 - p1 * p1;
}

struct SplitChoice {
    bool found = false;
    std::size_t feature = 0;
    double threshold = 0.0;
    double decrease = -1.0;
};

struct CartBuilder {
    const Matrix& x;
    const std::vector<int>& y;
    bool use_entropy;
    bool random_splitter;
    std::size_t max_features;  // 0 = all
    Rng& rng;
    std::vector<TreeNode> nodes;

    // candidate features for this split, in ascending order
    std::vector<std::size_t> pick_features() {
        const std::size_t d = x.cols;
        if (max_features == 0 || max_features >= d) {
            std::vector<std::size_t> all(d);
            for (std::size_t j = 0; j < d; ++j) all[j] = j;
            return all;
        }
        std::vector<std::size_t> chosen = rng.sample_without_replacement(d, max_features);
        std::sort(chosen.begin(), chosen.end());
        return chosen;
    }

    SplitChoice best_split(const std::vector<std::size_t>& idx, double node_impurity) {
        SplitChoice best;
        const double total = static_cast<double>(idx.size());
        std::vector<std::pair<double, int>> column(idx.size());
        for (std::size_t f : pick_features()) {
            for (std::size_t i = 0; i < idx.size(); ++i)
                column[i] = {x.at(idx[i], f), y[idx[i]]};
            std::sort(column.begin(), column.end());
            if (column.front().first == column.back().first) continue;  // constant feature

            if (random_splitter) {
                const double lo = column.front().first;
                const double hi = column.back().first;
                const double t = lo + rng.uniform() * (hi - lo);
                std::size_t left_n = 0, left_ones = 0, ones = 0;
                for (const auto& [v, label] : column) {
                    ones += static_cast<std::size_t>(label);
                    if (v <= t) {
                        ++left_n;
                        left_ones += static_cast<std::size_t>(label);
                    }
                }
                if (left_n == 0 || left_n == idx.size()) continue;
                const double right_n = total - static_cast<double>(left_n);
                const double il =
                    impurity(static_cast<double>(left_ones) / static_cast<double>(left_n), use_entropy);
                const double ir = impurity(
                    static_cast<double>(ones - left_ones) / right_n, use_entropy);
                const double dec =
                    node_impurity - (static_cast<double>(left_n) * il + right_n * ir) / total;
                if (!best.found || dec > best.decrease) {
                    best = {true, f, t, dec};
                }
                continue;
            }

            std::size_t ones = 0;
            for (const auto& [v, label] : column) ones += static_cast<std::size_t>(label);
            std::size_t left_n = 0, left_ones = 0;
            for (std::size_t i = 0; i + 1 < column.size(); ++i) {
                ++left_n;
                left_ones += static_cast<std::size_t>(column[i].second);
                if (column[i].first == column[i + 1].first) continue;
                double t = column[i].first + 0.5 * (column[i + 1].first - column[i].first);
                if (t >= column[i + 1].first) t = column[i].first;  // midpoint rounded up
                const double right_n = total - static_cast<double>(left_n);
                const double il =
                    impurity(static_cast<double>(left_ones) / static_cast<double>(left_n), use_entropy);
                const double ir = impurity(
                    static_cast<double>(ones - left_ones) / right_n, use_entropy);
                const double dec =
                    node_impurity - (static_cast<double>(left_n) * il + right_n * ir) / total;
                if (!best.found || dec > best.decrease) {
                    best = {true, f, t, dec};
                }
            }
        }
        return best;
    }

    long build(const std::vector<std::size_t>& idx) {
        TreeNode node;
        std::size_t ones = 0;
        for (std::size_t i : idx) ones += static_cast<std::size_t>(y[i]);
        const double p1 = static_cast<double>(ones) / static_cast<double>(idx.size());
        node.score = p1;

        if (ones == 0 || ones == idx.size()) {
            nodes.push_back(node);
            return static_cast<long>(nodes.size() - 1);
        }
        const SplitChoice split = best_split(idx, impurity(p1, use_entropy));
        if (!split.found) {
            nodes.push_back(node);
            return static_cast<long>(nodes.size() - 1);
        }

        std::vector<std::size_t> left_idx, right_idx;
        for (std::size_t i : idx) {
            (x.at(i, split.feature) <= split.threshold ? left_idx : right_idx).push_back(i);
        }
        if (left_idx.empty() || right_idx.empty()) {
            nodes.push_back(node);
            return static_cast<long>(nodes.size() - 1);
        }
        node.feature = static_cast<int>(split.feature);
        node.threshold = split.threshold;
        nodes.push_back(node);
        const long self = static_cast<long>(nodes.size() - 1);
        const long left = build(left_idx);
        const long right = build(right_idx);
        nodes[self].left = left;
        nodes[self].right = right;
        return self;
    }
};

}  // namespace

DTreeModel build_cart_tree(const Matrix& x, const std::vector<int>& y,
                           const std::vector<std::size_t>& sample_indices,
                           const std::string& criterion, const std::string& splitter,
                           std::size_t max_features, Rng& rng) {
    if (criterion != "gini" && criterion != "entropy")
        throw Error(ErrorCode::InvalidArgument, "tree: criterion must be gini or entropy");
    if (splitter != "best" && splitter != "random")
        throw Error(ErrorCode::InvalidArgument, "tree: splitter must be best or random");
    CartBuilder builder{x, y, criterion == "entropy", splitter == "random", max_features, rng, {}};
    builder.build(sample_indices);
    DTreeModel model;
    model.nodes = std::move(builder.nodes);
    model.width = x.cols;
    return model;
}

double DTreeModel::score_row(const double* row) const {
    std::size_t at = 0;
    while (nodes[at].feature >= 0) {
        const TreeNode& node = nodes[at];
        at = static_cast<std::size_t>(row[node.feature] <= node.threshold ? node.left : node.right);
    }
    return nodes[at].score;
}

std::vector<double> DTreeModel::raw_scores(const Matrix& features) const {
    std::vector<double> scores(features.rows);
    for (std::size_t r = 0; r < features.rows; ++r) scores[r] = score_row(features.row(r));
    return scores;
}

std::vector<double> RForestModel::raw_scores(const Matrix& features) const {
    std::vector<double> scores(features.rows, 0.0);
    for (const DTreeModel& tree : trees) {
        for (std::size_t r = 0; r < features.rows; ++r) {
            if (tree.score_row(features.row(r)) >= 0.5) scores[r] += 1.0;
        }
    }
    const double b = static_cast<double>(trees.size());
    for (double& s : scores) s /= b;  // vote fraction
    return scores;
}

std::unique_ptr<Model> train_dtree(const LearnerConfig& config, const WarningDataset& train,
                                   std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::size_t> all(train.rows());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    auto model = std::make_unique<DTreeModel>(
        build_cart_tree(train.features, train.labels, all, config.criterion, config.splitter, 0, rng));
    return model;
}

std::unique_ptr<Model> train_rforest(const LearnerConfig& config, const WarningDataset& train,
                                     std::uint64_t seed) {
    if (config.n_estimators < 1)
        throw Error(ErrorCode::InvalidArgument, "rforest: n_estimators must be >= 1");
    const std::size_t n = train.rows();
    const std::size_t d = train.cols();
    const std::size_t max_features =
        config.all_features ? 0
                            : std::max<std::size_t>(
                                  1, static_cast<std::size_t>(std::lround(std::sqrt(
                                         static_cast<double>(d)))));
    auto model = std::make_unique<RForestModel>();
    model->width = d;
    model->trees.reserve(static_cast<std::size_t>(config.n_estimators));
    for (int t = 0; t < config.n_estimators; ++t) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
        std::vector<std::size_t> sample(n);
        if (config.bootstrap) {
            for (std::size_t i = 0; i < n; ++i) sample[i] = rng.uniform_index(n);
        } else {
            for (std::size_t i = 0; i < n; ++i) sample[i] = i;
        }
        model->trees.push_back(build_cart_tree(train.features, train.labels, sample,
                                               config.criterion, "best", max_features, rng));
    }
    return model;
}

}  // namespace ghost2
