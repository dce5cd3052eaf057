#include "landscape.hpp"

#include <algorithm>
#include <cmath>

#include "geometry.hpp"

namespace ghost2 {

LandscapeGrid loss_surface(const Model& model, const WarningDataset& data, std::size_t grid,
                           double alpha, std::uint64_t seed) {
    const auto* net = dynamic_cast<const FfnetModel*>(&model);
    if (!net)
        throw Error(ErrorCode::UnsupportedModel,
                    "loss_surface: only feedforward models have a weight-space landscape");
    if (data.rows() == 0)
        throw Error(ErrorCode::EmptyDataset, "loss_surface: empty dataset");
    if (grid < 3) throw Error(ErrorCode::GridTooSmall, "loss_surface: grid must be >= 3");
    if (grid % 2 == 0)
        throw Error(ErrorCode::InvalidArgument,
                    "loss_surface: grid must be odd so the lattice contains the center");
    if (alpha < 0.0) throw Error(ErrorCode::InvalidArgument, "loss_surface: alpha must be >= 0");

    LandscapeGrid out;
    out.resolution = grid;
    out.alpha = alpha;

    // Two Gaussian directions, rescaled per layer so each block's norm
    // matches the weight block it perturbs.
    Rng rng(seed);
    const std::size_t p = net->params.size();
    out.dir1.resize(p);
    out.dir2.resize(p);
    for (std::size_t i = 0; i < p; ++i) out.dir1[i] = rng.normal();
    for (std::size_t i = 0; i < p; ++i) out.dir2[i] = rng.normal();
    for (auto [begin, end] : net->layer_param_ranges()) {
        for (std::vector<double>* dir : {&out.dir1, &out.dir2}) {
            double dn = 0.0, wn = 0.0;
            for (std::size_t i = begin; i < end; ++i) {
                dn += (*dir)[i] * (*dir)[i];
                wn += net->params[i] * net->params[i];
            }
            const double scale = dn > 0.0 ? std::sqrt(wn) / std::sqrt(dn) : 0.0;
            for (std::size_t i = begin; i < end; ++i) (*dir)[i] *= scale;
        }
    }

    out.center_loss = net->loss_at(net->params, data.features, data.labels);
    out.loss = Matrix(grid, grid);
    std::vector<double> perturbed(p);
    for (std::size_t i = 0; i < grid; ++i) {
        const double a = out.coord(i);
        for (std::size_t j = 0; j < grid; ++j) {
            const double b = out.coord(j);
            for (std::size_t t = 0; t < p; ++t)
                perturbed[t] = net->params[t] + a * out.dir1[t] + b * out.dir2[t];
            out.loss.at(i, j) = net->loss_at(perturbed, data.features, data.labels);
        }
    }
    return out;
}

double roughness(const LandscapeGrid& grid) {
    const std::size_t g = grid.resolution;
    if (g < 3) throw Error(ErrorCode::GridTooSmall, "roughness: grid must be >= 3");
    // Deviations are taken on the range-normalized grid: bumpiness is a
    // property of the surface's shape, not of the loss amplitude. Converged
    // models span far larger loss ranges over the same perturbations, which
    // would otherwise dominate the comparison.
    double lo = grid.loss.vals[0], hi = lo;
    for (double v : grid.loss.vals) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (hi == lo) return 0.0;
    const double range = hi - lo;
    double total = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 1; i + 1 < g; ++i) {
        for (std::size_t j = 1; j + 1 < g; ++j) {
            const double neighborhood = 0.25 * (grid.loss.at(i - 1, j) + grid.loss.at(i + 1, j) +
                                                grid.loss.at(i, j - 1) + grid.loss.at(i, j + 1));
            total += std::abs(grid.loss.at(i, j) - neighborhood) / range;
            ++count;
        }
    }
    return total / static_cast<double>(count);
}

double smoothness(const LandscapeGrid& grid) { return 1.0 / (roughness(grid) + 1e-12); }

double smoothness_change(const LandscapeGrid& before, const LandscapeGrid& after) {
    if (before.resolution != after.resolution)
        throw Error(ErrorCode::InvalidArgument, "smoothness_change: grids must share a resolution");
    const double s_before = smoothness(before);
    const double s_after = smoothness(after);
    return 100.0 * (s_after - s_before) / s_before;
}

namespace {

std::vector<double> column_median(const Matrix& points, const std::vector<std::size_t>& members) {
    std::vector<double> median(points.cols);
    std::vector<double> column(members.size());
    for (std::size_t c = 0; c < points.cols; ++c) {
        for (std::size_t i = 0; i < members.size(); ++i) column[i] = points.at(members[i], c);
        std::sort(column.begin(), column.end());
        const std::size_t k = column.size();
        median[c] = k % 2 == 1 ? column[k / 2] : 0.5 * (column[k / 2 - 1] + column[k / 2]);
    }
    return median;
}

double l1_distance(const double* a, const double* b, std::size_t d) {
    double s = 0.0;
    for (std::size_t i = 0; i < d; ++i) s += std::abs(a[i] - b[i]);
    return s;
}

// One label-engineering clustering pass: sample ceil(sqrt(n)) rows, KD-tree
// with leaf capacity ceil(n^(1/4)), return the per-leaf coordinate medians.
std::vector<std::vector<double>> smooth_leaf_medians(const WarningDataset& train,
                                                     std::uint64_t seed) {
    const std::size_t n = train.rows();
    const std::size_t keep = ceil_sqrt(n);
    Rng rng(seed);
    std::vector<std::size_t> sampled = rng.sample_without_replacement(n, keep);
    std::sort(sampled.begin(), sampled.end());
    const WarningDataset sub = train.subset(sampled);
    const KdTree tree = KdTree::build(sub.features, ceil_fourth_root(n));
    std::vector<std::vector<double>> medians;
    for (const std::vector<std::size_t>& leaf : tree.leaves())
        medians.push_back(column_median(sub.features, leaf));
    return medians;
}

}  // namespace

std::vector<std::size_t> kmeans_assign(const Matrix& points, std::size_t k, std::uint64_t seed,
                                       std::size_t max_iterations) {
    const std::size_t n = points.rows;
    const std::size_t d = points.cols;
    if (k == 0 || n == 0) throw Error(ErrorCode::InvalidArgument, "kmeans: empty input");
    k = std::min(k, n);

    Rng rng(seed);
    Matrix centers(k, d);
    // k-means++ seeding
    std::vector<double> dist2(n);
    std::size_t first = rng.uniform_index(n);
    std::copy(points.row(first), points.row(first) + d, centers.row(0));
    for (std::size_t c = 1; c < k; ++c) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double best = squared_distance(points.row(i), centers.row(0), d);
            for (std::size_t j = 1; j < c; ++j)
                best = std::min(best, squared_distance(points.row(i), centers.row(j), d));
            dist2[i] = best;
            total += best;
        }
        std::size_t pick = 0;
        if (total > 0.0) {
            double target = rng.uniform() * total;
            for (std::size_t i = 0; i < n; ++i) {
                target -= dist2[i];
                if (target <= 0.0) {
                    pick = i;
                    break;
                }
            }
        } else {
            pick = rng.uniform_index(n);
        }
        std::copy(points.row(pick), points.row(pick) + d, centers.row(c));
    }

    std::vector<std::size_t> assign(n, 0);
    for (std::size_t iter = 0; iter < max_iterations; ++iter) {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t best = 0;
            double best_d = squared_distance(points.row(i), centers.row(0), d);
            for (std::size_t c = 1; c < k; ++c) {
                const double dd = squared_distance(points.row(i), centers.row(c), d);
                if (dd < best_d) {
                    best_d = dd;
                    best = c;
                }
            }
            if (assign[i] != best) {
                assign[i] = best;
                changed = true;
            }
        }
        if (!changed && iter > 0) break;

        Matrix sums(k, d);
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            ++counts[assign[i]];
            for (std::size_t c = 0; c < d; ++c) sums.at(assign[i], c) += points.at(i, c);
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] == 0) {
                // reseed an empty cluster at the point farthest from its center
                std::size_t far = 0;
                double far_d = -1.0;
                for (std::size_t i = 0; i < n; ++i) {
                    const double dd =
                        squared_distance(points.row(i), centers.row(assign[i]), d);
                    if (dd > far_d) {
                        far_d = dd;
                        far = i;
                    }
                }
                std::copy(points.row(far), points.row(far) + d, centers.row(c));
            } else {
                for (std::size_t j = 0; j < d; ++j)
                    centers.at(c, j) = sums.at(c, j) / static_cast<double>(counts[c]);
            }
        }
    }
    return assign;
}

StabilityResult smooth_stability(const WarningDataset& train, std::size_t repeats,
                                 std::uint64_t seed) {
    if (repeats < 1) throw Error(ErrorCode::InvalidArgument, "smooth_stability: repeats must be >= 1");
    StabilityResult result;
    result.repeats = repeats;

    result.clusters = smooth_leaf_medians(train, derive_seed(seed, "stability-k")).size();
    if (result.clusters < 2)
        throw Error(ErrorCode::TooFewLeaves,
                    "smooth_stability: clustering produced fewer than 2 leaves");

    for (std::size_t rep = 0; rep < repeats; ++rep) {
        for (std::vector<double>& m :
             smooth_leaf_medians(train, derive_seed(seed, "stability-rep", rep)))
            result.leaf_medians.push_back(std::move(m));
    }

    const std::size_t d = train.cols();
    Matrix points(0, d);
    for (const std::vector<double>& m : result.leaf_medians) points.push_row(m.data());

    const std::vector<std::size_t> assign =
        kmeans_assign(points, result.clusters, derive_seed(seed, "stability-kmeans"));

    std::vector<double> all_deviations;
    result.per_cluster_median_deviation.assign(result.clusters, 0.0);
    for (std::size_t c = 0; c < result.clusters; ++c) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < points.rows; ++i)
            if (assign[i] == c) members.push_back(i);
        if (members.empty()) continue;
        const std::vector<double> center = column_median(points, members);
        std::vector<double> deviations;
        for (std::size_t i : members)
            deviations.push_back(l1_distance(points.row(i), center.data(), d));
        std::sort(deviations.begin(), deviations.end());
        result.per_cluster_median_deviation[c] = deviations[(deviations.size() - 1) / 2];
        all_deviations.insert(all_deviations.end(), deviations.begin(), deviations.end());
    }

    std::sort(all_deviations.begin(), all_deviations.end());
    result.median_deviation = all_deviations[(all_deviations.size() - 1) / 2];

    result.dataset_l1 = 0.0;
    for (double v : train.features.vals) result.dataset_l1 += std::abs(v);
    result.headline_percent =
        result.dataset_l1 > 0.0 ? 100.0 * result.median_deviation / result.dataset_l1 : 0.0;
    return result;
}

}  // namespace ghost2
