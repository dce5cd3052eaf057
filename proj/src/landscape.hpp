#pragma once

#include <cstdint>
#include <vector>

#include "dataset.hpp"
#include "learners.hpp"

namespace ghost2 {

// A G x G slice of the loss surface along two random directions in weight
// space, each layer's block rescaled to the norm of the corresponding
// weight block. The lattice spans [-alpha, alpha]^2 and contains (0,0),
// where the loss equals the unperturbed model's loss.
struct LandscapeGrid {
    std::size_t resolution = 0;  // G, odd
    double alpha = 1.0;
    std::vector<double> dir1;
    std::vector<double> dir2;
    Matrix loss;  // G x G
    double center_loss = 0.0;

    double coord(std::size_t i) const {
        return -alpha + 2.0 * alpha * static_cast<double>(i) /
                            static_cast<double>(resolution - 1);
    }
};

LandscapeGrid loss_surface(const Model& model, const WarningDataset& data, std::size_t grid = 25,
                           double alpha = 1.0, std::uint64_t seed = 0);

// Mean absolute deviation of each interior cell from its 4-neighborhood
// mean, computed on the range-normalized grid. A tilted plane has roughness
// 0; a checkerboard of {0,1} has 1.
double roughness(const LandscapeGrid& grid);

// smoothness = 1 / (roughness + 1e-12)
double smoothness(const LandscapeGrid& grid);

// 100 * (S_after - S_before) / S_before
double smoothness_change(const LandscapeGrid& before, const LandscapeGrid& after);

struct StabilityResult {
    std::size_t repeats = 0;
    std::size_t clusters = 0;                      // k, from one clustering pass
    std::vector<std::vector<double>> leaf_medians;  // collected across repeats
    std::vector<double> per_cluster_median_deviation;
    double median_deviation = 0.0;
    double dataset_l1 = 0.0;
    double headline_percent = 0.0;  // median deviation as % of dataset L1 norm
};

// Repeats the label-engineering clustering, collects the leaf medians of
// every run, k-means them, and reports how far medians spread within their
// clusters relative to the dataset's L1 norm.
StabilityResult smooth_stability(const WarningDataset& train, std::size_t repeats = 20,
                                 std::uint64_t seed = 0);

// Lloyd k-means with k-means++ seeding; returns cluster assignment per row.
std::vector<std::size_t> kmeans_assign(const Matrix& points, std::size_t k, std::uint64_t seed,
                                       std::size_t max_iterations = 50);

}  // namespace ghost2
