#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "common.hpp"

namespace ghost2 {

// One project's warnings: a numeric feature matrix with binary labels and
// per-row timestamps. Immutable by convention after construction; all
// pipeline stages produce fresh copies.
struct WarningDataset {
    std::string project;
    Matrix features;                         // n x d
    std::vector<std::string> feature_names;  // d
    std::vector<int> labels;                 // n, values in {0,1}
    std::vector<std::int64_t> timestamps;    // n, epoch seconds

    std::size_t rows() const { return features.rows; }
    std::size_t cols() const { return features.cols; }

    std::size_t count_label(int label) const;
    void validate() const;
    std::uint64_t digest() const;
    WarningDataset subset(const std::vector<std::size_t>& row_indices) const;
};

struct TrainTestSplit {
    WarningDataset train;
    WarningDataset test;
    double train_fraction = 0.8;
};

// Per-feature min/max fitted on training rows only.
struct NormParams {
    std::vector<double> mins;
    std::vector<double> maxs;

    // Train rows map into [0,1]; test rows may fall outside and are clamped
    // to [-0.5, 1.5]. Constant features map to 0.5.
    void apply(Matrix& m, bool clamp) const;
};

struct CsvSchema {
    std::string label_column = "label";
    std::string timestamp_column = "timestamp";
    std::string project_column = "project";
};

WarningDataset load_csv(const std::string& path, const CsvSchema& schema = {});
void write_csv(const WarningDataset& data, const std::string& path);

TrainTestSplit time_split(const WarningDataset& data, double train_fraction = 0.8);
std::pair<TrainTestSplit, NormParams> normalize(const TrainTestSplit& split);

}  // namespace ghost2
