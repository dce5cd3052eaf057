#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dataset.hpp"

namespace ghost2 {

enum class TreatmentKind { Smooth, Smote, Ghost };

struct Treatment {
    TreatmentKind kind = TreatmentKind::Smote;
    std::size_t smote_k = 5;
    double ghost_box_step = 0.01;
    std::size_t ghost_points_per_box = 0;  // 0 = auto (see ghost())
};

// Ordered treatment steps plus the tuning directive. Text form:
// "smooth>smote>ghost>ghost>smote+dodge"; "none" is the identity plan.
struct TreatmentPlan {
    std::vector<Treatment> steps;
    bool tune = false;

    static TreatmentPlan parse(const std::string& text);
    std::string format() const;
    bool has(TreatmentKind kind) const;
};

struct PlanResult {
    WarningDataset data;
    std::size_t labels_used = 0;
    std::vector<std::string> warnings;
};

// Oversample the minority class until class counts are equal. Each synthetic
// row lies strictly between a minority sample and one of its k same-label
// nearest neighbors (k degraded to the available count). Balanced input is
// returned unchanged.
WarningDataset smote(const WarningDataset& train, std::size_t k, std::uint64_t seed);

// Keep ceil(sqrt(n)) rows at random, cluster them with a KD-tree of leaf
// capacity ceil(n^(1/4)), and overwrite each leaf's labels with the leaf
// mode (ties resolve to label 0). Returns the relabelled subset and the
// number of labels consulted.
std::pair<WarningDataset, std::size_t> smooth(const WarningDataset& train, std::uint64_t seed);

// Surround every minority sample with B = floor(log2(1/minority_fraction))
// concentric boxes of synthetic minority points. points_per_box = 0 picks
// 2*min(d,8), raised when needed so the former minority ends up strictly
// outnumbering the former majority.
WarningDataset ghost(const WarningDataset& train, double box_step, std::size_t points_per_box,
                     std::uint64_t seed);

std::size_t ghost_box_count(std::size_t minority_count, std::size_t total);

PlanResult apply_plan(const WarningDataset& train, const TreatmentPlan& plan, std::uint64_t seed,
                      bool lenient = false);

}  // namespace ghost2
