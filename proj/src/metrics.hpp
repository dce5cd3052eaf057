#pragma once

#include <vector>

#include "common.hpp"

namespace ghost2 {

struct ConfusionCounts {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;
    std::size_t fn = 0;

    std::size_t total() const { return tp + fp + tn + fn; }
};

// Undefined ratios (zero denominator) come back as 0 with the flag set.
struct RatioMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double false_alarm = 0.0;
    bool precision_undefined = false;
    bool recall_undefined = false;
    bool false_alarm_undefined = false;
};

struct AucResult {
    double value = 0.5;
    bool undefined = false;
};

ConfusionCounts confusion(const std::vector<int>& y_true, const std::vector<int>& y_pred);
RatioMetrics metrics(const ConfusionCounts& counts);

// Rank-based (Mann-Whitney) AUC; ties contribute 1/2. Returns 0.5 with the
// undefined flag when one class is absent.
AucResult auc(const std::vector<int>& y_true, const std::vector<double>& scores);

}  // namespace ghost2
