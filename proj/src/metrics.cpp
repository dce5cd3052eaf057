#include "metrics.hpp"

#include <algorithm>
#include <numeric>

namespace ghost2 {

ConfusionCounts confusion(const std::vector<int>& y_true, const std::vector<int>& y_pred) {
    if (y_true.size() != y_pred.size() || y_true.empty())
        throw Error(ErrorCode::LengthMismatch, "confusion: label vectors must have equal length >= 1");
    ConfusionCounts c;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        if (y_true[i] == 1) {
            (y_pred[i] == 1 ? c.tp : c.fn)++;
        } else {
            (y_pred[i] == 1 ? c.fp : c.tn)++;
        }
    }
    return c;
}

RatioMetrics metrics(const ConfusionCounts& c) {
    RatioMetrics m;
    if (c.tp + c.fp > 0) {
        m.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
    } else {
        m.precision_undefined = true;
    }
    if (c.tp + c.fn > 0) {
        m.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    } else {
        m.recall_undefined = true;
    }
    if (c.fp + c.tn > 0) {
        m.false_alarm = static_cast<double>(c.fp) / static_cast<double>(c.fp + c.tn);
    } else {
        m.false_alarm_undefined = true;
    }
    return m;
}

AucResult auc(const std::vector<int>& y_true, const std::vector<double>& scores) {
    if (y_true.size() != scores.size())
        throw Error(ErrorCode::LengthMismatch, "auc: labels and scores must have equal length");
    const std::size_t n = y_true.size();
    const std::size_t pos = static_cast<std::size_t>(std::count(y_true.begin(), y_true.end(), 1));
    const std::size_t neg = n - pos;
    if (pos == 0 || neg == 0) return {0.5, true};

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // rank sum of positives, average ranks across tie groups
    double rank_sum_pos = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
        const double avg_rank = 0.5 * static_cast<double>(i + 1 + j + 1);
        for (std::size_t t = i; t <= j; ++t) {
            if (y_true[order[t]] == 1) rank_sum_pos += avg_rank;
        }
        i = j + 1;
    }
    const double n_pos = static_cast<double>(pos);
    const double n_neg = static_cast<double>(neg);
    const double value = (rank_sum_pos - n_pos * (n_pos + 1.0) / 2.0) / (n_pos * n_neg);
    return {value, false};
}

}  // namespace ghost2
