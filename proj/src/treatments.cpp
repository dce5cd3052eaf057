#include "treatments.hpp"

#include <algorithm>

#include "geometry.hpp"

namespace ghost2 {

TreatmentPlan TreatmentPlan::parse(const std::string& text) {
    TreatmentPlan plan;
    std::string steps_part = text;
    const std::size_t plus = text.find('+');
    if (plus != std::string::npos) {
        steps_part = text.substr(0, plus);
        const std::string suffix = text.substr(plus + 1);
        if (suffix != "dodge")
            throw Error(ErrorCode::BadFormat, "plan: unknown suffix '+" + suffix + "'");
        plan.tune = true;
    }
    if (steps_part.empty() || steps_part == "none") return plan;

    std::size_t pos = 0;
    while (pos <= steps_part.size()) {
        const std::size_t next = steps_part.find('>', pos);
        const std::string token =
            steps_part.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
        Treatment t;
        if (token == "smooth") {
            t.kind = TreatmentKind::Smooth;
        } else if (token == "smote") {
            t.kind = TreatmentKind::Smote;
        } else if (token == "ghost") {
            t.kind = TreatmentKind::Ghost;
        } else {
            throw Error(ErrorCode::BadFormat, "plan: unknown step '" + token + "'");
        }
        plan.steps.push_back(t);
        if (next == std::string::npos) break;
        pos = next + 1;
    }
    return plan;
}

std::string TreatmentPlan::format() const {
    std::string out;
    for (std::size_t i = 0; i < steps.size(); ++i) {
        if (i > 0) out += '>';
        switch (steps[i].kind) {
            case TreatmentKind::Smooth: out += "smooth"; break;
            case TreatmentKind::Smote: out += "smote"; break;
            case TreatmentKind::Ghost: out += "ghost"; break;
        }
    }
    if (out.empty()) out = "none";
    if (tune) out += "+dodge";
    return out;
}

bool TreatmentPlan::has(TreatmentKind kind) const {
    for (const Treatment& t : steps)
        if (t.kind == kind) return true;
    return false;
}

WarningDataset smote(const WarningDataset& train, std::size_t k, std::uint64_t seed) {
    if (k < 1) throw Error(ErrorCode::InvalidArgument, "smote: k must be >= 1");
    const std::size_t n = train.rows();
    const std::size_t c1 = train.count_label(1);
    const std::size_t c0 = n - c1;
    if (c0 == c1) return train;  // already balanced

    const int minority = c1 < c0 ? 1 : 0;
    std::vector<std::size_t> minority_idx;
    for (std::size_t i = 0; i < n; ++i)
        if (train.labels[i] == minority) minority_idx.push_back(i);
    if (minority_idx.size() < 2)
        throw Error(ErrorCode::TooFewMinority,
                    "smote: minority class has " + std::to_string(minority_idx.size()) +
                        " members, need >= 2");

    const std::size_t k_eff = std::min(k, minority_idx.size() - 1);
    const KdTree tree = KdTree::build(train.features, 16);
    std::vector<std::vector<std::size_t>> neighbors(minority_idx.size());
    for (std::size_t i = 0; i < minority_idx.size(); ++i)
        neighbors[i] = tree.knn(minority_idx[i], k_eff, &train.labels);

    Rng rng(seed);
    WarningDataset out = train;
    const std::size_t d = train.cols();
    std::vector<double> row(d);
    std::size_t need = (c1 < c0 ? c0 - c1 : c1 - c0);
    while (need-- > 0) {
        const std::size_t pick = rng.uniform_index(minority_idx.size());
        const std::size_t x = minority_idx[pick];
        const std::size_t r = neighbors[pick][rng.uniform_index(neighbors[pick].size())];
        const double t = rng.uniform_open();
        for (std::size_t j = 0; j < d; ++j) {
            const double xv = train.features.at(x, j);
            row[j] = xv + t * (train.features.at(r, j) - xv);
        }
        out.features.push_row(row.data());
        out.labels.push_back(minority);
        out.timestamps.push_back(train.timestamps[x]);
    }
    return out;
}

std::pair<WarningDataset, std::size_t> smooth(const WarningDataset& train, std::uint64_t seed) {
    const std::size_t n = train.rows();
    if (n < 2) throw Error(ErrorCode::TooFewRows, "smooth: need at least 2 rows");

    const std::size_t keep = ceil_sqrt(n);
    Rng rng(seed);
    std::vector<std::size_t> sampled = rng.sample_without_replacement(n, keep);
    std::sort(sampled.begin(), sampled.end());
    WarningDataset out = train.subset(sampled);

    const std::size_t leaf_capacity = ceil_fourth_root(n);
    const KdTree tree = KdTree::build(out.features, leaf_capacity);
    for (const std::vector<std::size_t>& leaf : tree.leaves()) {
        std::size_t ones = 0;
        for (std::size_t i : leaf) ones += static_cast<std::size_t>(out.labels[i]);
        const int mode = 2 * ones > leaf.size() ? 1 : 0;  // tie -> 0
        for (std::size_t i : leaf) out.labels[i] = mode;
    }
    return {std::move(out), keep};
}

std::size_t ghost_box_count(std::size_t minority_count, std::size_t total) {
    // floor(log2(total / minority_count)) in integer arithmetic
    std::size_t b = 0;
    while (b < 62 && (minority_count << (b + 1)) <= total) ++b;
    return b;
}

WarningDataset ghost(const WarningDataset& train, double box_step, std::size_t points_per_box,
                     std::uint64_t seed) {
    if (box_step <= 0.0) throw Error(ErrorCode::InvalidArgument, "ghost: box_step must be > 0");
    const std::size_t n = train.rows();
    const std::size_t c1 = train.count_label(1);
    const std::size_t c0 = n - c1;
    if (c0 == 0 || c1 == 0)
        throw Error(ErrorCode::SingleClass, "ghost: both classes must be present");

    const int minority = c1 <= c0 ? 1 : 0;
    const std::size_t c_min = std::min(c0, c1);
    const std::size_t c_maj = n - c_min;
    const std::size_t boxes = ghost_box_count(c_min, n);
    if (boxes == 0) return train;

    const std::size_t d = train.cols();
    std::size_t ppb = points_per_box;
    if (ppb == 0) {
        ppb = 2 * std::min<std::size_t>(d, 8);
        // raise until the former minority strictly outnumbers the former majority
        while (c_min * (1 + boxes * ppb) <= c_maj) ++ppb;
    }

    // per-dimension box step from the data's own range
    std::vector<double> step(d);
    for (std::size_t j = 0; j < d; ++j) {
        double lo = train.features.at(0, j), hi = lo;
        for (std::size_t i = 1; i < n; ++i) {
            lo = std::min(lo, train.features.at(i, j));
            hi = std::max(hi, train.features.at(i, j));
        }
        step[j] = box_step * (hi - lo);
    }

    Rng rng(seed);
    WarningDataset out = train;
    std::vector<double> row(d);
    for (std::size_t i = 0; i < n; ++i) {
        if (train.labels[i] != minority) continue;
        for (std::size_t box = 1; box <= boxes; ++box) {
            for (std::size_t p = 0; p < ppb; ++p) {
                const std::size_t face = rng.uniform_index(d);
                const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
                for (std::size_t j = 0; j < d; ++j) {
                    const double center = train.features.at(i, j);
                    const double radius = static_cast<double>(box) * step[j];
                    if (j == face) {
                        row[j] = center + sign * radius;
                    } else {
                        row[j] = center + (2.0 * rng.uniform() - 1.0) * radius;
                    }
                }
                out.features.push_row(row.data());
                out.labels.push_back(minority);
                out.timestamps.push_back(train.timestamps[i]);
            }
        }
    }
    return out;
}

PlanResult apply_plan(const WarningDataset& train, const TreatmentPlan& plan, std::uint64_t seed,
                      bool lenient) {
    PlanResult result;
    result.data = train;
    result.labels_used = train.rows();
    for (std::size_t i = 0; i < plan.steps.size(); ++i) {
        const Treatment& step = plan.steps[i];
        const std::uint64_t step_seed = derive_seed(seed, i);
        try {
            switch (step.kind) {
                case TreatmentKind::Smooth: {
                    auto [data, used] = smooth(result.data, step_seed);
                    result.data = std::move(data);
                    result.labels_used = used;
                    break;
                }
                case TreatmentKind::Smote:
                    result.data = smote(result.data, step.smote_k, step_seed);
                    break;
                case TreatmentKind::Ghost:
                    result.data = ghost(result.data, step.ghost_box_step,
                                        step.ghost_points_per_box, step_seed);
                    break;
            }
        } catch (const Error& e) {
            if (!lenient) throw;
            result.warnings.push_back("step " + std::to_string(i) + " skipped: " + e.what());
        }
    }
    return result;
}

}  // namespace ghost2
