#include "evaluation.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <sstream>

namespace ghost2 {

namespace {

const std::vector<TreatmentId> kAllIds = {TreatmentId::A1, TreatmentId::A2, TreatmentId::A3,
                                          TreatmentId::A4, TreatmentId::A5, TreatmentId::A6,
                                          TreatmentId::A7, TreatmentId::B1, TreatmentId::C1,
                                          TreatmentId::D1};

std::string format_number(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

}  // namespace

const char* treatment_id_name(TreatmentId id) {
    switch (id) {
        case TreatmentId::A1: return "A1";
        case TreatmentId::A2: return "A2";
        case TreatmentId::A3: return "A3";
        case TreatmentId::A4: return "A4";
        case TreatmentId::A5: return "A5";
        case TreatmentId::A6: return "A6";
        case TreatmentId::A7: return "A7";
        case TreatmentId::B1: return "B1";
        case TreatmentId::C1: return "C1";
        case TreatmentId::D1: return "D1";
    }
    return "?";
}

TreatmentId parse_treatment_id(const std::string& name) {
    for (TreatmentId id : kAllIds) {
        if (name == treatment_id_name(id)) return id;
    }
    throw Error(ErrorCode::InvalidArgument, "unknown treatment id '" + name + "'");
}

std::vector<TreatmentId> all_treatment_ids() { return kAllIds; }

Recipe recipe_for(TreatmentId id) {
    // The A-series keeps the canonical step order, skipping disabled stages.
    Recipe r;
    switch (id) {
        case TreatmentId::A1:
            r = {TreatmentPlan::parse("smooth>smote>ghost>ghost>smote+dodge"),
                 LearnerFamily::FeedForward, 10};
            break;
        case TreatmentId::A2:  // no instance engineering
            r = {TreatmentPlan::parse("smooth>ghost>ghost+dodge"), LearnerFamily::FeedForward, 10};
            break;
        case TreatmentId::A3:  // no parameter engineering
            r = {TreatmentPlan::parse("smooth>smote>ghost>ghost>smote"),
                 LearnerFamily::FeedForward, 10};
            break;
        case TreatmentId::A4:  // no boundary engineering
            r = {TreatmentPlan::parse("smooth>smote>smote+dodge"), LearnerFamily::FeedForward, 10};
            break;
        case TreatmentId::A5:  // no label engineering
            r = {TreatmentPlan::parse("smote>ghost>ghost>smote+dodge"),
                 LearnerFamily::FeedForward, 100};
            break;
        case TreatmentId::A6:  // no label engineering, traditional learners
            r = {TreatmentPlan::parse("smote>ghost>ghost>smote+dodge"),
                 LearnerFamily::Traditional, 100};
            break;
        case TreatmentId::A7:  // traditional learners
            r = {TreatmentPlan::parse("smooth>smote>ghost>ghost>smote+dodge"),
                 LearnerFamily::Traditional, 10};
            break;
        case TreatmentId::B1:  // no boundary engineering, traditional learners
            r = {TreatmentPlan::parse("smooth>smote>smote+dodge"), LearnerFamily::Traditional, 10};
            break;
        case TreatmentId::C1:  // no boundary or label engineering, traditional learners
            r = {TreatmentPlan::parse("smote>smote+dodge"), LearnerFamily::Traditional, 100};
            break;
        case TreatmentId::D1:  // untreated, untuned baseline from the earlier studies
            r = {TreatmentPlan::parse("none"), LearnerFamily::Traditional, 100};
            r.has_fixed_config = true;
            r.fixed_config = LearnerConfig::defaults(LearnerKind::Svm);
            r.fixed_config.kernel = "rbf";  // the radial-basis SVM of the prior work
            break;
    }
    return r;
}

namespace {

const std::vector<LearnerKind> kTraditionalKinds = {LearnerKind::Logit, LearnerKind::DTree,
                                                    LearnerKind::RForest, LearnerKind::Svm};

struct Selected {
    LearnerConfig config;
    double inner_objective = -2.0;
};

void append_dodge_log(std::vector<std::string>& out, const DodgeResult& result) {
    for (std::size_t i = 0; i < result.log.size(); ++i) {
        out.push_back(std::to_string(i) + "," + result.log[i].config.describe() + "," +
                      format_number(result.log[i].objective));
    }
}

Selected select_traditional(const WarningDataset& treated, bool tune, const RunParams& params,
                            std::uint64_t seed, std::vector<std::string>* tuning_log) {
    Selected best;
    bool first = true;
    if (tune) {
        for (std::size_t i = 0; i < kTraditionalKinds.size(); ++i) {
            const DodgeResult r = dodge(kTraditionalKinds[i], treated, params.dodge,
                                        derive_seed(seed, "dodge-kind", i), nullptr, params.train);
            if (tuning_log) append_dodge_log(*tuning_log, r);
            if (first || r.best_objective > best.inner_objective) {
                best = {r.best, r.best_objective};
                first = false;
            }
        }
    } else {
        const InnerSplit inner = make_inner_split(treated, derive_seed(seed, "select-split"));
        for (std::size_t i = 0; i < kTraditionalKinds.size(); ++i) {
            const LearnerConfig config = LearnerConfig::defaults(kTraditionalKinds[i]);
            double objective = 0.0;
            if (!inner.degenerate) {
                const auto model = train_model(config, inner.fit,
                                               derive_seed(seed, "select-fit", i), params.train);
                objective = recall_minus_false_alarm(*model, inner.val);
            }
            if (first || objective > best.inner_objective) {
                best = {config, objective};
                first = false;
            }
        }
    }
    return best;
}

}  // namespace

EvalReport run_treatment(const TrainTestSplit& split, TreatmentId id, std::uint64_t seed,
                         const RunParams& params) {
    return run_recipe(split, recipe_for(id), treatment_id_name(id), seed, params);
}

EvalReport run_plan(const TrainTestSplit& split, const TreatmentPlan& plan, LearnerFamily family,
                    const std::string& label, std::uint64_t seed, const RunParams& params) {
    Recipe recipe;
    recipe.plan = plan;
    recipe.family = family;
    return run_recipe(split, recipe, label, seed, params);
}

EvalReport run_recipe(const TrainTestSplit& split, const Recipe& recipe, const std::string& label,
                      std::uint64_t seed, const RunParams& params) {
    const auto start = std::chrono::steady_clock::now();
    EvalReport report;
    report.treatment = label;
    report.project = split.train.project;
    report.seed = seed;

    auto [norm_split, norm_params] = normalize(split);

    const PlanResult plan_result =
        apply_plan(norm_split.train, recipe.plan, derive_seed(seed, "plan"), params.lenient);
    const WarningDataset& treated = plan_result.data;
    report.labels_used = plan_result.labels_used;

    LearnerConfig config;
    if (recipe.has_fixed_config) {
        config = recipe.fixed_config;
    } else if (recipe.family == LearnerFamily::FeedForward) {
        if (recipe.plan.tune) {
            const DodgeResult tuned = dodge(LearnerKind::FeedForward, treated, params.dodge,
                                            derive_seed(seed, "dodge"), nullptr, params.train);
            append_dodge_log(report.tuning_log, tuned);
            config = tuned.best;
        } else {
            config = LearnerConfig::defaults(LearnerKind::FeedForward);
        }
    } else {
        config =
            select_traditional(treated, recipe.plan.tune, params, seed, &report.tuning_log).config;
    }

    const auto model = train_model(config, treated, derive_seed(seed, "final-fit"), params.train);
    const Prediction pred = predict(*model, norm_split.test.features);

    const RatioMetrics m = metrics(confusion(norm_split.test.labels, pred.labels));
    report.precision = m.precision;
    report.precision_undefined = m.precision_undefined;
    report.recall = m.recall;
    report.recall_undefined = m.recall_undefined;
    report.false_alarm = m.false_alarm;
    report.false_alarm_undefined = m.false_alarm_undefined;

    AucResult a;
    if (params.auc_mode == AucMode::Scores) {
        a = auc(norm_split.test.labels, pred.scores);
    } else {
        std::vector<double> hard(pred.labels.begin(), pred.labels.end());
        a = auc(norm_split.test.labels, hard);
    }
    report.auc = a.value;
    report.auc_undefined = a.undefined;

    report.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

double median_of(std::vector<double> values, MedianMode mode) {
    if (values.empty()) throw Error(ErrorCode::InvalidArgument, "median of empty set");
    std::sort(values.begin(), values.end());
    const std::size_t k = values.size();
    if (mode == MedianMode::MeanOfMiddles && k % 2 == 0) {
        return 0.5 * (values[k / 2 - 1] + values[k / 2]);
    }
    return values[(k - 1) / 2];  // lower middle
}

const std::vector<std::string>& AblationTable::metric_names() {
    static const std::vector<std::string> names = {"precision", "auc", "false_alarm", "recall"};
    return names;
}

AblationTable build_ablation_table(const std::vector<EvalReport>& reports,
                                   const std::vector<std::string>& projects,
                                   const std::vector<TreatmentId>& treatments, MedianMode mode) {
    AblationTable table;
    table.projects = projects;
    table.treatments = treatments;

    auto metric_value = [](const EvalReport& r, std::size_t metric) {
        switch (metric) {
            case 0: return r.precision;
            case 1: return r.auc;
            case 2: return r.false_alarm;
            default: return r.recall;
        }
    };

    table.cells.assign(4, {});
    table.medians.assign(4, {});
    table.better_than_a1.assign(4, {});
    for (std::size_t metric = 0; metric < 4; ++metric) {
        table.cells[metric].assign(treatments.size(),
                                   std::vector<AblationCell>(projects.size()));
        for (std::size_t t = 0; t < treatments.size(); ++t) {
            for (std::size_t p = 0; p < projects.size(); ++p) {
                std::vector<double> values;
                for (const EvalReport& r : reports) {
                    if (r.ok() && r.treatment == treatment_id_name(treatments[t]) &&
                        r.project == projects[p]) {
                        values.push_back(metric_value(r, metric));
                    }
                }
                if (!values.empty()) {
                    table.cells[metric][t][p] = {median_of(values, mode), true};
                }
            }
        }
    }

    long a1_row = -1;
    for (std::size_t t = 0; t < treatments.size(); ++t)
        if (treatments[t] == TreatmentId::A1) a1_row = static_cast<long>(t);

    for (std::size_t metric = 0; metric < 4; ++metric) {
        const bool lower_is_better = metric == 2;  // false alarm
        table.medians[metric].assign(treatments.size(), 0.0);
        table.better_than_a1[metric].assign(treatments.size(), 0);
        for (std::size_t t = 0; t < treatments.size(); ++t) {
            std::vector<double> row;
            for (const AblationCell& c : table.cells[metric][t])
                if (c.valid) row.push_back(c.value);
            table.medians[metric][t] = row.empty() ? 0.0 : median_of(row, mode);

            if (a1_row < 0 || static_cast<long>(t) == a1_row) {
                table.better_than_a1[metric][t] = static_cast<long>(t) == a1_row ? -1 : 0;
                continue;
            }
            int count = 0;
            for (std::size_t p = 0; p < projects.size(); ++p) {
                const AblationCell& mine = table.cells[metric][t][p];
                const AblationCell& a1 = table.cells[metric][static_cast<std::size_t>(a1_row)][p];
                if (!mine.valid || !a1.valid) continue;
                const bool better =
                    lower_is_better ? mine.value < a1.value : mine.value > a1.value;
                if (better) ++count;
            }
            table.better_than_a1[metric][t] = count;
        }
    }
    return table;
}

std::string render_ablation_table(const AblationTable& table) {
    std::ostringstream out;
    auto fmt = [](double v) {
        std::ostringstream s;
        s.precision(2);
        s << std::fixed << v;
        return s.str();
    };

    const std::vector<std::string> block_titles = {
        "PRECISION (better results are larger)", "AUC (better results are larger)",
        "FALSE ALARM RATE (better results are smaller)", "RECALL (better results are larger)"};

    std::size_t name_width = 9;
    for (const std::string& p : table.projects) name_width = std::max(name_width, p.size() + 2);

    for (std::size_t metric = 0; metric < 4; ++metric) {
        out << "== " << block_titles[metric] << " ==\n";
        out << "treatment";
        for (const std::string& p : table.projects)
            out << "," << p;
        out << ",median,#better_than_A1\n";
        for (std::size_t t = 0; t < table.treatments.size(); ++t) {
            out << treatment_id_name(table.treatments[t]);
            for (std::size_t p = 0; p < table.projects.size(); ++p) {
                const AblationCell& c = table.cells[metric][t][p];
                out << "," << (c.valid ? fmt(c.value) : std::string("error"));
            }
            out << "," << fmt(table.medians[metric][t]);
            const int better = table.better_than_a1[metric][t];
            out << "," << (better < 0 ? std::string("-") : std::to_string(better)) << "\n";
        }
        out << "\n";
    }
    return out.str();
}

std::string results_csv_header() {
    return "project,treatment,seed,precision,auc,false_alarm,recall,labels_used,status";
}

std::string results_csv_row(const EvalReport& r) {
    std::string status = r.status;
    for (char& c : status) {
        if (c == ',' || c == '\n' || c == '\r') c = ';';
    }
    std::ostringstream out;
    out << r.project << ',' << r.treatment << ',' << r.seed << ',' << format_number(r.precision)
        << ',' << format_number(r.auc) << ',' << format_number(r.false_alarm) << ','
        << format_number(r.recall) << ',' << r.labels_used << ',' << status;
    return out.str();
}

}  // namespace ghost2
