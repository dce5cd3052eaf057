#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "metrics.hpp"
#include "treatments.hpp"
#include "tuner.hpp"

namespace ghost2 {

// Ablation study rows. A1 is the full pipeline
// (smooth > smote > ghost > ghost > smote + dodge on a feedforward net);
// the others switch individual stages off or swap the learner family.
// D1 is the untreated, untuned traditional-learner baseline.
enum class TreatmentId { A1, A2, A3, A4, A5, A6, A7, B1, C1, D1 };

const char* treatment_id_name(TreatmentId id);
TreatmentId parse_treatment_id(const std::string& name);
std::vector<TreatmentId> all_treatment_ids();

enum class LearnerFamily { FeedForward, Traditional };

struct Recipe {
    TreatmentPlan plan;
    LearnerFamily family = LearnerFamily::FeedForward;
    int label_percent = 100;  // informational, from the study design
    // D1 replays the earlier studies' setup: one fixed learner instead of
    // the best-of-four selection used by the other traditional rows.
    bool has_fixed_config = false;
    LearnerConfig fixed_config;
};

Recipe recipe_for(TreatmentId id);

enum class AucMode { Scores, HardLabels };
enum class MedianMode { LowerMiddle, MeanOfMiddles };

struct RunParams {
    DodgeOptions dodge;
    // Plain full-batch descent needs more steps than the ffnet_train entry
    // point's own defaults to actually converge on the treated data.
    TrainOptions train{1000, 0.25};
    AucMode auc_mode = AucMode::Scores;
    MedianMode median_mode = MedianMode::LowerMiddle;
    bool lenient = false;
};

struct EvalReport {
    std::string project;
    std::string treatment;
    std::uint64_t seed = 0;
    double precision = 0.0;
    double auc = 0.0;
    double false_alarm = 0.0;
    double recall = 0.0;
    bool precision_undefined = false;
    bool auc_undefined = false;
    bool recall_undefined = false;
    bool false_alarm_undefined = false;
    std::size_t labels_used = 0;
    double runtime_seconds = 0.0;
    std::string status = "ok";
    // audit trail of the tuner, one "iteration,config,objective" row per fit
    std::vector<std::string> tuning_log;

    bool ok() const { return status == "ok"; }
};

// Applies the recipe's plan to the training half only, tunes when the recipe
// says so, fits the recipe's learner family (for the traditional family, all
// four kinds are fitted and the best inner-validation objective wins), then
// evaluates once on the untouched test half.
EvalReport run_treatment(const TrainTestSplit& split, TreatmentId id, std::uint64_t seed,
                         const RunParams& params);

// Same pipeline with an explicit recipe; `label` becomes the report's
// treatment column.
EvalReport run_recipe(const TrainTestSplit& split, const Recipe& recipe, const std::string& label,
                      std::uint64_t seed, const RunParams& params);

// Custom plan on the feedforward family (CLI --plan).
EvalReport run_plan(const TrainTestSplit& split, const TreatmentPlan& plan, LearnerFamily family,
                    const std::string& label, std::uint64_t seed, const RunParams& params);

double median_of(std::vector<double> values, MedianMode mode);

// Aggregated view: one value per (treatment, project, metric), the median
// over seeds of the ok cells.
struct AblationCell {
    double value = 0.0;
    bool valid = false;
};

struct AblationTable {
    std::vector<std::string> projects;
    std::vector<TreatmentId> treatments;
    // [metric][treatment][project]; metric order: precision, auc, false_alarm, recall
    std::vector<std::vector<std::vector<AblationCell>>> cells;
    std::vector<std::vector<double>> medians;        // [metric][treatment]
    std::vector<std::vector<int>> better_than_a1;    // [metric][treatment], -1 for A1 itself

    static const std::vector<std::string>& metric_names();
};

AblationTable build_ablation_table(const std::vector<EvalReport>& reports,
                                   const std::vector<std::string>& projects,
                                   const std::vector<TreatmentId>& treatments, MedianMode mode);

std::string render_ablation_table(const AblationTable& table);

std::string results_csv_header();
std::string results_csv_row(const EvalReport& report);

}  // namespace ghost2
