#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "learners.hpp"

namespace ghost2 {

struct DodgeOptions {
    int budget = 30;
    double epsilon = 0.2;
};

struct DodgeLogEntry {
    LearnerConfig config;
    double objective = 0.0;
    std::vector<std::size_t> choice;  // option index per hyper-parameter
    bool tabu = false;                // landed within +/-epsilon of an earlier objective
};

struct DodgeResult {
    LearnerConfig best;
    double best_objective = -2.0;
    std::vector<DodgeLogEntry> log;
    std::vector<std::vector<double>> final_weights;  // [param][option]
    bool degenerate = false;  // inner split had one class missing; best is a random config
    std::size_t fits = 0;
};

// Number of distinguishable outcome cells under epsilon-domination:
// ceil(1/epsilon) per goal.
inline std::size_t epsilon_cells(double epsilon, int goals) {
    std::size_t cells = 1;
    const auto per_goal = static_cast<std::size_t>(std::ceil(1.0 / epsilon));
    for (int g = 0; g < goals; ++g) cells *= per_goal;
    return cells;
}

// Epsilon-domination search over a discretized space. Evaluations landing
// within +/-epsilon of any logged objective are tabu and decrement the
// weights of the options used; otherwise the weights are incremented. Never
// evaluates the same config twice, so fits = min(budget, |space|).
DodgeResult dodge_search(const HyperParamSpace& space,
                         const std::function<double(const LearnerConfig&)>& evaluate,
                         const DodgeOptions& options, std::uint64_t seed);

struct InnerSplit {
    WarningDataset fit;
    WarningDataset val;
    bool degenerate = false;
};

// Stratified 80/20 shuffle of the treated training data; falls back to an
// unstratified shuffle when a class is missing on either side.
InnerSplit make_inner_split(const WarningDataset& data, std::uint64_t seed);

// recall - false alarm rate of hard predictions on the validation set
double recall_minus_false_alarm(const Model& model, const WarningDataset& val);

// Full DODGE run for one learner kind: inner split, then dodge_search with
// real model fits. fit_counter (optional) is incremented once per fit.
DodgeResult dodge(LearnerKind kind, const WarningDataset& treated_train,
                  const DodgeOptions& options, std::uint64_t seed,
                  std::atomic<std::size_t>* fit_counter = nullptr,
                  const TrainOptions& train_options = {});

}  // namespace ghost2
