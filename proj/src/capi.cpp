#include "ghost2/ghost2.h"

#include <cstring>
#include <string>

#include "harness.hpp"

using namespace ghost2;

namespace {

thread_local std::string t_last_error;

g2_status to_status(ErrorCode code) { return static_cast<g2_status>(static_cast<int>(code)); }

template <typename Fn>
g2_status guarded(Fn&& fn) {
    try {
        t_last_error.clear();
        return fn();
    } catch (const Error& e) {
        t_last_error = e.what();
        return to_status(e.code());
    } catch (const std::exception& e) {
        t_last_error = e.what();
        return G2_ERR_INTERNAL;
    } catch (...) {
        t_last_error = "unknown error";
        return G2_ERR_INTERNAL;
    }
}

RunConfig to_config(const g2_options& options) {
    RunConfig config;
    if (options.data_path) config.data_path = options.data_path;
    if (options.out_dir && *options.out_dir) config.out_dir = options.out_dir;
    if (options.treatments && *options.treatments) {
        std::string list = options.treatments;
        std::size_t pos = 0;
        while (pos <= list.size()) {
            const std::size_t comma = list.find(',', pos);
            const std::string name =
                list.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
            if (!name.empty()) config.treatments.push_back(name);
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
    }
    if (options.plan) config.plan = options.plan;
    config.seed = options.seed;
    config.split_fraction = options.split_fraction;
    config.budget = options.budget;
    config.epsilon = options.epsilon;
    config.jobs = options.jobs;
    config.lenient = options.lenient != 0;
    config.svg = options.svg != 0;
    config.repeats = options.repeats;
    config.grid = options.grid;
    config.alpha = options.alpha;
    return config;
}

}  // namespace

struct g2_dataset {
    WarningDataset data;
};

struct g2_split {
    TrainTestSplit split;
};

struct g2_report {
    EvalReport report;
};

extern "C" {

const char* g2_version(void) { return "1.0.0"; }

const char* g2_status_name(g2_status status) {
    switch (status) {
        case G2_OK: return "ok";
        case G2_ERR_IO: return "io";
        case G2_ERR_MISSING_COLUMN: return "missing_column";
        case G2_ERR_NON_NUMERIC_CELL: return "non_numeric_cell";
        case G2_ERR_BAD_LABEL: return "bad_label";
        case G2_ERR_EMPTY_DATASET: return "empty_dataset";
        case G2_ERR_TOO_FEW_ROWS: return "too_few_rows";
        case G2_ERR_EMPTY_POINT_SET: return "empty_point_set";
        case G2_ERR_NOT_ENOUGH_NEIGHBORS: return "not_enough_neighbors";
        case G2_ERR_TOO_FEW_MINORITY: return "too_few_minority";
        case G2_ERR_SINGLE_CLASS: return "single_class";
        case G2_ERR_NON_FINITE_LOSS: return "non_finite_loss";
        case G2_ERR_WIDTH_MISMATCH: return "width_mismatch";
        case G2_ERR_LENGTH_MISMATCH: return "length_mismatch";
        case G2_ERR_GRID_TOO_SMALL: return "grid_too_small";
        case G2_ERR_TOO_FEW_LEAVES: return "too_few_leaves";
        case G2_ERR_UNSUPPORTED_MODEL: return "unsupported_model";
        case G2_ERR_INVALID_ARGUMENT: return "invalid_argument";
        case G2_ERR_BAD_FORMAT: return "bad_format";
        case G2_ERR_CELL_FAILED: return "cell_failed";
        case G2_ERR_INTERNAL: return "internal";
    }
    return "unknown";
}

const char* g2_last_error(void) { return t_last_error.c_str(); }

g2_status g2_dataset_load_csv(const char* path, g2_dataset** out) {
    if (!path || !out) return G2_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        *out = new g2_dataset{load_csv(path)};
        return G2_OK;
    });
}

g2_status g2_dataset_write_csv(const g2_dataset* dataset, const char* path) {
    if (!dataset || !path) return G2_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        write_csv(dataset->data, path);
        return G2_OK;
    });
}

g2_status g2_dataset_synthetic(size_t n, double minority_fraction, uint64_t generator_seed,
                               g2_dataset** out) {
    if (!out) return G2_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        *out = new g2_dataset{make_synthetic_benchmark(n, minority_fraction, generator_seed)};
        return G2_OK;
    });
}

void g2_dataset_free(g2_dataset* dataset) { delete dataset; }

size_t g2_dataset_rows(const g2_dataset* dataset) { return dataset ? dataset->data.rows() : 0; }

size_t g2_dataset_cols(const g2_dataset* dataset) { return dataset ? dataset->data.cols() : 0; }

const char* g2_dataset_project(const g2_dataset* dataset) {
    return dataset ? dataset->data.project.c_str() : "";
}

g2_status g2_time_split(const g2_dataset* dataset, double train_fraction, g2_split** out) {
    if (!dataset || !out) return G2_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        *out = new g2_split{time_split(dataset->data, train_fraction)};
        return G2_OK;
    });
}

void g2_split_free(g2_split* split) { delete split; }

size_t g2_split_train_rows(const g2_split* split) { return split ? split->split.train.rows() : 0; }

size_t g2_split_test_rows(const g2_split* split) { return split ? split->split.test.rows() : 0; }

g2_status g2_plan_validate(const char* text) {
    if (!text) return G2_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        TreatmentPlan::parse(text);
        return G2_OK;
    });
}

g2_status g2_run_treatment(const g2_split* split, const char* treatment_id, uint64_t seed,
                           g2_report** out) {
    if (!split || !treatment_id || !out) return G2_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        const TreatmentId id = parse_treatment_id(treatment_id);
        RunParams params;
        *out = new g2_report{run_treatment(split->split, id, seed, params)};
        return G2_OK;
    });
}

void g2_report_free(g2_report* report) { delete report; }

g2_status g2_report_value(const g2_report* report, const char* name, double* out) {
    if (!report || !name || !out) return G2_ERR_INVALID_ARGUMENT;
    const EvalReport& r = report->report;
    if (std::strcmp(name, "precision") == 0) {
        *out = r.precision;
    } else if (std::strcmp(name, "auc") == 0) {
        *out = r.auc;
    } else if (std::strcmp(name, "false_alarm") == 0) {
        *out = r.false_alarm;
    } else if (std::strcmp(name, "recall") == 0) {
        *out = r.recall;
    } else if (std::strcmp(name, "labels_used") == 0) {
        *out = static_cast<double>(r.labels_used);
    } else if (std::strcmp(name, "seed") == 0) {
        *out = static_cast<double>(r.seed);
    } else {
        return G2_ERR_INVALID_ARGUMENT;
    }
    return G2_OK;
}

const char* g2_report_status(const g2_report* report) {
    return report ? report->report.status.c_str() : "";
}

void g2_options_init(g2_options* options) {
    if (!options) return;
    options->data_path = nullptr;
    options->out_dir = nullptr;
    options->treatments = nullptr;
    options->plan = nullptr;
    options->seed = 1;
    options->split_fraction = 0.8;
    options->budget = 30;
    options->epsilon = 0.2;
    options->jobs = 0;
    options->lenient = 0;
    options->svg = 0;
    options->repeats = 20;
    options->grid = 25;
    options->alpha = 1.0;
}

g2_status g2_cmd_run(const g2_options* options) {
    if (!options) return G2_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        const RunOutput out = cmd_run(to_config(*options));
        return out.any_error ? G2_ERR_CELL_FAILED : G2_OK;
    });
}

g2_status g2_cmd_ablate(const g2_options* options) {
    if (!options) return G2_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        const RunOutput out = cmd_ablate(to_config(*options));
        return out.any_error ? G2_ERR_CELL_FAILED : G2_OK;
    });
}

g2_status g2_cmd_landscape(const g2_options* options) {
    if (!options) return G2_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        cmd_landscape(to_config(*options));
        return G2_OK;
    });
}

g2_status g2_cmd_stability(const g2_options* options) {
    if (!options) return G2_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        cmd_stability(to_config(*options));
        return G2_OK;
    });
}

}  // extern "C"
