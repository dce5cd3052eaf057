/* ghost2 — actionable-warning prediction pipeline.
 *
 * C interface to the shared library: opaque handles, integer status codes,
 * and a thread-local message for the last failure. Every *_new/*_load call
 * that succeeds must be paired with the matching *_free.
 */
#ifndef GHOST2_H
#define GHOST2_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define GHOST2_API __declspec(dllexport)
#else
#define GHOST2_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum g2_status {
    G2_OK = 0,
    G2_ERR_IO = 1,
    G2_ERR_MISSING_COLUMN = 2,
    G2_ERR_NON_NUMERIC_CELL = 3,
    G2_ERR_BAD_LABEL = 4,
    G2_ERR_EMPTY_DATASET = 5,
    G2_ERR_TOO_FEW_ROWS = 6,
    G2_ERR_EMPTY_POINT_SET = 7,
    G2_ERR_NOT_ENOUGH_NEIGHBORS = 8,
    G2_ERR_TOO_FEW_MINORITY = 9,
    G2_ERR_SINGLE_CLASS = 10,
    G2_ERR_NON_FINITE_LOSS = 11,
    G2_ERR_WIDTH_MISMATCH = 12,
    G2_ERR_LENGTH_MISMATCH = 13,
    G2_ERR_GRID_TOO_SMALL = 14,
    G2_ERR_TOO_FEW_LEAVES = 15,
    G2_ERR_UNSUPPORTED_MODEL = 16,
    G2_ERR_INVALID_ARGUMENT = 17,
    G2_ERR_BAD_FORMAT = 18,
    G2_ERR_CELL_FAILED = 19,
    G2_ERR_INTERNAL = 20
} g2_status;

GHOST2_API const char* g2_version(void);
GHOST2_API const char* g2_status_name(g2_status status);

/* Message for the most recent failure on this thread; empty string if none. */
GHOST2_API const char* g2_last_error(void);

typedef struct g2_dataset g2_dataset;
typedef struct g2_split g2_split;
typedef struct g2_report g2_report;

/* ---- datasets ------------------------------------------------------- */

/* CSV contract: UTF-8, header row, comma separated. Columns named `label`
 * (values 0/1), `timestamp` (integer epoch seconds) and optionally
 * `project` are reserved; every other column is a numeric feature. */
GHOST2_API g2_status g2_dataset_load_csv(const char* path, g2_dataset** out);
GHOST2_API g2_status g2_dataset_write_csv(const g2_dataset* dataset, const char* path);

/* Built-in synthetic benchmark (XOR of Gaussians, 40% minority). */
GHOST2_API g2_status g2_dataset_synthetic(size_t n, double minority_fraction,
                                          uint64_t generator_seed, g2_dataset** out);

GHOST2_API void g2_dataset_free(g2_dataset* dataset);
GHOST2_API size_t g2_dataset_rows(const g2_dataset* dataset);
GHOST2_API size_t g2_dataset_cols(const g2_dataset* dataset);
GHOST2_API const char* g2_dataset_project(const g2_dataset* dataset);

/* ---- time split ------------------------------------------------------ */

GHOST2_API g2_status g2_time_split(const g2_dataset* dataset, double train_fraction,
                                   g2_split** out);
GHOST2_API void g2_split_free(g2_split* split);
GHOST2_API size_t g2_split_train_rows(const g2_split* split);
GHOST2_API size_t g2_split_test_rows(const g2_split* split);

/* ---- treatment plans -------------------------------------------------- */

/* Validates a plan string such as "smooth>smote>ghost>ghost>smote+dodge". */
GHOST2_API g2_status g2_plan_validate(const char* text);

/* ---- one evaluation cell ---------------------------------------------- */

GHOST2_API g2_status g2_run_treatment(const g2_split* split, const char* treatment_id,
                                      uint64_t seed, g2_report** out);
GHOST2_API void g2_report_free(g2_report* report);

/* name: precision | auc | false_alarm | recall | labels_used | seed */
GHOST2_API g2_status g2_report_value(const g2_report* report, const char* name, double* out);
GHOST2_API const char* g2_report_status(const g2_report* report);

/* ---- command drivers --------------------------------------------------
 * These mirror the CLI subcommands and write their artifacts (results.csv,
 * report.md, grid CSVs, ...) under out_dir. A null/empty data_path falls
 * back to $GHOST2_DATA, then to the bundled synthetic benchmark.
 */
typedef struct g2_options {
    const char* data_path;   /* file, directory, or NULL */
    const char* out_dir;     /* default "." */
    const char* treatments;  /* comma separated ids, e.g. "A1,A5"; NULL = default */
    const char* plan;        /* custom plan string; NULL = none */
    uint64_t seed;
    double split_fraction;
    int budget;
    double epsilon;
    int jobs;      /* 0 = available parallelism */
    int lenient;   /* skip failing optional treatment steps */
    int svg;       /* landscape: also write SVG heatmaps */
    size_t repeats; /* stability repeats */
    size_t grid;    /* landscape resolution (odd) */
    double alpha;   /* landscape extent */
} g2_options;

GHOST2_API void g2_options_init(g2_options* options);

/* G2_OK, or G2_ERR_CELL_FAILED when at least one cell recorded an error
 * (artifacts are still written); other codes signal configuration errors. */
GHOST2_API g2_status g2_cmd_run(const g2_options* options);
GHOST2_API g2_status g2_cmd_ablate(const g2_options* options);
GHOST2_API g2_status g2_cmd_landscape(const g2_options* options);
GHOST2_API g2_status g2_cmd_stability(const g2_options* options);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* GHOST2_H */
