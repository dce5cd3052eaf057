#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "evaluation.hpp"
#include "landscape.hpp"

namespace ghost2 {

// Options shared by the CLI commands. `data_path` resolution order:
// explicit path, then the GHOST2_DATA environment variable, then the
// bundled synthetic benchmark.
struct RunConfig {
    std::string data_path;
    std::string out_dir = ".";
    std::vector<std::string> treatments;  // empty = command default
    std::string plan;                     // custom plan; overrides treatments in `run`
    std::uint64_t seed = 1;
    double split_fraction = 0.8;
    int budget = 30;
    double epsilon = 0.2;
    int jobs = 0;  // 0 = available parallelism
    bool lenient = false;
    bool svg = false;
    std::size_t repeats = 20;
    std::size_t grid = 25;
    double alpha = 1.0;

    RunParams run_params() const;
};

struct RunOutput {
    std::vector<EvalReport> reports;
    std::string report_text;
    bool any_error = false;
};

// XOR-of-Gaussians benchmark: two diagonal blobs per class in the unit
// square, 40% minority, timestamps in row order, and flipped labels in the
// training portion to make the landscape bumpy. Deterministic for a fixed
// generator seed.
WarningDataset make_synthetic_benchmark(std::size_t n = 200, double minority_fraction = 0.4,
                                        std::uint64_t generator_seed = 22);

// Discover datasets: a .csv file, a directory of *.csv (sorted by name), or
// the bundled benchmark when path and GHOST2_DATA are both unset.
std::vector<WarningDataset> load_projects(const std::string& data_path);

// One (project, treatment) cell; errors are captured in the report status.
EvalReport run_cell(const WarningDataset& project, TreatmentId id, const RunConfig& config);

RunOutput cmd_run(const RunConfig& config);
RunOutput cmd_ablate(const RunConfig& config);

struct LandscapeOutput {
    std::string project;
    double smoothness_before = 0.0;
    double smoothness_after = 0.0;
    double change_percent = 0.0;
    std::string summary_line;
};

LandscapeOutput cmd_landscape(const RunConfig& config);

struct StabilityOutput {
    std::string project;
    StabilityResult result;
    std::string summary_line;
};

StabilityOutput cmd_stability(const RunConfig& config);

void write_grid_csv(const LandscapeGrid& grid, const std::string& path);
void write_grid_svg(const LandscapeGrid& grid, const std::string& path);

// Bounded worker pool; fn must not throw.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn);

}  // namespace ghost2
