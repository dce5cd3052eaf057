// ghost2 command line: run | ablate | landscape | stability

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "ghost2/ghost2.h"

namespace {

struct Flags {
    std::string data;
    std::string out = ".";
    std::string treatments;
    std::string plan;
    std::uint64_t seed = 1;
    double split = 0.8;
    int budget = 30;
    double epsilon = 0.2;
    int jobs = 0;
    bool lenient = false;
    bool svg = false;
    std::size_t repeats = 20;
    std::size_t grid = 25;
    double alpha = 1.0;
};

void add_common_flags(CLI::App* cmd, Flags& flags) {
    cmd->add_option("--data", flags.data,
                    "CSV file or directory of per-project CSVs (default: $GHOST2_DATA, then the "
                    "bundled synthetic benchmark)");
    cmd->add_option("--out", flags.out, "output directory (default: current directory)");
    cmd->add_option("--seed", flags.seed, "master seed; every artifact is deterministic in it");
    cmd->add_option("--split", flags.split, "train fraction for the time-ordered split")
        ->check(CLI::Range(0.01, 0.99));
    cmd->add_option("--budget", flags.budget, "tuner evaluation budget");
    cmd->add_option("--epsilon", flags.epsilon, "tuner epsilon-domination radius");
    cmd->add_option("--jobs", flags.jobs, "worker threads (0 = all cores)");
    cmd->add_flag("--lenient", flags.lenient, "skip treatment steps that fail instead of aborting");
}

g2_options to_options(const Flags& flags) {
    g2_options options;
    g2_options_init(&options);
    if (!flags.data.empty()) options.data_path = flags.data.c_str();
    options.out_dir = flags.out.c_str();
    if (!flags.treatments.empty()) options.treatments = flags.treatments.c_str();
    if (!flags.plan.empty()) options.plan = flags.plan.c_str();
    options.seed = flags.seed;
    options.split_fraction = flags.split;
    options.budget = flags.budget;
    options.epsilon = flags.epsilon;
    options.jobs = flags.jobs;
    options.lenient = flags.lenient ? 1 : 0;
    options.svg = flags.svg ? 1 : 0;
    options.repeats = flags.repeats;
    options.grid = flags.grid;
    options.alpha = flags.alpha;
    return options;
}

void print_file(const std::string& path) {
    std::ifstream in(path);
    if (in) std::cout << in.rdbuf();
}

int finish(g2_status status, const std::string& out_dir, const std::string& stdout_file) {
    if (status == G2_OK || status == G2_ERR_CELL_FAILED) {
        if (!stdout_file.empty()) print_file(out_dir + "/" + stdout_file);
    }
    if (status == G2_OK) return 0;
    if (status == G2_ERR_CELL_FAILED) {
        std::cerr << "ghost2: some cells failed; see results.csv for statuses\n";
        return 1;
    }
    std::cerr << "ghost2: " << g2_status_name(status) << ": " << g2_last_error() << "\n";
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"GHOST2 pipeline for actionable static-analysis warnings"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(g2_version()));

    Flags flags;

    CLI::App* run = app.add_subcommand("run", "evaluate treatments per project");
    add_common_flags(run, flags);
    run->add_option("--treatment,--treatments", flags.treatments,
                    "comma separated treatment ids (default A1)");
    run->add_option("--plan", flags.plan,
                    "custom plan, e.g. smooth>smote>ghost>ghost>smote+dodge (overrides "
                    "--treatment)");

    CLI::App* ablate = app.add_subcommand("ablate", "run the full ablation grid");
    add_common_flags(ablate, flags);
    ablate->add_option("--treatments", flags.treatments,
                       "restrict the grid, e.g. A1,A5 (default: A1-A7,B1,C1,D1)");

    CLI::App* landscape =
        app.add_subcommand("landscape", "loss-surface grids before/after treatment");
    add_common_flags(landscape, flags);
    landscape->add_option("--plan", flags.plan, "treatment plan for the after-model (default A1)");
    landscape->add_option("--grid", flags.grid, "grid resolution (odd)");
    landscape->add_option("--alpha", flags.alpha, "grid extent along each direction");
    landscape->add_flag("--svg", flags.svg, "also write grayscale SVG heatmaps");

    CLI::App* stability = app.add_subcommand("stability", "label-engineering stability diagnostic");
    add_common_flags(stability, flags);
    stability->add_option("--repeats", flags.repeats, "number of clustering repeats");

    CLI11_PARSE(app, argc, argv);

    const g2_options options = to_options(flags);
    if (run->parsed()) return finish(g2_cmd_run(&options), flags.out, "report.md");
    if (ablate->parsed()) return finish(g2_cmd_ablate(&options), flags.out, "report.md");
    if (landscape->parsed())
        return finish(g2_cmd_landscape(&options), flags.out, "landscape_summary.txt");
    if (stability->parsed())
        return finish(g2_cmd_stability(&options), flags.out, "stability_summary.txt");
    return 2;
}
