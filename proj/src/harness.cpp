#include "harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;

namespace ghost2 {

RunParams RunConfig::run_params() const {
    RunParams params;
    params.dodge.budget = budget;
    params.dodge.epsilon = epsilon;
    params.lenient = lenient;
    return params;
}

WarningDataset make_synthetic_benchmark(std::size_t n, double minority_fraction,
                                        std::uint64_t generator_seed) {
    if (n < 10) throw Error(ErrorCode::InvalidArgument, "benchmark: n must be >= 10");
    if (!(minority_fraction > 0.0 && minority_fraction <= 0.5))
        throw Error(ErrorCode::InvalidArgument, "benchmark: minority fraction must be in (0, 0.5]");

    // XOR of Gaussians: actionable warnings cluster on the main diagonal
    // corners, false alarms on the antidiagonal ones. Positives skew
    // slightly early in time and the training region carries flipped
    // labels, so anything fitted to the raw rows sees a bumpy surface;
    // the held-out tail keeps clean labels.
    const double sigma = 0.12;
    const double flip_rate = 0.06;
    const double early_bias = 0.06;

    const std::size_t n_minority = static_cast<std::size_t>(
        std::lround(minority_fraction * static_cast<double>(n)));
    Rng rng(generator_seed);

    std::vector<int> labels(n, 0);
    {
        std::vector<int> raw(n, 0);
        for (std::size_t i = 0; i < n_minority; ++i) raw[i] = 1;
        rng.shuffle(raw);
        std::vector<std::size_t> order(n);
        std::vector<double> priority(n);
        for (std::size_t i = 0; i < n; ++i) {
            order[i] = i;
            priority[i] = rng.uniform() - (raw[i] == 1 ? early_bias : 0.0);
        }
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return priority[a] < priority[b]; });
        for (std::size_t rank = 0; rank < n; ++rank) labels[rank] = raw[order[rank]];
    }

    WarningDataset data;
    data.project = "synthetic";
    data.feature_names = {"f0", "f1"};
    data.features = Matrix(0, 2);
    double row[2];
    for (std::size_t i = 0; i < n; ++i) {
        const bool second = rng.uniform() < 0.5;
        const double cx = second ? 0.75 : 0.25;
        const double cy = labels[i] == 1 ? cx : 1.0 - cx;
        row[0] = cx + sigma * rng.normal();
        row[1] = cy + sigma * rng.normal();
        data.features.push_row(row);
        data.labels.push_back(labels[i]);
        data.timestamps.push_back(static_cast<std::int64_t>(i));
    }

    const std::size_t train_end = static_cast<std::size_t>(0.8 * static_cast<double>(n));
    for (std::size_t i = 0; i < train_end; ++i) {
        if (rng.uniform() < flip_rate) data.labels[i] = 1 - data.labels[i];
    }
    return data;
}

std::vector<WarningDataset> load_projects(const std::string& data_path) {
    std::string path = data_path;
    if (path.empty()) {
        if (const char* env = std::getenv("GHOST2_DATA")) path = env;
    }
    if (path.empty()) return {make_synthetic_benchmark()};

    std::vector<WarningDataset> projects;
    const fs::path p(path);
    if (fs::is_directory(p)) {
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(p)) {
            if (entry.is_regular_file() && entry.path().extension() == ".csv")
                files.push_back(entry.path());
        }
        std::sort(files.begin(), files.end());
        for (const fs::path& f : files) projects.push_back(load_csv(f.string()));
        if (projects.empty())
            throw Error(ErrorCode::Io, "no .csv files in " + path);
    } else if (fs::is_regular_file(p)) {
        projects.push_back(load_csv(path));
    } else {
        throw Error(ErrorCode::Io, "data path not found: " + path);
    }
    return projects;
}

void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn) {
    if (count == 0) return;
    std::size_t workers = jobs > 0 ? static_cast<std::size_t>(jobs)
                                   : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) break;
                fn(i);
            }
        });
    }
    for (std::thread& t : pool) t.join();
}

EvalReport run_cell(const WarningDataset& project, TreatmentId id, const RunConfig& config) {
    const std::uint64_t cell_seed =
        derive_seed(derive_seed(config.seed, project.project), treatment_id_name(id));
    EvalReport report;
    report.project = project.project;
    report.treatment = treatment_id_name(id);
    report.seed = config.seed;
    try {
        const TrainTestSplit split = time_split(project, config.split_fraction);
        report = run_treatment(split, id, cell_seed, config.run_params());
        report.seed = config.seed;
    } catch (const Error& e) {
        report.status = std::string("error: ") + e.what();
    } catch (const std::exception& e) {
        report.status = std::string("error: ") + e.what();
    } catch (...) {
        report.status = "error: unknown failure";
    }
    return report;
}

namespace {

EvalReport run_custom_plan_cell(const WarningDataset& project, const TreatmentPlan& plan,
                                const std::string& label, const RunConfig& config) {
    const std::uint64_t cell_seed = derive_seed(derive_seed(config.seed, project.project), label);
    EvalReport report;
    report.project = project.project;
    report.treatment = label;
    report.seed = config.seed;
    try {
        const TrainTestSplit split = time_split(project, config.split_fraction);
        report = run_plan(split, plan, LearnerFamily::FeedForward, label, cell_seed,
                          config.run_params());
        report.seed = config.seed;
    } catch (const Error& e) {
        report.status = std::string("error: ") + e.what();
    } catch (const std::exception& e) {
        report.status = std::string("error: ") + e.what();
    } catch (...) {
        report.status = "error: unknown failure";
    }
    return report;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
    out << text;
    if (!out) throw Error(ErrorCode::Io, "write failed for " + path);
}

RunOutput run_grid(const RunConfig& config, const std::vector<TreatmentId>& treatments) {
    const std::vector<WarningDataset> projects = load_projects(config.data_path);
    fs::create_directories(config.out_dir);

    RunOutput output;
    const bool custom = !config.plan.empty();
    TreatmentPlan custom_plan;
    if (custom) custom_plan = TreatmentPlan::parse(config.plan);

    const std::size_t cols = custom ? 1 : treatments.size();
    output.reports.resize(projects.size() * cols);
    parallel_for(output.reports.size(), config.jobs, [&](std::size_t i) {
        const std::size_t pi = i / cols;
        const std::size_t ti = i % cols;
        if (custom) {
            output.reports[i] =
                run_custom_plan_cell(projects[pi], custom_plan, config.plan, config);
        } else {
            output.reports[i] = run_cell(projects[pi], treatments[ti], config);
        }
    });

    std::ostringstream csv;
    csv << results_csv_header() << '\n';
    for (const EvalReport& r : output.reports) {
        csv << results_csv_row(r) << '\n';
        if (!r.ok()) output.any_error = true;
    }
    write_text_file((fs::path(config.out_dir) / "results.csv").string(), csv.str());

    // tuner audit trail, one row per model fit
    std::ostringstream dodge_log;
    dodge_log << "project,treatment,seed,iteration,config,objective\n";
    bool any_tuning = false;
    for (const EvalReport& r : output.reports) {
        for (const std::string& row : r.tuning_log) {
            dodge_log << r.project << ',' << r.treatment << ',' << r.seed << ',' << row << '\n';
            any_tuning = true;
        }
    }
    if (any_tuning)
        write_text_file((fs::path(config.out_dir) / "dodge_log.csv").string(), dodge_log.str());

    if (!custom) {
        std::vector<std::string> names;
        for (const WarningDataset& p : projects) names.push_back(p.project);
        const AblationTable table =
            build_ablation_table(output.reports, names, treatments, MedianMode::LowerMiddle);
        output.report_text = render_ablation_table(table);
    } else {
        output.report_text = csv.str();
    }
    write_text_file((fs::path(config.out_dir) / "report.md").string(), output.report_text);
    return output;
}

}  // namespace

RunOutput cmd_run(const RunConfig& config) {
    std::vector<TreatmentId> treatments;
    if (config.treatments.empty()) {
        treatments.push_back(TreatmentId::A1);
    } else {
        for (const std::string& name : config.treatments)
            treatments.push_back(parse_treatment_id(name));
    }
    return run_grid(config, treatments);
}

RunOutput cmd_ablate(const RunConfig& config) {
    std::vector<TreatmentId> treatments;
    if (config.treatments.empty()) {
        treatments = all_treatment_ids();
    } else {
        for (const std::string& name : config.treatments)
            treatments.push_back(parse_treatment_id(name));
    }
    return run_grid(config, treatments);
}

void write_grid_csv(const LandscapeGrid& grid, const std::string& path) {
    std::ostringstream out;
    out << "a,b,loss\n";
    char buf[64];
    auto fmt = [&buf](double v) {
        auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
        return std::string(buf, ptr);
    };
    for (std::size_t i = 0; i < grid.resolution; ++i) {
        for (std::size_t j = 0; j < grid.resolution; ++j) {
            out << fmt(grid.coord(i)) << ',' << fmt(grid.coord(j)) << ','
                << fmt(grid.loss.at(i, j)) << '\n';
        }
    }
    write_text_file(path, out.str());
}

void write_grid_svg(const LandscapeGrid& grid, const std::string& path) {
    const std::size_t g = grid.resolution;
    const int cell = 12;
    double lo = grid.loss.vals[0], hi = lo;
    for (double v : grid.loss.vals) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << g * cell << "\" height=\""
        << g * cell << "\">\n";
    for (std::size_t i = 0; i < g; ++i) {
        for (std::size_t j = 0; j < g; ++j) {
            int shade = 128;
            if (hi > lo) {
                shade = static_cast<int>(
                    std::lround(255.0 * (1.0 - (grid.loss.at(i, j) - lo) / (hi - lo))));
            }
            out << "<rect x=\"" << j * cell << "\" y=\"" << i * cell << "\" width=\"" << cell
                << "\" height=\"" << cell << "\" fill=\"rgb(" << shade << ',' << shade << ','
                << shade << ")\"/>\n";
        }
    }
    out << "</svg>\n";
    write_text_file(path, out.str());
}

LandscapeOutput cmd_landscape(const RunConfig& config) {
    const std::vector<WarningDataset> projects = load_projects(config.data_path);
    fs::create_directories(config.out_dir);
    const WarningDataset& project = projects.front();

    const TrainTestSplit split = time_split(project, config.split_fraction);
    auto [norm_split, norm_params] = normalize(split);

    const TreatmentPlan plan = config.plan.empty()
                                   ? TreatmentPlan::parse("smooth>smote>ghost>ghost>smote+dodge")
                                   : TreatmentPlan::parse(config.plan);
    const std::uint64_t seed = derive_seed(config.seed, project.project);
    const RunParams params = config.run_params();

    const auto before = train_model(LearnerConfig::defaults(LearnerKind::FeedForward),
                                    norm_split.train, derive_seed(seed, "before-fit"));

    const PlanResult treated =
        apply_plan(norm_split.train, plan, derive_seed(seed, "plan"), config.lenient);
    LearnerConfig after_config = LearnerConfig::defaults(LearnerKind::FeedForward);
    if (plan.tune) {
        after_config = dodge(LearnerKind::FeedForward, treated.data, params.dodge,
                             derive_seed(seed, "dodge"))
                           .best;
    }
    const auto after =
        train_model(after_config, treated.data, derive_seed(seed, "after-fit"));

    const LandscapeGrid grid_before = loss_surface(*before, norm_split.train, config.grid,
                                                   config.alpha, derive_seed(seed, "dirs-before"));
    const LandscapeGrid grid_after = loss_surface(*after, treated.data, config.grid, config.alpha,
                                                  derive_seed(seed, "dirs-after"));

    LandscapeOutput out;
    out.project = project.project;
    out.smoothness_before = smoothness(grid_before);
    out.smoothness_after = smoothness(grid_after);
    out.change_percent = smoothness_change(grid_before, grid_after);

    const fs::path dir(config.out_dir);
    write_grid_csv(grid_before, (dir / "landscape_before.csv").string());
    write_grid_csv(grid_after, (dir / "landscape_after.csv").string());
    if (config.svg) {
        write_grid_svg(grid_before, (dir / "landscape_before.svg").string());
        write_grid_svg(grid_after, (dir / "landscape_after.svg").string());
    }

    std::ostringstream line;
    line.precision(6);
    line << project.project << ": smoothness " << out.smoothness_before << " -> "
         << out.smoothness_after << " (" << (out.change_percent >= 0 ? "+" : "")
         << out.change_percent << "%)";
    out.summary_line = line.str();
    write_text_file((dir / "landscape_summary.txt").string(), out.summary_line + "\n");
    return out;
}

StabilityOutput cmd_stability(const RunConfig& config) {
    const std::vector<WarningDataset> projects = load_projects(config.data_path);
    fs::create_directories(config.out_dir);
    const WarningDataset& project = projects.front();

    const TrainTestSplit split = time_split(project, config.split_fraction);
    auto [norm_split, norm_params] = normalize(split);

    StabilityOutput out;
    out.project = project.project;
    out.result = smooth_stability(norm_split.train, config.repeats,
                                  derive_seed(config.seed, project.project));

    std::ostringstream log;
    log << "median_index";
    for (std::size_t c = 0; c < norm_split.train.cols(); ++c) log << ",c" << c;
    log << '\n';
    char buf[64];
    auto fmt = [&buf](double v) {
        auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
        return std::string(buf, ptr);
    };
    for (std::size_t i = 0; i < out.result.leaf_medians.size(); ++i) {
        log << i;
        for (double v : out.result.leaf_medians[i]) log << ',' << fmt(v);
        log << '\n';
    }
    const fs::path dir(config.out_dir);
    write_text_file((dir / "stability_medians.csv").string(), log.str());

    std::ostringstream line;
    char pct[64];
    std::snprintf(pct, sizeof(pct), "%.2f%%", out.result.headline_percent);
    line << project.project << ": median deviation " << pct << " of dataset L1 norm ("
         << out.result.repeats << " repeats, k=" << out.result.clusters << ")";
    out.summary_line = line.str();
    write_text_file((dir / "stability_summary.txt").string(), out.summary_line + "\n");
    return out;
}

}  // namespace ghost2
