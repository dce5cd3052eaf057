#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "harness.hpp"
#include "test_util.hpp"

using namespace ghost2;

namespace {

// reload a grid CSV (a,b,loss) written with shortest round-trip formatting
LandscapeGrid load_grid_csv(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::string line;
    std::getline(in, line);
    REQUIRE(line == "a,b,loss");
    std::vector<double> a, loss;
    while (std::getline(in, line)) {
        const std::size_t c1 = line.find(',');
        const std::size_t c2 = line.find(',', c1 + 1);
        double av = 0.0, lv = 0.0;
        std::from_chars(line.data(), line.data() + c1, av);
        std::from_chars(line.data() + c2 + 1, line.data() + line.size(), lv);
        a.push_back(av);
        loss.push_back(lv);
    }
    LandscapeGrid grid;
    grid.resolution = static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(loss.size()))));
    REQUIRE(grid.resolution * grid.resolution == loss.size());
    grid.alpha = std::abs(a.front());
    grid.loss = Matrix(grid.resolution, grid.resolution);
    grid.loss.vals = loss;
    return grid;
}

}  // namespace

TEST_CASE("benchmark generator is deterministic and honors its knobs") {
    const WarningDataset a = make_synthetic_benchmark(200, 0.4, 22);
    const WarningDataset b = make_synthetic_benchmark(200, 0.4, 22);
    CHECK(a.digest() == b.digest());
    CHECK(a.rows() == 200);
    CHECK(a.cols() == 2);
    CHECK(make_synthetic_benchmark(200, 0.4, 23).digest() != a.digest());

    // the full dataset keeps the requested minority mass before train-side flips
    const WarningDataset clean = make_synthetic_benchmark(500, 0.3, 9);
    const double rate = static_cast<double>(clean.count_label(1)) / 500.0;
    CHECK(rate > 0.2);
    CHECK(rate < 0.4);

    CHECK_THROWS_AS(make_synthetic_benchmark(4, 0.4, 1), Error);
    CHECK_THROWS_AS(make_synthetic_benchmark(200, 0.7, 1), Error);
}

TEST_CASE("load_projects discovers csv files in name order") {
    testutil::TempDir dir;
    Rng rng(3);
    WarningDataset d1 = testutil::random_dataset(12, 3, 0.4, rng);
    WarningDataset d2 = testutil::random_dataset(15, 3, 0.4, rng);
    d1.project = "zz";
    d2.project = "aa";
    write_csv(d1, dir.file("zz.csv"));
    write_csv(d2, dir.file("aa.csv"));
    const auto projects = load_projects(dir.str());
    REQUIRE(projects.size() == 2);
    CHECK(projects[0].project == "aa");
    CHECK(projects[1].project == "zz");
    CHECK(projects[0].rows() == 15);

    CHECK_THROWS_AS(load_projects("/no/such/path"), Error);
}

TEST_CASE("GHOST2_DATA provides the data path when no explicit one is given") {
    testutil::TempDir dir;
    Rng rng(6);
    WarningDataset d = testutil::random_dataset(20, 2, 0.4, rng);
    d.project = "enviro";
    write_csv(d, dir.file("enviro.csv"));
    ::setenv("GHOST2_DATA", dir.str().c_str(), 1);
    const auto projects = load_projects("");
    ::unsetenv("GHOST2_DATA");
    REQUIRE(projects.size() == 1);
    CHECK(projects[0].project == "enviro");

    // without the variable, the bundled benchmark steps in
    const auto bundled = load_projects("");
    REQUIRE(bundled.size() == 1);
    CHECK(bundled[0].project == "synthetic");
    CHECK(bundled[0].rows() == 200);
}

TEST_CASE("landscape and stability artifacts are byte-identical across reruns") {
    testutil::TempDir out1, out2;
    RunConfig config;
    config.seed = 2;
    config.budget = 3;
    config.grid = 9;
    config.repeats = 5;
    config.lenient = true;

    config.out_dir = out1.str();
    cmd_landscape(config);
    cmd_stability(config);
    config.out_dir = out2.str();
    cmd_landscape(config);
    cmd_stability(config);

    for (const char* name : {"landscape_before.csv", "landscape_after.csv",
                             "landscape_summary.txt", "stability_medians.csv",
                             "stability_summary.txt"}) {
        CHECK(testutil::slurp(out1.file(name)) == testutil::slurp(out2.file(name)));
        CHECK(!testutil::slurp(out1.file(name)).empty());
    }
}

TEST_CASE("cmd_run honors the split fraction") {
    testutil::TempDir out;
    RunConfig config;
    config.treatments = {"D1"};
    config.seed = 4;
    config.split_fraction = 0.5;
    config.lenient = true;
    config.out_dir = out.str();
    const RunOutput result = cmd_run(config);
    REQUIRE(result.reports.size() == 1);
    CHECK(result.reports[0].ok());
    // D1 consumes every training label; 50:50 of the 200-row benchmark
    CHECK(result.reports[0].labels_used == 100);
}

TEST_CASE("cmd_run with a custom plan labels rows with the plan text") {
    testutil::TempDir out;
    RunConfig config;
    config.plan = "smote+dodge";
    config.seed = 9;
    config.budget = 4;
    config.lenient = true;
    config.out_dir = out.str();
    const RunOutput result = cmd_run(config);
    REQUIRE(result.reports.size() == 1);
    CHECK(result.reports[0].treatment == "smote+dodge");
    CHECK(result.reports[0].ok());
    CHECK(result.reports[0].labels_used == 160);  // no smooth step
    const std::string csv = testutil::slurp(out.file("results.csv"));
    CHECK(csv.find("synthetic,smote+dodge,9,") != std::string::npos);
    // tuned runs leave an audit trail
    const std::string log = testutil::slurp(out.file("dodge_log.csv"));
    CHECK(log.find("project,treatment,seed,iteration,config,objective") == 0);
    CHECK(log.find("ffnet layers=") != std::string::npos);
}

TEST_CASE("cmd_landscape summary equals a recomputation from the emitted grids") {
    testutil::TempDir out;
    RunConfig config;
    config.seed = 2;  // treated training set keeps both classes at this seed
    config.budget = 3;
    config.grid = 9;
    config.lenient = true;
    config.out_dir = out.str();
    const LandscapeOutput result = cmd_landscape(config);

    const LandscapeGrid before = load_grid_csv(out.file("landscape_before.csv"));
    const LandscapeGrid after = load_grid_csv(out.file("landscape_after.csv"));
    REQUIRE(before.resolution == 9);
    REQUIRE(after.resolution == 9);
    // shortest round-trip formatting makes the reload exact
    CHECK(smoothness(before) == result.smoothness_before);
    CHECK(smoothness(after) == result.smoothness_after);
    CHECK(smoothness_change(before, after) == result.change_percent);
    CHECK(result.summary_line.find("smoothness") != std::string::npos);
}

TEST_CASE("cmd_stability headline equals a recount from the logged medians") {
    testutil::TempDir out;
    RunConfig config;
    config.seed = 5;
    config.repeats = 6;
    config.out_dir = out.str();
    const StabilityOutput result = cmd_stability(config);
    CHECK(result.result.repeats == 6);
    CHECK(result.result.headline_percent >= 0.0);

    // the medians log carries every collected point
    std::ifstream in(out.file("stability_medians.csv"));
    REQUIRE(in.good());
    std::string line;
    std::getline(in, line);
    CHECK(line == "median_index,c0,c1");
    std::size_t rows = 0;
    std::vector<std::vector<double>> reloaded;
    while (std::getline(in, line)) {
        ++rows;
        std::stringstream ss(line);
        std::string cell;
        std::getline(ss, cell, ',');
        std::vector<double> point;
        while (std::getline(ss, cell, ',')) point.push_back(std::stod(cell));
        reloaded.push_back(point);
    }
    CHECK(rows == result.result.leaf_medians.size());

    // recount: same clustering, same deviations, same headline
    Matrix points(0, 2);
    for (const auto& m : reloaded) points.push_row(m.data());
    const auto assign = kmeans_assign(points, result.result.clusters,
                                      derive_seed(derive_seed(config.seed, "synthetic"),
                                                  "stability-kmeans"));
    std::vector<double> deviations;
    for (std::size_t c = 0; c < result.result.clusters; ++c) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < points.rows; ++i)
            if (assign[i] == c) members.push_back(i);
        if (members.empty()) continue;
        std::vector<double> med(2);
        for (std::size_t col = 0; col < 2; ++col) {
            std::vector<double> column;
            for (std::size_t i : members) column.push_back(points.at(i, col));
            std::sort(column.begin(), column.end());
            const std::size_t k = column.size();
            med[col] = k % 2 == 1 ? column[k / 2] : 0.5 * (column[k / 2 - 1] + column[k / 2]);
        }
        for (std::size_t i : members) {
            deviations.push_back(std::abs(points.at(i, 0) - med[0]) +
                                 std::abs(points.at(i, 1) - med[1]));
        }
    }
    std::sort(deviations.begin(), deviations.end());
    const double median_dev = deviations[(deviations.size() - 1) / 2];
    CHECK(median_dev == doctest::Approx(result.result.median_deviation).epsilon(1e-12));
}

TEST_CASE("the full pipeline handles wide feature matrices") {
    // warning datasets carry hundreds of columns; make sure nothing in the
    // pipeline assumes a low dimension
    Rng rng(41);
    const std::size_t d = 260;
    WarningDataset data;
    data.project = "wide";
    data.features = Matrix(0, d);
    data.feature_names.resize(d);
    for (std::size_t c = 0; c < d; ++c) data.feature_names[c] = "f" + std::to_string(c);
    std::vector<double> row(d);
    for (std::size_t i = 0; i < 60; ++i) {
        const int label = rng.uniform() < 0.4 ? 1 : 0;
        for (std::size_t c = 0; c < d; ++c) {
            // a handful of informative columns, the rest noise
            const double signal = c < 5 ? 0.4 * label : 0.0;
            row[c] = signal + rng.uniform();
        }
        data.features.push_row(row.data());
        data.labels.push_back(label);
        data.timestamps.push_back(static_cast<std::int64_t>(i));
    }
    const TrainTestSplit split = time_split(data, 0.8);
    RunParams params;
    params.dodge.budget = 4;
    params.train = {150, 0.1};
    params.lenient = true;
    for (TreatmentId id : {TreatmentId::A1, TreatmentId::D1, TreatmentId::A6}) {
        const EvalReport r = run_treatment(split, id, 11, params);
        CHECK(r.ok());
        CHECK(r.auc >= 0.0);
        CHECK(r.auc <= 1.0);
    }
}

TEST_CASE("parallel_for covers every index exactly once") {
    std::vector<std::atomic<int>> hits(257);
    for (auto& h : hits) h = 0;
    parallel_for(hits.size(), 3, [&](std::size_t i) { hits[i].fetch_add(1); });
    for (auto& h : hits) CHECK(h.load() == 1);
    parallel_for(0, 2, [&](std::size_t) { FAIL("must not be called"); });
}
