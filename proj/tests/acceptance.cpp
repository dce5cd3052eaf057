// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Conditional paper-data criteria are skipped unless GHOST2_DATA
// points at the per-project CSVs.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "geometry.hpp"
#include "harness.hpp"
#include "landscape.hpp"
#include "metrics.hpp"
#include "tuner.hpp"

using namespace ghost2;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

struct Stopwatch {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

void report(int criterion, bool pass, double seconds, double limit_seconds,
            const std::string& detail) {
    const bool in_time = seconds <= limit_seconds;
    if (!pass || !in_time) ++g_failures;
    std::printf("%s criterion %d: %s (%.1fs of %.0fs budget)\n",
                pass && in_time ? "PASS" : "FAIL", criterion, detail.c_str(), seconds,
                limit_seconds);
    std::fflush(stdout);
}

void report_skip(int criterion, const std::string& reason) {
    std::printf("SKIP criterion %d: %s\n", criterion, reason.c_str());
    std::fflush(stdout);
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[(v.size() - 1) / 2];
}

// --- criterion 1: exact oracle equivalence ------------------------------

std::vector<std::size_t> brute_knn(const Matrix& points, std::size_t query, std::size_t k) {
    std::vector<std::pair<double, std::size_t>> candidates;
    for (std::size_t i = 0; i < points.rows; ++i) {
        if (i == query) continue;
        candidates.emplace_back(squared_distance(points.row(query), points.row(i), points.cols), i);
    }
    std::sort(candidates.begin(), candidates.end());
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < k && i < candidates.size(); ++i) out.push_back(candidates[i].second);
    return out;
}

double pair_auc(const std::vector<int>& y, const std::vector<double>& s) {
    double wins = 0.0;
    std::size_t pos = 0;
    for (int v : y) pos += static_cast<std::size_t>(v);
    const std::size_t neg = y.size() - pos;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] != 1) continue;
        for (std::size_t j = 0; j < y.size(); ++j) {
            if (y[j] != 0) continue;
            if (s[i] > s[j]) {
                wins += 1.0;
            } else if (s[i] == s[j]) {
                wins += 0.5;
            }
        }
    }
    return wins / (static_cast<double>(pos) * static_cast<double>(neg));
}

void criterion_1() {
    Stopwatch timer;
    bool pass = true;
    std::string detail = "kd-tree knn == brute force; rank auc == pair oracle";
    Rng rng(101);
    for (int trial = 0; trial < 100 && pass; ++trial) {
        const std::size_t n = 20 + rng.uniform_index(481);   // up to 500
        const std::size_t d = 1 + rng.uniform_index(20);     // up to 20
        Matrix m(n, d);
        for (double& v : m.vals) v = rng.uniform();
        const KdTree tree = KdTree::build(m, 1 + rng.uniform_index(16));
        for (int q = 0; q < 5 && pass; ++q) {
            const std::size_t query = rng.uniform_index(n);
            const std::size_t k = 1 + rng.uniform_index(10);
            if (tree.knn(query, k) != brute_knn(m, query, k)) {
                pass = false;
                detail = "knn mismatch at trial " + std::to_string(trial);
            }
        }
    }
    for (int trial = 0; trial < 100 && pass; ++trial) {
        const std::size_t n = 5 + rng.uniform_index(60);
        std::vector<int> y(n);
        std::vector<double> s(n);
        for (std::size_t i = 0; i < n; ++i) {
            y[i] = rng.uniform() < 0.4 ? 1 : 0;
            s[i] = std::floor(rng.uniform() * 6.0) / 6.0;  // force ties
        }
        const std::size_t pos = static_cast<std::size_t>(std::count(y.begin(), y.end(), 1));
        if (pos == 0 || pos == n) continue;
        if (auc(y, s).value != pair_auc(y, s)) {
            pass = false;
            detail = "auc mismatch at trial " + std::to_string(trial);
        }
    }
    report(1, pass, timer.seconds(), 30.0, detail);
}

// --- criterion 2: gradient check ----------------------------------------

double min_hinge_margin(const FfnetModel& model, const Matrix& x) {
    double margin = 1e300;
    for (std::size_t r = 0; r < x.rows; ++r) {
        std::vector<double> a(x.row(r), x.row(r) + x.cols);
        std::size_t offset = 0;
        const std::size_t n_layers = model.layer_sizes.size() - 1;
        for (std::size_t l = 0; l < n_layers; ++l) {
            const std::size_t in = model.layer_sizes[l], out = model.layer_sizes[l + 1];
            const double* w = model.params.data() + offset;
            const double* b = w + out * in;
            std::vector<double> next(out);
            for (std::size_t o = 0; o < out; ++o) {
                double s = b[o];
                for (std::size_t i = 0; i < in; ++i) s += w[o * in + i] * a[i];
                if (l + 1 < n_layers) margin = std::min(margin, std::abs(s));
                next[o] = (l + 1 < n_layers) ? std::max(0.0, s) : s;
            }
            a = std::move(next);
            offset += out * in + out;
        }
    }
    return margin;
}

void criterion_2() {
    Stopwatch timer;
    bool pass = true;
    double worst = 0.0;
    Rng rng(7);  // validated: every fixture stays off the ReLU hinge
    for (int net = 0; net < 20 && pass; ++net) {
        const int layers = 1 + static_cast<int>(rng.uniform_index(3));
        const int units = 2 + static_cast<int>(rng.uniform_index(4));
        const std::size_t d = 2 + rng.uniform_index(5);
        WarningDataset data;
        data.project = "grad";
        data.features = Matrix(10, d);
        for (double& v : data.features.vals) v = rng.uniform();
        data.feature_names.assign(d, "f");
        for (int i = 0; i < 10; ++i) {
            data.labels.push_back(rng.uniform() < 0.4 ? 1 : 0);
            data.timestamps.push_back(i);
        }
        if (data.count_label(1) == 0) data.labels[0] = 1;
        if (data.count_label(1) == data.rows()) data.labels[0] = 0;

        FfnetModel model;
        model.layer_sizes.push_back(d);
        for (int l = 0; l < layers; ++l) model.layer_sizes.push_back(static_cast<std::size_t>(units));
        model.layer_sizes.push_back(1);
        model.params.resize(FfnetModel::param_count(model.layer_sizes));
        for (double& p : model.params) p = 2.0 * rng.uniform() - 1.0;
        std::tie(model.weight0, model.weight1) = balanced_class_weights(data.labels);

        if (min_hinge_margin(model, data.features) <= 1e-4) {
            pass = false;
            break;
        }
        const std::vector<double> analytic =
            model.gradient_at(model.params, data.features, data.labels);
        std::vector<double> params = model.params;
        const double h = 1e-5;
        for (std::size_t i = 0; i < params.size(); ++i) {
            const double keep = params[i];
            params[i] = keep + h;
            const double up = model.loss_at(params, data.features, data.labels);
            params[i] = keep - h;
            const double down = model.loss_at(params, data.features, data.labels);
            params[i] = keep;
            const double fd = (up - down) / (2.0 * h);
            const double scale = std::max({std::abs(analytic[i]), std::abs(fd), 1e-2});
            worst = std::max(worst, std::abs(analytic[i] - fd) / scale);
        }
    }
    pass = pass && worst < 1e-4;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "analytic vs central differences, 20 nets, max rel err %.2e < 1e-4", worst);
    report(2, pass, timer.seconds(), 10.0, buf);
}

// --- criterion 3: treatment property suites ------------------------------

WarningDataset random_dataset(std::size_t rows, std::size_t cols, double minority, Rng& rng) {
    WarningDataset d;
    d.project = "prop";
    d.features = Matrix(rows, cols);
    for (double& v : d.features.vals) v = rng.uniform();
    d.feature_names.assign(cols, "f");
    for (std::size_t r = 0; r < rows; ++r) {
        d.labels.push_back(rng.uniform() < minority ? 1 : 0);
        d.timestamps.push_back(static_cast<std::int64_t>(r));
    }
    return d;
}

void criterion_3() {
    Stopwatch timer;
    std::string detail;
    bool pass = true;
    Rng rng(33);

    // SMOTE: balance + convex-combination-of-two-originals, 200 cases
    int cases = 0;
    while (cases < 200 && pass) {
        const std::size_t n = 8 + rng.uniform_index(80);
        WarningDataset d = random_dataset(n, 1 + rng.uniform_index(6), 0.3, rng);
        const std::size_t ones = d.count_label(1);
        if (ones < 2 || ones + 2 > n || 2 * ones == n) continue;
        ++cases;
        const WarningDataset out = smote(d, 5, rng.next());
        if (out.count_label(1) * 2 != out.rows()) {
            pass = false;
            detail = "smote did not balance";
            break;
        }
        const int minority = 2 * ones < n ? 1 : 0;
        for (std::size_t s = n; s < out.rows() && pass; ++s) {
            if (out.labels[s] != minority) {
                pass = false;
                detail = "smote synthetic label mismatch";
                break;
            }
            // the synthetic row must be a convex combination of two originals
            bool explained = false;
            for (std::size_t x = 0; x < n && !explained; ++x) {
                if (d.labels[x] != minority) continue;
                for (std::size_t r2 = 0; r2 < n && !explained; ++r2) {
                    if (r2 == x || d.labels[r2] != minority) continue;
                    double t = -1.0;
                    bool ok = true;
                    for (std::size_t c = 0; c < d.cols(); ++c) {
                        const double xv = d.features.at(x, c);
                        const double rv = d.features.at(r2, c);
                        const double sv = out.features.at(s, c);
                        if (std::abs(rv - xv) > 1e-12) {
                            const double tc = (sv - xv) / (rv - xv);
                            if (t < 0.0) {
                                t = tc;
                            } else if (std::abs(tc - t) > 1e-8) {
                                ok = false;
                                break;
                            }
                        } else if (std::abs(sv - xv) > 1e-8) {
                            ok = false;
                            break;
                        }
                    }
                    if (ok && (t < 0.0 || (t >= 0.0 && t <= 1.0))) explained = true;
                }
            }
            if (!explained) {
                pass = false;
                detail = "smote synthetic not on a segment between originals";
            }
        }
    }

    // SMOOTH: exact label budget + leaf-mode property, 200 cases
    cases = 0;
    while (cases < 200 && pass) {
        const std::size_t n = 4 + rng.uniform_index(150);
        WarningDataset d = random_dataset(n, 2 + rng.uniform_index(4), 0.4, rng);
        ++cases;
        auto [out, used] = smooth(d, rng.next());
        if (out.rows() != ceil_sqrt(n) || used != out.rows()) {
            pass = false;
            detail = "smooth label budget violated";
            break;
        }
        const KdTree tree = KdTree::build(out.features, ceil_fourth_root(n));
        for (const auto& leaf : tree.leaves()) {
            std::set<int> labels_in_leaf;
            for (std::size_t i : leaf) labels_in_leaf.insert(out.labels[i]);
            if (labels_in_leaf.size() != 1) {
                pass = false;
                detail = "smooth leaf not label-constant";
                break;
            }
        }
    }

    // GHOST: box count arithmetic + imbalance reversal, 200 cases
    cases = 0;
    while (cases < 200 && pass) {
        const std::size_t n = 10 + rng.uniform_index(150);
        WarningDataset d = random_dataset(n, 1 + rng.uniform_index(6), 0.05 + 0.45 * rng.uniform(), rng);
        const std::size_t ones = d.count_label(1);
        if (ones == 0 || ones == n) continue;
        ++cases;
        const std::size_t c_min = std::min(ones, n - ones);
        const std::size_t boxes = ghost_box_count(c_min, n);
        // floor(log2(1/minority_fraction)) via the reference formula
        const std::size_t expected =
            static_cast<std::size_t>(std::floor(std::log2(static_cast<double>(n) /
                                                          static_cast<double>(c_min)) + 1e-12));
        if (boxes != expected) {
            pass = false;
            detail = "ghost box count != floor(log2(1/fraction))";
            break;
        }
        const WarningDataset out = ghost(d, 0.01, 0, rng.next());
        if (boxes >= 1) {
            const std::size_t new_minority = c_min + (out.rows() - n);
            if (new_minority <= n - c_min) {
                pass = false;
                detail = "ghost did not reverse the imbalance";
            }
        }
    }

    if (pass) detail = "smote/smooth/ghost property suites, 200 random cases each";
    report(3, pass, timer.seconds(), 60.0, detail);
}

// --- criterion 4: dodge budget and optimum recovery ----------------------

void criterion_4() {
    Stopwatch timer;
    bool pass = true;
    std::string detail;

    // budget: injected counter on real fits
    Rng rng(44);
    WarningDataset d = random_dataset(60, 3, 0.4, rng);
    std::atomic<std::size_t> fits{0};
    dodge(LearnerKind::FeedForward, d, {30, 0.2}, 9, &fits, {50, 0.1});
    if (fits.load() > 30) {
        pass = false;
        detail = "fit counter exceeded the budget: " + std::to_string(fits.load());
    }

    // a >0.2-margin optimum must be recovered in >= 80% of 20 seeds
    if (pass) {
        const HyperParamSpace space = HyperParamSpace::for_kind(LearnerKind::RForest);
        auto objective = [](const LearnerConfig& c) {
            if (c.criterion == "entropy" && c.n_estimators == 61) return 0.92;
            return 0.5 + 0.002 * static_cast<double>(c.n_estimators % 5);
        };
        double best_true = -1.0;
        for (std::size_t a = 0; a < space.params[0].values.size(); ++a)
            for (std::size_t b = 0; b < space.params[1].values.size(); ++b)
                best_true = std::max(best_true, objective(space.config_at({a, b})));
        int hits = 0;
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            const DodgeResult r = dodge_search(space, objective, {30, 0.2}, seed);
            if (r.fits > 30) pass = false;
            if (best_true - objective(r.best) <= 0.2) ++hits;
        }
        if (hits < 16) {
            pass = false;
            detail = "optimum recovered in only " + std::to_string(hits) + "/20 seeds";
        } else if (pass) {
            detail = "fits <= 30; optimum within 0.2 in " + std::to_string(hits) + "/20 seeds";
        }
    }
    report(4, pass, timer.seconds(), 120.0, detail);
}

// --- criterion 5: end-to-end synthetic benchmark -------------------------

void criterion_5() {
    Stopwatch timer;
    const WarningDataset bench = make_synthetic_benchmark();
    const TrainTestSplit split = time_split(bench, 0.8);

    RunParams params;
    params.lenient = true;

    std::vector<double> a1, d1;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        a1.push_back(run_treatment(split, TreatmentId::A1, seed, params).auc);
        d1.push_back(run_treatment(split, TreatmentId::D1, seed, params).auc);
    }
    const double a1_median = median(a1);
    const double d1_median = median(d1);
    const double margin = a1_median - d1_median;

    // landscape: raw-trained model vs model trained on the A1-treated data,
    // median change across the same 20 seeds (some seeds degenerate to a
    // single class after the plan and are skipped)
    auto [norm_split, norm_params] = normalize(split);
    const Recipe a1_recipe = recipe_for(TreatmentId::A1);
    std::vector<double> changes;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const PlanResult treated =
            apply_plan(norm_split.train, a1_recipe.plan, derive_seed(seed, "plan"), true);
        if (treated.data.count_label(1) == 0 ||
            treated.data.count_label(1) == treated.data.rows())
            continue;
        const auto before = train_model(LearnerConfig::defaults(LearnerKind::FeedForward),
                                        norm_split.train, derive_seed(seed, "before-fit"),
                                        params.train);
        const LearnerConfig after_config =
            dodge(LearnerKind::FeedForward, treated.data, params.dodge, derive_seed(seed, "dodge"),
                  nullptr, params.train)
                .best;
        const auto after =
            train_model(after_config, treated.data, derive_seed(seed, "after-fit"), params.train);
        const LandscapeGrid grid_before =
            loss_surface(*before, norm_split.train, 25, 1.0, derive_seed(seed, "dirs-before"));
        const LandscapeGrid grid_after =
            loss_surface(*after, treated.data, 25, 1.0, derive_seed(seed, "dirs-after"));
        changes.push_back(smoothness_change(grid_before, grid_after));
    }
    const double change = changes.empty() ? -100.0 : median(changes);

    const bool pass = margin >= 0.10 && change > 0.0;
    char buf[220];
    std::snprintf(buf, sizeof(buf),
                  "A1 median AUC %.3f vs D1 %.3f (margin %+.3f, need >= +0.10); "
                  "median smoothness change %+.1f%% over %zu seeds (need > 0)",
                  a1_median, d1_median, margin, change, changes.size());
    report(5, pass, timer.seconds(), 600.0, buf);
}

// --- criterion 6: smooth stability ---------------------------------------

void criterion_6() {
    Stopwatch timer;
    bool pass = true;
    double worst = 0.0;
    const WarningDataset bench = make_synthetic_benchmark();
    const TrainTestSplit raw = time_split(bench, 0.8);
    auto [split, np] = normalize(raw);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const StabilityResult r = smooth_stability(split.train, 20, seed);
        worst = std::max(worst, r.headline_percent);
    }
    pass = worst < 5.0;
    std::string detail;
    {
        char buf[120];
        std::snprintf(buf, sizeof(buf), "benchmark headline deviation max %.3f%% < 5%%", worst);
        detail = buf;
    }

    if (const char* env = std::getenv("GHOST2_DATA")) {
        double paper_worst = 0.0;
        for (const WarningDataset& project : load_projects(env)) {
            if (project.rows() < 8) continue;
            const TrainTestSplit praw = time_split(project, 0.8);
            auto [psplit, pnp] = normalize(praw);
            try {
                const StabilityResult r = smooth_stability(psplit.train, 20, 1);
                paper_worst = std::max(paper_worst, r.headline_percent);
            } catch (const Error&) {
                // projects too small for two leaves are out of the diagnostic's domain
            }
        }
        char buf[80];
        std::snprintf(buf, sizeof(buf), "; paper data max %.3f%% <= 1%%", paper_worst);
        detail += buf;
        pass = pass && paper_worst <= 1.0;
    }
    report(6, pass, timer.seconds(), 120.0, detail);
}

// --- criterion 7: conditional paper-data reproduction --------------------

void criterion_7() {
    const char* env = std::getenv("GHOST2_DATA");
    if (!env || !*env) {
        report_skip(7, "GHOST2_DATA not set; paper-data reproduction unavailable");
        return;
    }
    Stopwatch timer;
    RunParams params;
    params.lenient = true;
    std::vector<double> a1_aucs, d1_aucs;
    int perfect = 0;
    for (const WarningDataset& project : load_projects(env)) {
        const TrainTestSplit split = time_split(project, 0.8);
        const EvalReport a1 = run_treatment(split, TreatmentId::A1, 1, params);
        const EvalReport d1 = run_treatment(split, TreatmentId::D1, 1, params);
        if (a1.ok()) {
            a1_aucs.push_back(a1.auc);
            if (a1.auc == 1.0) ++perfect;
        }
        if (d1.ok()) d1_aucs.push_back(d1.auc);
    }
    bool pass = !a1_aucs.empty() && !d1_aucs.empty();
    double a1_median = 0.0, d1_median = 0.0;
    if (pass) {
        a1_median = median(a1_aucs);
        d1_median = median(d1_aucs);
        pass = perfect >= 3 && a1_median >= 0.80 && d1_median <= 0.60;
    }
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "A1: %d perfect AUC projects (need >= 3), median %.3f (need >= 0.80); "
                  "D1 median %.3f (need <= 0.60)",
                  perfect, a1_median, d1_median);
    report(7, pass, timer.seconds(), 1800.0, buf);
}

// --- criterion 8: determinism --------------------------------------------

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void criterion_8() {
    Stopwatch timer;
    const fs::path base = fs::temp_directory_path() / "ghost2_acceptance_det";
    fs::remove_all(base);
    RunConfig config;
    config.treatments = {"A3", "D1"};
    config.seed = 42;
    config.budget = 5;
    config.lenient = true;
    config.out_dir = (base / "one").string();
    cmd_run(config);
    config.out_dir = (base / "two").string();
    cmd_run(config);
    const std::string one = slurp(base / "one" / "results.csv");
    const std::string two = slurp(base / "two" / "results.csv");
    const bool pass = !one.empty() && one == two;
    fs::remove_all(base);
    report(8, pass, timer.seconds(), 120.0,
           pass ? "cmd_run twice with the same seed: byte-identical results.csv"
                : "results.csv differed between identical runs");
}

}  // namespace

int main() {
    std::printf("ghost2 acceptance suite\n");
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    if (g_failures > 0) {
        std::printf("%d criterion(s) failed\n", g_failures);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}
