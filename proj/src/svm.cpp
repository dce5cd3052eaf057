#include <cmath>
#include <ostream>

#include "learners_impl.hpp"

namespace ghost2 {

namespace {

double dot(const double* a, const double* b, std::size_t d) {
    double s = 0.0;
    for (std::size_t i = 0; i < d; ++i) s += a[i] * b[i];
    return s;
}

double kernel_value(const std::string& kernel, double gamma, const double* a, const double* b,
                    std::size_t d) {
    if (kernel == "rbf") return std::exp(-gamma * squared_distance(a, b, d));
    if (kernel == "sigmoid") return std::tanh(gamma * dot(a, b, d));
    if (kernel == "polynomial") {
        const double v = gamma * dot(a, b, d);
        return v * v * v;
    }
    throw Error(ErrorCode::InvalidArgument, "svm: kernel must be sigmoid, rbf or polynomial");
}

}  // namespace

double SvmModel::margin(const double* row) const {
    double f = bias;
    for (std::size_t i = 0; i < support.rows; ++i)
        f += dual_coef[i] * kernel_value(kernel, gamma, support.row(i), row, support.cols);
    return f;
}

std::vector<double> SvmModel::raw_scores(const Matrix& features) const {
    std::vector<double> scores(features.rows);
    for (std::size_t r = 0; r < features.rows; ++r) {
        const double f = margin(features.row(r));
        scores[r] = f >= 0.0 ? 1.0 / (1.0 + std::exp(-f))
                             : std::exp(f) / (1.0 + std::exp(f));
    }
    return scores;
}

// Simplified sequential minimal optimization with per-sample box constraints
// C_i = C * class_weight(y_i). Stops when a full pass changes nothing or the
// pass limit is hit (best-so-far returned with a warning flag).
std::unique_ptr<Model> train_svm(const LearnerConfig& config, const WarningDataset& train,
                                 std::uint64_t seed) {
    if (config.C <= 0.0) throw Error(ErrorCode::InvalidArgument, "svm: C must be > 0");
    const std::size_t n = train.rows();
    const std::size_t d = train.cols();
    const double gamma = 1.0 / static_cast<double>(d);
    const double tol = 1e-3;
    const int max_passes = 100;

    auto [w0, w1] = config.weight0 > 0.0 && config.weight1 > 0.0
                        ? std::make_pair(config.weight0, config.weight1)
                        : balanced_class_weights(train.labels);

    std::vector<double> y(n);
    std::vector<double> cap(n);
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = train.labels[i] == 1 ? 1.0 : -1.0;
        cap[i] = config.C * (train.labels[i] == 1 ? w1 : w0);
    }

    Matrix k(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            const double v =
                kernel_value(config.kernel, gamma, train.features.row(i), train.features.row(j), d);
            k.at(i, j) = v;
            k.at(j, i) = v;
        }
    }

    std::vector<double> alpha(n, 0.0);
    double b = 0.0;
    auto decision = [&](std::size_t i) {
        double f = b;
        for (std::size_t j = 0; j < n; ++j)
            if (alpha[j] != 0.0) f += alpha[j] * y[j] * k.at(j, i);
        return f;
    };

    Rng rng(seed);
    int passes = 0;
    bool converged = false;
    while (passes < max_passes) {
        std::size_t changed = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double ei = decision(i) - y[i];
            const double r = y[i] * ei;
            if (!((r < -tol && alpha[i] < cap[i]) || (r > tol && alpha[i] > 0.0))) continue;

            std::size_t j = rng.uniform_index(n - 1);
            if (j >= i) ++j;
            const double ej = decision(j) - y[j];

            double lo, hi;
            if (y[i] != y[j]) {
                lo = std::max(0.0, alpha[j] - alpha[i]);
                hi = std::min(cap[j], cap[i] + alpha[j] - alpha[i]);
            } else {
                lo = std::max(0.0, alpha[i] + alpha[j] - cap[i]);
                hi = std::min(cap[j], alpha[i] + alpha[j]);
            }
            if (lo >= hi) continue;

            const double eta = 2.0 * k.at(i, j) - k.at(i, i) - k.at(j, j);
            if (eta >= 0.0) continue;

            double aj = alpha[j] - y[j] * (ei - ej) / eta;
            aj = std::clamp(aj, lo, hi);
            if (std::abs(aj - alpha[j]) < 1e-7) continue;
            const double ai = alpha[i] + y[i] * y[j] * (alpha[j] - aj);

            const double b1 = b - ei - y[i] * (ai - alpha[i]) * k.at(i, i) -
                              y[j] * (aj - alpha[j]) * k.at(i, j);
            const double b2 = b - ej - y[i] * (ai - alpha[i]) * k.at(i, j) -
                              y[j] * (aj - alpha[j]) * k.at(j, j);
            alpha[i] = ai;
            alpha[j] = aj;
            if (ai > 0.0 && ai < cap[i]) {
                b = b1;
            } else if (aj > 0.0 && aj < cap[j]) {
                b = b2;
            } else {
                b = 0.5 * (b1 + b2);
            }
            ++changed;
        }
        ++passes;
        if (changed == 0) {
            converged = true;
            break;
        }
    }

    auto model = std::make_unique<SvmModel>();
    model->kernel = config.kernel;
    model->gamma = gamma;
    model->bias = b;
    model->support = Matrix(0, d);
    for (std::size_t i = 0; i < n; ++i) {
        if (alpha[i] > 0.0) {
            model->support.push_row(train.features.row(i));
            model->dual_coef.push_back(alpha[i] * y[i]);
        }
    }
    model->meta.epochs = passes;
    model->meta.warning = !converged;
    return model;
}

}  // namespace ghost2
