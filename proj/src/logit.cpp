#include <cmath>
#include <ostream>

#include "learners_impl.hpp"

namespace ghost2 {

namespace {

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

}  // namespace

std::vector<double> LogitModel::raw_scores(const Matrix& features) const {
    std::vector<double> scores(features.rows);
    for (std::size_t r = 0; r < features.rows; ++r) {
        double z = b;
        const double* row = features.row(r);
        for (std::size_t j = 0; j < w.size(); ++j) z += w[j] * row[j];
        scores[r] = sigmoid(z);
    }
    return scores;
}

std::unique_ptr<Model> train_logit(const LearnerConfig& config, const WarningDataset& train) {
    if (config.penalty != "l1" && config.penalty != "l2")
        throw Error(ErrorCode::InvalidArgument, "logit: penalty must be l1 or l2");
    if (config.C <= 0.0) throw Error(ErrorCode::InvalidArgument, "logit: C must be > 0");

    const std::size_t n = train.rows();
    const std::size_t d = train.cols();
    auto [w0, w1] = config.weight0 > 0.0 && config.weight1 > 0.0
                        ? std::make_pair(config.weight0, config.weight1)
                        : balanced_class_weights(train.labels);

    auto model = std::make_unique<LogitModel>();
    model->w.assign(d, 0.0);
    model->penalty = config.penalty;
    model->C = config.C;

    const int epochs = 500;
    const double lr = 0.1;
    const double reg = 1.0 / (config.C * static_cast<double>(n));
    std::vector<double> grad(d);
    for (int epoch = 0; epoch < epochs; ++epoch) {
        std::fill(grad.begin(), grad.end(), 0.0);
        double gb = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            double z = model->b;
            const double* row = train.features.row(r);
            for (std::size_t j = 0; j < d; ++j) z += model->w[j] * row[j];
            const double weight = train.labels[r] == 1 ? w1 : w0;
            const double err =
                weight * (sigmoid(z) - static_cast<double>(train.labels[r])) / static_cast<double>(n);
            for (std::size_t j = 0; j < d; ++j) grad[j] += err * row[j];
            gb += err;
        }
        for (std::size_t j = 0; j < d; ++j) {
            double g = grad[j];
            if (config.penalty == "l2") {
                g += reg * model->w[j];
            } else if (model->w[j] != 0.0) {
                g += reg * (model->w[j] > 0.0 ? 1.0 : -1.0);
            }
            model->w[j] -= lr * g;
        }
        model->b -= lr * gb;
    }
    model->meta.epochs = epochs;
    return model;
}

}  // namespace ghost2
