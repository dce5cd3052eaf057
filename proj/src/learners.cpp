#include "learners.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "learners_impl.hpp"

namespace ghost2 {

const char* learner_kind_name(LearnerKind kind) {
    switch (kind) {
        case LearnerKind::FeedForward: return "ffnet";
        case LearnerKind::Logit: return "logit";
        case LearnerKind::DTree: return "dtree";
        case LearnerKind::RForest: return "rforest";
        case LearnerKind::Svm: return "svm";
        case LearnerKind::Constant: return "constant";
    }
    return "?";
}

LearnerConfig LearnerConfig::defaults(LearnerKind kind) {
    // untuned settings: integer midpoint for numeric ranges, first option
    // for categorical ones
    LearnerConfig c;
    c.kind = kind;
    switch (kind) {
        case LearnerKind::FeedForward:
            c.layers = 4;
            c.units = 11;
            break;
        case LearnerKind::Logit:
            c.penalty = "l1";
            c.C = 0.1;
            break;
        case LearnerKind::DTree:
            c.criterion = "gini";
            c.splitter = "best";
            break;
        case LearnerKind::RForest:
            c.criterion = "gini";
            c.n_estimators = 55;
            break;
        case LearnerKind::Svm:
            c.C = 0.1;
            c.kernel = "sigmoid";
            break;
        case LearnerKind::Constant:
            break;
    }
    return c;
}

std::string LearnerConfig::describe() const {
    std::ostringstream out;
    out << learner_kind_name(kind);
    switch (kind) {
        case LearnerKind::FeedForward:
            out << " layers=" << layers << " units=" << units;
            break;
        case LearnerKind::Logit:
            out << " penalty=" << penalty << " C=" << C;
            break;
        case LearnerKind::DTree:
            out << " criterion=" << criterion << " splitter=" << splitter;
            break;
        case LearnerKind::RForest:
            out << " criterion=" << criterion << " n_estimators=" << n_estimators;
            break;
        case LearnerKind::Svm:
            out << " C=" << C << " kernel=" << kernel;
            break;
        case LearnerKind::Constant:
            break;
    }
    return out.str();
}

namespace {

std::vector<std::string> spread_int_options(int lo, int hi, std::size_t max_options) {
    const std::size_t count =
        std::min<std::size_t>(max_options, static_cast<std::size_t>(hi - lo + 1));
    std::vector<std::string> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        const double v = lo + static_cast<double>(k) * (hi - lo) / static_cast<double>(count - 1);
        out.push_back(std::to_string(static_cast<int>(std::lround(v))));
    }
    return out;
}

}  // namespace

HyperParamSpace HyperParamSpace::for_kind(LearnerKind kind) {
    HyperParamSpace space;
    space.kind = kind;
    switch (kind) {
        case LearnerKind::FeedForward:
            space.params = {{"layers", spread_int_options(2, 6, 8)},
                            {"units", spread_int_options(3, 20, 8)}};
            break;
        case LearnerKind::Logit:
            space.params = {{"penalty", {"l1", "l2"}}, {"C", {"0.1", "1", "10", "100"}}};
            break;
        case LearnerKind::RForest:
            space.params = {{"criterion", {"gini", "entropy"}},
                            {"n_estimators", spread_int_options(10, 100, 8)}};
            break;
        case LearnerKind::DTree:
            space.params = {{"criterion", {"gini", "entropy"}}, {"splitter", {"best", "random"}}};
            break;
        case LearnerKind::Svm:
            space.params = {{"C", {"0.1", "1", "10", "100"}},
                            {"kernel", {"sigmoid", "rbf", "polynomial"}}};
            break;
        case LearnerKind::Constant:
            break;
    }
    return space;
}

std::size_t HyperParamSpace::size() const {
    std::size_t n = 1;
    for (const ParamDomain& p : params) n *= p.values.size();
    return n;
}

LearnerConfig HyperParamSpace::config_at(const std::vector<std::size_t>& choice) const {
    LearnerConfig config = LearnerConfig::defaults(kind);
    for (std::size_t i = 0; i < params.size(); ++i) {
        const std::string& name = params[i].name;
        const std::string& value = params[i].values[choice[i]];
        if (name == "layers") {
            config.layers = std::stoi(value);
        } else if (name == "units") {
            config.units = std::stoi(value);
        } else if (name == "penalty") {
            config.penalty = value;
        } else if (name == "C") {
            config.C = std::stod(value);
        } else if (name == "criterion") {
            config.criterion = value;
        } else if (name == "splitter") {
            config.splitter = value;
        } else if (name == "n_estimators") {
            config.n_estimators = std::stoi(value);
        } else if (name == "kernel") {
            config.kernel = value;
        } else {
            throw Error(ErrorCode::Internal, "unknown hyper-parameter " + name);
        }
    }
    return config;
}

std::pair<double, double> balanced_class_weights(const std::vector<int>& labels) {
    const double n = static_cast<double>(labels.size());
    const double c1 = static_cast<double>(std::count(labels.begin(), labels.end(), 1));
    const double c0 = n - c1;
    if (c0 == 0.0 || c1 == 0.0) return {1.0, 1.0};
    return {n / (2.0 * c0), n / (2.0 * c1)};
}

Prediction predict(const Model& model, const Matrix& features) {
    if (features.cols != model.input_width())
        throw Error(ErrorCode::WidthMismatch,
                    "predict: feature width " + std::to_string(features.cols) +
                        " does not match training width " + std::to_string(model.input_width()));
    Prediction p;
    p.scores = model.raw_scores(features);
    p.labels.reserve(p.scores.size());
    for (double s : p.scores) p.labels.push_back(s >= 0.5 ? 1 : 0);
    return p;
}

std::vector<double> ConstantModel::raw_scores(const Matrix& features) const {
    return std::vector<double>(features.rows, score);
}

std::unique_ptr<Model> train_model(const LearnerConfig& config, const WarningDataset& train,
                                   std::uint64_t seed, const TrainOptions& options) {
    if (train.rows() == 0)
        throw Error(ErrorCode::EmptyDataset, "train_model: empty training set");
    const std::size_t ones = train.count_label(1);
    if (ones == 0 || ones == train.rows()) {
        auto model = std::make_unique<ConstantModel>();
        model->score = static_cast<double>(ones) / static_cast<double>(train.rows());
        model->width = train.cols();
        return model;
    }
    switch (config.kind) {
        case LearnerKind::FeedForward:
            return ffnet_train(train, config, options.epochs, options.learning_rate, seed);
        case LearnerKind::Logit:
            return train_logit(config, train);
        case LearnerKind::DTree:
            return train_dtree(config, train, seed);
        case LearnerKind::RForest:
            return train_rforest(config, train, seed);
        case LearnerKind::Svm:
            return train_svm(config, train, seed);
        case LearnerKind::Constant: {
            auto model = std::make_unique<ConstantModel>();
            model->score = static_cast<double>(ones) / static_cast<double>(train.rows());
            model->width = train.cols();
            return model;
        }
    }
    throw Error(ErrorCode::Internal, "train_model: bad learner kind");
}

std::unique_ptr<Model> train_traditional(LearnerKind kind, const LearnerConfig& config,
                                         const WarningDataset& train, std::uint64_t seed) {
    if (kind == LearnerKind::FeedForward || kind == LearnerKind::Constant)
        throw Error(ErrorCode::InvalidArgument, "train_traditional: not a traditional learner");
    LearnerConfig c = config;
    c.kind = kind;
    return train_model(c, train, seed);
}

}  // namespace ghost2
