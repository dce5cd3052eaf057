#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "dataset.hpp"

namespace ghost2 {

enum class LearnerKind { FeedForward, Logit, DTree, RForest, Svm, Constant };

const char* learner_kind_name(LearnerKind kind);

// One concrete point in the hyper-parameter space, plus training knobs.
struct LearnerConfig {
    LearnerKind kind = LearnerKind::FeedForward;

    int layers = 4;   // feedforward hidden layers
    int units = 11;   // units per hidden layer

    std::string penalty = "l1";  // logit: l1 | l2
    double C = 0.1;              // logit and svm

    std::string criterion = "gini";   // dtree/rforest: gini | entropy
    std::string splitter = "best";    // dtree: best | random
    int n_estimators = 55;            // rforest
    std::string kernel = "sigmoid";   // svm: sigmoid | rbf | polynomial

    bool bootstrap = true;      // rforest
    bool all_features = false;  // rforest: use all d features per split

    // class weights; 0 means auto-balanced n / (2 * count(c))
    double weight0 = 0.0;
    double weight1 = 0.0;

    static LearnerConfig defaults(LearnerKind kind);
    std::string describe() const;
};

// Discretized option sets for one learner kind. Numeric ranges are reduced
// to at most 8 evenly spaced values for the tuner's option weighting.
struct ParamDomain {
    std::string name;
    std::vector<std::string> values;
};

struct HyperParamSpace {
    LearnerKind kind = LearnerKind::FeedForward;
    std::vector<ParamDomain> params;

    static HyperParamSpace for_kind(LearnerKind kind);
    std::size_t size() const;
    LearnerConfig config_at(const std::vector<std::size_t>& choice) const;
};

struct ModelMeta {
    int epochs = 0;
    double final_loss = 0.0;
    bool warning = false;  // e.g. SMO pass limit reached
};

class Model {
public:
    virtual ~Model() = default;
    virtual LearnerKind kind() const = 0;
    virtual std::size_t input_width() const = 0;
    virtual std::vector<double> raw_scores(const Matrix& features) const = 0;
    virtual void save_payload(std::ostream& out) const = 0;

    ModelMeta meta;
};

struct Prediction {
    std::vector<double> scores;  // in [0,1]
    std::vector<int> labels;     // score >= 0.5
};

Prediction predict(const Model& model, const Matrix& features);

// weight(c) = n / (2 * count(c)); {1,1} when a class is absent
std::pair<double, double> balanced_class_weights(const std::vector<int>& labels);

struct TrainOptions {
    int epochs = 200;
    double learning_rate = 0.01;
};

// Universal entry point; dispatches on config.kind. Single-class training
// data yields a constant predictor whose score is that class's prior.
std::unique_ptr<Model> train_model(const LearnerConfig& config, const WarningDataset& train,
                                   std::uint64_t seed, const TrainOptions& options = {});

std::unique_ptr<Model> ffnet_train(const WarningDataset& train, const LearnerConfig& config,
                                   int epochs, double learning_rate, std::uint64_t seed);

std::unique_ptr<Model> train_traditional(LearnerKind kind, const LearnerConfig& config,
                                         const WarningDataset& train, std::uint64_t seed);

// Fully connected ReLU network with a single sigmoid output, trained by
// full-batch gradient descent on class-weighted binary cross-entropy.
// Parameters are a flat vector, per layer: W (out x in, row-major), then b.
class FfnetModel : public Model {
public:
    std::vector<std::size_t> layer_sizes;  // {d, units, ..., units, 1}
    std::vector<double> params;
    double weight0 = 1.0;
    double weight1 = 1.0;

    LearnerKind kind() const override { return LearnerKind::FeedForward; }
    std::size_t input_width() const override { return layer_sizes.front(); }
    std::vector<double> raw_scores(const Matrix& features) const override;
    void save_payload(std::ostream& out) const override;

    static std::size_t param_count(const std::vector<std::size_t>& sizes);
    // [begin,end) parameter range of each layer, for per-layer direction scaling
    std::vector<std::pair<std::size_t, std::size_t>> layer_param_ranges() const;

    double loss_at(const std::vector<double>& at, const Matrix& x,
                   const std::vector<int>& y) const;
    std::vector<double> gradient_at(const std::vector<double>& at, const Matrix& x,
                                    const std::vector<int>& y) const;
};

class ConstantModel : public Model {
public:
    double score = 0.5;
    std::size_t width = 0;

    LearnerKind kind() const override { return LearnerKind::Constant; }
    std::size_t input_width() const override { return width; }
    std::vector<double> raw_scores(const Matrix& features) const override;
    void save_payload(std::ostream& out) const override;
};

// Versioned binary serialization (magic "GH2M"); numeric round-trip is exact.
void save_model(const Model& model, const std::string& path);
std::unique_ptr<Model> load_model(const std::string& path);
void save_model(const Model& model, std::ostream& out);
std::unique_ptr<Model> load_model(std::istream& in);

}  // namespace ghost2
