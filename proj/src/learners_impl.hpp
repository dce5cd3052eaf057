#pragma once

// Internal model classes shared between the trainers and model_io.

#include "learners.hpp"

namespace ghost2 {

class LogitModel : public Model {
public:
    std::vector<double> w;
    double b = 0.0;
    std::string penalty = "l1";
    double C = 0.1;

    LearnerKind kind() const override { return LearnerKind::Logit; }
    std::size_t input_width() const override { return w.size(); }
    std::vector<double> raw_scores(const Matrix& features) const override;
    void save_payload(std::ostream& out) const override;
};

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    long left = -1;
    long right = -1;
    double score = 0.0;  // positive fraction at this node
};

class DTreeModel : public Model {
public:
    std::vector<TreeNode> nodes;
    std::size_t width = 0;

    LearnerKind kind() const override { return LearnerKind::DTree; }
    std::size_t input_width() const override { return width; }
    std::vector<double> raw_scores(const Matrix& features) const override;
    void save_payload(std::ostream& out) const override;

    double score_row(const double* row) const;
};

class RForestModel : public Model {
public:
    std::vector<DTreeModel> trees;
    std::size_t width = 0;

    LearnerKind kind() const override { return LearnerKind::RForest; }
    std::size_t input_width() const override { return width; }
    std::vector<double> raw_scores(const Matrix& features) const override;
    void save_payload(std::ostream& out) const override;
};

class SvmModel : public Model {
public:
    std::string kernel = "rbf";
    double gamma = 1.0;
    double bias = 0.0;
    Matrix support;                 // support vectors, one per row
    std::vector<double> dual_coef;  // alpha_i * y_i per support vector

    LearnerKind kind() const override { return LearnerKind::Svm; }
    std::size_t input_width() const override { return support.cols; }
    std::vector<double> raw_scores(const Matrix& features) const override;
    void save_payload(std::ostream& out) const override;

    double margin(const double* row) const;
};

// Shared CART builder. `max_features` = 0 means all features; otherwise that
// many distinct features are sampled per split with `rng`.
DTreeModel build_cart_tree(const Matrix& x, const std::vector<int>& y,
                           const std::vector<std::size_t>& sample_indices,
                           const std::string& criterion, const std::string& splitter,
                           std::size_t max_features, Rng& rng);

std::unique_ptr<Model> train_logit(const LearnerConfig& config, const WarningDataset& train);
std::unique_ptr<Model> train_dtree(const LearnerConfig& config, const WarningDataset& train,
                                   std::uint64_t seed);
std::unique_ptr<Model> train_rforest(const LearnerConfig& config, const WarningDataset& train,
                                     std::uint64_t seed);
std::unique_ptr<Model> train_svm(const LearnerConfig& config, const WarningDataset& train,
                                 std::uint64_t seed);

}  // namespace ghost2
