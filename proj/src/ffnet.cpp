#include <algorithm>
#include <cmath>
#include <ostream>

#include "learners.hpp"

namespace ghost2 {

namespace {

double softplus(double z) {
    return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

}  // namespace

std::size_t FfnetModel::param_count(const std::vector<std::size_t>& sizes) {
    std::size_t total = 0;
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l)
        total += sizes[l + 1] * sizes[l] + sizes[l + 1];
    return total;
}

std::vector<std::pair<std::size_t, std::size_t>> FfnetModel::layer_param_ranges() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    std::size_t offset = 0;
    for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
        const std::size_t span = layer_sizes[l + 1] * layer_sizes[l] + layer_sizes[l + 1];
        out.emplace_back(offset, offset + span);
        offset += span;
    }
    return out;
}

namespace {

// One full-batch forward/backward pass. Returns the class-weighted mean
// cross-entropy; fills `grad` when non-null. Intermediate activations are
// kept per layer for the backward sweep.
double loss_and_gradient(const std::vector<std::size_t>& sizes, const std::vector<double>& params,
                         double weight0, double weight1, const Matrix& x,
                         const std::vector<int>& y, std::vector<double>* grad) {
    const std::size_t n = x.rows;
    const std::size_t n_layers = sizes.size() - 1;

    // activations[0] is the input; activations[l+1] the output of layer l
    std::vector<Matrix> activations(n_layers + 1);
    std::vector<Matrix> pre(n_layers);  // pre-activation values
    activations[0] = x;

    std::size_t offset = 0;
    for (std::size_t l = 0; l < n_layers; ++l) {
        const std::size_t in = sizes[l], out = sizes[l + 1];
        const double* w = params.data() + offset;
        const double* b = w + out * in;
        pre[l] = Matrix(n, out);
        for (std::size_t r = 0; r < n; ++r) {
            const double* a = activations[l].row(r);
            double* z = pre[l].row(r);
            for (std::size_t o = 0; o < out; ++o) {
                double s = b[o];
                const double* wrow = w + o * in;
                for (std::size_t i = 0; i < in; ++i) s += wrow[i] * a[i];
                z[o] = s;
            }
        }
        if (l + 1 < n_layers) {
            activations[l + 1] = pre[l];
            for (double& v : activations[l + 1].vals) v = std::max(0.0, v);
        }
        offset += out * in + out;
    }

    double loss = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        const double z = pre[n_layers - 1].at(r, 0);
        const double w = y[r] == 1 ? weight1 : weight0;
        loss += w * (softplus(z) - static_cast<double>(y[r]) * z);
    }
    loss /= static_cast<double>(n);

    if (grad) {
        grad->assign(params.size(), 0.0);
        // delta for the output layer: w_i * (sigma(z) - y) / n
        Matrix delta(n, 1);
        for (std::size_t r = 0; r < n; ++r) {
            const double z = pre[n_layers - 1].at(r, 0);
            const double w = y[r] == 1 ? weight1 : weight0;
            delta.at(r, 0) = w * (sigmoid(z) - static_cast<double>(y[r])) / static_cast<double>(n);
        }
        std::size_t layer_offset = params.size();
        for (std::size_t l = n_layers; l-- > 0;) {
            const std::size_t in = sizes[l], out = sizes[l + 1];
            layer_offset -= out * in + out;
            double* gw = grad->data() + layer_offset;
            double* gb = gw + out * in;
            for (std::size_t r = 0; r < n; ++r) {
                const double* a = activations[l].row(r);
                const double* d = delta.row(r);
                for (std::size_t o = 0; o < out; ++o) {
                    double* gwrow = gw + o * in;
                    const double dv = d[o];
                    for (std::size_t i = 0; i < in; ++i) gwrow[i] += dv * a[i];
                    gb[o] += dv;
                }
            }
            if (l > 0) {
                const double* w = params.data() + layer_offset;
                Matrix next(n, in);
                for (std::size_t r = 0; r < n; ++r) {
                    const double* d = delta.row(r);
                    double* nd = next.row(r);
                    for (std::size_t i = 0; i < in; ++i) {
                        double s = 0.0;
                        for (std::size_t o = 0; o < out; ++o) s += w[o * in + i] * d[o];
                        // ReLU derivative on this layer's pre-activation
                        nd[i] = pre[l - 1].at(r, i) > 0.0 ? s : 0.0;
                    }
                }
                delta = std::move(next);
            }
        }
    }
    return loss;
}

}  // namespace

double FfnetModel::loss_at(const std::vector<double>& at, const Matrix& x,
                           const std::vector<int>& y) const {
    return loss_and_gradient(layer_sizes, at, weight0, weight1, x, y, nullptr);
}

std::vector<double> FfnetModel::gradient_at(const std::vector<double>& at, const Matrix& x,
                                            const std::vector<int>& y) const {
    std::vector<double> grad;
    loss_and_gradient(layer_sizes, at, weight0, weight1, x, y, &grad);
    return grad;
}

std::vector<double> FfnetModel::raw_scores(const Matrix& features) const {
    const std::size_t n = features.rows;
    const std::size_t n_layers = layer_sizes.size() - 1;
    std::vector<double> scores(n);
    std::vector<double> a, next;
    for (std::size_t r = 0; r < n; ++r) {
        a.assign(features.row(r), features.row(r) + features.cols);
        std::size_t offset = 0;
        for (std::size_t l = 0; l < n_layers; ++l) {
            const std::size_t in = layer_sizes[l], out = layer_sizes[l + 1];
            const double* w = params.data() + offset;
            const double* b = w + out * in;
            next.assign(out, 0.0);
            for (std::size_t o = 0; o < out; ++o) {
                double s = b[o];
                const double* wrow = w + o * in;
                for (std::size_t i = 0; i < in; ++i) s += wrow[i] * a[i];
                next[o] = (l + 1 < n_layers) ? std::max(0.0, s) : s;
            }
            a = next;
            offset += out * in + out;
        }
        scores[r] = sigmoid(a[0]);
    }
    return scores;
}

std::unique_ptr<Model> ffnet_train(const WarningDataset& train, const LearnerConfig& config,
                                   int epochs, double learning_rate, std::uint64_t seed) {
    if (config.layers < 1 || config.units < 1)
        throw Error(ErrorCode::InvalidArgument, "ffnet: layers and units must be >= 1");
    if (train.rows() == 0)
        throw Error(ErrorCode::EmptyDataset, "ffnet: empty training set");

    auto model = std::make_unique<FfnetModel>();
    model->layer_sizes.push_back(train.cols());
    for (int l = 0; l < config.layers; ++l)
        model->layer_sizes.push_back(static_cast<std::size_t>(config.units));
    model->layer_sizes.push_back(1);

    if (config.weight0 > 0.0 && config.weight1 > 0.0) {
        model->weight0 = config.weight0;
        model->weight1 = config.weight1;
    } else {
        std::tie(model->weight0, model->weight1) = balanced_class_weights(train.labels);
    }

    Rng rng(seed);
    model->params.assign(FfnetModel::param_count(model->layer_sizes), 0.0);
    std::size_t offset = 0;
    for (std::size_t l = 0; l + 1 < model->layer_sizes.size(); ++l) {
        const std::size_t in = model->layer_sizes[l], out = model->layer_sizes[l + 1];
        const double bound = std::sqrt(6.0 / static_cast<double>(in + out));
        for (std::size_t i = 0; i < out * in; ++i)
            model->params[offset + i] = (2.0 * rng.uniform() - 1.0) * bound;
        offset += out * in + out;  // biases stay zero
    }

    std::vector<double> grad;
    for (int epoch = 0; epoch < epochs; ++epoch) {
        const double loss = loss_and_gradient(model->layer_sizes, model->params, model->weight0,
                                              model->weight1, train.features, train.labels, &grad);
        if (!std::isfinite(loss))
            throw Error(ErrorCode::NonFiniteLoss,
                        "ffnet: loss diverged at epoch " + std::to_string(epoch) +
                            " (lr=" + std::to_string(learning_rate) + ")");
        for (std::size_t i = 0; i < model->params.size(); ++i)
            model->params[i] -= learning_rate * grad[i];
    }
    model->meta.epochs = epochs;
    model->meta.final_loss =
        model->loss_at(model->params, train.features, train.labels);
    if (!std::isfinite(model->meta.final_loss))
        throw Error(ErrorCode::NonFiniteLoss, "ffnet: final loss is not finite");
    return model;
}

}  // namespace ghost2
