#include "tuner.hpp"

#include <algorithm>

#include "metrics.hpp"

namespace ghost2 {

namespace {

std::vector<std::size_t> decode_choice(const HyperParamSpace& space, std::size_t flat) {
    std::vector<std::size_t> choice(space.params.size());
    for (std::size_t p = space.params.size(); p-- > 0;) {
        const std::size_t count = space.params[p].values.size();
        choice[p] = flat % count;
        flat /= count;
    }
    return choice;
}

std::size_t encode_choice(const HyperParamSpace& space, const std::vector<std::size_t>& choice) {
    std::size_t flat = 0;
    for (std::size_t p = 0; p < space.params.size(); ++p)
        flat = flat * space.params[p].values.size() + choice[p];
    return flat;
}

}  // namespace

DodgeResult dodge_search(const HyperParamSpace& space,
                         const std::function<double(const LearnerConfig&)>& evaluate,
                         const DodgeOptions& options, std::uint64_t seed) {
    if (options.budget < 1)
        throw Error(ErrorCode::InvalidArgument, "dodge: budget must be >= 1");
    if (options.epsilon <= 0.0)
        throw Error(ErrorCode::InvalidArgument, "dodge: epsilon must be > 0");
    const std::size_t total = space.size();
    if (total == 0) throw Error(ErrorCode::InvalidArgument, "dodge: empty space");

    Rng rng(seed);
    std::vector<std::vector<double>> weights(space.params.size());
    for (std::size_t p = 0; p < space.params.size(); ++p)
        weights[p].assign(space.params[p].values.size(), 0.0);

    std::vector<bool> evaluated(total, false);
    std::vector<std::size_t> unevaluated(total);
    for (std::size_t i = 0; i < total; ++i) unevaluated[i] = i;

    auto take_unevaluated = [&](std::size_t pos) {
        const std::size_t flat = unevaluated[pos];
        unevaluated[pos] = unevaluated.back();
        unevaluated.pop_back();
        evaluated[flat] = true;
        return flat;
    };

    const int explore = static_cast<int>(
        std::ceil(static_cast<double>(options.budget) / 3.0));

    DodgeResult result;
    for (int iter = 0; iter < options.budget && !unevaluated.empty(); ++iter) {
        std::size_t flat;
        if (iter < explore) {
            flat = take_unevaluated(rng.uniform_index(unevaluated.size()));
        } else {
            // per hyper-parameter, the option with the highest weight;
            // ties resolved uniformly at random
            std::vector<std::size_t> choice(space.params.size());
            for (std::size_t p = 0; p < space.params.size(); ++p) {
                const double top = *std::max_element(weights[p].begin(), weights[p].end());
                std::vector<std::size_t> tied;
                for (std::size_t o = 0; o < weights[p].size(); ++o)
                    if (weights[p][o] == top) tied.push_back(o);
                choice[p] = tied[rng.uniform_index(tied.size())];
            }
            const std::size_t want = encode_choice(space, choice);
            if (!evaluated[want]) {
                auto pos = std::find(unevaluated.begin(), unevaluated.end(), want);
                flat = take_unevaluated(static_cast<std::size_t>(pos - unevaluated.begin()));
            } else {
                flat = take_unevaluated(rng.uniform_index(unevaluated.size()));
            }
        }

        const std::vector<std::size_t> choice = decode_choice(space, flat);
        const LearnerConfig config = space.config_at(choice);
        const double objective = evaluate(config);

        bool tabu = false;
        for (const DodgeLogEntry& prev : result.log) {
            if (std::abs(objective - prev.objective) <= options.epsilon) {
                tabu = true;
                break;
            }
        }
        const double delta = tabu ? -1.0 : 1.0;
        for (std::size_t p = 0; p < space.params.size(); ++p) weights[p][choice[p]] += delta;

        if (result.log.empty() || objective > result.best_objective) {
            result.best = config;
            result.best_objective = objective;
        }
        result.log.push_back({config, objective, choice, tabu});
    }
    result.fits = result.log.size();
    result.final_weights = weights;
    return result;
}

InnerSplit make_inner_split(const WarningDataset& data, std::uint64_t seed) {
    const std::size_t n = data.rows();
    InnerSplit out;
    if (n < 2) {
        out.fit = data;
        out.val = data;
        out.degenerate = true;
        return out;
    }

    Rng rng(seed);
    auto carve = [&](const std::vector<std::size_t>& pool, std::vector<std::size_t>& fit_idx,
                     std::vector<std::size_t>& val_idx) {
        std::vector<std::size_t> shuffled = pool;
        rng.shuffle(shuffled);
        std::size_t k = static_cast<std::size_t>(
            std::floor(0.8 * static_cast<double>(shuffled.size())));
        k = std::max<std::size_t>(1, std::min(shuffled.size() - 1, k));
        if (shuffled.size() == 1) k = 1;  // lone member goes to fit
        fit_idx.insert(fit_idx.end(), shuffled.begin(), shuffled.begin() + static_cast<long>(k));
        val_idx.insert(val_idx.end(), shuffled.begin() + static_cast<long>(k), shuffled.end());
    };

    auto has_both = [](const WarningDataset& d) {
        const std::size_t ones = d.count_label(1);
        return ones > 0 && ones < d.rows();
    };

    // stratified attempt
    std::vector<std::size_t> by_class[2];
    for (std::size_t i = 0; i < n; ++i) by_class[data.labels[i]].push_back(i);
    std::vector<std::size_t> fit_idx, val_idx;
    for (auto& pool : by_class)
        if (!pool.empty()) carve(pool, fit_idx, val_idx);
    std::sort(fit_idx.begin(), fit_idx.end());
    std::sort(val_idx.begin(), val_idx.end());
    out.fit = data.subset(fit_idx);
    out.val = data.subset(val_idx);
    if (!val_idx.empty() && has_both(out.fit) && has_both(out.val)) return out;

    // unstratified fallback
    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    fit_idx.clear();
    val_idx.clear();
    carve(all, fit_idx, val_idx);
    out.fit = data.subset(fit_idx);
    out.val = data.subset(val_idx);
    out.degenerate = val_idx.empty() || !has_both(out.fit) || !has_both(out.val);
    return out;
}

double recall_minus_false_alarm(const Model& model, const WarningDataset& val) {
    const Prediction pred = predict(model, val.features);
    const RatioMetrics m = metrics(confusion(val.labels, pred.labels));
    return m.recall - m.false_alarm;
}

DodgeResult dodge(LearnerKind kind, const WarningDataset& treated_train,
                  const DodgeOptions& options, std::uint64_t seed,
                  std::atomic<std::size_t>* fit_counter, const TrainOptions& train_options) {
    const HyperParamSpace space = HyperParamSpace::for_kind(kind);
    const InnerSplit split = make_inner_split(treated_train, derive_seed(seed, "inner-split"));
    if (split.degenerate) {
        // cannot score configs; report a uniformly random one with a warning
        Rng rng(derive_seed(seed, "degenerate-pick"));
        std::vector<std::size_t> choice(space.params.size());
        for (std::size_t p = 0; p < space.params.size(); ++p)
            choice[p] = rng.uniform_index(space.params[p].values.size());
        DodgeResult result;
        result.best = space.config_at(choice);
        result.best_objective = 0.0;
        result.degenerate = true;
        return result;
    }

    std::size_t fit_index = 0;
    auto evaluate = [&](const LearnerConfig& config) {
        if (fit_counter) fit_counter->fetch_add(1);
        const std::uint64_t fit_seed = derive_seed(seed, "dodge-fit", fit_index++);
        const std::unique_ptr<Model> model =
            train_model(config, split.fit, fit_seed, train_options);
        return recall_minus_false_alarm(*model, split.val);
    };
    return dodge_search(space, evaluate, options, derive_seed(seed, "dodge-search"));
}

}  // namespace ghost2
