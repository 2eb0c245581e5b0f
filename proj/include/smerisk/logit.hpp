#pragma once

// L2-regularized binary logistic regression trained by full-batch gradient
// descent on standardized features. This is the baseline ("Delphi proxy")
// scorer.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "smerisk/dataset.hpp"
#include "smerisk/error.hpp"
#include "smerisk/numeric.hpp"

namespace smerisk {

struct LogitHyperparams {
    double learning_rate = 0.1;
    double l2_lambda = 1e-3;
    std::uint64_t max_iterations = 5000;
    double tolerance = 1e-8;  // stop once an accepted step lowers the loss by less

    bool operator==(const LogitHyperparams&) const = default;
};

inline void validate(const LogitHyperparams& h) {
    if (!(h.learning_rate > 0.0) || !std::isfinite(h.learning_rate))
        throw ParameterError("learning_rate must be finite and > 0");
    if (!(h.l2_lambda >= 0.0) || !std::isfinite(h.l2_lambda))
        throw ParameterError("l2_lambda must be finite and >= 0");
    if (!(h.tolerance > 0.0)) throw ParameterError("tolerance must be > 0");
}

struct TrainingMeta {
    std::uint64_t iterations = 0;
    double final_loss = 0.0;

    bool operator==(const TrainingMeta&) const = default;
};

struct LogisticModel {
    std::array<double, kFeatureCount> weights{};
    double bias = 0.0;
    StandardizationParams standardization = identity_standardization();
    TrainingMeta training_meta;

    bool operator==(const LogisticModel&) const = default;
};

struct LossGradient {
    double loss = 0.0;
    std::vector<double> gradient;  // one slot per weight, bias last
};

// Mean cross-entropy plus (lambda / 2) * |w|^2 over the rows of `batch`.
// `params` holds the weights followed by the bias; the bias is not penalized.
inline LossGradient loss_and_gradient(std::span<const double> params, const FeatureTable& batch, double l2_lambda) {
    const std::size_t d = batch.n_features;
    if (params.size() != d + 1) throw ParameterError("parameter vector must hold one weight per feature plus bias");
    if (batch.rows() == 0) throw EmptyInputError("loss_and_gradient: empty batch");

    LossGradient out;
    out.gradient.assign(d + 1, 0.0);
    const double bias = params[d];
    for (std::size_t i = 0; i < batch.rows(); ++i) {
        const auto x = batch.row(i);
        double z = bias;
        for (std::size_t j = 0; j < d; ++j) z += params[j] * x[j];
        const int y = batch.labels[i];
        // -y ln p - (1 - y) ln(1 - p) = softplus(z) - y z, finite for every z.
        out.loss += std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))) - y * z;
        const double r = sigmoid(z) - y;
        for (std::size_t j = 0; j < d; ++j) out.gradient[j] += r * x[j];
        out.gradient[d] += r;
    }
    const auto n = static_cast<double>(batch.rows());
    out.loss /= n;
    for (double& g : out.gradient) g /= n;
    double penalty = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
        penalty += params[j] * params[j];
        out.gradient[j] += l2_lambda * params[j];
    }
    out.loss += 0.5 * l2_lambda * penalty;
    return out;
}

namespace detail {

inline double loss_only(std::span<const double> params, const FeatureTable& batch, double l2_lambda) {
    return loss_and_gradient(params, batch, l2_lambda).loss;
}

} // namespace detail

// Gradient descent from zero on an already-standardized table. A step that
// would raise the loss is halved until it does not; the loop ends when an
// accepted step lowers the loss by less than the tolerance, when no
// non-increasing step can be found, or at max_iterations.
inline std::pair<std::vector<double>, TrainingMeta> fit_logistic_table(const FeatureTable& table,
                                                                        const LogitHyperparams& hyper) {
    validate(hyper);
    std::vector<double> theta(table.n_features + 1, 0.0);
    auto current = loss_and_gradient(theta, table, hyper.l2_lambda);
    TrainingMeta meta;
    std::vector<double> candidate(theta.size());
    while (meta.iterations < hyper.max_iterations) {
        double step = hyper.learning_rate;
        double next_loss = 0.0;
        bool accepted = false;
        for (int halvings = 0; halvings < 60; ++halvings, step *= 0.5) {
            for (std::size_t j = 0; j < theta.size(); ++j) candidate[j] = theta[j] - step * current.gradient[j];
            next_loss = detail::loss_only(candidate, table, hyper.l2_lambda);
            if (next_loss <= current.loss) {
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
        const double decrease = current.loss - next_loss;
        theta.swap(candidate);
        ++meta.iterations;
        current = loss_and_gradient(theta, table, hyper.l2_lambda);
        if (decrease < hyper.tolerance) break;
    }
    meta.final_loss = current.loss;
    return {std::move(theta), meta};
}

inline LogisticModel train_logistic(const Dataset& train, const LogitHyperparams& hyper = {}) {
    if (!train.labeled()) throw ParameterError("train_logistic requires a labeled dataset");
    validate(hyper);
    const auto labels = train.labels();
    detail::require_both_classes(labels, "train_logistic");

    LogisticModel model;
    model.standardization = fit_standardizer(train);
    const FeatureTable table = apply_standardizer(model.standardization, train);
    auto [theta, meta] = fit_logistic_table(table, hyper);
    std::copy_n(theta.begin(), kFeatureCount, model.weights.begin());
    model.bias = theta[kFeatureCount];
    model.training_meta = meta;
    return model;
}

inline double predict_proba(const LogisticModel& m, const SmeRecord& r) {
    const FeatureVector z = standardize(m.standardization, r.features());
    double s = m.bias;
    for (std::size_t j = 0; j < kFeatureCount; ++j) s += m.weights[j] * z[j];
    return sigmoid(s);
}

inline void check_threshold(double threshold) {
    if (!(threshold > 0.0 && threshold < 1.0)) throw ParameterError("threshold must lie in (0, 1)");
}

// Ties go to class 1.
inline int predict_label(const LogisticModel& m, const SmeRecord& r, double threshold = 0.5) {
    check_threshold(threshold);
    return predict_proba(m, r) >= threshold ? 1 : 0;
}

inline std::vector<int> predict_labels(const LogisticModel& m, const Dataset& d, double threshold = 0.5) {
    check_threshold(threshold);
    std::vector<int> out;
    out.reserve(d.size());
    for (const auto& r : d.records()) out.push_back(predict_proba(m, r) >= threshold ? 1 : 0);
    return out;
}

} // namespace smerisk
