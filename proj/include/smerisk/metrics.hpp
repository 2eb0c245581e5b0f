#pragma once

// Confusion matrix and accuracy / precision / recall / F-1 with explicit
// zero-denominator rules. The positive class is 1 (default).

#include <cstdint>
#include <span>
#include <string>

#include "smerisk/error.hpp"

namespace smerisk {

struct ConfusionMatrix {
    std::uint64_t tp = 0;
    std::uint64_t fp = 0;
    std::uint64_t tn = 0;
    std::uint64_t fn = 0;

    std::uint64_t total() const noexcept { return tp + fp + tn + fn; }
    bool operator==(const ConfusionMatrix&) const = default;
};

inline ConfusionMatrix confusion_matrix(std::span<const int> y_true, std::span<const int> y_pred) {
    if (y_true.size() != y_pred.size()) throw ParameterError("confusion_matrix: label vectors differ in length");
    if (y_true.empty()) throw ParameterError("confusion_matrix: no labels");
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        const int t = y_true[i], p = y_pred[i];
        if ((t != 0 && t != 1) || (p != 0 && p != 1))
            throw ParameterError("confusion_matrix: label at position " + std::to_string(i) + " is not 0 or 1");
        if (t == 1)
            ++(p == 1 ? cm.tp : cm.fn);
        else
            ++(p == 1 ? cm.fp : cm.tn);
    }
    return cm;
}

struct MetricsReport {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    bool precision_undefined = false;
    bool recall_undefined = false;
    bool f1_undefined = false;

    bool operator==(const MetricsReport&) const = default;
};

// Undefined ratios (zero denominators) are reported as 0 with a flag.
inline MetricsReport compute_metrics(const ConfusionMatrix& cm) {
    if (cm.total() == 0) throw ParameterError("compute_metrics: empty confusion matrix");
    MetricsReport m;
    m.accuracy = static_cast<double>(cm.tp + cm.tn) / static_cast<double>(cm.total());
    if (cm.tp + cm.fp == 0)
        m.precision_undefined = true;
    else
        m.precision = static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fp);
    if (cm.tp + cm.fn == 0)
        m.recall_undefined = true;
    else
        m.recall = static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fn);
    // 2PR / (P + R) reduces to 2tp / (2tp + fp + fn); P + R = 0 iff tp = 0.
    if (cm.tp == 0)
        m.f1_undefined = true;
    else
        m.f1 = static_cast<double>(2 * cm.tp) / static_cast<double>(2 * cm.tp + cm.fp + cm.fn);
    return m;
}

inline MetricsReport evaluate(std::span<const int> y_true, std::span<const int> y_pred) {
    return compute_metrics(confusion_matrix(y_true, y_pred));
}

} // namespace smerisk
