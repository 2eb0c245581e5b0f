#pragma once

#include <cmath>

namespace smerisk {

// Logistic function. Evaluated on the branch where exp() cannot overflow.
inline double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

inline double logit(double p) { return std::log(p / (1.0 - p)); }

} // namespace smerisk
