#pragma once

// Synthetic SME dataset generator.
//
// Features are drawn uniformly from per-feature ranges (defaults are the
// ranges of the reference simulation) and the sector is a fair coin. Labels
// are Bernoulli draws from a latent default probability
//
//   p = sigmoid(b0 + s * g(x))
//
// where g is a fixed signal score (see signal_score) and s the configured
// signal strength. The intercept b0 is calibrated so that the marginal
// default rate over the feature distribution equals base_default_rate. With
// s = 0 labels are independent of the features.
//
// Each column draws from its own Stream derived from the master seed, so
// the values of one column never depend on how many other columns exist.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "smerisk/dataset.hpp"
#include "smerisk/error.hpp"
#include "smerisk/numeric.hpp"
#include "smerisk/random.hpp"

namespace smerisk {

struct Range {
    double low = 0.0;
    double high = 0.0;

    bool operator==(const Range&) const = default;
};

// Weights of the terms of the signal score. Setting a weight to zero removes
// that term.
struct SignalCoefficients {
    double debt_equity = 1.2;
    double cash_flow_variability = 0.8;
    double revenue_growth = -0.9;
    double profit_margin = -0.7;
    double commodity_sector = 0.6;  // commodity dependency, manufacturing only
    double leverage_step = 1.0;     // indicator debt_equity_ratio > 2

    bool operator==(const SignalCoefficients&) const = default;
};

struct GeneratorConfig {
    std::uint64_t n_samples = 1000;
    std::uint64_t seed = 42;
    double base_default_rate = 0.2;
    double signal_strength = 1.0;
    // Continuous feature ranges, indexed by Feature (sector excluded).
    std::array<Range, kNumericFeatureCount> ranges = {{
        {-0.2, 0.2},  // Revenue_Growth
        {0.1, 0.5},   // Cash_Flow_Variability
        {0.2, 3.0},   // Debt_Equity_Ratio
        {0.05, 0.25}, // Profit_Margin
        {0.5, 1.0},   // Commodity_Price_Dependency
    }};
    SignalCoefficients coefficients;

    bool operator==(const GeneratorConfig&) const = default;
};

inline void validate(const GeneratorConfig& c) {
    if (c.n_samples < 1) throw ParameterError("n_samples must be >= 1");
    if (!(c.base_default_rate > 0.0 && c.base_default_rate < 1.0))
        throw ParameterError("base_default_rate must lie in (0, 1)");
    if (!(c.signal_strength >= 0.0) || !std::isfinite(c.signal_strength))
        throw ParameterError("signal_strength must be finite and >= 0");
    for (std::size_t j = 0; j < kNumericFeatureCount; ++j) {
        const Range& r = c.ranges[j];
        if (!std::isfinite(r.low) || !std::isfinite(r.high) || r.low > r.high)
            throw ParameterError("range for " + std::string(kFeatureNames[j]) + " must satisfy low <= high");
        // Generated records must satisfy the SmeRecord invariants.
        auto probe = [&](double v) {
            SmeRecord rec;
            FeatureVector x = rec.features();
            x[j] = v;
            return check_record(SmeRecord::from_features(x));
        };
        if (auto bad = probe(r.low)) throw ParameterError("range low: " + *bad);
        if (auto bad = probe(r.high)) throw ParameterError("range high: " + *bad);
    }
    const auto& k = c.coefficients;
    for (double w : {k.debt_equity, k.cash_flow_variability, k.revenue_growth, k.profit_margin,
                     k.commodity_sector, k.leverage_step})
        if (!std::isfinite(w)) throw ParameterError("signal coefficients must be finite");
}

// The bracketed signal term g(x). Centers and scales are the midpoints and
// half-widths of the default feature ranges.
inline double signal_score(const SmeRecord& r, const SignalCoefficients& k) {
    return k.debt_equity * (r.debt_equity_ratio - 1.6) / 1.4 +
           k.cash_flow_variability * (r.cash_flow_variability - 0.3) / 0.2 +
           k.revenue_growth * r.revenue_growth / 0.2 +
           k.profit_margin * (r.profit_margin - 0.15) / 0.1 +
           k.commodity_sector * r.commodity_price_dependency * r.industry_sector +
           k.leverage_step * (r.debt_equity_ratio > 2.0 ? 1.0 : 0.0);
}

namespace detail {

inline constexpr std::uint64_t kFeatureStreamBase = 0x1000;
inline constexpr std::uint64_t kSectorStream = 0x2000;
inline constexpr std::uint64_t kLabelStream = 0x3000;
inline constexpr std::uint64_t kCalibrationSeed = 0xCA11B8A7E5EEDULL;
inline constexpr std::size_t kCalibrationDraws = 100000;

// Unlabeled records drawn from the configured feature distribution.
inline std::vector<SmeRecord> draw_features(const GeneratorConfig& c, std::uint64_t seed, std::size_t n) {
    std::vector<FeatureVector> x(n);
    for (std::size_t j = 0; j < kNumericFeatureCount; ++j) {
        Stream rng(seed, kFeatureStreamBase + j);
        for (auto& row : x) row[j] = rng.uniform(c.ranges[j].low, c.ranges[j].high);
    }
    Stream sector(seed, kSectorStream);
    for (auto& row : x) row[kSectorIndex] = sector.bernoulli(0.5) ? 1.0 : 0.0;
    std::vector<SmeRecord> out;
    out.reserve(n);
    for (const auto& row : x) out.push_back(SmeRecord::from_features(row));
    return out;
}

} // namespace detail

// Latent default probability with the intercept calibrated once, at
// construction, by bisection over a fixed probe sample.
class DefaultModel {
public:
    explicit DefaultModel(const GeneratorConfig& config) : config_(config) {
        validate(config_);
        intercept_ = logit(config_.base_default_rate);
        if (config_.signal_strength == 0.0) return;

        const auto probe = detail::draw_features(config_, detail::kCalibrationSeed, detail::kCalibrationDraws);
        std::vector<double> score;
        score.reserve(probe.size());
        for (const auto& r : probe) score.push_back(config_.signal_strength * signal_score(r, config_.coefficients));
        auto mean_rate = [&](double b0) {
            double sum = 0.0;
            for (double s : score) sum += sigmoid(b0 + s);
            return sum / static_cast<double>(score.size());
        };
        double lo = -100.0, hi = 100.0;
        for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
            const double mid = 0.5 * (lo + hi);
            (mean_rate(mid) < config_.base_default_rate ? lo : hi) = mid;
        }
        intercept_ = 0.5 * (lo + hi);
        calibrated_rate_ = mean_rate(intercept_);
    }

    const GeneratorConfig& config() const noexcept { return config_; }
    double intercept() const noexcept { return intercept_; }
    // Mean probability over the probe sample at the calibrated intercept.
    double calibrated_rate() const noexcept { return calibrated_rate_; }

    double probability(const SmeRecord& r) const {
        if (config_.signal_strength == 0.0) return config_.base_default_rate;
        return sigmoid(intercept_ + config_.signal_strength * signal_score(r, config_.coefficients));
    }

private:
    GeneratorConfig config_;
    double intercept_ = 0.0;
    double calibrated_rate_ = 0.0;
};

inline double latent_default_probability(const SmeRecord& r, const DefaultModel& model) {
    return model.probability(r);
}

inline double latent_default_probability(const SmeRecord& r, const GeneratorConfig& config) {
    return DefaultModel(config).probability(r);
}

inline Dataset generate(const DefaultModel& model) {
    const auto& c = model.config();
    auto records = detail::draw_features(c, c.seed, static_cast<std::size_t>(c.n_samples));
    Stream labels(c.seed, detail::kLabelStream);
    for (auto& r : records) r.default_status = labels.bernoulli(model.probability(r)) ? 1 : 0;
    return Dataset(std::move(records));
}

inline Dataset generate(const GeneratorConfig& config) { return generate(DefaultModel(config)); }

} // namespace smerisk
