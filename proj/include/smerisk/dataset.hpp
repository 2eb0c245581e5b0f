#pragma once

// SME feature schema, CSV ingestion/serialization, train/test splitting,
// standardization and the correlation used for commodity-price sensitivity.

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "smerisk/error.hpp"
#include "smerisk/random.hpp"

namespace smerisk {

inline constexpr std::size_t kFeatureCount = 6;
inline constexpr std::size_t kNumericFeatureCount = 5;  // all but Industry_Sector
inline constexpr std::size_t kSectorIndex = 5;

// Feature indices, in canonical column order.
enum Feature : std::size_t {
    revenue_growth = 0,
    cash_flow_variability = 1,
    debt_equity_ratio = 2,
    profit_margin = 3,
    commodity_price_dependency = 4,
    industry_sector = 5,
};

inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames = {
    "Revenue_Growth",  "Cash_Flow_Variability",      "Debt_Equity_Ratio",
    "Profit_Margin",   "Commodity_Price_Dependency", "Industry_Sector",
};
inline constexpr std::string_view kLabelName = "Default_Status";
inline constexpr std::string_view kSchemaVersion = "sme-v1";

using FeatureVector = std::array<double, kFeatureCount>;

struct SmeRecord {
    double revenue_growth = 0.0;
    double cash_flow_variability = 0.0;
    double debt_equity_ratio = 0.0;
    double profit_margin = 0.0;
    double commodity_price_dependency = 0.0;
    int industry_sector = 0;  // 0 = agriculture, 1 = manufacturing
    std::optional<int> default_status;

    FeatureVector features() const {
        return {revenue_growth,    cash_flow_variability,      debt_equity_ratio,
                profit_margin,     commodity_price_dependency, static_cast<double>(industry_sector)};
    }

    static SmeRecord from_features(const FeatureVector& x, std::optional<int> label = std::nullopt) {
        return {x[0], x[1], x[2], x[3], x[4], static_cast<int>(x[5]), label};
    }

    bool operator==(const SmeRecord&) const = default;
};

// Returns a description of the first violated invariant, or nullopt.
inline std::optional<std::string> check_record(const SmeRecord& r) {
    const FeatureVector x = r.features();
    for (std::size_t j = 0; j < kNumericFeatureCount; ++j) {
        if (!std::isfinite(x[j])) return std::string(kFeatureNames[j]) + " is not finite";
    }
    if (r.cash_flow_variability < 0.0) return "Cash_Flow_Variability must be >= 0";
    if (r.debt_equity_ratio < 0.0) return "Debt_Equity_Ratio must be >= 0";
    if (r.commodity_price_dependency < -1.0 || r.commodity_price_dependency > 1.0)
        return "Commodity_Price_Dependency must lie in [-1, 1]";
    if (r.industry_sector != 0 && r.industry_sector != 1) return "Industry_Sector must be 0 or 1";
    if (r.default_status && *r.default_status != 0 && *r.default_status != 1)
        return "Default_Status must be 0 or 1";
    return std::nullopt;
}

// Immutable, validated collection of records. Either every record carries a
// label or none does.
class Dataset {
public:
    Dataset() = default;

    explicit Dataset(std::vector<SmeRecord> records) : records_(std::move(records)) {
        std::size_t n_labeled = 0;
        for (std::size_t i = 0; i < records_.size(); ++i) {
            if (auto bad = check_record(records_[i]))
                throw ParameterError("record " + std::to_string(i) + ": " + *bad);
            if (records_[i].default_status) ++n_labeled;
        }
        if (n_labeled != 0 && n_labeled != records_.size())
            throw ParameterError("dataset mixes labeled and unlabeled records");
        labeled_ = !records_.empty() && n_labeled == records_.size();
    }

    const std::vector<SmeRecord>& records() const noexcept { return records_; }
    std::size_t size() const noexcept { return records_.size(); }
    bool empty() const noexcept { return records_.empty(); }
    bool labeled() const noexcept { return labeled_; }
    std::string_view schema_version() const noexcept { return kSchemaVersion; }
    const SmeRecord& operator[](std::size_t i) const { return records_[i]; }

    std::vector<int> labels() const {
        std::vector<int> y;
        y.reserve(records_.size());
        for (const auto& r : records_) y.push_back(r.default_status.value_or(0));
        return y;
    }

    double default_rate() const {
        if (!labeled_) return 0.0;
        const auto y = labels();
        return static_cast<double>(std::count(y.begin(), y.end(), 1)) / static_cast<double>(y.size());
    }

    Dataset subset(std::span<const std::size_t> indices) const {
        std::vector<SmeRecord> out;
        out.reserve(indices.size());
        for (std::size_t i : indices) out.push_back(records_.at(i));
        return Dataset(std::move(out));
    }

    bool operator==(const Dataset& other) const { return records_ == other.records_; }

private:
    std::vector<SmeRecord> records_;
    bool labeled_ = false;
};

// Dense row-major feature table with 0/1 labels; the common input of the
// learners. Column count is arbitrary so trees can be exercised on any width.
struct FeatureTable {
    std::size_t n_features = 0;
    std::vector<double> values;  // rows * n_features
    std::vector<int> labels;     // one per row

    std::size_t rows() const noexcept { return labels.size(); }
    std::span<const double> row(std::size_t i) const {
        return {values.data() + i * n_features, n_features};
    }
    double at(std::size_t i, std::size_t j) const { return values[i * n_features + j]; }

    void push_back(std::span<const double> x, int label) {
        values.insert(values.end(), x.begin(), x.end());
        labels.push_back(label);
    }
};

inline FeatureTable to_table(const Dataset& d) {
    FeatureTable t;
    t.n_features = kFeatureCount;
    t.values.reserve(d.size() * kFeatureCount);
    t.labels.reserve(d.size());
    for (const auto& r : d.records()) t.push_back(r.features(), r.default_status.value_or(0));
    return t;
}

// ---------------------------------------------------------------------------
// CSV

namespace detail {

inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);  // shortest round-trip form
    return std::string(buf, res.ptr);
}

inline std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            cells.push_back(line.substr(start));
            return cells;
        }
        cells.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline void require_both_classes(std::span<const int> labels, const char* what) {
    if (labels.empty()) throw EmptyInputError(std::string(what) + ": empty training set");
    const bool has0 = std::find(labels.begin(), labels.end(), 0) != labels.end();
    const bool has1 = std::find(labels.begin(), labels.end(), 1) != labels.end();
    if (!has0 || !has1)
        throw DegenerateLabelsError(std::string(what) + ": training labels contain a single class");
}

inline std::optional<double> parse_double(std::string_view s) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
    return v;
}

} // namespace detail

inline Dataset parse_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || detail::trim(line).empty())
        throw EmptyInputError("CSV input is empty");
    if (line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);

    const auto header = detail::split_commas(line);
    for (std::size_t j = 0; j < header.size(); ++j) {
        const auto name = detail::trim(header[j]);
        const bool known = name == kLabelName ||
            std::find(kFeatureNames.begin(), kFeatureNames.end(), name) != kFeatureNames.end();
        if (!known) throw SchemaError("unknown column '" + std::string(name) + "'", std::string(name));
        const std::string_view expected = j < kFeatureCount ? kFeatureNames[j] : kLabelName;
        if (j > kFeatureCount || name != expected)
            throw SchemaError("column '" + std::string(name) + "' at position " + std::to_string(j + 1) +
                                  ", expected '" + std::string(expected) + "'",
                              std::string(name));
    }
    if (header.size() < kFeatureCount) {
        const std::string missing(kFeatureNames[header.size()]);
        throw SchemaError("missing column '" + missing + "'", missing);
    }

    std::vector<SmeRecord> records;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (detail::trim(line).empty()) continue;
        ++row;
        const auto cells = detail::split_commas(line);
        if (cells.size() != header.size())
            throw ParseError("row " + std::to_string(row) + ": expected " + std::to_string(header.size()) +
                                 " cells, found " + std::to_string(cells.size()),
                             row);
        FeatureVector x{};
        std::optional<int> label;
        for (std::size_t j = 0; j < cells.size(); ++j) {
            const auto v = detail::parse_double(cells[j]);
            const std::string_view name = j < kFeatureCount ? kFeatureNames[j] : kLabelName;
            if (!v)
                throw ParseError("row " + std::to_string(row) + ": non-numeric value '" +
                                     std::string(detail::trim(cells[j])) + "' in " + std::string(name),
                                 row);
            const bool binary = j >= kSectorIndex;
            if (binary && *v != 0.0 && *v != 1.0)
                throw ParseError("row " + std::to_string(row) + ": " + std::string(name) + " must be 0 or 1", row);
            if (j < kFeatureCount)
                x[j] = *v;
            else
                label = static_cast<int>(*v);
        }
        SmeRecord r = SmeRecord::from_features(x, label);
        if (auto bad = check_record(r)) throw ParseError("row " + std::to_string(row) + ": " + *bad, row);
        records.push_back(r);
    }
    if (records.empty()) throw EmptyInputError("CSV input has a header but no data rows");
    return Dataset(std::move(records));
}

inline Dataset load_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    return parse_csv(in);
}

inline void write_csv(const Dataset& d, std::ostream& out) {
    if (d.empty()) throw EmptyInputError("refusing to write an empty dataset");
    for (std::size_t j = 0; j < kFeatureCount; ++j) out << (j ? "," : "") << kFeatureNames[j];
    if (d.labeled()) out << ',' << kLabelName;
    out << '\n';
    for (const auto& r : d.records()) {
        out << detail::format_double(r.revenue_growth) << ',' << detail::format_double(r.cash_flow_variability)
            << ',' << detail::format_double(r.debt_equity_ratio) << ',' << detail::format_double(r.profit_margin)
            << ',' << detail::format_double(r.commodity_price_dependency) << ',' << r.industry_sector;
        if (d.labeled()) out << ',' << *r.default_status;
        out << '\n';
    }
}

inline void write_csv(const Dataset& d, const std::string& path) {
    if (d.empty()) throw EmptyInputError("refusing to write an empty dataset");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    write_csv(d, out);
    out.flush();
    if (!out) throw IoError("write to '" + path + "' failed");
}

// ---------------------------------------------------------------------------
// Splitting

struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

inline constexpr std::uint64_t kSplitStream = 0x5350'4c49'5400ULL;  // "SPLIT"

// Fisher-Yates shuffle of [0, n); the first round(n * test_fraction) positions
// form the test part.
inline SplitIndices split_indices(std::size_t n, double test_fraction, std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        throw ParameterError("test_fraction must lie in (0, 1)");
    const auto n_test = static_cast<std::size_t>(std::llround(static_cast<double>(n) * test_fraction));
    if (n_test == 0 || n_test >= n)
        throw ParameterError("split of " + std::to_string(n) + " records at test_fraction " +
                             detail::format_double(test_fraction) + " leaves an empty part");
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    Stream rng(seed, kSplitStream);
    for (std::size_t i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng.index(i + 1)]);
    SplitIndices s;
    s.test.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_test));
    s.train.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_test), perm.end());
    return s;
}

inline std::pair<Dataset, Dataset> split_train_test(const Dataset& d, double test_fraction, std::uint64_t seed) {
    if (!d.labeled()) throw ParameterError("split_train_test requires a labeled dataset");
    const auto idx = split_indices(d.size(), test_fraction, seed);
    return {d.subset(idx.train), d.subset(idx.test)};
}

// ---------------------------------------------------------------------------
// Standardization

struct StandardizationParams {
    std::array<double, kNumericFeatureCount> mean{};
    std::array<double, kNumericFeatureCount> sd{};  // population standard deviation
    std::array<bool, kNumericFeatureCount> constant{};

    bool operator==(const StandardizationParams&) const = default;
};

// Identity transform: zero means, unit deviations.
inline StandardizationParams identity_standardization() {
    StandardizationParams p;
    p.sd.fill(1.0);
    return p;
}

inline StandardizationParams fit_standardizer(const Dataset& train) {
    if (train.empty()) throw EmptyInputError("cannot fit a standardizer on an empty dataset");
    StandardizationParams p;
    const auto n = static_cast<double>(train.size());
    for (std::size_t j = 0; j < kNumericFeatureCount; ++j) {
        double sum = 0.0;
        for (const auto& r : train.records()) sum += r.features()[j];
        const double mean = sum / n;
        double ss = 0.0;
        bool constant = true;
        const double first = train[0].features()[j];
        for (const auto& r : train.records()) {
            const double v = r.features()[j];
            ss += (v - mean) * (v - mean);
            constant = constant && v == first;
        }
        p.mean[j] = constant ? first : mean;
        p.sd[j] = constant ? 0.0 : std::sqrt(ss / n);
        p.constant[j] = constant;
    }
    return p;
}

inline FeatureVector standardize(const StandardizationParams& p, const FeatureVector& x) {
    FeatureVector z = x;
    for (std::size_t j = 0; j < kNumericFeatureCount; ++j)
        z[j] = p.constant[j] ? 0.0 : (x[j] - p.mean[j]) / p.sd[j];
    return z;
}

inline FeatureVector unstandardize(const StandardizationParams& p, const FeatureVector& z) {
    FeatureVector x = z;
    for (std::size_t j = 0; j < kNumericFeatureCount; ++j)
        x[j] = p.constant[j] ? p.mean[j] : z[j] * p.sd[j] + p.mean[j];
    return x;
}

// Standardized values no longer satisfy the SmeRecord range invariants, so
// the result is a FeatureTable rather than a Dataset. Industry_Sector and
// the labels pass through unchanged.
inline FeatureTable apply_standardizer(const StandardizationParams& p, const Dataset& d) {
    for (std::size_t j = 0; j < kNumericFeatureCount; ++j) {
        if (!std::isfinite(p.mean[j]) || !std::isfinite(p.sd[j]) || p.sd[j] < 0.0 ||
            (p.sd[j] == 0.0) != p.constant[j])
            throw ParameterError("standardization parameters for " + std::string(kFeatureNames[j]) +
                                 " are inconsistent");
    }
    FeatureTable t;
    t.n_features = kFeatureCount;
    t.values.reserve(d.size() * kFeatureCount);
    for (const auto& r : d.records()) t.push_back(standardize(p, r.features()), r.default_status.value_or(0));
    return t;
}

// ---------------------------------------------------------------------------

// Pearson correlation coefficient, clamped to [-1, 1].
inline double pearson_correlation(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw ParameterError("pearson_correlation: series lengths differ");
    if (a.size() < 2) throw ParameterError("pearson_correlation: need at least two observations");
    const auto n = static_cast<double>(a.size());
    const double mean_a = std::accumulate(a.begin(), a.end(), 0.0) / n;
    const double mean_b = std::accumulate(b.begin(), b.end(), 0.0) / n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - mean_a;
        const double db = b[i] - mean_b;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa == 0.0 || sbb == 0.0) throw UndefinedValueError("pearson_correlation: a series has zero variance");
    return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

} // namespace smerisk
