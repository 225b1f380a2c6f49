#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace contrast {

using LevelId = std::int32_t;
inline constexpr LevelId kMissingLevel = -1;

enum class ColumnKind : std::uint8_t { Numeric, Categorical };

// One predictor cell: numeric, categorical level, or missing.
struct Value {
    enum class Kind : std::uint8_t { Missing, Numeric, Categorical };
    Kind kind = Kind::Missing;
    double number = 0.0;
    LevelId level = kMissingLevel;

    static Value missing() { return {}; }
    static Value numeric(double v) { return {Kind::Numeric, v, kMissingLevel}; }
    static Value categorical(LevelId id) { return {Kind::Categorical, 0.0, id}; }
    bool is_missing() const { return kind == Kind::Missing; }
};

/// A predictor column.
///
/// Numeric columns store values with NaN as the missing sentinel; categorical
/// columns store dense level ids with kMissingLevel for missing. Missing is
/// never a level of its own.
class FeatureColumn {
public:
    static FeatureColumn numeric(std::string name, std::vector<double> values);
    static FeatureColumn categorical(std::string name, std::vector<std::string> levels,
                                     std::vector<LevelId> codes);

    const std::string& name() const { return name_; }
    ColumnKind kind() const { return kind_; }
    bool is_numeric() const { return kind_ == ColumnKind::Numeric; }
    std::size_t size() const { return is_numeric() ? numbers_.size() : codes_.size(); }

    const std::vector<std::string>& levels() const { return levels_; }
    std::optional<LevelId> find_level(std::string_view label) const;

    bool is_missing(std::size_t row) const {
        return is_numeric() ? std::isnan(numbers_[row]) : codes_[row] == kMissingLevel;
    }
    double number(std::size_t row) const { return numbers_[row]; }
    LevelId code(std::size_t row) const { return codes_[row]; }
    Value value(std::size_t row) const;

    std::span<const double> numbers() const { return numbers_; }
    std::span<const LevelId> codes() const { return codes_; }

private:
    std::string name_;
    ColumnKind kind_ = ColumnKind::Numeric;
    std::vector<std::string> levels_;
    std::vector<double> numbers_;
    std::vector<LevelId> codes_;
};

struct ColumnSchema {
    std::string name;
    ColumnKind kind = ColumnKind::Numeric;
    std::vector<std::string> levels;

    bool operator==(const ColumnSchema&) const = default;
};

using FrameSchema = std::vector<ColumnSchema>;

class Frame {
public:
    Frame() = default;
    explicit Frame(std::vector<FeatureColumn> columns);

    std::size_t n_rows() const { return n_rows_; }
    std::size_t n_cols() const { return columns_.size(); }
    const FeatureColumn& column(std::size_t j) const { return columns_[j]; }
    const std::vector<FeatureColumn>& columns() const { return columns_; }
    std::optional<std::size_t> find_column(std::string_view name) const;

    FrameSchema schema() const;

    // Row subset (in the given order); level tables are kept intact.
    Frame take(std::span<const std::size_t> rows) const;

private:
    std::vector<FeatureColumn> columns_;
    std::size_t n_rows_ = 0;
};

enum class SampleMode : std::uint8_t { Paired, TwoSample };
enum class Origin : std::uint8_t { Sample1, Sample2 };

/// Predictors with two outcomes.
///
/// Paired mode: every row has both y and z. Two-sample mode: a row carries
/// only the outcome of its origin (y for Sample1, z for Sample2) and the
/// other slot holds NaN.
struct ContrastSample {
    Frame x;
    std::vector<double> y;
    std::vector<double> z;
    SampleMode mode = SampleMode::Paired;
    std::vector<Origin> origin;

    std::size_t size() const { return x.n_rows(); }
    bool has_y(std::size_t row) const {
        return mode == SampleMode::Paired || origin[row] == Origin::Sample1;
    }
    bool has_z(std::size_t row) const {
        return mode == SampleMode::Paired || origin[row] == Origin::Sample2;
    }

    // Throws DataError when an invariant is broken.
    void validate() const;

    // Outcome values of the given rows, split by side.
    void gather(std::span<const std::size_t> rows, std::vector<double>& ys,
                std::vector<double>& zs) const;

    ContrastSample take(std::span<const std::size_t> rows) const;

    static ContrastSample paired(Frame x, std::vector<double> y, std::vector<double> z);
    static ContrastSample two_sample(Frame x, std::vector<double> outcome,
                                     std::vector<Origin> origin);
};

// Sorted row indices; strictly increasing, all < N.
struct RegionMask {
    std::vector<std::size_t> indices;

    static RegionMask all(std::size_t n);
    bool valid(std::size_t n) const;
};

class EmpiricalCdf {
public:
    explicit EmpiricalCdf(std::vector<double> values);

    // #{v <= t} / n
    double operator()(double t) const;
    std::size_t size() const { return sorted_.size(); }
    std::span<const double> sorted_values() const { return sorted_; }

private:
    std::vector<double> sorted_;
};

inline double cdf_eval(const EmpiricalCdf& cdf, double t) { return cdf(t); }

// Quantile at plotting positions (i - 0.5)/n with linear interpolation,
// clamped to the extremes outside [0.5/n, 1 - 0.5/n]. Input must be sorted.
double quantile_sorted(std::span<const double> sorted, double p);

// Same as quantile_sorted on an unsorted multiset.
double quantile(std::span<const double> values, double p);

double mean(std::span<const double> values);

}  // namespace contrast
