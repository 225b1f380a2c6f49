#include "contrast/dataset.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>
#include <unordered_set>

#include "contrast/error.hpp"

namespace contrast {

FeatureColumn FeatureColumn::numeric(std::string name, std::vector<double> values) {
    for (auto& v : values)
        if (!std::isfinite(v)) v = std::numeric_limits<double>::quiet_NaN();
    FeatureColumn c;
    c.name_ = std::move(name);
    c.kind_ = ColumnKind::Numeric;
    c.numbers_ = std::move(values);
    return c;
}

FeatureColumn FeatureColumn::categorical(std::string name, std::vector<std::string> levels,
                                         std::vector<LevelId> codes) {
    std::unordered_set<std::string> seen;
    for (const auto& l : levels)
        if (!seen.insert(l).second)
            throw DataError("column '" + name + "': duplicate level label '" + l + "'");
    const auto n_levels = static_cast<LevelId>(levels.size());
    for (auto code : codes)
        if (code != kMissingLevel && (code < 0 || code >= n_levels))
            throw DataError("column '" + name + "': level id out of range");
    FeatureColumn c;
    c.name_ = std::move(name);
    c.kind_ = ColumnKind::Categorical;
    c.levels_ = std::move(levels);
    c.codes_ = std::move(codes);
    return c;
}

std::optional<LevelId> FeatureColumn::find_level(std::string_view label) const {
    for (std::size_t i = 0; i < levels_.size(); ++i)
        if (levels_[i] == label) return static_cast<LevelId>(i);
    return std::nullopt;
}

Value FeatureColumn::value(std::size_t row) const {
    if (is_missing(row)) return Value::missing();
    return is_numeric() ? Value::numeric(numbers_[row]) : Value::categorical(codes_[row]);
}

Frame::Frame(std::vector<FeatureColumn> columns) : columns_(std::move(columns)) {
    std::set<std::string_view> names;
    n_rows_ = columns_.empty() ? 0 : columns_.front().size();
    for (const auto& c : columns_) {
        if (c.size() != n_rows_)
            throw DataError("column '" + c.name() + "' has a different length");
        if (!names.insert(c.name()).second)
            throw DataError("duplicate column name '" + c.name() + "'");
    }
}

std::optional<std::size_t> Frame::find_column(std::string_view name) const {
    for (std::size_t j = 0; j < columns_.size(); ++j)
        if (columns_[j].name() == name) return j;
    return std::nullopt;
}

FrameSchema Frame::schema() const {
    FrameSchema s;
    s.reserve(columns_.size());
    for (const auto& c : columns_) s.push_back({c.name(), c.kind(), c.levels()});
    return s;
}

Frame Frame::take(std::span<const std::size_t> rows) const {
    std::vector<FeatureColumn> cols;
    cols.reserve(columns_.size());
    for (const auto& c : columns_) {
        if (c.is_numeric()) {
            std::vector<double> v(rows.size());
            for (std::size_t i = 0; i < rows.size(); ++i) v[i] = c.number(rows[i]);
            cols.push_back(FeatureColumn::numeric(c.name(), std::move(v)));
        } else {
            std::vector<LevelId> v(rows.size());
            for (std::size_t i = 0; i < rows.size(); ++i) v[i] = c.code(rows[i]);
            cols.push_back(FeatureColumn::categorical(c.name(), c.levels(), std::move(v)));
        }
    }
    Frame f(std::move(cols));
    f.n_rows_ = rows.size();
    return f;
}

void ContrastSample::validate() const {
    const std::size_t n = x.n_rows();
    if (y.size() != n || z.size() != n)
        throw DataError("outcome vectors do not match the predictor row count");
    if (mode == SampleMode::TwoSample && origin.size() != n)
        throw DataError("two-sample data needs one origin flag per row");
    for (std::size_t i = 0; i < n; ++i) {
        if (has_y(i) && !std::isfinite(y[i]))
            throw DataError("non-finite y at row " + std::to_string(i + 1));
        if (has_z(i) && !std::isfinite(z[i]))
            throw DataError("non-finite z at row " + std::to_string(i + 1));
    }
}

void ContrastSample::gather(std::span<const std::size_t> rows, std::vector<double>& ys,
                            std::vector<double>& zs) const {
    ys.clear();
    zs.clear();
    if (mode == SampleMode::Paired) {
        ys.reserve(rows.size());
        zs.reserve(rows.size());
        for (auto r : rows) {
            ys.push_back(y[r]);
            zs.push_back(z[r]);
        }
        return;
    }
    for (auto r : rows) {
        if (origin[r] == Origin::Sample1)
            ys.push_back(y[r]);
        else
            zs.push_back(z[r]);
    }
}

ContrastSample ContrastSample::take(std::span<const std::size_t> rows) const {
    ContrastSample s;
    s.x = x.take(rows);
    s.mode = mode;
    s.y.reserve(rows.size());
    s.z.reserve(rows.size());
    for (auto r : rows) {
        s.y.push_back(y[r]);
        s.z.push_back(z[r]);
        if (mode == SampleMode::TwoSample) s.origin.push_back(origin[r]);
    }
    return s;
}

ContrastSample ContrastSample::paired(Frame x, std::vector<double> y, std::vector<double> z) {
    ContrastSample s;
    s.x = std::move(x);
    s.y = std::move(y);
    s.z = std::move(z);
    s.mode = SampleMode::Paired;
    s.validate();
    return s;
}

ContrastSample ContrastSample::two_sample(Frame x, std::vector<double> outcome,
                                          std::vector<Origin> origin) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    ContrastSample s;
    s.x = std::move(x);
    s.mode = SampleMode::TwoSample;
    s.y.assign(outcome.size(), nan);
    s.z.assign(outcome.size(), nan);
    for (std::size_t i = 0; i < outcome.size() && i < origin.size(); ++i)
        (origin[i] == Origin::Sample1 ? s.y : s.z)[i] = outcome[i];
    s.origin = std::move(origin);
    s.validate();
    return s;
}

RegionMask RegionMask::all(std::size_t n) {
    RegionMask m;
    m.indices.resize(n);
    std::iota(m.indices.begin(), m.indices.end(), std::size_t{0});
    return m;
}

bool RegionMask::valid(std::size_t n) const {
    for (std::size_t i = 0; i < indices.size(); ++i) {
        if (indices[i] >= n) return false;
        if (i > 0 && indices[i] <= indices[i - 1]) return false;
    }
    return true;
}

EmpiricalCdf::EmpiricalCdf(std::vector<double> values) : sorted_(std::move(values)) {
    if (sorted_.empty()) throw std::invalid_argument("empirical CDF of an empty sample");
    std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalCdf::operator()(double t) const {
    const auto count = std::upper_bound(sorted_.begin(), sorted_.end(), t) - sorted_.begin();
    return static_cast<double>(count) / static_cast<double>(sorted_.size());
}

double quantile_sorted(std::span<const double> sorted, double p) {
    if (sorted.empty()) throw std::invalid_argument("quantile of an empty sample");
    const auto n = sorted.size();
    // 1-based fractional order-statistic position for plotting position p.
    const double pos = p * static_cast<double>(n) + 0.5;
    if (pos <= 1.0) return sorted.front();
    if (pos >= static_cast<double>(n)) return sorted.back();
    const auto lo = static_cast<std::size_t>(pos);  // floor, >= 1
    const double w = pos - static_cast<double>(lo);
    if (w == 0.0) return sorted[lo - 1];
    return sorted[lo - 1] + w * (sorted[lo] - sorted[lo - 1]);
}

double quantile(std::span<const double> values, double p) {
    std::vector<double> v(values.begin(), values.end());
    std::sort(v.begin(), v.end());
    return quantile_sorted(v, p);
}

double mean(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("mean of an empty sample");
    double s = 0.0;
    for (double v : values) s += v;
    return s / static_cast<double>(values.size());
}

}  // namespace contrast
