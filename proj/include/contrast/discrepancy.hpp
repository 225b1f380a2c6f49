#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "contrast/dataset.hpp"

namespace contrast {

enum class MeasureKind : std::uint8_t {
    MeanAbs,       // mean |y - z|
    MeanDiff,      // |mean(y) - mean(z)|
    QuantileDiff,  // |Q_p(y) - Q_p(z)|
    DistAd,        // Anderson-Darling style CDF distance
    ClassError,    // fraction y != z
    ProbDiff,      // |sum(y - z)| / n
    QuantileProb,  // |p - fraction(y < z)|
    Ratio,         // mean(y) / mean(z)
    InvRatio,      // mean(z) / mean(y)
};

/// Region-level discrepancy between y and z values.
struct DiscrepancyMeasure {
    MeasureKind kind = MeasureKind::MeanAbs;
    double p = 0.5;  // quantile kinds only

    // "mean-abs", "mean-diff", "quantile-diff:p", "ad", "class-error",
    // "prob-diff", "quantile-prob:p", "ratio", "inv-ratio"
    static DiscrepancyMeasure parse(std::string_view text);
    std::string name() const;

    bool has_p() const { return kind == MeasureKind::QuantileDiff || kind == MeasureKind::QuantileProb; }
    bool allows_two_sample() const {
        return kind == MeasureKind::DistAd || kind == MeasureKind::Ratio ||
               kind == MeasureKind::InvRatio;
    }
    bool requires_paired() const { return !allows_two_sample(); }
    bool supports_offset() const {
        return kind == MeasureKind::MeanDiff || kind == MeasureKind::QuantileDiff ||
               kind == MeasureKind::ProbDiff || kind == MeasureKind::QuantileProb;
    }
    bool is_ratio() const { return kind == MeasureKind::Ratio || kind == MeasureKind::InvRatio; }

    // Region discrepancy is a function of per-row sums (MomentStats below).
    bool is_additive() const {
        return kind != MeasureKind::QuantileDiff && kind != MeasureKind::DistAd;
    }

    // Throws ConfigError if p is out of range.
    void validate() const;

    bool operator==(const DiscrepancyMeasure&) const = default;
};

struct DiscrepancyValue {
    double d = 0.0;
    std::size_t n_y = 0;
    std::size_t n_z = 0;
};

// Throws std::invalid_argument for empty inputs, broken pairing, domain
// violations and zero ratio denominators.
DiscrepancyValue eval(const DiscrepancyMeasure& measure, std::span<const double> y,
                      std::span<const double> z);

// Offset delta with eval(measure, y, z + delta) == 0 up to the measure's granularity.
double zeroing_offset(const DiscrepancyMeasure& measure, std::span<const double> y,
                      std::span<const double> z);

// Checks that y/z values lie in the measure's domain (binary outcomes etc).
void check_domain(const DiscrepancyMeasure& measure, std::span<const double> y,
                  std::span<const double> z);

// Distribution distance on sorted inputs, pooled size n_y + n_z.
double dist_ad_sorted(std::span<const double> y_sorted, std::span<const double> z_sorted);

/// Per-row sums sufficient for every additive measure.
struct MomentStats {
    double sum_y = 0.0;
    double sum_z = 0.0;
    double sum_abs = 0.0;       // paired: sum |y - z|
    double sum_diff = 0.0;      // paired: sum (y - z)
    double n_mismatch = 0.0;    // paired: #(y != z)
    double n_less = 0.0;        // paired: #(y < z)
    double n_y = 0.0;
    double n_z = 0.0;

    void add_pair(double y, double z) {
        sum_y += y;
        sum_z += z;
        sum_abs += y > z ? y - z : z - y;
        sum_diff += y - z;
        n_mismatch += y != z ? 1.0 : 0.0;
        n_less += y < z ? 1.0 : 0.0;
        n_y += 1.0;
        n_z += 1.0;
    }
    void add_y(double y) {
        sum_y += y;
        n_y += 1.0;
    }
    void add_z(double z) {
        sum_z += z;
        n_z += 1.0;
    }
    MomentStats& operator+=(const MomentStats& o);
    MomentStats& operator-=(const MomentStats& o);
    friend MomentStats operator+(MomentStats a, const MomentStats& b) { return a += b; }
    friend MomentStats operator-(MomentStats a, const MomentStats& b) { return a -= b; }
};

// Discrepancy of an additive measure from its sums; nullopt-like NaN when
// undefined (empty side, zero ratio denominator).
double additive_discrepancy(const DiscrepancyMeasure& measure, const MomentStats& s);

}  // namespace contrast
