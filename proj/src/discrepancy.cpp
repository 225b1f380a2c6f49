#include "contrast/discrepancy.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "contrast/error.hpp"

namespace contrast {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double parse_p(std::string_view text, std::string_view arg) {
    double p = 0.0;
    auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), p);
    if (ec != std::errc() || ptr != arg.data() + arg.size())
        throw ConfigError("bad probability in measure '" + std::string(text) + "'");
    return p;
}

std::vector<double> sorted_copy(std::span<const double> v) {
    std::vector<double> s(v.begin(), v.end());
    std::sort(s.begin(), s.end());
    return s;
}

bool is_binary(double v) { return v == 0.0 || v == 1.0; }

}  // namespace

DiscrepancyMeasure DiscrepancyMeasure::parse(std::string_view text) {
    const auto colon = text.find(':');
    const auto head = text.substr(0, colon);
    const std::string_view arg = colon == std::string_view::npos ? "" : text.substr(colon + 1);
    DiscrepancyMeasure m;
    if (head == "mean-abs") m.kind = MeasureKind::MeanAbs;
    else if (head == "mean-diff") m.kind = MeasureKind::MeanDiff;
    else if (head == "quantile-diff") m.kind = MeasureKind::QuantileDiff;
    else if (head == "ad") m.kind = MeasureKind::DistAd;
    else if (head == "class-error") m.kind = MeasureKind::ClassError;
    else if (head == "prob-diff") m.kind = MeasureKind::ProbDiff;
    else if (head == "quantile-prob") m.kind = MeasureKind::QuantileProb;
    else if (head == "ratio") m.kind = MeasureKind::Ratio;
    else if (head == "inv-ratio") m.kind = MeasureKind::InvRatio;
    else throw ConfigError("unknown discrepancy measure '" + std::string(text) + "'");

    if (m.has_p()) {
        if (arg.empty()) throw ConfigError("measure '" + std::string(head) + "' needs ':p'");
        m.p = parse_p(text, arg);
    } else if (!arg.empty()) {
        throw ConfigError("measure '" + std::string(head) + "' takes no argument");
    }
    m.validate();
    return m;
}

std::string DiscrepancyMeasure::name() const {
    auto with_p = [this](const char* base) {
        char buf[64];
        auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, p);
        return std::string(base) + ":" + std::string(buf, ptr);
    };
    switch (kind) {
        case MeasureKind::MeanAbs: return "mean-abs";
        case MeasureKind::MeanDiff: return "mean-diff";
        case MeasureKind::QuantileDiff: return with_p("quantile-diff");
        case MeasureKind::DistAd: return "ad";
        case MeasureKind::ClassError: return "class-error";
        case MeasureKind::ProbDiff: return "prob-diff";
        case MeasureKind::QuantileProb: return with_p("quantile-prob");
        case MeasureKind::Ratio: return "ratio";
        case MeasureKind::InvRatio: return "inv-ratio";
    }
    return "?";
}

void DiscrepancyMeasure::validate() const {
    if (has_p() && !(p > 0.0 && p < 1.0))
        throw ConfigError("measure probability must lie in (0, 1)");
}

MomentStats& MomentStats::operator+=(const MomentStats& o) {
    sum_y += o.sum_y;
    sum_z += o.sum_z;
    sum_abs += o.sum_abs;
    sum_diff += o.sum_diff;
    n_mismatch += o.n_mismatch;
    n_less += o.n_less;
    n_y += o.n_y;
    n_z += o.n_z;
    return *this;
}

MomentStats& MomentStats::operator-=(const MomentStats& o) {
    sum_y -= o.sum_y;
    sum_z -= o.sum_z;
    sum_abs -= o.sum_abs;
    sum_diff -= o.sum_diff;
    n_mismatch -= o.n_mismatch;
    n_less -= o.n_less;
    n_y -= o.n_y;
    n_z -= o.n_z;
    return *this;
}

double additive_discrepancy(const DiscrepancyMeasure& m, const MomentStats& s) {
    if (s.n_y < 0.5 || s.n_z < 0.5) return kNaN;
    switch (m.kind) {
        case MeasureKind::MeanAbs: return s.sum_abs / s.n_y;
        case MeasureKind::MeanDiff: return std::abs(s.sum_y / s.n_y - s.sum_z / s.n_z);
        case MeasureKind::ClassError: return s.n_mismatch / s.n_y;
        case MeasureKind::ProbDiff: return std::abs(s.sum_diff) / s.n_y;
        case MeasureKind::QuantileProb: return std::abs(m.p - s.n_less / s.n_y);
        case MeasureKind::Ratio:
        case MeasureKind::InvRatio: {
            const double my = s.sum_y / s.n_y;
            const double mz = s.sum_z / s.n_z;
            const double num = m.kind == MeasureKind::Ratio ? my : mz;
            const double den = m.kind == MeasureKind::Ratio ? mz : my;
            if (!(den > 0.0) || num < 0.0) return kNaN;
            return num / den;
        }
        case MeasureKind::QuantileDiff:
        case MeasureKind::DistAd: break;
    }
    throw std::logic_error("additive_discrepancy called on a non-additive measure");
}

double dist_ad_sorted(std::span<const double> ys, std::span<const double> zs) {
    const std::size_t ny = ys.size();
    const std::size_t nz = zs.size();
    const std::size_t n = ny + nz;
    const double fy = 1.0 / static_cast<double>(ny);
    const double fz = 1.0 / static_cast<double>(nz);
    std::size_t iy = 0;
    std::size_t iz = 0;
    std::size_t pos = 0;  // pooled values consumed so far
    double sum = 0.0;
    while (pos < n - 1) {
        // Next tie group in the pooled order: every value equal to t.
        const double t = iz == nz || (iy < ny && ys[iy] <= zs[iz]) ? ys[iy] : zs[iz];
        while (iy < ny && ys[iy] == t) ++iy;
        while (iz < nz && zs[iz] == t) ++iz;
        const double gap = std::abs(static_cast<double>(iy) * fy - static_cast<double>(iz) * fz);
        const std::size_t group_end = std::min(iy + iz, n - 1);
        if (gap > 0.0) {
            double w = 0.0;
            for (std::size_t i = pos + 1; i <= group_end; ++i) {
                const double di = static_cast<double>(i);
                w += 1.0 / std::sqrt(di * (static_cast<double>(n) - di));
            }
            sum += gap * w;
        }
        pos = iy + iz;
    }
    return sum / static_cast<double>(n - 1);
}

void check_domain(const DiscrepancyMeasure& m, std::span<const double> y,
                  std::span<const double> z) {
    switch (m.kind) {
        case MeasureKind::ClassError:
            for (std::size_t i = 0; i < y.size(); ++i)
                if (!is_binary(y[i]) || !is_binary(z[i]))
                    throw std::invalid_argument("class-error needs y and z in {0, 1}");
            break;
        case MeasureKind::ProbDiff:
            for (std::size_t i = 0; i < y.size(); ++i)
                if (!is_binary(y[i]))
                    throw std::invalid_argument("prob-diff needs y in {0, 1}");
            break;
        default: break;
    }
}

DiscrepancyValue eval(const DiscrepancyMeasure& m, std::span<const double> y,
                      std::span<const double> z) {
    if (y.empty() || z.empty()) throw std::invalid_argument("discrepancy of an empty sample");
    if (m.requires_paired() && y.size() != z.size())
        throw std::invalid_argument("measure '" + m.name() + "' needs paired y and z");
    check_domain(m, y, z);

    DiscrepancyValue out{0.0, y.size(), z.size()};
    switch (m.kind) {
        case MeasureKind::QuantileDiff: {
            out.d = std::abs(quantile(y, m.p) - quantile(z, m.p));
            return out;
        }
        case MeasureKind::DistAd: {
            out.d = dist_ad_sorted(sorted_copy(y), sorted_copy(z));
            return out;
        }
        default: break;
    }
    MomentStats s;
    if (m.requires_paired()) {
        for (std::size_t i = 0; i < y.size(); ++i) s.add_pair(y[i], z[i]);
    } else {
        for (double v : y) s.add_y(v);
        for (double v : z) s.add_z(v);
    }
    out.d = additive_discrepancy(m, s);
    if (std::isnan(out.d))
        throw std::invalid_argument("ratio discrepancy with a non-positive denominator");
    return out;
}

double zeroing_offset(const DiscrepancyMeasure& m, std::span<const double> y,
                      std::span<const double> z) {
    if (y.empty() || z.empty()) throw std::invalid_argument("offset of an empty sample");
    if (y.size() != z.size()) throw std::invalid_argument("offsets need paired y and z");
    switch (m.kind) {
        case MeasureKind::MeanDiff:
        case MeasureKind::ProbDiff: return mean(y) - mean(z);
        case MeasureKind::QuantileDiff: return quantile(y, m.p) - quantile(z, m.p);
        case MeasureKind::QuantileProb: {
            std::vector<double> diff(y.size());
            for (std::size_t i = 0; i < y.size(); ++i) diff[i] = y[i] - z[i];
            return quantile(diff, m.p);
        }
        default: break;
    }
    throw ConfigError("measure '" + m.name() + "' has no zeroing offset");
}

}  // namespace contrast
