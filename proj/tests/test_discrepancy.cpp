#include <gtest/gtest.h>

#include <cmath>

#include "contrast/discrepancy.hpp"
#include "contrast/error.hpp"
#include "contrast/rng.hpp"
#include "oracle.hpp"

using namespace contrast;

namespace {

double d_of(const char* m, const std::vector<double>& y, const std::vector<double>& z) {
    return eval(DiscrepancyMeasure::parse(m), y, z).d;
}

const char* const kAllMeasures[] = {"mean-abs",  "mean-diff",   "quantile-diff:0.3", "ad",
                                    "class-error", "prob-diff", "quantile-prob:0.5", "ratio",
                                    "inv-ratio"};

}  // namespace

TEST(Measure, ParseAndName) {
    for (const char* m : kAllMeasures) EXPECT_EQ(DiscrepancyMeasure::parse(m).name(), m);
    EXPECT_THROW(DiscrepancyMeasure::parse("bogus"), ConfigError);
    EXPECT_THROW(DiscrepancyMeasure::parse("quantile-diff"), ConfigError);
    EXPECT_THROW(DiscrepancyMeasure::parse("quantile-diff:1.5"), ConfigError);
    EXPECT_THROW(DiscrepancyMeasure::parse("mean-abs:0.5"), ConfigError);
}

TEST(Eval, HandValues) {
    EXPECT_EQ(d_of("mean-abs", {1, 2}, {1, 2}), 0.0);
    EXPECT_NEAR(d_of("ad", {0, 0}, {1, 1}), 1.0 / std::sqrt(3.0) / 3.0 + 1.0 / 6.0, 1e-12);
    EXPECT_NEAR(d_of("ad", {0}, {1}), 1.0, 1e-12);
    EXPECT_EQ(d_of("ad", {3, 1, 2, 2}, {2, 3, 2, 1}), 0.0);
    EXPECT_EQ(d_of("class-error", {0, 1}, {1, 0}), 1.0);
    EXPECT_NEAR(d_of("prob-diff", {1, 0}, {0.6, 0.4}), 0.0, 1e-15);
    EXPECT_EQ(d_of("quantile-prob:0.5", {1, 2, 3, 4}, {2.5, 2.5, 2.5, 2.5}), 0.0);
    EXPECT_NEAR(d_of("ratio", {0.3}, {0.11}), 0.30 / 0.11, 1e-12);
    EXPECT_NEAR(d_of("ratio", {0.3}, {0.11}), 2.73, 0.005);
    EXPECT_NEAR(d_of("inv-ratio", {0.3}, {0.11}), 0.11 / 0.30, 1e-12);
}

TEST(Eval, TwoSampleSizesAllowedOnlyForDistributionAndRatio) {
    EXPECT_NO_THROW(d_of("ad", {1, 2, 3}, {1}));
    EXPECT_NO_THROW(d_of("ratio", {1, 2, 3}, {1}));
    EXPECT_THROW(d_of("mean-abs", {1, 2, 3}, {1}), std::invalid_argument);
    EXPECT_THROW(d_of("mean-abs", {}, {}), std::invalid_argument);
    EXPECT_THROW(d_of("ratio", {1}, {0}), std::invalid_argument);
    EXPECT_THROW(d_of("class-error", {0.5}, {1}), std::invalid_argument);
}

TEST(Eval, MatchesOracleOnRandomInputs) {
    Rng rng(11, 0);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + rng.below(25);
        std::vector<double> y(n), z(n), by(n), bz(n), py(n);
        for (std::size_t i = 0; i < n; ++i) {
            y[i] = std::round(4.0 * rng.normal()) / 4.0 + 2.0;
            z[i] = std::round(4.0 * rng.normal()) / 4.0 + 2.0;
            by[i] = rng.uniform() < 0.4 ? 1.0 : 0.0;
            bz[i] = rng.uniform() < 0.5 ? 1.0 : 0.0;
            py[i] = rng.uniform();
        }
        for (const char* name : kAllMeasures) {
            const auto m = DiscrepancyMeasure::parse(name);
            const auto& yy = m.kind == MeasureKind::ClassError || m.kind == MeasureKind::ProbDiff ? by : y;
            const auto& zz = m.kind == MeasureKind::ClassError ? bz : m.kind == MeasureKind::ProbDiff ? py : z;
            const double want = oracle::discrepancy(m, yy, zz);
            if (std::isnan(want)) continue;
            EXPECT_NEAR(eval(m, yy, zz).d, want, 1e-12 * std::max(1.0, std::abs(want))) << name << " n=" << n;
        }
    }
}

TEST(Eval, AdOnUnequalSizesMatchesOracle) {
    Rng rng(5, 1);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> y(1 + rng.below(12)), z(1 + rng.below(12));
        for (auto& v : y) v = std::round(3.0 * rng.normal());
        for (auto& v : z) v = std::round(3.0 * rng.normal());
        EXPECT_NEAR(d_of("ad", y, z), oracle::dist_ad(y, z), 1e-13);
    }
}

TEST(ZeroingOffset, HandValues) {
    const auto mean_diff = DiscrepancyMeasure::parse("mean-diff");
    EXPECT_EQ(zeroing_offset(mean_diff, std::vector<double>{2, 4}, std::vector<double>{1, 1}), 2.0);
    const auto qp = DiscrepancyMeasure::parse("quantile-prob:0.5");
    const std::vector<double> y{2, 4}, z{1, 1};
    const double delta = zeroing_offset(qp, y, z);
    EXPECT_EQ(delta, 2.0);
    std::vector<double> shifted{z[0] + delta, z[1] + delta};
    EXPECT_EQ(eval(qp, y, shifted).d, 0.0);
    for (const char* name : {"mean-diff", "quantile-diff:0.5", "prob-diff", "quantile-prob:0.5"}) {
        const std::vector<double> same{0.0, 1.0, 1.0};
        EXPECT_EQ(zeroing_offset(DiscrepancyMeasure::parse(name), same, same), 0.0) << name;
    }
    EXPECT_THROW(zeroing_offset(DiscrepancyMeasure::parse("ad"), y, z), ConfigError);
}

TEST(ZeroingOffset, ZeroesRandomRegions) {
    Rng rng(2, 2);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + rng.below(40);
        std::vector<double> y(n), z(n);
        for (std::size_t i = 0; i < n; ++i) {
            y[i] = rng.normal();
            z[i] = 0.5 * rng.normal() + 1.0;
        }
        for (const char* name : {"mean-diff", "quantile-diff:0.25"}) {
            const auto m = DiscrepancyMeasure::parse(name);
            const double delta = zeroing_offset(m, y, z);
            std::vector<double> zs(z);
            for (auto& v : zs) v += delta;
            EXPECT_NEAR(eval(m, y, zs).d, 0.0, 1e-12) << name;
        }
        const auto qp = DiscrepancyMeasure::parse("quantile-prob:0.7");
        const double delta = zeroing_offset(qp, y, z);
        std::vector<double> zs(z);
        for (auto& v : zs) v += delta;
        EXPECT_LE(eval(qp, y, zs).d, 1.0 / static_cast<double>(n) + 1e-12);
    }
}

TEST(MomentStats, AdditiveMatchesDirectEval) {
    const std::vector<double> y{1, 0, 1, 1}, z{0.2, 0.3, 0.9, 0.5};
    MomentStats s;
    for (std::size_t i = 0; i < y.size(); ++i) s.add_pair(y[i], z[i]);
    for (const char* name : {"mean-abs", "mean-diff", "prob-diff", "ratio", "inv-ratio"}) {
        const auto m = DiscrepancyMeasure::parse(name);
        EXPECT_NEAR(additive_discrepancy(m, s), eval(m, y, z).d, 1e-15) << name;
    }
    MomentStats empty;
    EXPECT_TRUE(std::isnan(additive_discrepancy(DiscrepancyMeasure::parse("mean-diff"), empty)));
}
