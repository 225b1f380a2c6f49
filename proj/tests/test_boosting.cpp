#include <gtest/gtest.h>

#include <cmath>

#include "contrast/boosting.hpp"
#include "contrast/error.hpp"
#include "oracle.hpp"
#include "support.hpp"

using namespace contrast;

namespace {

ContrastSample shifted_sample(std::uint64_t seed, std::size_t n) {
    Rng rng(seed, 0);
    auto x = testing_support::random_frame(rng, n, 3);
    std::vector<double> y(n), z(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x1 = x.column(0).number(i);
        y[i] = (x1 > 0 ? 1.5 : -0.5) + rng.normal();
        z[i] = 0.2 * rng.normal();
    }
    return ContrastSample::paired(std::move(x), std::move(y), std::move(z));
}

// Single-variable model with a chosen tree list.
BoostModel manual_model(BoostMode mode, std::vector<std::map<NodeId, Node>> trees) {
    Frame x({FeatureColumn::numeric("x1", {0.0})});
    BoostModel m;
    m.mode = mode;
    m.schema = x.schema();
    m.measure = DiscrepancyMeasure::parse(mode == BoostMode::Estimation ? "mean-diff" : "ad");
    for (auto& nodes : trees) m.trees.emplace_back(m.schema, m.measure, SampleMode::Paired, std::move(nodes));
    return m;
}

std::map<NodeId, Node> leaf(Payload p) {
    Node n;
    n.payload = std::move(p);
    return {{1, n}};
}

}  // namespace

TEST(Transform, HandValues) {
    TransformFn g({1.0, 3.0}, {2.0, 6.0});
    EXPECT_EQ(g(2.0), 4.0);
    EXPECT_EQ(g(1.0), 2.0);
    EXPECT_EQ(g(3.0), 6.0);
    EXPECT_EQ(g(4.0), 8.0);
    EXPECT_EQ(g(0.0), 0.0);
    EXPECT_EQ(TransformFn()(1.25), 1.25);
    EXPECT_EQ(TransformFn({1.0}, {3.0})(5.0), 7.0);
    EXPECT_THROW(TransformFn({1.0, 1.0}, {0.0, 1.0}), std::invalid_argument);
    EXPECT_THROW(TransformFn({1.0, 2.0}, {1.0, 0.0}), std::invalid_argument);
}

TEST(Transform, FitMatchesQuantiles) {
    const std::vector<double> y{2, 4, 6}, z{1, 2, 3};
    auto g = TransformFn::fit(y, z, 3, 1.0);
    EXPECT_EQ(g.z_knots(), (std::vector<double>{1, 2, 3}));
    EXPECT_EQ(g.y_knots(), (std::vector<double>{2, 4, 6}));
    EXPECT_TRUE(TransformFn::fit(z, z, 3, 1.0).is_identity());
    auto shrunk = TransformFn::fit(y, z, 3, 0.0);
    EXPECT_TRUE(shrunk.is_identity());
    for (double t : {-1.0, 0.5, 2.5, 9.0}) EXPECT_EQ(shrunk(t), t);
}

TEST(Transform, FitAgainstOracleQuantiles) {
    Rng rng(8, 0);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<double> y(5 + rng.below(30)), z(5 + rng.below(30));
        for (auto& v : y) v = 2.0 * rng.normal() + 1.0;
        for (auto& v : z) v = rng.normal();
        const std::size_t j = 2 + rng.below(10);
        auto g = TransformFn::fit(y, z, j, 0.7);
        const std::size_t jj = std::min(j, z.size());
        ASSERT_LE(g.size(), jj);
        // Every knot sits at a z quantile and maps to the shrunk y quantile.
        for (std::size_t q = 0; q < jj; ++q) {
            const double p = (static_cast<double>(q) + 0.5) / static_cast<double>(jj);
            const double zq = oracle::quantile(z, p), yq = oracle::quantile(y, p);
            EXPECT_NEAR(g(zq), 0.3 * zq + 0.7 * yq, 1e-9);
        }
    }
}

TEST(RunningMedian, TrailingWindow) {
    const std::vector<double> v{5, 1, 3, 2, 4};
    auto m = running_median(v, 3);
    EXPECT_EQ(m, (std::vector<double>{5, 3, 3, 2, 3}));
}

TEST(Estimation, ZeroTreesEchoesZ) {
    auto s = shifted_sample(1, 200);
    BoostConfig c;
    c.trees = 0;
    c.tree.measure = DiscrepancyMeasure::parse("mean-diff");
    auto fit = fit_estimation(s, c);
    EXPECT_TRUE(fit.model.trees.empty());
    EXPECT_EQ(predict_estimation(fit.model, s.x, s.z), s.z);
}

TEST(Estimation, PayloadsAlongPathAreSummed) {
    auto m = manual_model(BoostMode::Estimation, {leaf(0.5), leaf(-0.2)});
    Frame x({FeatureColumn::numeric("x1", {0.0})});
    EXPECT_DOUBLE_EQ(predict_estimation(m, x, 0, 1.0), 1.3);
    auto zero = manual_model(BoostMode::Estimation, {leaf(0.0), leaf(0.0)});
    EXPECT_EQ(predict_estimation(zero, x, 0, 1.0), 1.0);
}

TEST(Estimation, AlphaOneZeroesEveryTerminal) {
    for (const char* name : {"mean-diff", "quantile-diff:0.5", "quantile-prob:0.5"}) {
        auto s = shifted_sample(3, 400);
        BoostConfig c;
        c.trees = 1;
        c.alpha = 1.0;
        c.patience = 0;
        c.tree.measure = DiscrepancyMeasure::parse(name);
        c.tree.min_node = 20;
        auto fit = fit_estimation(s, c);
        ASSERT_EQ(fit.model.trees.size(), 1u);
        auto boosted = ContrastSample::paired(s.x, s.y, fit.z_train);
        for (const auto& [id, rows] : partition_rows(fit.model.trees[0], boosted)) {
            const double d = region_discrepancy(boosted, rows, c.tree.measure).d;
            if (c.tree.measure.kind == MeasureKind::QuantileProb)
                EXPECT_LE(d, 1.0 / static_cast<double>(rows.size()) + 1e-12) << name;
            else
                EXPECT_NEAR(d, 0.0, 1e-12) << name;
        }
    }
}

TEST(Estimation, TraceDecreasesOnShiftedData) {
    auto s = shifted_sample(5, 1000);
    BoostConfig c;
    c.trees = 30;
    c.alpha = 0.3;
    c.patience = 0;
    c.tree.measure = DiscrepancyMeasure::parse("mean-diff");
    auto fit = fit_estimation(s, c);
    ASSERT_EQ(fit.trace.train.size(), 30u);
    EXPECT_LT(fit.trace.train.back(), 0.5 * fit.trace.train.front());
}

TEST(Estimation, RejectsUnsupportedMeasures) {
    auto s = shifted_sample(1, 100);
    BoostConfig c;
    c.tree.measure = DiscrepancyMeasure::parse("mean-abs");
    EXPECT_THROW(fit_estimation(s, c), ConfigError);
    BoostConfig bad;
    bad.alpha = 1.5;
    EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(Distribution, CompositionFollowsTreeOrder) {
    auto m = manual_model(BoostMode::Distribution,
                          {leaf(TransformFn({0.0, 1.0}, {0.0, 2.0})), leaf(TransformFn({0.0}, {1.0}))});
    Frame x({FeatureColumn::numeric("x1", {0.0})});
    const std::vector<double> z{3.0};
    EXPECT_EQ(transform_sample(m, x, 0, z), std::vector<double>{7.0});
    auto none = manual_model(BoostMode::Distribution, {});
    EXPECT_EQ(transform_sample(none, x, 0, z), z);
}

TEST(Distribution, AlphaZeroKeepsInitialZ) {
    auto s = shifted_sample(2, 300);
    BoostConfig c;
    c.trees = 3;
    c.alpha = 0.0;
    c.patience = 0;
    c.tree.measure = DiscrepancyMeasure::parse("ad");
    auto fit = fit_distribution(s, c);
    EXPECT_EQ(fit.z_train, s.z);
}

TEST(Distribution, OneTreeMatchesRegionQuantiles) {
    auto s = shifted_sample(4, 240);
    BoostConfig c;
    c.trees = 1;
    c.alpha = 1.0;
    c.knots = 1000;
    c.patience = 0;
    c.tree.measure = DiscrepancyMeasure::parse("ad");
    c.tree.min_node = 20;
    auto fit = fit_distribution(s, c);
    for (const auto& [id, rows] : partition_rows(fit.model.trees[0], s)) {
        std::vector<double> y, z;
        for (auto i : rows) {
            y.push_back(s.y[i]);
            z.push_back(fit.z_train[i]);
        }
        std::sort(y.begin(), y.end());
        std::sort(z.begin(), z.end());
        for (std::size_t k = 0; k < y.size(); ++k) EXPECT_NEAR(z[k], y[k], 1e-12);
    }
}

TEST(Distribution, SameSeedSameEstimate) {
    auto s = shifted_sample(6, 400);
    BoostConfig c;
    c.trees = 5;
    c.patience = 0;
    c.tree.measure = DiscrepancyMeasure::parse("ad");
    auto fit = fit_distribution(s, c);
    auto a = estimate_distribution(fit.model, s.x, 3, 500, 9);
    auto b = estimate_distribution(fit.model, s.x, 3, 500, 9);
    EXPECT_EQ(a.sample(), b.sample());
    EXPECT_LT(a.quantile(0.25), a.quantile(0.75));
    EXPECT_DOUBLE_EQ(a.cdf(a.quantile(1.0)), 1.0);
}

TEST(ZSource, ParseAndDraw) {
    EXPECT_EQ(ZSource::parse("normal").kind, ZSource::Kind::StandardNormal);
    EXPECT_EQ(ZSource::parse("residual:m").column, "m");
    EXPECT_THROW(ZSource::parse("residual"), ConfigError);
    EXPECT_THROW(ZSource::parse("nope"), ConfigError);
    auto g = ZSource::parse("gauss-y");
    const std::vector<double> y{1.0, 3.0};
    g.calibrate(y, {});
    EXPECT_DOUBLE_EQ(g.mean, 2.0);
    auto d = g.draw(4, 0.0, CounterRng(1, 2));
    EXPECT_EQ(d, g.draw(4, 0.0, CounterRng(1, 2)));
    EXPECT_THROW(ZSource::parse("column:z").draw(3, 0.0, CounterRng(1, 2)), ConfigError);
}
