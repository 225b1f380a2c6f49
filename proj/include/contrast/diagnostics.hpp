#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "contrast/boosting.hpp"
#include "contrast/tree.hpp"

namespace contrast {

/// Lack-of-fit contrast curve: mean assigned discrepancy of the top-q
/// fraction of observations, one point per region boundary.
struct ContrastCurve {
    std::vector<std::pair<double, double>> points;  // (fraction, mean discrepancy)

    double leftmost() const { return points.front().second; }
    double rightmost() const { return points.back().second; }
};

// Region discrepancies are recomputed on `sample`; empty or undefined regions are skipped.
ContrastCurve contrast_curve(const ContrastTree& tree, const ContrastSample& sample);

std::string curve_csv(const ContrastCurve& curve);

struct QqPoint {
    NodeId region = 0;
    double p = 0.0;
    double z_q = 0.0;
    double y_q = 0.0;
};

// Matched quantiles for the top_k regions by discrepancy, at
// p_j = (j - 0.5)/min(n_region, 200).
std::vector<QqPoint> qq_regions(const ContrastTree& tree, const ContrastSample& sample,
                                std::size_t top_k);

std::string qq_csv(const std::vector<QqPoint>& points);

struct BootstrapSe {
    double left_se = 0.0;
    double right_se = 0.0;
    std::size_t replicates = 0;
    std::size_t replicates_with_empty_regions = 0;
};

// Rows resampled with replacement; tree structure fixed, node statistics recomputed.
BootstrapSe bootstrap_se(const ContrastTree& tree, const ContrastSample& sample, std::size_t b,
                         std::uint64_t seed, unsigned threads = 1);

struct NullSummary {
    std::vector<double> replicates;
    double mean = 0.0;
    double sd = 0.0;

    bool consistent(double observed, double k = 2.0) const {
        return observed >= mean - k * sd && observed <= mean + k * sd;
    }
};

// Produces a sample whose y and z come from the same conditional distribution.
using PairGenerator = std::function<ContrastSample(std::size_t replicate, std::uint64_t seed)>;

// Tree-only: average terminal discrepancy of one dist-ad tree on the pair.
// Full boost: distribution boosting, then that statistic for a fresh tree on (y, z^(K)).
enum class NullPipeline : std::uint8_t { TreeOnly, FullBoost };

NullSummary null_distribution(const PairGenerator& generator, NullPipeline pipeline,
                              const BoostConfig& config, std::size_t replicates, std::uint64_t seed,
                              unsigned threads = 1);

NullSummary summarize(std::vector<double> replicates);

}  // namespace contrast
