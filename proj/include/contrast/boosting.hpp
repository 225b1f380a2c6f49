#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "contrast/dataset.hpp"
#include "contrast/discrepancy.hpp"
#include "contrast/rng.hpp"
#include "contrast/transform.hpp"
#include "contrast/tree.hpp"

namespace contrast {

struct BoostConfig {
    std::size_t trees = 100;  // K
    double alpha = 0.1;       // learning rate
    GrowConfig tree = [] {
        GrowConfig g;
        g.max_regions = 8;
        return g;
    }();
    std::size_t knots = 64;   // J, distribution mode
    std::uint64_t seed = 1;
    // Stop when the trailing running median (window 21) of the train trace
    // has not improved for this many trees; 0 disables.
    std::size_t patience = 50;

    void validate() const;
};

/// Where starting z values come from.
struct ZSource {
    enum class Kind : std::uint8_t {
        StandardNormal,  // N(0, 1) at every x
        GaussY,          // N(mean(y), var(y)) at every x
        Marginal,        // empirical marginal of y
        Residual,        // location(x) + bootstrap residual
        Column,          // user-supplied values
    };
    Kind kind = Kind::StandardNormal;
    double mean = 0.0;  // GaussY
    double sd = 1.0;    // GaussY
    std::vector<double> pool;  // Marginal: y values; Residual: residuals
    std::string column;        // Residual: location column; Column: z column

    // "normal", "gauss-y", "marginal", "residual:<col>", "column:<col>"
    static ZSource parse(std::string_view text);
    std::string name() const;

    // Fills the data-dependent parameters from training outcomes.
    // `location` is required for Residual (one value per row).
    void calibrate(std::span<const double> y, std::span<const double> location);

    // One starting value per training row.
    std::vector<double> initial(std::span<const double> y, std::span<const double> location,
                                std::span<const double> user_z, std::uint64_t seed) const;

    // n independent draws at one x; `location` is the row's location value (Residual only).
    std::vector<double> draw(std::size_t n, double location, const CounterRng& rng) const;

    bool operator==(const ZSource&) const = default;
};

enum class BoostMode : std::uint8_t { Estimation, Distribution };

struct BoostModel {
    BoostMode mode = BoostMode::Estimation;
    DiscrepancyMeasure measure;
    BoostConfig config;
    FrameSchema schema;
    std::vector<ContrastTree> trees;  // every terminal carries a payload
    ZSource z_source;
};

struct TrainTrace {
    std::vector<double> train;
    std::vector<double> test;  // empty without an evaluation sample
};

struct FitResult {
    BoostModel model;
    TrainTrace trace;
    std::vector<double> z_train;  // z^(K) on the training rows
    std::vector<double> z_test;   // z^(K) on the evaluation rows, if any
};

// Count-weighted mean of terminal discrepancies of `tree` recomputed on `sample`.
double average_discrepancy(const ContrastTree& tree, const ContrastSample& sample);

// Trailing running median with the given window.
std::vector<double> running_median(std::span<const double> values, std::size_t window);

// Offsets per terminal: y vs z + delta has zero discrepancy (shrunk by alpha).
// `eval` (optional) must be paired and conform to the training schema.
FitResult fit_estimation(const ContrastSample& sample, const BoostConfig& config,
                         const ContrastSample* eval = nullptr);

double predict_estimation(const BoostModel& model, const Frame& x, std::size_t row, double z0);
std::vector<double> predict_estimation(const BoostModel& model, const Frame& x,
                                       std::span<const double> z0);

// QQ transforms per terminal on dist-ad trees. sample.z holds z_init.
FitResult fit_distribution(const ContrastSample& sample, const BoostConfig& config,
                           const ContrastSample* eval = nullptr);

// Pushes z values through the row's transform in every tree, in tree order.
std::vector<double> transform_sample(const BoostModel& model, const Frame& x, std::size_t row,
                                     std::span<const double> z_values);

class DistributionEstimate {
public:
    explicit DistributionEstimate(std::vector<double> sample);

    const std::vector<double>& sample() const { return sample_; }  // draw order
    double quantile(double p) const { return quantile_sorted(sorted_, p); }
    double cdf(double t) const;

private:
    std::vector<double> sample_;
    std::vector<double> sorted_;
};

// n draws from the model's z source at the row, transformed. `location` is
// used by residual sources only. Column sources need explicit draws.
DistributionEstimate estimate_distribution(const BoostModel& model, const Frame& x,
                                           std::size_t row, std::size_t n, std::uint64_t seed,
                                           double location = 0.0);
DistributionEstimate estimate_distribution(const BoostModel& model, const Frame& x,
                                           std::size_t row, std::span<const double> z_draws);

}  // namespace contrast
