#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "contrast/dataset.hpp"

namespace contrast::sim {

// h(z) = sign(z) (0.5 |z| + 1.5 z^2) and its inverse.
double h(double z);
double h_inverse(double u);

double logistic_cdf(double t);
double logit(double p);

/// Random additive function sum_j c_j B_j(x_j) / std(B_j), B_j(x) = sign(x)|x|^r_j.
struct BasisFunction {
    std::vector<double> coef;      // c_j ~ N(0, 1)
    std::vector<double> exponent;  // r_j ~ U(0, 2)
    std::vector<double> scale;     // std of B_j over the calibration sample; empty until calibrated

    static BasisFunction draw(std::size_t p, std::uint64_t seed, std::uint64_t stream);
    void calibrate(const Frame& x);
    bool calibrated() const { return !scale.empty(); }
    double operator()(std::span<const double> x) const;
};

double basis(double x, double r);

/// Asymmetric-logistic generator y = h(f(x) + eta(x)).
struct SimModel {
    std::size_t p = 10;
    BasisFunction mode;       // f
    BasisFunction log_lower;  // t_l, s_l = 0.2 + exp(t_l)
    BasisFunction log_upper;  // t_u, s_u = 0.2 + exp(t_u)
    std::uint64_t seed = 0;

    static SimModel draw(std::uint64_t seed, std::size_t p = 10);
    bool calibrated() const { return mode.calibrated(); }
    void calibrate(const Frame& x);

    double f(std::span<const double> x) const { return mode(x); }
    double s_lower(std::span<const double> x) const;
    double s_upper(std::span<const double> x) const;
};

struct Generated {
    Frame x;
    std::vector<double> y;
};

// Standard-normal predictors named x1..xp.
Frame normal_predictors(std::size_t n, std::size_t p, std::uint64_t seed);

std::vector<double> row_of(const Frame& x, std::size_t row);

// Calibrates `model` from the generated x when it is not calibrated yet.
Generated gen_asym_logistic(SimModel& model, std::size_t n, std::uint64_t seed);

// Fresh y draws at given x (same conditional distribution).
std::vector<double> draw_asym_logistic(const SimModel& model, const Frame& x, std::uint64_t seed);

/// True conditional law of the asymmetric-logistic generator.
class TrueConditional {
public:
    explicit TrueConditional(const SimModel& model) : model_(model) {}
    double cdf(std::span<const double> x, double u) const;
    double quantile(std::span<const double> x, double p) const;

private:
    const SimModel& model_;
};

inline double true_cdf(const SimModel& model, std::span<const double> x, double u) {
    return TrueConditional(model).cdf(x, u);
}

/// Heteroskedastic normal generator y = f(x) + s(x) eps.
struct HeteroModel {
    std::size_t p = 10;
    BasisFunction location;
    BasisFunction log_scale;  // s = scale_factor (0.2 + exp(t_s))
    double scale_factor = 1.0;
    std::uint64_t seed = 0;

    double f(std::span<const double> x) const { return location(x); }
    double s(std::span<const double> x) const;
};

struct HeteroGenerated {
    Frame x;
    std::vector<double> y;
    std::vector<double> f;
    std::vector<double> s;
    HeteroModel model;
    double signal_to_noise = 0.0;  // IQR(f) / (2 med(s))
    double cor_fs = 0.0;
};

// Signal/noise rescaled to exactly 3 on the generated sample.
HeteroGenerated gen_hetero(std::size_t n, std::uint64_t seed, std::size_t p = 10);

// Same model, new rows (no recalibration).
HeteroGenerated gen_hetero(const HeteroModel& model, std::size_t n, std::uint64_t seed);

double correlation(std::span<const double> a, std::span<const double> b);

// Mean |CDF - estimate| over 100 uniform points in [Q(0.001), Q(0.999)].
double aae_cdf(const TrueConditional& truth, std::span<const double> x,
               const std::function<double(double)>& estimate_cdf);

// mean|h - v| / mean|v - median(v)|
double aae_hv(std::span<const double> h, std::span<const double> v);

}  // namespace contrast::sim
