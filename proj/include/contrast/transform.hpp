#pragma once

#include <span>
#include <vector>

namespace contrast {

/// Monotone piecewise-linear QQ map from z to y.
///
/// Knots are (z_q, y_q) with z_q strictly increasing and y_q nondecreasing.
/// Beyond the end knots the terminal segment is extended linearly. No knots
/// means identity; a single knot is a pure shift.
class TransformFn {
public:
    TransformFn() = default;

    // Throws std::invalid_argument unless z strictly increases and y does not decrease.
    TransformFn(std::vector<double> z_knots, std::vector<double> y_knots);

    // Knots at probabilities (j - 0.5)/J', J' = min(J, |z|): z quantiles mapped to
    // y quantiles shrunk toward identity, y_q = (1 - alpha) z_q + alpha Q_y.
    static TransformFn fit(std::span<const double> y, std::span<const double> z, std::size_t knots,
                           double alpha);

    double operator()(double z) const;

    bool is_identity() const;
    std::size_t size() const { return z_.size(); }
    const std::vector<double>& z_knots() const { return z_; }
    const std::vector<double>& y_knots() const { return y_; }

    bool operator==(const TransformFn&) const = default;

private:
    std::vector<double> z_;
    std::vector<double> y_;
};

inline double transform_eval(const TransformFn& g, double z) { return g(z); }

inline TransformFn fit_qq_transform(std::span<const double> y, std::span<const double> z,
                                    std::size_t knots, double alpha) {
    return TransformFn::fit(y, z, knots, alpha);
}

}  // namespace contrast
