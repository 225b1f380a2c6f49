#include "contrast/transform.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "contrast/dataset.hpp"

namespace contrast {

TransformFn::TransformFn(std::vector<double> z_knots, std::vector<double> y_knots)
    : z_(std::move(z_knots)), y_(std::move(y_knots)) {
    if (z_.size() != y_.size()) throw std::invalid_argument("transform knot arrays differ in length");
    for (std::size_t k = 0; k < z_.size(); ++k) {
        if (!std::isfinite(z_[k]) || !std::isfinite(y_[k]))
            throw std::invalid_argument("transform knots must be finite");
        if (k > 0 && (z_[k] <= z_[k - 1] || y_[k] < y_[k - 1]))
            throw std::invalid_argument("transform knots must be monotone");
    }
}

TransformFn TransformFn::fit(std::span<const double> y, std::span<const double> z,
                             std::size_t knots, double alpha) {
    if (y.empty() || z.empty()) throw std::invalid_argument("QQ transform of an empty sample");
    if (knots < 1) throw std::invalid_argument("QQ transform needs at least one knot");
    std::vector<double> ys(y.begin(), y.end());
    std::vector<double> zs(z.begin(), z.end());
    std::sort(ys.begin(), ys.end());
    std::sort(zs.begin(), zs.end());

    const std::size_t count = std::min(knots, zs.size());
    std::vector<double> zk;
    std::vector<double> yk;
    zk.reserve(count);
    yk.reserve(count);
    double running = -INFINITY;
    for (std::size_t j = 1; j <= count; ++j) {
        const double p = (static_cast<double>(j) - 0.5) / static_cast<double>(count);
        const double zq = quantile_sorted(zs, p);
        const double yq = (1.0 - alpha) * zq + alpha * quantile_sorted(ys, p);
        running = std::max(running, yq);
        if (!zk.empty() && zq <= zk.back()) {
            yk.back() = running;  // collapse tied z quantiles, keep the last y
            continue;
        }
        zk.push_back(zq);
        yk.push_back(running);
    }
    TransformFn g;
    g.z_ = std::move(zk);
    g.y_ = std::move(yk);
    return g;
}

double TransformFn::operator()(double z) const {
    if (z_.empty()) return z;
    if (z_.size() == 1) return y_[0] == z_[0] ? z : y_[0] + (z - z_[0]);
    auto it = std::upper_bound(z_.begin(), z_.end(), z);
    std::size_t hi = static_cast<std::size_t>(it - z_.begin());
    hi = std::clamp<std::size_t>(hi, 1, z_.size() - 1);
    if (z == z_[hi]) return y_[hi];
    const std::size_t lo = hi - 1;
    // Identity segments are exact.
    if (y_[lo] == z_[lo] && y_[hi] == z_[hi]) return z;
    const double t = (z - z_[lo]) / (z_[hi] - z_[lo]);
    return y_[lo] + t * (y_[hi] - y_[lo]);
}

bool TransformFn::is_identity() const {
    for (std::size_t k = 0; k < z_.size(); ++k)
        if (z_[k] != y_[k]) return false;
    return true;
}

}  // namespace contrast
