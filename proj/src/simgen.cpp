#include "contrast/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "contrast/rng.hpp"

namespace contrast::sim {

namespace {

// Stream ids keep each purpose's randomness separate.
constexpr std::uint64_t kStreamX = 1;
constexpr std::uint64_t kStreamBranch = 2;
constexpr std::uint64_t kStreamNoise = 3;
constexpr std::uint64_t kStreamMode = 10;
constexpr std::uint64_t kStreamLower = 11;
constexpr std::uint64_t kStreamUpper = 12;
constexpr std::uint64_t kStreamLocation = 20;
constexpr std::uint64_t kStreamScale = 21;

double sd_of(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(v.size() > 1 ? v.size() - 1 : 1));
}

}  // namespace

double h(double z) {
    const double a = std::abs(z);
    const double v = 0.5 * a + 1.5 * z * z;
    return z < 0 ? -v : v;
}

double h_inverse(double u) {
    const double a = (-0.5 + std::sqrt(0.25 + 6.0 * std::abs(u))) / 3.0;
    return u < 0 ? -a : a;
}

double logistic_cdf(double t) { return 1.0 / (1.0 + std::exp(-t)); }

double logit(double p) { return std::log(p / (1.0 - p)); }

double basis(double x, double r) {
    const double v = std::pow(std::abs(x), r);
    return x < 0 ? -v : v;
}

BasisFunction BasisFunction::draw(std::size_t p, std::uint64_t seed, std::uint64_t stream) {
    const CounterRng rng(seed, stream);
    BasisFunction b;
    b.coef.resize(p);
    b.exponent.resize(p);
    for (std::size_t j = 0; j < p; ++j) {
        b.coef[j] = rng.normal(2 * j);
        b.exponent[j] = 2.0 * rng.uniform(4 * p + 2 * j + 1);
    }
    return b;
}

void BasisFunction::calibrate(const Frame& x) {
    if (x.n_cols() != coef.size()) throw std::invalid_argument("basis calibration: wrong column count");
    scale.resize(coef.size());
    std::vector<double> v(x.n_rows());
    for (std::size_t j = 0; j < coef.size(); ++j) {
        for (std::size_t i = 0; i < x.n_rows(); ++i) v[i] = basis(x.column(j).number(i), exponent[j]);
        scale[j] = sd_of(v);
        if (!(scale[j] > 0.0)) scale[j] = 1.0;
    }
}

double BasisFunction::operator()(std::span<const double> x) const {
    double s = 0.0;
    for (std::size_t j = 0; j < coef.size(); ++j) s += coef[j] * basis(x[j], exponent[j]) / scale[j];
    return s;
}

SimModel SimModel::draw(std::uint64_t seed, std::size_t p) {
    SimModel m;
    m.p = p;
    m.seed = seed;
    m.mode = BasisFunction::draw(p, seed, kStreamMode);
    m.log_lower = BasisFunction::draw(p, seed, kStreamLower);
    m.log_upper = BasisFunction::draw(p, seed, kStreamUpper);
    return m;
}

void SimModel::calibrate(const Frame& x) {
    mode.calibrate(x);
    log_lower.calibrate(x);
    log_upper.calibrate(x);
}

double SimModel::s_lower(std::span<const double> x) const { return 0.2 + std::exp(log_lower(x)); }
double SimModel::s_upper(std::span<const double> x) const { return 0.2 + std::exp(log_upper(x)); }

Frame normal_predictors(std::size_t n, std::size_t p, std::uint64_t seed) {
    const CounterRng rng(seed, kStreamX);
    std::vector<FeatureColumn> cols;
    for (std::size_t j = 0; j < p; ++j) {
        std::vector<double> v(n);
        for (std::size_t i = 0; i < n; ++i) v[i] = rng.normal(i * p + j);
        cols.push_back(FeatureColumn::numeric("x" + std::to_string(j + 1), std::move(v)));
    }
    return Frame(std::move(cols));
}

std::vector<double> row_of(const Frame& x, std::size_t row) {
    std::vector<double> r(x.n_cols());
    for (std::size_t j = 0; j < x.n_cols(); ++j) r[j] = x.column(j).number(row);
    return r;
}

std::vector<double> draw_asym_logistic(const SimModel& model, const Frame& x, std::uint64_t seed) {
    const CounterRng branch(seed, kStreamBranch);
    const CounterRng noise(seed, kStreamNoise);
    std::vector<double> y(x.n_rows());
    for (std::size_t i = 0; i < x.n_rows(); ++i) {
        const auto r = row_of(x, i);
        const double sl = model.s_lower(r);
        const double su = model.s_upper(r);
        const double eps = std::abs(noise.logistic(i));
        const double eta = branch.uniform(i) < sl / (sl + su) ? -sl * eps : su * eps;
        y[i] = h(model.f(r) + eta);
    }
    return y;
}

Generated gen_asym_logistic(SimModel& model, std::size_t n, std::uint64_t seed) {
    Generated g;
    g.x = normal_predictors(n, model.p, seed);
    if (!model.calibrated()) model.calibrate(g.x);
    g.y = draw_asym_logistic(model, g.x, seed);
    return g;
}

double TrueConditional::cdf(std::span<const double> x, double u) const {
    const double sl = model_.s_lower(x);
    const double su = model_.s_upper(x);
    const double pl = sl / (sl + su);
    const double t = h_inverse(u) - model_.f(x);
    if (t < 0) return pl * 2.0 * (1.0 - logistic_cdf(-t / sl));
    return pl + (1.0 - pl) * (2.0 * logistic_cdf(t / su) - 1.0);
}

double TrueConditional::quantile(std::span<const double> x, double p) const {
    const double sl = model_.s_lower(x);
    const double su = model_.s_upper(x);
    const double pl = sl / (sl + su);
    const double t = p < pl ? -sl * logit(1.0 - p / (2.0 * pl))
                            : su * logit(0.5 * (1.0 + (p - pl) / (1.0 - pl)));
    return h(model_.f(x) + t);
}

double HeteroModel::s(std::span<const double> x) const {
    return scale_factor * (0.2 + std::exp(log_scale(x)));
}

double correlation(std::span<const double> a, std::span<const double> b) {
    const double n = static_cast<double>(a.size());
    double ma = 0, mb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

HeteroGenerated gen_hetero(const HeteroModel& model, std::size_t n, std::uint64_t seed) {
    HeteroGenerated g;
    g.model = model;
    g.x = normal_predictors(n, model.p, seed);
    const CounterRng noise(seed, kStreamNoise);
    g.y.resize(n);
    g.f.resize(n);
    g.s.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto r = row_of(g.x, i);
        g.f[i] = model.f(r);
        g.s[i] = model.s(r);
        g.y[i] = g.f[i] + g.s[i] * noise.normal(i);
    }
    const double iqr = quantile(g.f, 0.75) - quantile(g.f, 0.25);
    g.signal_to_noise = iqr / (2.0 * quantile(g.s, 0.5));
    g.cor_fs = correlation(g.f, g.s);
    return g;
}

HeteroGenerated gen_hetero(std::size_t n, std::uint64_t seed, std::size_t p) {
    HeteroModel m;
    m.p = p;
    m.seed = seed;
    m.location = BasisFunction::draw(p, seed, kStreamLocation);
    m.log_scale = BasisFunction::draw(p, seed, kStreamScale);
    const Frame x = normal_predictors(n, p, seed);
    m.location.calibrate(x);
    m.log_scale.calibrate(x);

    std::vector<double> f(n), s(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto r = row_of(x, i);
        f[i] = m.f(r);
        s[i] = m.s(r);
    }
    const double iqr = quantile(f, 0.75) - quantile(f, 0.25);
    m.scale_factor = iqr / (2.0 * 3.0 * quantile(s, 0.5));
    return gen_hetero(m, n, seed);
}

double aae_cdf(const TrueConditional& truth, std::span<const double> x,
               const std::function<double(double)>& estimate_cdf) {
    const double lo = truth.quantile(x, 0.001);
    const double hi = truth.quantile(x, 0.999);
    if (!(hi > lo)) throw std::invalid_argument("degenerate AAE grid");
    constexpr int kGrid = 100;
    double s = 0.0;
    for (int j = 0; j < kGrid; ++j) {
        const double u = lo + (hi - lo) * j / (kGrid - 1);
        s += std::abs(truth.cdf(x, u) - estimate_cdf(u));
    }
    return s / kGrid;
}

double aae_hv(std::span<const double> h, std::span<const double> v) {
    if (h.size() != v.size() || v.size() < 2) throw std::invalid_argument("aae_hv needs equal sizes >= 2");
    const double med = quantile(v, 0.5);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        num += std::abs(h[i] - v[i]);
        den += std::abs(v[i] - med);
    }
    if (!(den > 0.0)) throw std::invalid_argument("aae_hv: v is constant");
    return num / den;
}

}  // namespace contrast::sim
