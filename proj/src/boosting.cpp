#include "contrast/boosting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "contrast/error.hpp"

namespace contrast {

namespace {

constexpr std::uint64_t kInitialZStream = 0x7a5f;

// Running-median early stopping on the train trace.
class Plateau {
public:
    explicit Plateau(std::size_t patience) : patience_(patience) {}

    // Returns true when fitting should stop after this value.
    bool update(const std::vector<double>& trace) {
        if (patience_ == 0) return false;
        const auto rm = running_median(trace, 21).back();
        if (rm < best_) {
            best_ = rm;
            stale_ = 0;
            return false;
        }
        return ++stale_ >= patience_;
    }

private:
    std::size_t patience_;
    double best_ = std::numeric_limits<double>::infinity();
    std::size_t stale_ = 0;
};

double tree_average(const ContrastTree& tree) {
    double num = 0.0, den = 0.0;
    for (const auto& [id, node] : tree.nodes()) {
        if (!node.is_terminal() || std::isnan(node.d)) continue;
        const double n = static_cast<double>(node.n_y == node.n_z ? node.n_y : node.n_y + node.n_z);
        num += n * node.d;
        den += n;
    }
    return den > 0 ? num / den : 0.0;
}

void check_eval(const ContrastSample& sample, const ContrastSample* eval) {
    if (!eval) return;
    if (eval->mode != SampleMode::Paired) throw ConfigError("evaluation sample must be paired");
    if (eval->x.schema() != sample.x.schema())
        throw DataError("evaluation sample columns differ from the training sample");
}

std::vector<std::size_t> terminal_rows_of(const std::vector<NodeId>& route, NodeId id) {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < route.size(); ++i)
        if (route[i] == id) rows.push_back(i);
    return rows;
}

}  // namespace

void BoostConfig::validate() const {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("learning rate must lie in [0, 1]");
    if (knots < 2) throw ConfigError("knot count must be >= 2");
    tree.validate();
}

ZSource ZSource::parse(std::string_view text) {
    ZSource s;
    const auto colon = text.find(':');
    const auto head = text.substr(0, colon);
    const std::string arg = colon == std::string_view::npos ? "" : std::string(text.substr(colon + 1));
    if (head == "normal") s.kind = Kind::StandardNormal;
    else if (head == "gauss-y") s.kind = Kind::GaussY;
    else if (head == "marginal") s.kind = Kind::Marginal;
    else if (head == "residual") s.kind = Kind::Residual;
    else if (head == "column") s.kind = Kind::Column;
    else throw ConfigError("unknown z source '" + std::string(text) + "'");
    const bool wants_arg = s.kind == Kind::Residual || s.kind == Kind::Column;
    if (wants_arg && arg.empty()) throw ConfigError("z source '" + std::string(head) + "' needs ':<column>'");
    if (!wants_arg && !arg.empty()) throw ConfigError("z source '" + std::string(head) + "' takes no argument");
    s.column = arg;
    return s;
}

std::string ZSource::name() const {
    switch (kind) {
        case Kind::StandardNormal: return "normal";
        case Kind::GaussY: return "gauss-y";
        case Kind::Marginal: return "marginal";
        case Kind::Residual: return "residual:" + column;
        case Kind::Column: return "column:" + column;
    }
    return "?";
}

void ZSource::calibrate(std::span<const double> y, std::span<const double> location) {
    switch (kind) {
        case Kind::GaussY: {
            mean = contrast::mean(y);
            double ss = 0.0;
            for (double v : y) ss += (v - mean) * (v - mean);
            sd = y.size() > 1 ? std::sqrt(ss / static_cast<double>(y.size() - 1)) : 0.0;
            break;
        }
        case Kind::Marginal:
            pool.assign(y.begin(), y.end());
            std::sort(pool.begin(), pool.end());
            break;
        case Kind::Residual:
            if (location.size() != y.size())
                throw DataError("residual z source needs one location value per row");
            pool.resize(y.size());
            for (std::size_t i = 0; i < y.size(); ++i) pool[i] = y[i] - location[i];
            break;
        default: break;
    }
}

std::vector<double> ZSource::initial(std::span<const double> y, std::span<const double> location,
                                     std::span<const double> user_z, std::uint64_t seed) const {
    const std::size_t n = y.size();
    std::vector<double> z(n);
    const CounterRng gen(seed, kInitialZStream);
    switch (kind) {
        case Kind::StandardNormal:
            for (std::size_t i = 0; i < n; ++i) z[i] = gen.normal(i);
            break;
        case Kind::GaussY:
            for (std::size_t i = 0; i < n; ++i) z[i] = mean + sd * gen.normal(i);
            break;
        case Kind::Marginal:
        case Kind::Residual: {
            if (kind == Kind::Residual && location.size() != n)
                throw DataError("residual z source needs one location value per row");
            std::vector<std::size_t> perm(n);
            std::iota(perm.begin(), perm.end(), std::size_t{0});
            Rng rng(seed, kInitialZStream + 1);
            rng.shuffle(perm.begin(), perm.end());
            for (std::size_t i = 0; i < n; ++i)
                z[i] = kind == Kind::Marginal ? y[perm[i]] : location[i] + pool.at(perm[i]);
            break;
        }
        case Kind::Column:
            if (user_z.size() != n) throw DataError("user z column length differs from the sample");
            z.assign(user_z.begin(), user_z.end());
            break;
    }
    return z;
}

std::vector<double> ZSource::draw(std::size_t n, double location, const CounterRng& rng) const {
    std::vector<double> z(n);
    switch (kind) {
        case Kind::StandardNormal:
            for (std::size_t k = 0; k < n; ++k) z[k] = rng.normal(k);
            break;
        case Kind::GaussY:
            for (std::size_t k = 0; k < n; ++k) z[k] = mean + sd * rng.normal(k);
            break;
        case Kind::Marginal:
        case Kind::Residual:
            if (pool.empty()) throw DataError("z source has an empty value pool");
            for (std::size_t k = 0; k < n; ++k) {
                const double v = pool[rng.below(k, pool.size())];
                z[k] = kind == Kind::Marginal ? v : location + v;
            }
            break;
        case Kind::Column:
            throw ConfigError("a user-supplied z source needs explicit draws");
    }
    return z;
}

double average_discrepancy(const ContrastTree& tree, const ContrastSample& sample) {
    const auto parts = partition_rows(tree, sample);
    double num = 0.0, den = 0.0;
    for (const auto& [id, rows] : parts) {
        if (rows.empty()) continue;
        const auto v = region_discrepancy(sample, rows, tree.measure());
        if (std::isnan(v.d)) continue;
        const double n = static_cast<double>(sample.mode == SampleMode::Paired ? v.n_y : v.n_y + v.n_z);
        num += n * v.d;
        den += n;
    }
    return den > 0 ? num / den : 0.0;
}

std::vector<double> running_median(std::span<const double> values, std::size_t window) {
    std::vector<double> out(values.size());
    std::vector<double> buf;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const std::size_t lo = i + 1 >= window ? i + 1 - window : 0;
        buf.assign(values.begin() + static_cast<std::ptrdiff_t>(lo),
                   values.begin() + static_cast<std::ptrdiff_t>(i + 1));
        std::sort(buf.begin(), buf.end());
        const std::size_t m = buf.size();
        out[i] = m % 2 ? buf[m / 2] : 0.5 * (buf[m / 2 - 1] + buf[m / 2]);
    }
    return out;
}

FitResult fit_estimation(const ContrastSample& sample, const BoostConfig& config,
                         const ContrastSample* eval) {
    config.validate();
    const auto& m = config.tree.measure;
    if (!m.supports_offset())
        throw ConfigError("measure '" + m.name() + "' cannot be boosted with offsets");
    if (sample.mode != SampleMode::Paired) throw ConfigError("estimation boosting needs paired data");
    if (sample.size() == 0) throw DataError("cannot boost on an empty sample");
    check_eval(sample, eval);

    FitResult out;
    out.model.mode = BoostMode::Estimation;
    out.model.measure = m;
    out.model.config = config;
    out.model.schema = sample.x.schema();

    ContrastSample work = sample;
    std::optional<ContrastSample> test;
    if (eval) test = *eval;

    Plateau plateau(config.patience);
    std::vector<double> ys, zs;
    for (std::size_t k = 0; k < config.trees; ++k) {
        ContrastTree tree = grow(work, config.tree);
        out.trace.train.push_back(tree_average(tree));
        if (test) out.trace.test.push_back(average_discrepancy(tree, *test));

        const auto route = tree.route(work.x);
        for (const auto id : tree.terminal_ids()) {
            const auto rows = terminal_rows_of(route, id);
            work.gather(rows, ys, zs);
            const double delta = config.alpha * zeroing_offset(m, ys, zs);
            tree.node(id).payload = delta;
            for (auto r : rows) work.z[r] += delta;
        }
        if (test) {
            const auto troute = tree.route(test->x);
            for (std::size_t i = 0; i < troute.size(); ++i)
                test->z[i] += std::get<double>(tree.node(troute[i]).payload);
        }
        const bool single = tree.terminal_count() == 1;
        out.model.trees.push_back(std::move(tree));
        if (single || plateau.update(out.trace.train)) break;
    }
    out.z_train = std::move(work.z);
    if (test) out.z_test = std::move(test->z);
    return out;
}

double predict_estimation(const BoostModel& model, const Frame& x, std::size_t row, double z0) {
    if (model.mode != BoostMode::Estimation) throw ConfigError("model is not an estimation model");
    double z = z0;
    for (const auto& tree : model.trees) z += std::get<double>(tree.node(tree.apply(x, row)).payload);
    return z;
}

std::vector<double> predict_estimation(const BoostModel& model, const Frame& x,
                                       std::span<const double> z0) {
    if (z0.size() != x.n_rows()) throw DataError("initial z length differs from the row count");
    for (const auto& tree : model.trees) tree.check_schema(x);
    std::vector<double> out(x.n_rows());
    for (std::size_t i = 0; i < x.n_rows(); ++i) out[i] = predict_estimation(model, x, i, z0[i]);
    return out;
}

FitResult fit_distribution(const ContrastSample& sample, const BoostConfig& config,
                           const ContrastSample* eval) {
    config.validate();
    if (sample.mode != SampleMode::Paired) throw ConfigError("distribution boosting needs paired data");
    if (sample.size() == 0) throw DataError("cannot boost on an empty sample");
    check_eval(sample, eval);

    BoostConfig cfg = config;
    cfg.tree.measure = DiscrepancyMeasure{MeasureKind::DistAd, 0.5};

    FitResult out;
    out.model.mode = BoostMode::Distribution;
    out.model.measure = cfg.tree.measure;
    out.model.config = cfg;
    out.model.schema = sample.x.schema();

    ContrastSample work = sample;
    std::optional<ContrastSample> test;
    if (eval) test = *eval;

    Plateau plateau(cfg.patience);
    std::vector<double> ys, zs;
    for (std::size_t k = 0; k < cfg.trees; ++k) {
        ContrastTree tree = grow(work, cfg.tree);
        out.trace.train.push_back(tree_average(tree));
        if (test) out.trace.test.push_back(average_discrepancy(tree, *test));

        const auto route = tree.route(work.x);
        for (const auto id : tree.terminal_ids()) {
            const auto rows = terminal_rows_of(route, id);
            work.gather(rows, ys, zs);
            auto g = TransformFn::fit(ys, zs, cfg.knots, cfg.alpha);
            for (auto r : rows) work.z[r] = g(work.z[r]);
            tree.node(id).payload = std::move(g);
        }
        if (test) {
            const auto troute = tree.route(test->x);
            for (std::size_t i = 0; i < troute.size(); ++i)
                test->z[i] = std::get<TransformFn>(tree.node(troute[i]).payload)(test->z[i]);
        }
        out.model.trees.push_back(std::move(tree));
        if (plateau.update(out.trace.train)) break;
    }
    out.z_train = std::move(work.z);
    if (test) out.z_test = std::move(test->z);
    return out;
}

std::vector<double> transform_sample(const BoostModel& model, const Frame& x, std::size_t row,
                                     std::span<const double> z_values) {
    if (model.mode != BoostMode::Distribution) throw ConfigError("model is not a distribution model");
    std::vector<double> out(z_values.begin(), z_values.end());
    for (const auto& tree : model.trees) {
        const auto& g = std::get<TransformFn>(tree.node(tree.apply(x, row)).payload);
        for (auto& v : out) v = g(v);
    }
    return out;
}

DistributionEstimate::DistributionEstimate(std::vector<double> sample)
    : sample_(std::move(sample)), sorted_(sample_) {
    if (sample_.empty()) throw std::invalid_argument("empty distribution estimate");
    std::sort(sorted_.begin(), sorted_.end());
}

double DistributionEstimate::cdf(double t) const {
    const auto c = std::upper_bound(sorted_.begin(), sorted_.end(), t) - sorted_.begin();
    return static_cast<double>(c) / static_cast<double>(sorted_.size());
}

DistributionEstimate estimate_distribution(const BoostModel& model, const Frame& x,
                                           std::size_t row, std::size_t n, std::uint64_t seed,
                                           double location) {
    if (n == 0) throw ConfigError("need at least one draw");
    const CounterRng rng(seed, row);
    return estimate_distribution(model, x, row, model.z_source.draw(n, location, rng));
}

DistributionEstimate estimate_distribution(const BoostModel& model, const Frame& x,
                                           std::size_t row, std::span<const double> z_draws) {
    return DistributionEstimate(transform_sample(model, x, row, z_draws));
}

}  // namespace contrast
