#include "contrast/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "contrast/csv.hpp"
#include "contrast/error.hpp"
#include "contrast/parallel.hpp"

namespace contrast {

namespace {

struct Assigned {
    double d;
    double n;
    NodeId id;
};

std::vector<Assigned> assigned_discrepancies(const ContrastTree& tree, const ContrastSample& sample,
                                             const std::map<NodeId, std::vector<std::size_t>>& parts) {
    std::vector<Assigned> regions;
    for (const auto& [id, rows] : parts) {
        if (rows.empty()) continue;
        const auto v = region_discrepancy(sample, rows, tree.measure());
        if (std::isnan(v.d)) continue;
        const double n = static_cast<double>(sample.mode == SampleMode::Paired ? v.n_y : v.n_y + v.n_z);
        regions.push_back({v.d, n, id});
    }
    std::stable_sort(regions.begin(), regions.end(), [](const Assigned& a, const Assigned& b) {
        if (a.d != b.d) return a.d > b.d;
        return a.id < b.id;
    });
    return regions;
}

ContrastCurve curve_from(const std::vector<Assigned>& regions) {
    ContrastCurve c;
    double total = 0.0;
    for (const auto& r : regions) total += r.n;
    if (total == 0.0) throw DataError("no region has a defined discrepancy on this sample");
    double cum_n = 0.0, cum_dn = 0.0;
    for (std::size_t i = 0; i < regions.size(); ++i) {
        cum_n += regions[i].n;
        cum_dn += regions[i].n * regions[i].d;
        const double q = i + 1 == regions.size() ? 1.0 : cum_n / total;
        // First point is the largest region discrepancy itself, not (n d)/n.
        c.points.emplace_back(q, i == 0 ? regions[0].d : cum_dn / cum_n);
    }
    return c;
}

double sample_sd(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace

ContrastCurve contrast_curve(const ContrastTree& tree, const ContrastSample& sample) {
    return curve_from(assigned_discrepancies(tree, sample, partition_rows(tree, sample)));
}

std::string curve_csv(const ContrastCurve& curve) {
    std::string out = "fraction,mean_discrepancy\n";
    for (const auto& [q, v] : curve.points) out += format_double(q) + "," + format_double(v) + "\n";
    return out;
}

std::vector<QqPoint> qq_regions(const ContrastTree& tree, const ContrastSample& sample,
                                std::size_t top_k) {
    const auto parts = partition_rows(tree, sample);
    const auto regions = assigned_discrepancies(tree, sample, parts);
    std::vector<QqPoint> out;
    std::vector<double> ys, zs;
    for (std::size_t i = 0; i < regions.size() && i < top_k; ++i) {
        sample.gather(parts.at(regions[i].id), ys, zs);
        std::sort(ys.begin(), ys.end());
        std::sort(zs.begin(), zs.end());
        const std::size_t n_region = std::min(ys.size(), zs.size());
        const std::size_t m = std::min<std::size_t>(n_region, 200);
        for (std::size_t j = 1; j <= m; ++j) {
            const double p = (static_cast<double>(j) - 0.5) / static_cast<double>(m);
            out.push_back({regions[i].id, p, quantile_sorted(zs, p), quantile_sorted(ys, p)});
        }
    }
    return out;
}

std::string qq_csv(const std::vector<QqPoint>& points) {
    std::string out = "region_id,p,z_q,y_q\n";
    for (const auto& q : points)
        out += std::to_string(q.region) + "," + format_double(q.p) + "," + format_double(q.z_q) + "," +
               format_double(q.y_q) + "\n";
    return out;
}

BootstrapSe bootstrap_se(const ContrastTree& tree, const ContrastSample& sample, std::size_t b,
                         std::uint64_t seed, unsigned threads) {
    if (b < 20) throw ConfigError("bootstrap needs at least 20 replicates");
    const auto route = tree.route(sample.x);
    const auto terminals = tree.terminal_ids();
    const std::size_t n = sample.size();

    std::vector<double> left(b), right(b);
    std::vector<std::uint8_t> emptied(b, 0);
    parallel_for(b, threads, [&](std::size_t rep) {
        const CounterRng rng(seed, rep);
        std::map<NodeId, std::vector<std::size_t>> parts;
        for (auto id : terminals) parts[id];
        for (std::size_t i = 0; i < n; ++i) {
            const auto r = static_cast<std::size_t>(rng.below(i, n));
            parts[route[r]].push_back(r);
        }
        for (const auto& [id, rows] : parts)
            if (rows.empty()) emptied[rep] = 1;
        const auto curve = curve_from(assigned_discrepancies(tree, sample, parts));
        left[rep] = curve.leftmost();
        right[rep] = curve.rightmost();
    });

    BootstrapSe se;
    se.replicates = b;
    se.left_se = sample_sd(left);
    se.right_se = sample_sd(right);
    for (auto e : emptied) se.replicates_with_empty_regions += e;
    return se;
}

NullSummary summarize(std::vector<double> replicates) {
    if (replicates.size() < 2) throw ConfigError("null distribution needs at least 2 replicates");
    NullSummary s;
    double m = 0.0;
    for (double v : replicates) m += v;
    s.mean = m / static_cast<double>(replicates.size());
    s.sd = sample_sd(replicates);
    s.replicates = std::move(replicates);
    return s;
}

NullSummary null_distribution(const PairGenerator& generator, NullPipeline pipeline,
                              const BoostConfig& config, std::size_t replicates, std::uint64_t seed,
                              unsigned threads) {
    if (replicates < 2) throw ConfigError("null distribution needs at least 2 replicates");
    GrowConfig tree_cfg = config.tree;
    tree_cfg.measure = DiscrepancyMeasure{MeasureKind::DistAd, 0.5};

    // Replicates run concurrently; each tree search stays single-threaded.
    tree_cfg.threads = 1;
    BoostConfig boost_cfg = config;
    boost_cfg.tree.threads = 1;

    std::vector<double> values(replicates);
    parallel_for(replicates, threads, [&](std::size_t rep) {
        const std::uint64_t rep_seed = CounterRng(seed, 0x6e756c6cULL).bits(rep);
        ContrastSample pair = generator(rep, rep_seed);
        if (pipeline == NullPipeline::FullBoost) {
            auto fit = fit_distribution(pair, boost_cfg);
            pair.z = std::move(fit.z_train);
        }
        const auto tree = grow(pair, tree_cfg);
        values[rep] = average_discrepancy(tree, pair);
    });
    return summarize(std::move(values));
}

}  // namespace contrast
