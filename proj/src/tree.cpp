#include "contrast/tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "contrast/csv.hpp"
#include "contrast/error.hpp"
#include "contrast/parallel.hpp"

namespace contrast {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// ---------------------------------------------------------------------------
// Region evaluation
// ---------------------------------------------------------------------------

struct SideCounts {
    std::size_t n_y = 0;
    std::size_t n_z = 0;
    std::size_t pooled() const { return n_y + n_z; }
};

struct Evaluated {
    double d_left = kNaN;
    double d_right = kNaN;
    SideCounts left;
    SideCounts right;
};

// Quantile of an unsorted buffer (reordered in place); same arithmetic as quantile_sorted.
double select_quantile(std::vector<double>& buf, double p) {
    const auto n = buf.size();
    const double pos = p * static_cast<double>(n) + 0.5;
    if (pos <= 1.0) return *std::min_element(buf.begin(), buf.end());
    if (pos >= static_cast<double>(n)) return *std::max_element(buf.begin(), buf.end());
    const auto lo = static_cast<std::size_t>(pos);
    const double w = pos - static_cast<double>(lo);
    std::nth_element(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(lo - 1), buf.end());
    const double a = buf[lo - 1];
    if (w == 0.0) return a;
    const double b = *std::min_element(buf.begin() + static_cast<std::ptrdiff_t>(lo), buf.end());
    return a + w * (b - a);
}

// Incremental distribution distance for one subset of a pooled order.
struct AdAccumulator {
    std::size_t n = 0;
    double inv_ny = 0.0;
    double inv_nz = 0.0;
    std::size_t pos = 0;
    std::size_t cy = 0;
    std::size_t cz = 0;
    double sum = 0.0;

    AdAccumulator(std::size_t ny, std::size_t nz)
        : n(ny + nz),
          inv_ny(ny ? 1.0 / static_cast<double>(ny) : 0.0),
          inv_nz(nz ? 1.0 / static_cast<double>(nz) : 0.0) {}

    void group(std::size_t gy, std::size_t gz) {
        if (gy + gz == 0) return;
        cy += gy;
        cz += gz;
        const std::size_t end = std::min(pos + gy + gz, n - 1);
        const double gap = std::abs(static_cast<double>(cy) * inv_ny - static_cast<double>(cz) * inv_nz);
        if (gap > 0.0 && end > pos) {
            double w = 0.0;
            const double nn = static_cast<double>(n);
            for (std::size_t i = pos + 1; i <= end; ++i) {
                const double di = static_cast<double>(i);
                w += 1.0 / std::sqrt(di * (nn - di));
            }
            sum += gap * w;
        }
        pos += gy + gz;
    }
    void single(bool is_y) {
        cy += is_y;
        cz += !is_y;
        ++pos;
        if (pos >= n) return;
        const double gap = std::abs(static_cast<double>(cy) * inv_ny - static_cast<double>(cz) * inv_nz);
        const double di = static_cast<double>(pos);
        sum += gap * (1.0 / std::sqrt(di * (static_cast<double>(n) - di)));
    }
    double value() const { return sum / static_cast<double>(n - 1); }
};

// Distance for a tie-free pooled order given as is-y flags.
double ad_stream(const std::uint8_t* is_y, std::size_t ny, std::size_t nz) {
    const std::size_t n = ny + nz;
    const double inv_ny = 1.0 / static_cast<double>(ny);
    const double inv_nz = 1.0 / static_cast<double>(nz);
    const double nn = static_cast<double>(n);
    double sum = 0.0;
    std::size_t cy = 0;
    for (std::size_t i = 1; i < n; ++i) {
        cy += is_y[i - 1];
        const double gap = std::abs(static_cast<double>(cy) * inv_ny - static_cast<double>(i - cy) * inv_nz);
        const double di = static_cast<double>(i);
        sum += gap * (1.0 / std::sqrt(di * (nn - di)));
    }
    return sum / (nn - 1.0);
}

constexpr std::uint32_t kMissingKey = std::numeric_limits<std::uint32_t>::max();

class RegionSearch {
public:
    RegionSearch(const ContrastSample& sample, std::span<const std::size_t> rows,
                 const GrowConfig& config, std::size_t min_node, double d_parent)
        : sample_(sample),
          rows_(rows),
          m_(config.measure),
          paired_(sample.mode == SampleMode::Paired),
          min_node_(min_node),
          max_candidates_(config.max_numeric_candidates),
          d_parent_(d_parent) {
        for (std::size_t k = 0; k < rows.size(); ++k) {
            const auto r = rows[k];
            if (sample_.has_y(r)) ++total_.n_y;
            if (sample_.has_z(r)) ++total_.n_z;
        }
        if (m_.is_additive()) {
            stats_.resize(rows.size());
            for (std::size_t k = 0; k < rows.size(); ++k) {
                const auto r = rows[k];
                if (paired_) {
                    stats_[k].add_pair(sample_.y[r], sample_.z[r]);
                } else if (sample_.has_y(r)) {
                    stats_[k].add_y(sample_.y[r]);
                } else {
                    stats_[k].add_z(sample_.z[r]);
                }
                total_stats_ += stats_[k];
            }
        } else if (m_.kind == MeasureKind::DistAd) {
            build_pooled_order();
        }
    }

    std::optional<SplitCandidate> search(std::size_t variable) {
        const auto& col = sample_.x.column(variable);
        best_.reset();
        if (col.is_numeric())
            search_numeric(variable, col);
        else
            search_categorical(variable, col);
        return best_;
    }

private:
    void build_pooled_order() {
        for (std::size_t k = 0; k < rows_.size(); ++k) {
            const auto r = rows_[k];
            if (sample_.has_y(r)) pooled_.push_back({sample_.y[r], static_cast<std::uint32_t>(k), true});
            if (sample_.has_z(r)) pooled_.push_back({sample_.z[r], static_cast<std::uint32_t>(k), false});
        }
        std::sort(pooled_.begin(), pooled_.end(), [](const Pooled& a, const Pooled& b) {
            if (a.value != b.value) return a.value < b.value;
            if (a.is_y != b.is_y) return a.is_y;
            return a.local < b.local;
        });
        for (std::size_t i = 1; i <= pooled_.size(); ++i)
            if (i == pooled_.size() || pooled_[i].value != pooled_[i - 1].value)
                group_ends_.push_back(i);
        ties_ = group_ends_.size() != pooled_.size();
        pooled_key_.resize(pooled_.size());
        pooled_is_y_.resize(pooled_.size());
        for (std::size_t j = 0; j < pooled_.size(); ++j) pooled_is_y_[j] = pooled_[j].is_y;
        lbuf_.resize(pooled_.size() + 1);
        rbuf_.resize(pooled_.size() + 1);
    }

    // key[k] per local row; a row is left when key < cut, missing rows follow ml.
    void set_keys(const std::vector<std::uint32_t>& key) {
        for (std::size_t j = 0; j < pooled_.size(); ++j) pooled_key_[j] = key[pooled_[j].local];
    }

    Evaluated evaluate_keys(std::uint32_t cut, bool missing_left, const SideCounts& l, const SideCounts& r) {
        Evaluated e;
        e.left = l;
        e.right = r;
        if (!counts_ok(l, r)) return e;
        if (l.n_y == 0 || l.n_z == 0 || r.n_y == 0 || r.n_z == 0) return e;
        AdAccumulator left(l.n_y, l.n_z);
        AdAccumulator right(r.n_y, r.n_z);
        const auto goes_left = [&](std::uint32_t key) {
            return key == kMissingKey ? missing_left : key < cut;
        };
        if (!ties_) {
            // Partition without branches, then one register-only pass per side.
            std::size_t nl = 0, nr = 0;
            for (std::size_t j = 0; j < pooled_.size(); ++j) {
                const std::uint32_t key = pooled_key_[j];
                const bool to_left = (key < cut) | (missing_left & (key == kMissingKey));
                const std::uint8_t y = pooled_is_y_[j];
                lbuf_[nl] = y;
                rbuf_[nr] = y;
                nl += to_left;
                nr += !to_left;
            }
            e.d_left = ad_stream(lbuf_.data(), l.n_y, l.n_z);
            e.d_right = ad_stream(rbuf_.data(), r.n_y, r.n_z);
            return e;
        } else {
            std::size_t begin = 0;
            for (const auto end : group_ends_) {
                std::size_t gyl = 0, gzl = 0, gyr = 0, gzr = 0;
                for (std::size_t i = begin; i < end; ++i) {
                    const bool y = pooled_[i].is_y;
                    if (goes_left(pooled_key_[i]))
                        (y ? gyl : gzl) += 1;
                    else
                        (y ? gyr : gzr) += 1;
                }
                left.group(gyl, gzl);
                right.group(gyr, gzr);
                begin = end;
            }
        }
        e.d_left = left.value();
        e.d_right = right.value();
        return e;
    }

    static void add_counts(SideCounts& c, const SideCounts& d) {
        c.n_y += d.n_y;
        c.n_z += d.n_z;
    }

    SideCounts minus(const SideCounts& d) const { return {total_.n_y - d.n_y, total_.n_z - d.n_z}; }

    bool counts_ok(const SideCounts& l, const SideCounts& r) const {
        if (paired_) return l.n_y >= min_node_ && r.n_y >= min_node_;
        return l.n_y >= min_node_ && l.n_z >= min_node_ && r.n_y >= min_node_ && r.n_z >= min_node_;
    }

    SideCounts counts_of(const MomentStats& s) const {
        return {static_cast<std::size_t>(s.n_y + 0.5), static_cast<std::size_t>(s.n_z + 0.5)};
    }

    SideCounts local_counts(std::size_t k) const {
        const auto r = rows_[k];
        return {sample_.has_y(r) ? 1u : 0u, sample_.has_z(r) ? 1u : 0u};
    }

    // Quantile difference with explicit sides; side[k]: 0 left, 1 right.
    Evaluated evaluate_sides(const std::vector<std::uint8_t>& side) {
        Evaluated e;
        for (std::size_t k = 0; k < rows_.size(); ++k) {
            const auto c = local_counts(k);
            auto& s = side[k] == 0 ? e.left : e.right;
            s.n_y += c.n_y;
            s.n_z += c.n_z;
        }
        if (!counts_ok(e.left, e.right)) return e;
        if (e.left.n_y == 0 || e.left.n_z == 0 || e.right.n_y == 0 || e.right.n_z == 0) return e;
        for (auto* b : {&yl_, &zl_, &yr_, &zr_}) b->clear();
        for (std::size_t k = 0; k < rows_.size(); ++k) {
            const auto r = rows_[k];
            const bool left = side[k] == 0;
            if (sample_.has_y(r)) (left ? yl_ : yr_).push_back(sample_.y[r]);
            if (sample_.has_z(r)) (left ? zl_ : zr_).push_back(sample_.z[r]);
        }
        e.d_left = std::abs(select_quantile(yl_, m_.p) - select_quantile(zl_, m_.p));
        e.d_right = std::abs(select_quantile(yr_, m_.p) - select_quantile(zr_, m_.p));
        return e;
    }

    void consider(const SplitSpec& spec, const Evaluated& e) {
        if (std::isnan(e.d_left) || std::isnan(e.d_right)) return;
        if (!counts_ok(e.left, e.right)) return;
        const double nl = static_cast<double>(e.left.pooled());
        const double nr = static_cast<double>(e.right.pooled());
        const double q = split_quality(nl / (nl + nr), nr / (nl + nr), e.d_left, e.d_right);
        if (best_ && !clearly_greater(q, best_->quality)) return;
        SplitCandidate c;
        c.spec = spec;
        c.d_left = e.d_left;
        c.d_right = e.d_right;
        c.n_left = e.left.pooled();
        c.n_right = e.right.pooled();
        c.quality = q;
        c.improvement = split_improvement(d_parent_, e.d_left, e.d_right);
        best_ = std::move(c);
    }

    Evaluated evaluate_stats(const MomentStats& left) const {
        const MomentStats right = total_stats_ - left;
        Evaluated e;
        e.left = counts_of(left);
        e.right = counts_of(right);
        if (!counts_ok(e.left, e.right)) return e;
        e.d_left = additive_discrepancy(m_, left);
        e.d_right = additive_discrepancy(m_, right);
        return e;
    }

    void search_numeric(std::size_t variable, const FeatureColumn& col) {
        std::vector<std::pair<double, std::uint32_t>> present;
        std::vector<std::uint32_t> missing;
        present.reserve(rows_.size());
        for (std::size_t k = 0; k < rows_.size(); ++k) {
            const auto r = rows_[k];
            if (col.is_missing(r))
                missing.push_back(static_cast<std::uint32_t>(k));
            else
                present.emplace_back(col.number(r), static_cast<std::uint32_t>(k));
        }
        if (present.size() < 2) return;
        std::sort(present.begin(), present.end());

        // Boundaries: index one past the end of each distinct-value group except the last.
        std::vector<std::size_t> boundaries;
        for (std::size_t i = 1; i < present.size(); ++i)
            if (present[i].first != present[i - 1].first) boundaries.push_back(i);
        if (boundaries.empty()) return;
        if (boundaries.size() > max_candidates_) {
            std::vector<std::size_t> thinned;
            const double n = static_cast<double>(present.size());
            const double c = static_cast<double>(max_candidates_);
            std::size_t b = 0;
            for (std::size_t j = 1; j <= max_candidates_; ++j) {
                const double target = static_cast<double>(j) * n / (c + 1.0);
                while (b < boundaries.size() && static_cast<double>(boundaries[b]) < target) ++b;
                if (b == boundaries.size()) break;
                if (thinned.empty() || thinned.back() != boundaries[b]) thinned.push_back(boundaries[b]);
            }
            boundaries = std::move(thinned);
        }

        SplitSpec spec;
        spec.variable = variable;
        spec.categorical = false;
        const bool any_missing = !missing.empty();

        if (m_.is_additive()) {
            MomentStats miss;
            for (auto k : missing) miss += stats_[k];
            MomentStats prefix;
            std::size_t i = 0;
            for (const auto b : boundaries) {
                for (; i < b; ++i) prefix += stats_[present[i].second];
                spec.threshold = midpoint(present[b - 1].first, present[b].first);
                for (const bool ml : {true, false}) {
                    if (!ml && !any_missing) break;
                    spec.missing_left = ml;
                    consider(spec, evaluate_stats(ml ? prefix + miss : prefix));
                }
            }
            return;
        }

        if (m_.kind == MeasureKind::DistAd) {
            std::vector<std::uint32_t> key(rows_.size(), kMissingKey);
            for (std::size_t i = 0; i < present.size(); ++i) key[present[i].second] = static_cast<std::uint32_t>(i);
            set_keys(key);
            SideCounts miss, prefix;
            for (auto k : missing) add_counts(miss, local_counts(k));
            std::size_t i = 0;
            for (const auto b : boundaries) {
                for (; i < b; ++i) add_counts(prefix, local_counts(present[i].second));
                spec.threshold = midpoint(present[b - 1].first, present[b].first);
                for (const bool ml : {true, false}) {
                    if (!ml && !any_missing) break;
                    spec.missing_left = ml;
                    SideCounts l = prefix;
                    if (ml) add_counts(l, miss);
                    consider(spec, evaluate_keys(static_cast<std::uint32_t>(b), ml, l, minus(l)));
                }
            }
            return;
        }

        std::vector<std::uint8_t> side(rows_.size(), 1);
        std::size_t i = 0;
        for (const auto b : boundaries) {
            for (; i < b; ++i) side[present[i].second] = 0;
            spec.threshold = midpoint(present[b - 1].first, present[b].first);
            for (const bool ml : {true, false}) {
                if (!ml && !any_missing) break;
                spec.missing_left = ml;
                for (auto k : missing) side[k] = ml ? 0 : 1;
                consider(spec, evaluate_sides(side));
            }
        }
    }

    static double midpoint(double lo, double hi) {
        const double mid = lo + (hi - lo) / 2.0;
        return mid < hi ? mid : lo;
    }

    double level_discrepancy(const std::vector<std::uint32_t>& locals) {
        if (m_.is_additive()) {
            MomentStats s;
            for (auto k : locals) s += stats_[k];
            return additive_discrepancy(m_, s);
        }
        std::vector<double> ys, zs;
        for (auto k : locals) {
            const auto r = rows_[k];
            if (sample_.has_y(r)) ys.push_back(sample_.y[r]);
            if (sample_.has_z(r)) zs.push_back(sample_.z[r]);
        }
        if (ys.empty() || zs.empty()) return kNaN;
        try {
            return eval(m_, ys, zs).d;
        } catch (const std::invalid_argument&) {
            return kNaN;
        }
    }

    void search_categorical(std::size_t variable, const FeatureColumn& col) {
        const std::size_t n_levels = col.levels().size();
        std::vector<std::vector<std::uint32_t>> by_level(n_levels);
        std::vector<std::uint32_t> missing;
        for (std::size_t k = 0; k < rows_.size(); ++k) {
            const auto r = rows_[k];
            if (col.is_missing(r))
                missing.push_back(static_cast<std::uint32_t>(k));
            else
                by_level[static_cast<std::size_t>(col.code(r))].push_back(static_cast<std::uint32_t>(k));
        }
        struct Level {
            LevelId id;
            double d;
        };
        std::vector<Level> order;
        for (std::size_t l = 0; l < n_levels; ++l)
            if (!by_level[l].empty())
                order.push_back({static_cast<LevelId>(l), level_discrepancy(by_level[l])});
        if (order.size() < 2) return;
        std::sort(order.begin(), order.end(), [](const Level& a, const Level& b) {
            const bool an = std::isnan(a.d), bn = std::isnan(b.d);
            if (an != bn) return bn;
            if (!an && a.d != b.d) return a.d < b.d;
            return a.id < b.id;
        });

        SplitSpec spec;
        spec.variable = variable;
        spec.categorical = true;
        const bool any_missing = !missing.empty();

        MomentStats miss, prefix;
        if (m_.is_additive())
            for (auto k : missing) miss += stats_[k];
        std::vector<std::uint8_t> side(rows_.size(), 1);
        const bool ad = m_.kind == MeasureKind::DistAd;
        SideCounts cmiss, cprefix;
        if (ad) {
            std::vector<std::uint32_t> key(rows_.size(), kMissingKey);
            for (std::size_t pos = 0; pos < order.size(); ++pos)
                for (auto k : by_level[static_cast<std::size_t>(order[pos].id)]) key[k] = static_cast<std::uint32_t>(pos);
            set_keys(key);
            for (auto k : missing) add_counts(cmiss, local_counts(k));
        }

        for (std::size_t cut = 1; cut < order.size(); ++cut) {
            const auto& added = by_level[static_cast<std::size_t>(order[cut - 1].id)];
            spec.left_levels.clear();
            for (std::size_t l = 0; l < cut; ++l) spec.left_levels.push_back(order[l].id);
            std::sort(spec.left_levels.begin(), spec.left_levels.end());
            if (m_.is_additive()) {
                for (auto k : added) prefix += stats_[k];
            } else if (ad) {
                for (auto k : added) add_counts(cprefix, local_counts(k));
            } else {
                for (auto k : added) side[k] = 0;
            }
            for (const bool ml : {true, false}) {
                if (!ml && !any_missing) break;
                spec.missing_left = ml;
                if (m_.is_additive()) {
                    consider(spec, evaluate_stats(ml ? prefix + miss : prefix));
                } else if (ad) {
                    SideCounts l = cprefix;
                    if (ml) add_counts(l, cmiss);
                    consider(spec, evaluate_keys(static_cast<std::uint32_t>(cut), ml, l, minus(l)));
                } else {
                    for (auto k : missing) side[k] = ml ? 0 : 1;
                    consider(spec, evaluate_sides(side));
                }
            }
        }
    }

    struct Pooled {
        double value;
        std::uint32_t local;
        bool is_y;
    };

    const ContrastSample& sample_;
    std::span<const std::size_t> rows_;
    const DiscrepancyMeasure& m_;
    bool paired_;
    std::size_t min_node_;
    std::size_t max_candidates_;
    double d_parent_;

    SideCounts total_;
    std::vector<MomentStats> stats_;
    MomentStats total_stats_;
    std::vector<Pooled> pooled_;
    std::vector<std::size_t> group_ends_;
    std::vector<std::uint32_t> pooled_key_;
    std::vector<std::uint8_t> pooled_is_y_, lbuf_, rbuf_;
    bool ties_ = false;
    std::vector<double> yl_, zl_, yr_, zr_;
    std::optional<SplitCandidate> best_;
};

bool splittable(const ContrastSample& sample, std::span<const std::size_t> rows,
                std::size_t min_node) {
    if (sample.mode == SampleMode::Paired) return rows.size() >= 2 * min_node;
    std::size_t ny = 0, nz = 0;
    for (auto r : rows) (sample.has_y(r) ? ny : nz) += 1;
    return ny >= 2 * min_node && nz >= 2 * min_node;
}

int depth_of(NodeId id) {
    int d = 0;
    while (id > 1) {
        id >>= 1;
        ++d;
    }
    return d;
}

}  // namespace

// ---------------------------------------------------------------------------
// Public pieces
// ---------------------------------------------------------------------------

double split_quality(double f_left, double f_right, double d_left, double d_right) {
    const double dm = std::max(d_left, d_right);
    return (f_left * f_right) * (dm * dm);
}

double split_improvement(double d_parent, double d_left, double d_right) {
    return std::max(d_left, d_right) - d_parent;
}

bool clearly_greater(double candidate, double incumbent) {
    return candidate > incumbent + kTieTolerance * std::abs(incumbent);
}

bool positive_improvement(double improvement, double d_parent, double d_max) {
    return improvement > kTieTolerance * std::max(std::abs(d_parent), std::abs(d_max));
}

bool SplitSpec::goes_left(const FeatureColumn& column, std::size_t row) const {
    if (column.is_missing(row)) return missing_left;
    if (!categorical) return column.number(row) <= threshold;
    return std::binary_search(left_levels.begin(), left_levels.end(), column.code(row));
}

bool SplitSpec::goes_left(const Value& v) const {
    switch (v.kind) {
        case Value::Kind::Missing: return missing_left;
        case Value::Kind::Numeric:
            if (categorical) throw DataError("numeric value routed through a categorical split");
            return v.number <= threshold;
        case Value::Kind::Categorical:
            if (!categorical) throw DataError("categorical value routed through a numeric split");
            return std::binary_search(left_levels.begin(), left_levels.end(), v.level);
    }
    return missing_left;
}

std::size_t GrowConfig::effective_min_node(std::size_t n_rows) const {
    if (min_node > 0) return min_node;
    return std::max<std::size_t>(20, n_rows / 200);
}

void GrowConfig::validate() const {
    if (max_regions < 1) throw ConfigError("max regions must be >= 1");
    if (max_numeric_candidates < 2) throw ConfigError("max numeric candidates must be >= 2");
    measure.validate();
}

ContrastTree::ContrastTree(FrameSchema schema, DiscrepancyMeasure measure, SampleMode mode,
                           std::map<NodeId, Node> nodes)
    : schema_(std::move(schema)), measure_(measure), mode_(mode), nodes_(std::move(nodes)) {
    if (!nodes_.count(1)) throw DataError("tree has no root node");
    for (const auto& [id, node] : nodes_) {
        if (id != node.id) throw DataError("node id mismatch");
        if (id > 1 && !nodes_.count(id / 2)) throw DataError("orphan node " + std::to_string(id));
        if (node.split) {
            if (!nodes_.count(node.left()) || !nodes_.count(node.right()))
                throw DataError("split node " + std::to_string(id) + " lacks children");
            if (node.split->variable >= schema_.size())
                throw DataError("split variable out of range at node " + std::to_string(id));
            const bool cat = schema_[node.split->variable].kind == ColumnKind::Categorical;
            if (cat != node.split->categorical)
                throw DataError("split kind disagrees with schema at node " + std::to_string(id));
        } else if (nodes_.count(node.left()) || nodes_.count(node.right())) {
            throw DataError("terminal node " + std::to_string(id) + " has children");
        }
    }
}

const Node& ContrastTree::node(NodeId id) const {
    auto it = nodes_.find(id);
    if (it == nodes_.end()) throw std::out_of_range("no node " + std::to_string(id));
    return it->second;
}

Node& ContrastTree::node(NodeId id) {
    auto it = nodes_.find(id);
    if (it == nodes_.end()) throw std::out_of_range("no node " + std::to_string(id));
    return it->second;
}

std::vector<NodeId> ContrastTree::terminal_ids() const {
    std::vector<NodeId> ids;
    for (const auto& [id, node] : nodes_)
        if (node.is_terminal()) ids.push_back(id);
    return ids;
}

std::size_t ContrastTree::terminal_count() const { return terminal_ids().size(); }

void ContrastTree::check_schema(const Frame& x) const {
    if (x.n_cols() != schema_.size())
        throw DataError("expected " + std::to_string(schema_.size()) + " predictor columns, got " +
                        std::to_string(x.n_cols()));
    for (std::size_t j = 0; j < schema_.size(); ++j) {
        const auto& c = x.column(j);
        if (c.name() != schema_[j].name || c.kind() != schema_[j].kind)
            throw DataError("predictor column " + std::to_string(j + 1) + " ('" + c.name() +
                            "') does not match the model schema ('" + schema_[j].name + "')");
        if (c.kind() == ColumnKind::Categorical && c.levels() != schema_[j].levels)
            throw DataError("level table of column '" + c.name() + "' differs from the model's");
    }
}

NodeId ContrastTree::apply(const Frame& x, std::size_t row) const {
    NodeId id = 1;
    for (;;) {
        const Node& n = nodes_.find(id)->second;
        if (!n.split) return id;
        id = n.split->goes_left(x.column(n.split->variable), row) ? n.left() : n.right();
    }
}

NodeId ContrastTree::apply(std::span<const Value> row) const {
    if (row.size() != schema_.size())
        throw DataError("row has " + std::to_string(row.size()) + " values, expected " +
                        std::to_string(schema_.size()));
    for (std::size_t j = 0; j < row.size(); ++j) {
        const auto k = row[j].kind;
        if (k == Value::Kind::Missing) continue;
        const bool cat = schema_[j].kind == ColumnKind::Categorical;
        if ((k == Value::Kind::Categorical) != cat)
            throw DataError("value kind mismatch in column '" + schema_[j].name + "'");
    }
    NodeId id = 1;
    for (;;) {
        const Node& n = nodes_.find(id)->second;
        if (!n.split) return id;
        Value v = row[n.split->variable];
        if (v.kind == Value::Kind::Categorical &&
            (v.level < 0 || static_cast<std::size_t>(v.level) >= schema_[n.split->variable].levels.size()))
            v = Value::missing();  // unseen level
        id = n.split->goes_left(v) ? n.left() : n.right();
    }
}

std::vector<NodeId> ContrastTree::route(const Frame& x) const {
    check_schema(x);
    std::vector<NodeId> out(x.n_rows());
    for (std::size_t i = 0; i < x.n_rows(); ++i) out[i] = apply(x, i);
    return out;
}

std::string ContrastTree::rule(NodeId id) const {
    std::vector<std::string> parts;
    while (id > 1) {
        const NodeId parent = id / 2;
        const bool left = (id % 2) == 0;
        const auto& s = *node(parent).split;
        const auto& col = schema_[s.variable];
        std::string part = col.name;
        if (!s.categorical) {
            part += left ? " <= " : " > ";
            part += format_double(s.threshold);
        } else {
            part += " in {";
            bool first = true;
            for (std::size_t l = 0; l < col.levels.size(); ++l) {
                const bool in_left = std::binary_search(s.left_levels.begin(), s.left_levels.end(),
                                                        static_cast<LevelId>(l));
                if (in_left != left) continue;
                if (!first) part += ",";
                part += col.levels[l];
                first = false;
            }
            part += "}";
        }
        parts.push_back(std::move(part));
        id = parent;
    }
    if (parts.empty()) return "(all)";
    std::string out;
    for (auto it = parts.rbegin(); it != parts.rend(); ++it) {
        if (!out.empty()) out += " & ";
        out += *it;
    }
    return out;
}

DiscrepancyValue region_discrepancy(const ContrastSample& sample, std::span<const std::size_t> rows,
                                    const DiscrepancyMeasure& measure) {
    std::vector<double> ys, zs;
    sample.gather(rows, ys, zs);
    DiscrepancyValue v{kNaN, ys.size(), zs.size()};
    if (ys.empty() || zs.empty()) return v;
    try {
        v.d = eval(measure, ys, zs).d;
    } catch (const std::invalid_argument&) {
        v.d = kNaN;
    }
    return v;
}

std::optional<SplitCandidate> best_split(const ContrastSample& sample,
                                         std::span<const std::size_t> rows,
                                         const GrowConfig& config, double d_parent) {
    const std::size_t min_node = config.effective_min_node(sample.size());
    if (!splittable(sample, rows, min_node)) return std::nullopt;
    const std::size_t p = sample.x.n_cols();
    std::vector<std::optional<SplitCandidate>> per_var(p);
    const unsigned workers = std::max(1u, config.threads);
    if (workers == 1 || p == 1) {
        RegionSearch search(sample, rows, config, min_node, d_parent);
        for (std::size_t j = 0; j < p; ++j) per_var[j] = search.search(j);
    } else {
        // One searcher per worker slot; variables strided across workers.
        const std::size_t slots = std::min<std::size_t>(workers, p);
        parallel_for(slots, workers, [&](std::size_t w) {
            RegionSearch search(sample, rows, config, min_node, d_parent);
            for (std::size_t j = w; j < p; j += slots) per_var[j] = search.search(j);
        });
    }
    std::optional<SplitCandidate> best;
    for (auto& c : per_var) {
        if (!c) continue;
        if (!best || clearly_greater(c->quality, best->quality)) best = std::move(c);
    }
    return best;
}

ContrastTree grow(const ContrastSample& sample, const GrowConfig& config) {
    config.validate();
    const auto& m = config.measure;
    if (sample.mode == SampleMode::TwoSample && !m.allows_two_sample())
        throw ConfigError("measure '" + m.name() + "' needs paired data");
    if (sample.size() == 0) throw DataError("cannot grow a tree on an empty sample");
    if (m.requires_paired()) {
        try {
            check_domain(m, sample.y, sample.z);
        } catch (const std::invalid_argument& e) {
            throw DataError(e.what());
        }
    }

    std::vector<std::size_t> all(sample.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    const auto root_d = region_discrepancy(sample, all, m);
    if (std::isnan(root_d.d))
        throw DataError("discrepancy '" + m.name() + "' is undefined on the whole sample");

    std::map<NodeId, Node> nodes;
    nodes[1] = Node{1, std::nullopt, root_d.d, root_d.n_y, root_d.n_z, {}};

    struct Open {
        NodeId id;
        std::vector<std::size_t> rows;
        std::optional<SplitCandidate> best;
    };
    auto evaluate = [&](NodeId id, std::vector<std::size_t> rows) {
        Open o{id, std::move(rows), std::nullopt};
        if (depth_of(id) < kMaxDepth) o.best = best_split(sample, o.rows, config, nodes[id].d);
        return o;
    };

    std::vector<Open> open;
    open.push_back(evaluate(1, std::move(all)));
    std::size_t terminals = 1;

    while (terminals < config.max_regions) {
        // Open terminals are kept sorted by id so ties go to the lowest id.
        std::size_t chosen = open.size();
        for (std::size_t i = 0; i < open.size(); ++i) {
            const auto& b = open[i].best;
            if (!b) continue;
            const double dmax = std::max(b->d_left, b->d_right);
            if (!positive_improvement(b->improvement, nodes[open[i].id].d, dmax)) continue;
            if (chosen == open.size() || clearly_greater(b->improvement, open[chosen].best->improvement))
                chosen = i;
        }
        if (chosen == open.size()) break;

        Open parent = std::move(open[chosen]);
        open.erase(open.begin() + static_cast<std::ptrdiff_t>(chosen));
        const auto& spec = parent.best->spec;
        const auto& col = sample.x.column(spec.variable);
        std::vector<std::size_t> left, right;
        for (auto r : parent.rows) (spec.goes_left(col, r) ? left : right).push_back(r);

        Node& pn = nodes[parent.id];
        pn.split = spec;
        for (const auto& [cid, crows] : {std::pair{pn.left(), &left}, std::pair{pn.right(), &right}}) {
            const auto v = region_discrepancy(sample, *crows, m);
            nodes[cid] = Node{cid, std::nullopt, v.d, v.n_y, v.n_z, {}};
        }
        const NodeId lid = pn.left(), rid = pn.right();
        open.push_back(evaluate(lid, std::move(left)));
        open.push_back(evaluate(rid, std::move(right)));
        std::sort(open.begin(), open.end(), [](const Open& a, const Open& b) { return a.id < b.id; });
        ++terminals;
    }

    return ContrastTree(sample.x.schema(), m, sample.mode, std::move(nodes));
}

std::map<NodeId, std::vector<std::size_t>> partition_rows(const ContrastTree& tree,
                                                          const ContrastSample& sample) {
    const auto ids = tree.route(sample.x);
    std::map<NodeId, std::vector<std::size_t>> out;
    for (auto id : tree.terminal_ids()) out[id];
    for (std::size_t i = 0; i < ids.size(); ++i) out[ids[i]].push_back(i);
    return out;
}

std::vector<RegionSummary> region_report(const ContrastTree& tree, const ContrastSample& sample) {
    const auto parts = partition_rows(tree, sample);
    const auto& m = tree.measure();
    std::vector<RegionSummary> out;
    std::vector<double> ys, zs;
    for (const auto& [id, rows] : parts) {
        RegionSummary s;
        s.id = id;
        s.rule = tree.rule(id);
        const auto v = region_discrepancy(sample, rows, m);
        s.d = v.d;
        s.n_y = v.n_y;
        s.n_z = v.n_z;
        sample.gather(rows, ys, zs);
        s.mean_y = ys.empty() ? kNaN : mean(ys);
        s.mean_z = zs.empty() ? kNaN : mean(zs);
        if (m.has_p() && !ys.empty()) s.quantile_y = quantile(ys, m.p);
        if (m.kind == MeasureKind::QuantileDiff && !zs.empty()) s.quantile_z = quantile(zs, m.p);
        if (m.kind == MeasureKind::QuantileProb && !ys.empty()) {
            double below = 0;
            for (std::size_t i = 0; i < ys.size(); ++i) below += ys[i] < zs[i] ? 1.0 : 0.0;
            s.fraction_below = below / static_cast<double>(ys.size());
        }
        out.push_back(std::move(s));
    }
    std::stable_sort(out.begin(), out.end(), [](const RegionSummary& a, const RegionSummary& b) {
        const bool an = std::isnan(a.d), bn = std::isnan(b.d);
        if (an != bn) return bn;
        if (!an && a.d != b.d) return a.d > b.d;
        return a.id < b.id;
    });
    return out;
}

std::string rules_tsv(const std::vector<RegionSummary>& report) {
    std::string out;
    for (const auto& r : report) {
        out += std::to_string(r.id) + "\t" + format_double(r.d) + "\t" +
               std::to_string(r.n_y == r.n_z ? r.n_y : r.n_y + r.n_z) + "\t" + r.rule + "\n";
    }
    return out;
}

std::string report_tsv(const std::vector<RegionSummary>& report, const DiscrepancyMeasure& m) {
    std::string out = "id\td\tn_y\tn_z\tmean_y\tmean_z";
    const bool qy = m.has_p();
    const bool qz = m.kind == MeasureKind::QuantileDiff;
    const bool fb = m.kind == MeasureKind::QuantileProb;
    if (qy) out += "\tquantile_y";
    if (qz) out += "\tquantile_z";
    if (fb) out += "\tfraction_below";
    out += "\trule\n";
    auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string("NA"); };
    for (const auto& r : report) {
        out += std::to_string(r.id) + "\t" + format_double(r.d) + "\t" + std::to_string(r.n_y) + "\t" +
               std::to_string(r.n_z) + "\t" + format_double(r.mean_y) + "\t" + format_double(r.mean_z);
        if (qy) out += "\t" + opt(r.quantile_y);
        if (qz) out += "\t" + opt(r.quantile_z);
        if (fb) out += "\t" + opt(r.fraction_below);
        out += "\t" + r.rule + "\n";
    }
    return out;
}

}  // namespace contrast
