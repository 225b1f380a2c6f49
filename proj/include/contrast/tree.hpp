#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "contrast/dataset.hpp"
#include "contrast/discrepancy.hpp"
#include "contrast/transform.hpp"

namespace contrast {

using NodeId = std::uint64_t;

// Nodes at this depth are never split (heap ids would overflow).
inline constexpr int kMaxDepth = 62;

// Relative tolerance under which split qualities / improvements count as ties.
inline constexpr double kTieTolerance = 1e-12;

/// Axis split: numeric `x <= threshold` or categorical `x in left_levels`
/// sends a row left. Missing values (and unseen levels) follow missing_left.
struct SplitSpec {
    std::size_t variable = 0;
    bool categorical = false;
    double threshold = 0.0;
    std::vector<LevelId> left_levels;  // sorted ascending
    bool missing_left = true;

    bool goes_left(const FeatureColumn& column, std::size_t row) const;
    bool goes_left(const Value& v) const;

    bool operator==(const SplitSpec&) const = default;
};

using Payload = std::variant<std::monostate, double, TransformFn>;

struct Node {
    NodeId id = 1;
    std::optional<SplitSpec> split;
    double d = 0.0;
    std::size_t n_y = 0;
    std::size_t n_z = 0;
    Payload payload;

    bool is_terminal() const { return !split.has_value(); }
    NodeId left() const { return 2 * id; }
    NodeId right() const { return 2 * id + 1; }
};

struct GrowConfig {
    std::size_t max_regions = 10;
    std::size_t min_node = 0;  // 0: max(20, N/200)
    std::size_t max_numeric_candidates = 256;
    DiscrepancyMeasure measure;
    unsigned threads = 1;

    std::size_t effective_min_node(std::size_t n_rows) const;
    void validate() const;
};

class ContrastTree {
public:
    ContrastTree() = default;
    ContrastTree(FrameSchema schema, DiscrepancyMeasure measure, SampleMode mode,
                 std::map<NodeId, Node> nodes);

    const FrameSchema& schema() const { return schema_; }
    const DiscrepancyMeasure& measure() const { return measure_; }
    SampleMode mode() const { return mode_; }
    const std::map<NodeId, Node>& nodes() const { return nodes_; }
    std::map<NodeId, Node>& nodes() { return nodes_; }
    const Node& node(NodeId id) const;
    Node& node(NodeId id);

    std::vector<NodeId> terminal_ids() const;
    std::size_t terminal_count() const;

    // Throws DataError if the frame's columns do not match the tree's schema.
    void check_schema(const Frame& x) const;

    NodeId apply(const Frame& x, std::size_t row) const;  // no schema check
    NodeId apply(std::span<const Value> row) const;

    // Terminal id per row, after check_schema.
    std::vector<NodeId> route(const Frame& x) const;

    // Conjunction of split conditions from the root, e.g. "x1 <= 0.5 & g in {a,b}".
    std::string rule(NodeId id) const;

private:
    FrameSchema schema_;
    DiscrepancyMeasure measure_;
    SampleMode mode_ = SampleMode::Paired;
    std::map<NodeId, Node> nodes_;
};

// Split quality (f_l f_r) max(d_l, d_r)^2.
double split_quality(double f_left, double f_right, double d_left, double d_right);

// Split improvement max(d_l, d_r) - d_parent.
double split_improvement(double d_parent, double d_left, double d_right);

// True when `candidate` beats `incumbent` by more than the tie tolerance.
bool clearly_greater(double candidate, double incumbent);

// True when an improvement is positive beyond round-off of the discrepancies involved.
bool positive_improvement(double improvement, double d_parent, double d_max);

struct SplitCandidate {
    SplitSpec spec;
    double d_left = 0.0;
    double d_right = 0.0;
    std::size_t n_left = 0;  // pooled rows
    std::size_t n_right = 0;
    double quality = 0.0;
    double improvement = 0.0;
};

// Best-Q split of the given rows (sorted ascending) or nullopt.
std::optional<SplitCandidate> best_split(const ContrastSample& sample,
                                         std::span<const std::size_t> rows,
                                         const GrowConfig& config, double d_parent);

// Region discrepancy of the given rows; NaN when undefined (e.g. an empty side).
DiscrepancyValue region_discrepancy(const ContrastSample& sample, std::span<const std::size_t> rows,
                                    const DiscrepancyMeasure& measure);

// Best-first contrast tree. Throws ConfigError on measure/mode mismatch and
// DataError on an empty sample or outcome values outside the measure's domain.
ContrastTree grow(const ContrastSample& sample, const GrowConfig& config);

// Rows of `sample` grouped by terminal id.
std::map<NodeId, std::vector<std::size_t>> partition_rows(const ContrastTree& tree,
                                                          const ContrastSample& sample);

struct RegionSummary {
    NodeId id = 0;
    std::string rule;
    double d = 0.0;  // NaN when the region is empty or undefined on this sample
    std::size_t n_y = 0;
    std::size_t n_z = 0;
    double mean_y = 0.0;
    double mean_z = 0.0;
    std::optional<double> quantile_y;     // quantile kinds
    std::optional<double> quantile_z;     // quantile-diff
    std::optional<double> fraction_below; // quantile-prob: fraction y < z
};

// Per-terminal statistics recomputed on `sample`, sorted by descending d
// (undefined regions last, then by id).
std::vector<RegionSummary> region_report(const ContrastTree& tree, const ContrastSample& sample);

// "id\td\tn\trule" lines, one per terminal in report order.
std::string rules_tsv(const std::vector<RegionSummary>& report);

// Full report table with summaries (header included).
std::string report_tsv(const std::vector<RegionSummary>& report, const DiscrepancyMeasure& measure);

}  // namespace contrast
