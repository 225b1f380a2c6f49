#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "contrast/dataset.hpp"

namespace contrast {

// Raw RFC-4180 table: header plus string cells.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::optional<std::size_t> find(std::string_view name) const;
    std::size_t require(std::string_view name) const;
};

CsvTable parse_csv(std::string_view text);
CsvTable read_csv(const std::string& path);

// Cells that count as missing: empty, "NA", "NaN"/"nan".
bool is_missing_cell(std::string_view cell);

struct ColumnRoles {
    std::string y;
    std::optional<std::string> z;
    std::vector<std::string> x;            // empty: every column not otherwise claimed
    std::vector<std::string> categorical;  // forced categorical even if numeric-looking
    std::vector<std::string> ignore;       // columns excluded from the default x set
    std::optional<std::string> group;      // two-sample: origin column, outcome in y
    std::optional<std::string> group_first;  // group label meaning sample 1 (default: first seen)
    bool two_sample = false;               // two-sample: each row fills exactly one of y/z
};

// Predictor names implied by the roles.
std::vector<std::string> predictor_names(const CsvTable& table, const ColumnRoles& roles);

// New frame with levels in first-appearance order.
Frame build_frame(const CsvTable& table, const std::vector<std::string>& names,
                  const std::vector<std::string>& categorical);

// Frame encoded against an existing schema. Unseen levels become missing.
Frame conform_frame(const CsvTable& table, const FrameSchema& schema);

// Finite numeric column; missing or unparsable cells raise DataError naming row and column.
std::vector<double> outcome_column(const CsvTable& table, std::string_view name);

ContrastSample build_sample(const CsvTable& table, const ColumnRoles& roles);
ContrastSample load_csv(const std::string& path, const ColumnRoles& roles);

// Serializes x columns plus y and z (two-sample rows leave the absent side empty).
std::string write_csv(const ContrastSample& sample, std::string_view y_name = "y",
                      std::string_view z_name = "z");

// Shortest round-trip text for a double.
std::string format_double(double v);

}  // namespace contrast
