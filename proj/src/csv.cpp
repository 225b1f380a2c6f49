#include "contrast/csv.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "contrast/error.hpp"

namespace contrast {

std::optional<std::size_t> CsvTable::find(std::string_view name) const {
    for (std::size_t j = 0; j < header.size(); ++j)
        if (header[j] == name) return j;
    return std::nullopt;
}

std::size_t CsvTable::require(std::string_view name) const {
    if (auto j = find(name)) return *j;
    throw DataError("column '" + std::string(name) + "' not found in CSV header");
}

CsvTable parse_csv(std::string_view text) {
    if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);

    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;
    std::size_t line = 1;

    auto end_field = [&] {
        record.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_record = [&] {
        end_field();
        if (!(record.size() == 1 && record[0].empty())) records.push_back(std::move(record));
        record.clear();
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') ++line;
                field += c;
            }
            continue;
        }
        switch (c) {
            case '"':
                if (field_started && !field.empty())
                    throw DataError("stray quote in CSV at line " + std::to_string(line));
                in_quotes = true;
                field_started = true;
                break;
            case ',':
                end_field();
                break;
            case '\r':
                break;
            case '\n':
                end_record();
                ++line;
                break;
            default:
                field += c;
                field_started = true;
        }
    }
    if (in_quotes) throw DataError("unterminated quoted field in CSV");
    if (field_started || !record.empty()) end_record();

    if (records.empty()) throw DataError("CSV has no header row");
    CsvTable table;
    table.header = std::move(records.front());
    std::unordered_map<std::string, int> seen;
    for (const auto& h : table.header)
        if (seen[h]++ > 0) throw DataError("duplicate column name '" + h + "'");
    for (std::size_t r = 1; r < records.size(); ++r) {
        if (records[r].size() != table.header.size())
            throw DataError("CSV row " + std::to_string(r) + " has " +
                            std::to_string(records[r].size()) + " fields, expected " +
                            std::to_string(table.header.size()));
        table.rows.push_back(std::move(records[r]));
    }
    return table;
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_csv(ss.str());
}

bool is_missing_cell(std::string_view cell) {
    return cell.empty() || cell == "NA" || cell == "NaN" || cell == "nan";
}

namespace {

std::optional<double> parse_number(std::string_view cell) {
    while (!cell.empty() && cell.front() == ' ') cell.remove_prefix(1);
    while (!cell.empty() && cell.back() == ' ') cell.remove_suffix(1);
    if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v))
        return std::nullopt;
    return v;
}

std::string cell_ref(const CsvTable& t, std::size_t row, std::size_t col) {
    return "row " + std::to_string(row + 1) + ", column '" + t.header[col] + "'";
}

}  // namespace

std::vector<std::string> predictor_names(const CsvTable& table, const ColumnRoles& roles) {
    if (!roles.x.empty()) return roles.x;
    std::vector<std::string> names;
    for (const auto& h : table.header) {
        if (h == roles.y || (roles.z && h == *roles.z) || (roles.group && h == *roles.group))
            continue;
        if (std::find(roles.ignore.begin(), roles.ignore.end(), h) != roles.ignore.end()) continue;
        names.push_back(h);
    }
    return names;
}

Frame build_frame(const CsvTable& table, const std::vector<std::string>& names,
                  const std::vector<std::string>& categorical) {
    std::vector<FeatureColumn> cols;
    cols.reserve(names.size());
    const std::size_t n = table.rows.size();
    for (const auto& name : names) {
        const auto j = table.require(name);
        bool numeric = std::find(categorical.begin(), categorical.end(), name) == categorical.end();
        std::vector<double> values(n, std::numeric_limits<double>::quiet_NaN());
        if (numeric) {
            for (std::size_t i = 0; i < n && numeric; ++i) {
                const auto& cell = table.rows[i][j];
                if (is_missing_cell(cell)) continue;
                if (auto v = parse_number(cell))
                    values[i] = *v;
                else
                    numeric = false;
            }
        }
        if (numeric) {
            cols.push_back(FeatureColumn::numeric(name, std::move(values)));
            continue;
        }
        std::vector<std::string> levels;
        std::unordered_map<std::string, LevelId> index;
        std::vector<LevelId> codes(n, kMissingLevel);
        for (std::size_t i = 0; i < n; ++i) {
            const auto& cell = table.rows[i][j];
            if (is_missing_cell(cell)) continue;
            auto [it, inserted] = index.try_emplace(cell, static_cast<LevelId>(levels.size()));
            if (inserted) levels.push_back(cell);
            codes[i] = it->second;
        }
        cols.push_back(FeatureColumn::categorical(name, std::move(levels), std::move(codes)));
    }
    return Frame(std::move(cols));
}

Frame conform_frame(const CsvTable& table, const FrameSchema& schema) {
    std::vector<FeatureColumn> cols;
    const std::size_t n = table.rows.size();
    for (const auto& cs : schema) {
        const auto j = table.require(cs.name);
        if (cs.kind == ColumnKind::Numeric) {
            std::vector<double> values(n, std::numeric_limits<double>::quiet_NaN());
            for (std::size_t i = 0; i < n; ++i) {
                const auto& cell = table.rows[i][j];
                if (is_missing_cell(cell)) continue;
                auto v = parse_number(cell);
                if (!v) throw DataError("non-numeric value '" + cell + "' at " + cell_ref(table, i, j));
                values[i] = *v;
            }
            cols.push_back(FeatureColumn::numeric(cs.name, std::move(values)));
        } else {
            std::unordered_map<std::string_view, LevelId> index;
            for (std::size_t l = 0; l < cs.levels.size(); ++l)
                index.emplace(cs.levels[l], static_cast<LevelId>(l));
            std::vector<LevelId> codes(n, kMissingLevel);
            for (std::size_t i = 0; i < n; ++i) {
                auto it = index.find(table.rows[i][j]);
                if (it != index.end()) codes[i] = it->second;
            }
            cols.push_back(FeatureColumn::categorical(cs.name, cs.levels, std::move(codes)));
        }
    }
    Frame f(std::move(cols));
    return f;
}

std::vector<double> outcome_column(const CsvTable& table, std::string_view name) {
    const auto j = table.require(name);
    std::vector<double> out(table.rows.size());
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& cell = table.rows[i][j];
        if (is_missing_cell(cell)) throw DataError("missing value at " + cell_ref(table, i, j));
        auto v = parse_number(cell);
        if (!v) throw DataError("non-numeric value '" + cell + "' at " + cell_ref(table, i, j));
        out[i] = *v;
    }
    return out;
}

ContrastSample build_sample(const CsvTable& table, const ColumnRoles& roles) {
    if (roles.y.empty()) throw ConfigError("a y column is required");
    const auto names = predictor_names(table, roles);
    if (names.empty()) throw ConfigError("at least one predictor column is required");
    for (const auto& nm : names)
        if (nm == roles.y || (roles.z && nm == *roles.z))
            throw ConfigError("column '" + nm + "' cannot be both an outcome and a predictor");
    Frame x = build_frame(table, names, roles.categorical);
    const std::size_t n = table.rows.size();

    if (roles.group) {
        const auto g = table.require(*roles.group);
        auto outcome = outcome_column(table, roles.y);
        std::optional<std::string> first = roles.group_first;
        std::vector<Origin> origin(n);
        for (std::size_t i = 0; i < n; ++i) {
            const auto& cell = table.rows[i][g];
            if (is_missing_cell(cell)) throw DataError("missing group label at " + cell_ref(table, i, g));
            if (!first) first = cell;
            origin[i] = cell == *first ? Origin::Sample1 : Origin::Sample2;
        }
        return ContrastSample::two_sample(std::move(x), std::move(outcome), std::move(origin));
    }

    if (roles.two_sample) {
        if (!roles.z) throw ConfigError("two-sample mode needs both y and z columns");
        const auto jy = table.require(roles.y);
        const auto jz = table.require(*roles.z);
        std::vector<double> outcome(n);
        std::vector<Origin> origin(n);
        for (std::size_t i = 0; i < n; ++i) {
            const bool hy = !is_missing_cell(table.rows[i][jy]);
            const bool hz = !is_missing_cell(table.rows[i][jz]);
            if (hy == hz)
                throw DataError("row " + std::to_string(i + 1) +
                                (hy ? " has both y and z" : " has neither y nor z") +
                                " in two-sample mode");
            const auto j = hy ? jy : jz;
            auto v = parse_number(table.rows[i][j]);
            if (!v) throw DataError("non-numeric value at " + cell_ref(table, i, j));
            outcome[i] = *v;
            origin[i] = hy ? Origin::Sample1 : Origin::Sample2;
        }
        return ContrastSample::two_sample(std::move(x), std::move(outcome), std::move(origin));
    }

    if (!roles.z) throw ConfigError("paired mode needs a z column");
    auto y = outcome_column(table, roles.y);
    auto z = outcome_column(table, *roles.z);
    return ContrastSample::paired(std::move(x), std::move(y), std::move(z));
}

ContrastSample load_csv(const std::string& path, const ColumnRoles& roles) {
    return build_sample(read_csv(path), roles);
}

std::string format_double(double v) {
    if (std::isnan(v)) return "NA";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

namespace {

void write_cell(std::string& out, std::string_view cell) {
    if (cell.find_first_of(",\"\r\n") == std::string_view::npos) {
        out += cell;
        return;
    }
    out += '"';
    for (char c : cell) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
}

}  // namespace

std::string write_csv(const ContrastSample& sample, std::string_view y_name,
                      std::string_view z_name) {
    std::string out;
    const auto& x = sample.x;
    for (std::size_t j = 0; j < x.n_cols(); ++j) {
        write_cell(out, x.column(j).name());
        out += ',';
    }
    write_cell(out, y_name);
    out += ',';
    write_cell(out, z_name);
    out += '\n';
    for (std::size_t i = 0; i < sample.size(); ++i) {
        for (std::size_t j = 0; j < x.n_cols(); ++j) {
            const auto& c = x.column(j);
            if (!c.is_missing(i)) {
                if (c.is_numeric())
                    out += format_double(c.number(i));
                else
                    write_cell(out, c.levels()[static_cast<std::size_t>(c.code(i))]);
            }
            out += ',';
        }
        if (sample.has_y(i)) out += format_double(sample.y[i]);
        out += ',';
        if (sample.has_z(i)) out += format_double(sample.z[i]);
        out += '\n';
    }
    return out;
}

}  // namespace contrast
