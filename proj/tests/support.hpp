#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "contrast/cli.hpp"
#include "contrast/dataset.hpp"
#include "contrast/discrepancy.hpp"
#include "contrast/rng.hpp"

namespace testing_support {

inline std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("contrast_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream(path, std::ios::binary) << text;
}

inline std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Numeric predictors x1..xp; values rounded to a coarse grid when `ties` is set.
inline contrast::Frame random_frame(contrast::Rng& rng, std::size_t n, std::size_t p, bool ties = false,
                                    double missing_rate = 0.0) {
    std::vector<contrast::FeatureColumn> cols;
    for (std::size_t j = 0; j < p; ++j) {
        std::vector<double> v(n);
        for (auto& x : v) {
            x = rng.normal();
            if (ties) x = std::round(2.0 * x) / 2.0;
            if (missing_rate > 0.0 && rng.uniform() < missing_rate) x = std::nan("");
        }
        cols.push_back(contrast::FeatureColumn::numeric("x" + std::to_string(j + 1), std::move(v)));
    }
    return contrast::Frame(std::move(cols));
}


// Mixed predictors (numeric with ties and missing values, one categorical) and
// outcomes inside the measure's domain. Ratio and distribution measures get
// two-sample data half the time.
inline contrast::ContrastSample random_instance(contrast::Rng& rng, const contrast::DiscrepancyMeasure& m,
                                                std::size_t n, std::size_t p) {
    using contrast::MeasureKind;
    std::vector<contrast::FeatureColumn> cols;
    for (std::size_t j = 0; j < p; ++j) {
        const std::string name = "x" + std::to_string(j + 1);
        if (j == 2) {
            std::vector<contrast::LevelId> codes(n);
            for (auto& c : codes)
                c = rng.uniform() < 0.1 ? contrast::kMissingLevel : static_cast<contrast::LevelId>(rng.below(4));
            cols.push_back(contrast::FeatureColumn::categorical(name, {"a", "b", "c", "d"}, std::move(codes)));
            continue;
        }
        std::vector<double> v(n);
        for (auto& x : v) {
            x = j == 1 ? std::round(2.0 * rng.normal()) : rng.normal();
            if (rng.uniform() < 0.1) x = std::nan("");
        }
        cols.push_back(contrast::FeatureColumn::numeric(name, std::move(v)));
    }
    contrast::Frame x(std::move(cols));
    auto draw = [&](bool second) {
        switch (m.kind) {
            case MeasureKind::ClassError: return rng.uniform() < 0.5 ? 1.0 : 0.0;
            case MeasureKind::ProbDiff: return second ? std::round(10.0 * rng.uniform()) / 10.0 : (rng.uniform() < 0.5 ? 1.0 : 0.0);
            case MeasureKind::Ratio:
            case MeasureKind::InvRatio: return 0.5 + std::round(4.0 * rng.uniform()) / 2.0;
            default: return std::round(4.0 * rng.normal()) / 4.0;
        }
    };
    if (m.allows_two_sample() && rng.uniform() < 0.5) {
        std::vector<double> out(n);
        std::vector<contrast::Origin> origin(n);
        for (std::size_t i = 0; i < n; ++i) {
            origin[i] = rng.uniform() < 0.5 ? contrast::Origin::Sample1 : contrast::Origin::Sample2;
            out[i] = draw(origin[i] == contrast::Origin::Sample2);
        }
        return contrast::ContrastSample::two_sample(std::move(x), std::move(out), std::move(origin));
    }
    std::vector<double> y(n), z(n);
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = draw(false);
        z[i] = draw(true);
    }
    return contrast::ContrastSample::paired(std::move(x), std::move(y), std::move(z));
}

struct CliResult {
    int code = 0;
    std::string out;
    std::string err;
};

inline CliResult run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "contrast");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    CliResult r;
    r.code = contrast::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

}  // namespace testing_support
