#include "contrast/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>

#include "CLI11.hpp"
#include "json.hpp"

#include "contrast/boosting.hpp"
#include "contrast/csv.hpp"
#include "contrast/diagnostics.hpp"
#include "contrast/error.hpp"
#include "contrast/parallel.hpp"
#include "contrast/serialize.hpp"
#include "contrast/simgen.hpp"
#include "contrast/tree.hpp"

namespace contrast::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr const char* kThreadsEnv = "CONTRAST_THREADS";
constexpr std::uint64_t kEvalStream = 0x6576616cULL;
constexpr std::uint64_t kNullYStream = 1;
constexpr std::uint64_t kNullZStream = 2;

unsigned default_threads() {
    if (const char* env = std::getenv(kThreadsEnv)) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0 && v <= 1024) return static_cast<unsigned>(v);
    }
    return 1;
}

struct DataFlags {
    std::string data;
    std::string y;
    std::string z;
    std::vector<std::string> x;
    std::vector<std::string> categorical;
    std::vector<std::string> ignore;
    std::string group;
    std::string group_first;
    bool two_sample = false;
    std::string eval;

    ColumnRoles roles() const {
        ColumnRoles r;
        r.y = y;
        if (!z.empty()) r.z = z;
        r.x = x;
        r.categorical = categorical;
        r.ignore = ignore;
        if (!group.empty()) r.group = group;
        if (!group_first.empty()) r.group_first = group_first;
        r.two_sample = two_sample;
        return r;
    }

    json to_json() const {
        json j{{"data", data}, {"y", y}, {"x", x}, {"categorical", categorical}, {"ignore", ignore}};
        if (!z.empty()) j["z"] = z;
        if (!group.empty()) j["group"] = group;
        if (!group_first.empty()) j["group_first"] = group_first;
        j["two_sample"] = two_sample;
        if (!eval.empty()) j["eval"] = eval;
        return j;
    }
};

struct TreeFlags {
    std::string measure;
    std::size_t max_regions = 10;
    std::size_t min_node = 0;
    std::size_t max_candidates = 256;

    GrowConfig config(unsigned threads) const {
        GrowConfig c;
        c.measure = DiscrepancyMeasure::parse(measure);
        c.max_regions = max_regions;
        c.min_node = min_node;
        c.max_numeric_candidates = max_candidates;
        c.threads = threads;
        c.validate();
        return c;
    }

    json to_json() const {
        return json{{"measure", measure},
                    {"max_regions", max_regions},
                    {"min_node", min_node},
                    {"max_candidates", max_candidates}};
    }
};

struct BoostFlags {
    std::size_t trees;
    double alpha = 0.1;
    std::size_t knots = 64;
    std::size_t patience = 50;
    std::uint64_t seed = 1;

    BoostConfig config(const GrowConfig& tree) const {
        BoostConfig c;
        c.trees = trees;
        c.alpha = alpha;
        c.knots = knots;
        c.patience = patience;
        c.seed = seed;
        c.tree = tree;
        c.validate();
        return c;
    }

    json to_json() const {
        return json{{"trees", trees}, {"alpha", alpha}, {"knots", knots}, {"patience", patience}, {"seed", seed}};
    }
};

void add_data_flags(CLI::App* sub, DataFlags& f, bool with_z, bool with_eval) {
    sub->add_option("--data", f.data, "input CSV (header required)")->required();
    sub->add_option("--y", f.y, "y outcome column")->required();
    if (with_z) {
        sub->add_option("--z", f.z, "z outcome column");
        sub->add_option("--group", f.group, "origin column; two-sample with the outcome in --y");
        sub->add_option("--group-first", f.group_first, "group label of sample 1 (default: first seen)");
        sub->add_flag("--two-sample", f.two_sample, "each row fills exactly one of --y/--z");
    }
    sub->add_option("--x", f.x, "predictor columns (default: all other columns)")->delimiter(',');
    sub->add_option("--categorical", f.categorical, "columns forced categorical")->delimiter(',');
    sub->add_option("--ignore", f.ignore, "columns excluded from the default predictors")->delimiter(',');
    if (with_eval) sub->add_option("--eval", f.eval, "held-out CSV with the same columns");
}

void add_tree_flags(CLI::App* sub, TreeFlags& f, const char* measure, std::size_t regions) {
    f.measure = measure;
    f.max_regions = regions;
    sub->add_option("--measure", f.measure,
                    "mean-abs | mean-diff | quantile-diff:p | ad | class-error | prob-diff | "
                    "quantile-prob:p | ratio | inv-ratio");
    sub->add_option("-M,--max-regions", f.max_regions, "terminal regions per tree")
        ->check(CLI::Range(std::size_t{1}, std::size_t{1} << 20));
    sub->add_option("--min-node", f.min_node, "minimum rows per side; 0 means max(20, N/200)");
    sub->add_option("--max-candidates", f.max_candidates, "numeric split candidates per variable")
        ->check(CLI::Range(std::size_t{1}, std::size_t{1} << 30));
}

void add_boost_flags(CLI::App* sub, BoostFlags& f, bool knots) {
    sub->add_option("-K,--trees", f.trees, "number of trees");
    sub->add_option("--alpha", f.alpha, "learning rate")->check(CLI::Range(0.0, 1.0));
    if (knots) sub->add_option("--knots", f.knots, "QQ knots per region")->check(CLI::Range(std::size_t{2}, std::size_t{1} << 20));
    sub->add_option("--patience", f.patience, "stop after this many trees without trace improvement; 0 disables");
    sub->add_option("--seed", f.seed, "random seed");
}

void write_file(const fs::path& dir, const std::string& name, const std::string& content) {
    const auto path = dir / name;
    std::ofstream o(path, std::ios::binary);
    if (!o) throw DataError("cannot write '" + path.string() + "'");
    o << content;
    o.close();
    if (!o) throw DataError("failed writing '" + path.string() + "'");
}

fs::path prepare_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw DataError("cannot create '" + dir + "': " + ec.message());
    return fs::path(dir);
}

// Pins the sample-1 label so that --eval files agree with the training file.
void resolve_group_first(const CsvTable& table, ColumnRoles& roles) {
    if (!roles.group || roles.group_first) return;
    const auto g = table.require(*roles.group);
    for (const auto& row : table.rows)
        if (!is_missing_cell(row[g])) {
            roles.group_first = row[g];
            return;
        }
}

ContrastSample load_conformed(const CsvTable& table, ColumnRoles roles, const FrameSchema& schema) {
    roles.x.clear();
    for (const auto& c : schema) roles.x.push_back(c.name);
    auto s = build_sample(table, roles);
    s.x = conform_frame(table, schema);
    s.validate();
    return s;
}

std::string trace_csv(const TrainTrace& t) {
    const bool with_eval = !t.test.empty();
    std::string out = with_eval ? "tree,train,eval\n" : "tree,train\n";
    for (std::size_t k = 0; k < t.train.size(); ++k) {
        out += std::to_string(k + 1) + "," + format_double(t.train[k]);
        if (with_eval) out += "," + format_double(t.test[k]);
        out += "\n";
    }
    return out;
}

std::vector<double> row_values(const CsvTable& table, std::size_t row) {
    std::vector<double> v;
    v.reserve(table.rows[row].size());
    for (std::size_t j = 0; j < table.rows[row].size(); ++j) {
        const auto& cell = table.rows[row][j];
        double d = 0.0;
        const auto* b = cell.data();
        auto [p, ec] = std::from_chars(b, b + cell.size(), d);
        if (ec != std::errc() || p != b + cell.size() || !std::isfinite(d))
            throw DataError("non-numeric draw '" + cell + "' at row " + std::to_string(row + 1) +
                            ", column " + std::to_string(j + 1));
        v.push_back(d);
    }
    return v;
}

std::string join_row(std::span<const double> v) {
    std::string out;
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (k) out += ',';
        out += format_double(v[k]);
    }
    out += '\n';
    return out;
}

// ---------------------------------------------------------------- contrast

struct ContrastCmd {
    DataFlags data;
    TreeFlags tree;
    std::string out_dir = ".";
};

int cmd_contrast(const ContrastCmd& c, unsigned threads, std::ostream& out) {
    const auto table = read_csv(c.data.data);
    auto roles = c.data.roles();
    resolve_group_first(table, roles);
    const auto cfg = c.tree.config(threads);
    const auto sample = build_sample(table, roles);
    const auto tree = grow(sample, cfg);

    std::optional<ContrastSample> eval;
    if (!c.data.eval.empty()) eval = load_conformed(read_csv(c.data.eval), roles, tree.schema());
    const ContrastSample& target = eval ? *eval : sample;

    auto doc = tree_to_json(tree, &cfg);
    doc["run"] = {{"command", "contrast"},
                  {"data", c.data.to_json()},
                  {"tree", c.tree.to_json()},
                  {"effective_min_node", cfg.effective_min_node(sample.size())}};

    const auto dir = prepare_dir(c.out_dir);
    write_file(dir, "model.json", dump(doc));
    write_file(dir, "regions.tsv", report_tsv(region_report(tree, target), cfg.measure));
    write_file(dir, "curve.csv", curve_csv(contrast_curve(tree, target)));
    out << "contrast: " << tree.terminal_count() << " regions\n";
    return kExitOk;
}

// ---------------------------------------------------------------- boost

struct BoostCmd {
    DataFlags data;
    TreeFlags tree;
    BoostFlags boost{100};
    std::string out_dir = ".";
};

int cmd_boost(const BoostCmd& c, unsigned threads, std::ostream& out) {
    if (c.data.z.empty()) throw ConfigError("boost needs a --z column");
    const auto table = read_csv(c.data.data);
    const auto roles = c.data.roles();
    const auto cfg = c.boost.config(c.tree.config(threads));
    const auto sample = build_sample(table, roles);

    std::optional<ContrastSample> eval;
    if (!c.data.eval.empty()) eval = load_conformed(read_csv(c.data.eval), roles, sample.x.schema());

    auto fit = fit_estimation(sample, cfg, eval ? &*eval : nullptr);
    fit.model.z_source.kind = ZSource::Kind::Column;
    fit.model.z_source.column = c.data.z;

    // Final-model curve: a fresh tree on the boosted training z, summarized on --eval.
    ContrastSample boosted = sample;
    boosted.z = fit.z_train;
    const auto final_tree = grow(boosted, cfg.tree);
    ContrastSample target = boosted;
    if (eval) {
        target = *eval;
        target.z = fit.z_test;
    }

    auto doc = model_to_json(fit.model);
    doc["run"] = {{"command", "boost"},
                  {"data", c.data.to_json()},
                  {"tree", c.tree.to_json()},
                  {"boost", c.boost.to_json()},
                  {"trees_fitted", fit.model.trees.size()}};

    const auto dir = prepare_dir(c.out_dir);
    write_file(dir, "model.json", dump(doc));
    write_file(dir, "trace.csv", trace_csv(fit.trace));
    write_file(dir, "curve.csv", curve_csv(contrast_curve(final_tree, target)));
    out << "boost: " << fit.model.trees.size() << " trees\n";
    return kExitOk;
}

// ---------------------------------------------------------------- distboost

struct DistBoostCmd {
    DataFlags data;
    TreeFlags tree;
    BoostFlags boost{400};
    std::string z_source = "normal";
    std::string out_dir = ".";
};

struct SourceInputs {
    std::vector<double> location;
    std::vector<double> user_z;
};

SourceInputs source_inputs(const ZSource& zs, const CsvTable& table) {
    SourceInputs in;
    if (zs.kind == ZSource::Kind::Residual) in.location = outcome_column(table, zs.column);
    if (zs.kind == ZSource::Kind::Column) in.user_z = outcome_column(table, zs.column);
    return in;
}

int cmd_distboost(const DistBoostCmd& c, unsigned threads, std::ostream& out) {
    auto zs = ZSource::parse(c.z_source);
    const auto table = read_csv(c.data.data);
    auto roles = c.data.roles();
    if (!zs.column.empty()) roles.ignore.push_back(zs.column);
    auto cfg = c.boost.config(c.tree.config(threads));

    const auto names = predictor_names(table, roles);
    if (names.empty()) throw ConfigError("at least one predictor column is required");
    if (std::find(names.begin(), names.end(), roles.y) != names.end())
        throw ConfigError("column '" + roles.y + "' cannot be both an outcome and a predictor");
    Frame x = build_frame(table, names, roles.categorical);
    auto y = outcome_column(table, roles.y);
    const auto in = source_inputs(zs, table);
    zs.calibrate(y, in.location);
    auto z0 = zs.initial(y, in.location, in.user_z, cfg.seed);
    const auto sample = ContrastSample::paired(std::move(x), std::move(y), std::move(z0));

    std::optional<ContrastSample> eval;
    if (!c.data.eval.empty()) {
        const auto et = read_csv(c.data.eval);
        auto ex = conform_frame(et, sample.x.schema());
        auto ey = outcome_column(et, roles.y);
        const auto ein = source_inputs(zs, et);
        std::vector<double> ez;
        if (zs.kind == ZSource::Kind::Column) {
            ez = ein.user_z;
        } else {
            ez.resize(ey.size());
            const std::uint64_t eseed = CounterRng(cfg.seed, kEvalStream).bits(0);
            for (std::size_t i = 0; i < ez.size(); ++i)
                ez[i] = zs.draw(1, ein.location.empty() ? 0.0 : ein.location[i], CounterRng(eseed, i))[0];
        }
        eval = ContrastSample::paired(std::move(ex), std::move(ey), std::move(ez));
    }

    auto fit = fit_distribution(sample, cfg, eval ? &*eval : nullptr);
    fit.model.z_source = zs;

    auto doc = model_to_json(fit.model);
    doc["run"] = {{"command", "distboost"},
                  {"data", c.data.to_json()},
                  {"tree", c.tree.to_json()},
                  {"boost", c.boost.to_json()},
                  {"z_source", c.z_source},
                  {"trees_fitted", fit.model.trees.size()}};

    const auto dir = prepare_dir(c.out_dir);
    write_file(dir, "model.json", dump(doc));
    write_file(dir, "trace.csv", trace_csv(fit.trace));
    out << "distboost: " << fit.model.trees.size() << " trees\n";
    return kExitOk;
}

// ---------------------------------------------------------------- predict

struct PredictCmd {
    std::string model;
    std::string data;
    std::string z;
    std::string loc;
    std::string z_draws;
    std::size_t n = 1000;
    std::vector<double> quantiles;
    std::uint64_t seed = 1;
    std::string out_dir = ".";
};

BoostModel load_model(const std::string& path) { return model_from_json(load_json_file(path)); }

std::vector<double> location_values(const BoostModel& model, const CsvTable& table, const std::string& loc) {
    if (model.z_source.kind != ZSource::Kind::Residual) return {};
    return outcome_column(table, loc.empty() ? model.z_source.column : loc);
}

int cmd_predict(const PredictCmd& c, unsigned threads, std::ostream& out) {
    auto qs = c.quantiles;
    for (double p : qs)
        if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("quantile levels must lie in [0, 1]");
    std::sort(qs.begin(), qs.end());
    qs.erase(std::unique(qs.begin(), qs.end()), qs.end());

    const auto model = load_model(c.model);
    const auto table = read_csv(c.data);
    const auto x = conform_frame(table, model.schema);
    const std::size_t n_rows = x.n_rows();
    const auto dir = prepare_dir(c.out_dir);

    if (model.mode == BoostMode::Estimation) {
        const std::string zcol = c.z.empty() ? model.z_source.column : c.z;
        if (zcol.empty()) throw ConfigError("estimation models need --z");
        const auto yhat = predict_estimation(model, x, outcome_column(table, zcol));
        std::string text = "yhat\n";
        for (double v : yhat) text += format_double(v) + "\n";
        write_file(dir, "yhat.csv", text);
        out << "predict: " << n_rows << " rows\n";
        return kExitOk;
    }

    std::optional<CsvTable> draws;
    if (!c.z_draws.empty()) {
        draws = read_csv(c.z_draws);
        if (draws->rows.size() != n_rows)
            throw DataError("--z-draws has " + std::to_string(draws->rows.size()) + " rows, data has " +
                            std::to_string(n_rows));
    } else if (model.z_source.kind == ZSource::Kind::Column) {
        throw ConfigError("model z source '" + model.z_source.name() + "' needs --z-draws");
    }
    if (!draws && c.n == 0) throw ConfigError("--n must be positive");
    const auto loc = location_values(model, table, c.loc);

    std::vector<std::string> lines(n_rows);
    parallel_for(n_rows, threads, [&](std::size_t i) {
        const auto est = draws ? estimate_distribution(model, x, i, row_values(*draws, i))
                               : estimate_distribution(model, x, i, c.n, c.seed, loc.empty() ? 0.0 : loc[i]);
        if (qs.empty()) {
            lines[i] = join_row(est.sample());
        } else {
            std::vector<double> q(qs.size());
            for (std::size_t k = 0; k < qs.size(); ++k) q[k] = est.quantile(qs[k]);
            lines[i] = join_row(q);
        }
    });

    std::string text;
    if (qs.empty()) {
        const std::size_t width = draws ? (n_rows ? draws->rows[0].size() : 0) : c.n;
        for (std::size_t k = 0; k < width; ++k) text += (k ? ",draw" : "draw") + std::to_string(k + 1);
    } else {
        for (std::size_t k = 0; k < qs.size(); ++k) text += (k ? ",q" : "q") + format_double(qs[k]);
    }
    text += "\n";
    for (const auto& l : lines) text += l;
    write_file(dir, qs.empty() ? "yhat.csv" : "quantiles.csv", text);
    out << "predict: " << n_rows << " rows\n";
    return kExitOk;
}

// ---------------------------------------------------------------- simulate

struct SimulateCmd {
    std::string kind = "asym-logistic";
    std::size_t n = 10000;
    std::size_t p = 10;
    std::uint64_t seed = 1;
    std::string params;
    std::string out_dir = ".";
};

std::string sim_csv(const Frame& x, const std::vector<const std::vector<double>*>& outcomes,
                    const std::vector<std::string>& names) {
    std::string text;
    for (std::size_t j = 0; j < x.n_cols(); ++j) text += x.column(j).name() + ",";
    for (std::size_t k = 0; k < names.size(); ++k) text += (k ? "," : "") + names[k];
    text += "\n";
    for (std::size_t i = 0; i < x.n_rows(); ++i) {
        for (std::size_t j = 0; j < x.n_cols(); ++j) text += format_double(x.column(j).number(i)) + ",";
        for (std::size_t k = 0; k < outcomes.size(); ++k) text += (k ? "," : "") + format_double((*outcomes[k])[i]);
        text += "\n";
    }
    return text;
}

int cmd_simulate(const SimulateCmd& c, std::ostream& out) {
    if (c.n == 0) throw ConfigError("--n must be positive");
    const auto dir = prepare_dir(c.out_dir);
    const json generated{{"n", c.n}, {"seed", c.seed}};
    if (c.kind == "asym-logistic") {
        sim::SimModel model =
            c.params.empty() ? sim::SimModel::draw(c.seed, c.p) : sim_model_from_json(load_json_file(c.params));
        const auto g = sim::gen_asym_logistic(model, c.n, c.seed);
        auto doc = sim_model_to_json(model);
        doc["generated"] = generated;
        write_file(dir, "data.csv", sim_csv(g.x, {&g.y}, {"y"}));
        write_file(dir, "sim.json", dump(doc));
    } else if (c.kind == "hetero") {
        const auto g = c.params.empty() ? sim::gen_hetero(c.n, c.seed, c.p)
                                        : sim::gen_hetero(hetero_model_from_json(load_json_file(c.params)), c.n, c.seed);
        auto doc = hetero_model_to_json(g.model);
        doc["generated"] = generated;
        doc["generated"]["signal_to_noise"] = g.signal_to_noise;
        doc["generated"]["cor_fs"] = g.cor_fs;
        write_file(dir, "data.csv", sim_csv(g.x, {&g.y, &g.f, &g.s}, {"y", "f", "s"}));
        write_file(dir, "sim.json", dump(doc));
    } else {
        throw ConfigError("unknown simulation kind '" + c.kind + "'");
    }
    out << "simulate: " << c.n << " rows\n";
    return kExitOk;
}

// ---------------------------------------------------------------- null

struct NullCmd {
    std::string sim;
    std::string model;
    std::string data;
    std::string loc;
    std::size_t n = 5000;
    std::size_t replicates = 50;
    std::string pipeline = "tree-only";
    std::optional<double> observed;
    TreeFlags tree;
    BoostFlags boost{400};
    std::string out_dir = ".";
};

PairGenerator sim_generator(const json& doc, std::size_t n, std::uint64_t seed) {
    const auto kind = doc.value("kind", std::string());
    if (kind == "asym-logistic") {
        auto model = std::make_shared<sim::SimModel>(sim_model_from_json(doc));
        if (!model->calibrated()) throw DataError("simulation model is not calibrated");
        auto x = std::make_shared<Frame>(sim::normal_predictors(n, model->p, seed));
        return [model, x](std::size_t, std::uint64_t s) {
            auto y = sim::draw_asym_logistic(*model, *x, CounterRng(s, kNullYStream).bits(0));
            auto z = sim::draw_asym_logistic(*model, *x, CounterRng(s, kNullZStream).bits(0));
            return ContrastSample::paired(*x, std::move(y), std::move(z));
        };
    }
    if (kind == "hetero") {
        const auto model = hetero_model_from_json(doc);
        if (!model.location.calibrated()) throw DataError("simulation model is not calibrated");
        auto x = std::make_shared<Frame>(sim::normal_predictors(n, model.p, seed));
        auto f = std::make_shared<std::vector<double>>(n);
        auto sd = std::make_shared<std::vector<double>>(n);
        for (std::size_t i = 0; i < n; ++i) {
            const auto r = sim::row_of(*x, i);
            (*f)[i] = model.f(r);
            (*sd)[i] = model.s(r);
        }
        return [x, f, sd](std::size_t, std::uint64_t s) {
            const CounterRng ry(s, kNullYStream), rz(s, kNullZStream);
            std::vector<double> y(f->size()), z(f->size());
            for (std::size_t i = 0; i < y.size(); ++i) {
                y[i] = (*f)[i] + (*sd)[i] * ry.normal(i);
                z[i] = (*f)[i] + (*sd)[i] * rz.normal(i);
            }
            return ContrastSample::paired(*x, std::move(y), std::move(z));
        };
    }
    throw DataError("unknown simulation kind '" + kind + "'");
}

PairGenerator model_generator(const NullCmd& c) {
    auto model = std::make_shared<BoostModel>(load_model(c.model));
    if (model->mode != BoostMode::Distribution) throw ConfigError("null needs a distribution model");
    if (model->z_source.kind == ZSource::Kind::Column)
        throw ConfigError("null cannot draw from a user-supplied z source");
    const auto table = read_csv(c.data);
    auto x = std::make_shared<Frame>(conform_frame(table, model->schema));
    auto loc = std::make_shared<std::vector<double>>(location_values(*model, table, c.loc));
    return [model, x, loc](std::size_t, std::uint64_t s) {
        const std::size_t n = x->n_rows();
        const std::uint64_t sy = CounterRng(s, kNullYStream).bits(0);
        const std::uint64_t sz = CounterRng(s, kNullZStream).bits(0);
        std::vector<double> y(n), z(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double l = loc->empty() ? 0.0 : (*loc)[i];
            y[i] = estimate_distribution(*model, *x, i, 1, sy, l).sample()[0];
            z[i] = estimate_distribution(*model, *x, i, 1, sz, l).sample()[0];
        }
        return ContrastSample::paired(*x, std::move(y), std::move(z));
    };
}

int cmd_null(const NullCmd& c, unsigned threads, std::ostream& out) {
    NullPipeline pipeline;
    if (c.pipeline == "tree-only")
        pipeline = NullPipeline::TreeOnly;
    else if (c.pipeline == "full-boost")
        pipeline = NullPipeline::FullBoost;
    else
        throw ConfigError("unknown pipeline '" + c.pipeline + "'");
    if (c.sim.empty() == c.model.empty()) throw ConfigError("give exactly one of --sim and --model");
    if (!c.model.empty() && c.data.empty()) throw ConfigError("--model needs --data");
    if (c.replicates < 2) throw ConfigError("--replicates must be at least 2");
    if (!c.sim.empty() && c.n == 0) throw ConfigError("--n must be positive");

    TreeFlags tf = c.tree;
    tf.measure = "ad";
    const auto cfg = c.boost.config(tf.config(threads));
    const auto gen = c.sim.empty() ? model_generator(c) : sim_generator(load_json_file(c.sim), c.n, cfg.seed);
    const auto summary = null_distribution(gen, pipeline, cfg, c.replicates, cfg.seed, threads);

    std::string csv = "replicate,statistic\n";
    for (std::size_t r = 0; r < summary.replicates.size(); ++r)
        csv += std::to_string(r + 1) + "," + format_double(summary.replicates[r]) + "\n";
    json run{{"command", "null"},
             {"pipeline", c.pipeline},
             {"tree", tf.to_json()},
             {"boost", c.boost.to_json()}};
    if (!c.sim.empty()) {
        run["sim"] = c.sim;
        run["n"] = c.n;
    } else {
        run["model"] = c.model;
        run["data"] = c.data;
    }
    json doc{{"replicates", summary.replicates.size()}, {"mean", summary.mean}, {"sd", summary.sd}};
    if (c.observed) {
        doc["observed"] = *c.observed;
        doc["within_2sd"] = summary.consistent(*c.observed, 2.0);
        doc["within_3sd"] = summary.consistent(*c.observed, 3.0);
    }
    doc["run"] = std::move(run);

    const auto dir = prepare_dir(c.out_dir);
    write_file(dir, "null.csv", csv);
    write_file(dir, "null.json", dump(doc));
    out << "null: mean " << format_double(summary.mean) << " sd " << format_double(summary.sd) << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------- qq

struct QqCmd {
    DataFlags data;
    TreeFlags tree;
    std::string tree_path;
    std::size_t top = 9;
    std::string out_dir = ".";
};

int cmd_qq(const QqCmd& c, unsigned threads, std::ostream& out) {
    const auto table = read_csv(c.data.data);
    auto roles = c.data.roles();
    resolve_group_first(table, roles);
    ContrastTree tree;
    ContrastSample sample;
    if (!c.tree_path.empty()) {
        tree = tree_from_json(load_json_file(c.tree_path));
        sample = load_conformed(table, roles, tree.schema());
    } else {
        sample = build_sample(table, roles);
        tree = grow(sample, c.tree.config(threads));
    }
    const auto points = qq_regions(tree, sample, c.top);
    const auto dir = prepare_dir(c.out_dir);
    write_file(dir, "qq.csv", qq_csv(points));
    out << "qq: " << points.size() << " points\n";
    return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Contrast trees, contrast boosting and distribution boosting", "contrast"};
    app.option_defaults()->always_capture_default();
    app.require_subcommand(1);
    app.failure_message(CLI::FailureMessage::help);

    unsigned threads = default_threads();
    app.add_option("--threads", threads, std::string("worker threads (env ") + kThreadsEnv + ")")
        ->check(CLI::Range(1u, 1024u));

    ContrastCmd contrast;
    auto* sc = app.add_subcommand("contrast", "grow one contrast tree; writes model.json, regions.tsv, curve.csv");
    add_data_flags(sc, contrast.data, true, true);
    add_tree_flags(sc, contrast.tree, "mean-abs", 10);
    sc->add_option("--out-dir", contrast.out_dir, "output directory");

    BoostCmd boost;
    auto* sb = app.add_subcommand("boost", "estimation contrast boosting; writes model.json, trace.csv, curve.csv");
    add_data_flags(sb, boost.data, true, true);
    add_tree_flags(sb, boost.tree, "mean-diff", 8);
    add_boost_flags(sb, boost.boost, false);
    sb->add_option("--out-dir", boost.out_dir, "output directory");

    DistBoostCmd dist;
    auto* sd = app.add_subcommand("distboost", "distribution boosting; writes model.json, trace.csv");
    add_data_flags(sd, dist.data, false, true);
    add_tree_flags(sd, dist.tree, "ad", 8);
    add_boost_flags(sd, dist.boost, true);
    sd->add_option("--z-source", dist.z_source, "normal | gauss-y | marginal | residual:<col> | column:<col>");
    sd->add_option("--out-dir", dist.out_dir, "output directory");

    PredictCmd predict;
    auto* sp = app.add_subcommand("predict", "apply a boosted model; writes yhat.csv or quantiles.csv");
    sp->add_option("--model", predict.model, "model.json from boost or distboost")->required();
    sp->add_option("--data", predict.data, "CSV with the model's predictor columns")->required();
    sp->add_option("--z", predict.z, "initial z column (estimation models)");
    sp->add_option("--loc", predict.loc, "location column (residual z sources)");
    sp->add_option("--z-draws", predict.z_draws, "CSV of z draws, one row per data row");
    sp->add_option("--n", predict.n, "z draws per row");
    sp->add_option("--quantiles", predict.quantiles, "quantile levels, e.g. 0.25,0.5,0.75")->delimiter(',');
    sp->add_option("--seed", predict.seed, "random seed");
    sp->add_option("--out-dir", predict.out_dir, "output directory");

    SimulateCmd simulate;
    auto* ss = app.add_subcommand("simulate", "simulated data; writes data.csv and sim.json");
    ss->add_option("--kind", simulate.kind, "asym-logistic | hetero");
    ss->add_option("--n", simulate.n, "rows");
    ss->add_option("--p", simulate.p, "predictors")->check(CLI::Range(std::size_t{1}, std::size_t{1000}));
    ss->add_option("--seed", simulate.seed, "random seed");
    ss->add_option("--params", simulate.params, "sim.json to reuse instead of drawing a new model");
    ss->add_option("--out-dir", simulate.out_dir, "output directory");

    NullCmd null;
    auto* sn = app.add_subcommand("null", "null distribution of the average tree discrepancy; writes null.csv, null.json");
    sn->add_option("--sim", null.sim, "sim.json; y and z both drawn from the simulation truth");
    sn->add_option("--model", null.model, "distboost model.json; y and z both drawn from the model");
    sn->add_option("--data", null.data, "predictor CSV for --model");
    sn->add_option("--loc", null.loc, "location column (residual z sources)");
    sn->add_option("--n", null.n, "rows per replicate with --sim");
    sn->add_option("-R,--replicates", null.replicates, "replicates");
    sn->add_option("--pipeline", null.pipeline, "tree-only | full-boost");
    sn->add_option("--observed", null.observed, "observed statistic to compare");
    null.tree.max_regions = 8;
    sn->add_option("-M,--max-regions", null.tree.max_regions, "terminal regions per tree")
        ->check(CLI::Range(std::size_t{1}, std::size_t{1} << 20));
    sn->add_option("--min-node", null.tree.min_node, "minimum rows per side; 0 means max(20, N/200)");
    sn->add_option("--max-candidates", null.tree.max_candidates, "numeric split candidates per variable");
    add_boost_flags(sn, null.boost, true);
    sn->add_option("--out-dir", null.out_dir, "output directory");

    QqCmd qq;
    auto* sq = app.add_subcommand("qq", "QQ tables of the highest-discrepancy regions; writes qq.csv");
    add_data_flags(sq, qq.data, true, false);
    add_tree_flags(sq, qq.tree, "ad", 10);
    sq->add_option("--tree", qq.tree_path, "contrast model.json to reuse instead of growing a tree");
    sq->add_option("--top", qq.top, "regions to tabulate");
    sq->add_option("--out-dir", qq.out_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (sc->parsed()) return cmd_contrast(contrast, threads, out);
        if (sb->parsed()) return cmd_boost(boost, threads, out);
        if (sd->parsed()) return cmd_distboost(dist, threads, out);
        if (sp->parsed()) return cmd_predict(predict, threads, out);
        if (ss->parsed()) return cmd_simulate(simulate, out);
        if (sn->parsed()) return cmd_null(null, threads, out);
        if (sq->parsed()) return cmd_qq(qq, threads, out);
    } catch (const DataError& e) {
        err << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitUsage;
}

}  // namespace contrast::cli
