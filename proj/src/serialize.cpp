#include "contrast/serialize.hpp"

#include <fstream>
#include <sstream>

#include "contrast/error.hpp"

namespace contrast {

using nlohmann::json;

namespace {

template <typename T>
T get_or_throw(const json& j, const char* key) {
    if (!j.contains(key)) throw DataError(std::string("model JSON lacks field '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw DataError(std::string("model JSON field '") + key + "': " + e.what());
    }
}

json payload_to_json(const Payload& p) {
    if (std::holds_alternative<double>(p)) return json{{"offset", std::get<double>(p)}};
    if (std::holds_alternative<TransformFn>(p)) {
        const auto& g = std::get<TransformFn>(p);
        return json{{"z_knots", g.z_knots()}, {"y_knots", g.y_knots()}};
    }
    return nullptr;
}

Payload payload_from_json(const json& j) {
    if (j.is_null()) return std::monostate{};
    if (j.contains("offset")) return get_or_throw<double>(j, "offset");
    try {
        return TransformFn(get_or_throw<std::vector<double>>(j, "z_knots"),
                           get_or_throw<std::vector<double>>(j, "y_knots"));
    } catch (const std::invalid_argument& e) {
        throw DataError(std::string("bad transform payload: ") + e.what());
    }
}

std::map<NodeId, Node> nodes_from_json(const json& arr) {
    if (!arr.is_array()) throw DataError("'nodes' must be an array");
    std::map<NodeId, Node> nodes;
    for (const auto& jn : arr) {
        Node n;
        n.id = get_or_throw<NodeId>(jn, "id");
        n.d = jn.contains("d") && jn["d"].is_number() ? jn["d"].get<double>()
                                                      : std::numeric_limits<double>::quiet_NaN();
        n.n_y = get_or_throw<std::size_t>(jn, "n_y");
        n.n_z = get_or_throw<std::size_t>(jn, "n_z");
        if (jn.contains("split") && !jn["split"].is_null()) {
            const auto& js = jn["split"];
            SplitSpec s;
            s.variable = get_or_throw<std::size_t>(js, "variable");
            s.missing_left = get_or_throw<std::string>(js, "missing_goes") == "left";
            if (js.contains("left_levels")) {
                s.categorical = true;
                s.left_levels = get_or_throw<std::vector<LevelId>>(js, "left_levels");
                std::sort(s.left_levels.begin(), s.left_levels.end());
            } else {
                s.threshold = get_or_throw<double>(js, "threshold");
            }
            n.split = std::move(s);
        }
        if (jn.contains("payload")) n.payload = payload_from_json(jn["payload"]);
        if (!nodes.emplace(n.id, std::move(n)).second) throw DataError("duplicate node id in JSON");
    }
    return nodes;
}

SampleMode mode_from(const std::string& s) {
    if (s == "paired") return SampleMode::Paired;
    if (s == "two-sample") return SampleMode::TwoSample;
    throw DataError("unknown sample mode '" + s + "'");
}

const char* mode_name(SampleMode m) { return m == SampleMode::Paired ? "paired" : "two-sample"; }

DiscrepancyMeasure measure_from(const json& j, const char* key) {
    try {
        return DiscrepancyMeasure::parse(get_or_throw<std::string>(j, key));
    } catch (const ConfigError& e) {
        throw DataError(e.what());
    }
}

json basis_to_json(const sim::BasisFunction& b) {
    return json{{"coef", b.coef}, {"exponent", b.exponent}, {"scale", b.scale}};
}

sim::BasisFunction basis_from_json(const json& j) {
    sim::BasisFunction b;
    b.coef = get_or_throw<std::vector<double>>(j, "coef");
    b.exponent = get_or_throw<std::vector<double>>(j, "exponent");
    b.scale = get_or_throw<std::vector<double>>(j, "scale");
    if (b.exponent.size() != b.coef.size() || (!b.scale.empty() && b.scale.size() != b.coef.size()))
        throw DataError("basis parameter arrays differ in length");
    return b;
}

}  // namespace

json schema_to_json(const FrameSchema& schema) {
    json cols = json::array();
    for (const auto& c : schema) {
        json jc{{"name", c.name}, {"kind", c.kind == ColumnKind::Numeric ? "numeric" : "categorical"}};
        if (c.kind == ColumnKind::Categorical) jc["levels"] = c.levels;
        cols.push_back(std::move(jc));
    }
    return cols;
}

FrameSchema schema_from_json(const json& j) {
    if (!j.is_array()) throw DataError("'schema' must be an array");
    FrameSchema s;
    for (const auto& jc : j) {
        ColumnSchema c;
        c.name = get_or_throw<std::string>(jc, "name");
        const auto kind = get_or_throw<std::string>(jc, "kind");
        if (kind == "numeric") {
            c.kind = ColumnKind::Numeric;
        } else if (kind == "categorical") {
            c.kind = ColumnKind::Categorical;
            c.levels = get_or_throw<std::vector<std::string>>(jc, "levels");
        } else {
            throw DataError("unknown column kind '" + kind + "'");
        }
        s.push_back(std::move(c));
    }
    return s;
}

json grow_config_to_json(const GrowConfig& c) {
    return json{{"max_regions", c.max_regions},
                {"min_node", c.min_node},
                {"max_numeric_candidates", c.max_numeric_candidates},
                {"measure", c.measure.name()}};
}

GrowConfig grow_config_from_json(const json& j) {
    GrowConfig c;
    c.max_regions = get_or_throw<std::size_t>(j, "max_regions");
    c.min_node = get_or_throw<std::size_t>(j, "min_node");
    c.max_numeric_candidates = get_or_throw<std::size_t>(j, "max_numeric_candidates");
    c.measure = measure_from(j, "measure");
    return c;
}

json nodes_to_json(const ContrastTree& tree) {
    json arr = json::array();
    for (const auto& [id, n] : tree.nodes()) {
        json jn{{"id", id}, {"n_y", n.n_y}, {"n_z", n.n_z}};
        jn["d"] = std::isnan(n.d) ? json(nullptr) : json(n.d);
        if (n.split) {
            const auto& s = *n.split;
            json js{{"variable", s.variable}, {"missing_goes", s.missing_left ? "left" : "right"}};
            if (s.categorical)
                js["left_levels"] = s.left_levels;
            else
                js["threshold"] = s.threshold;
            jn["split"] = std::move(js);
        } else {
            jn["split"] = nullptr;
        }
        if (!std::holds_alternative<std::monostate>(n.payload)) jn["payload"] = payload_to_json(n.payload);
        arr.push_back(std::move(jn));
    }
    return arr;
}

json tree_to_json(const ContrastTree& tree, const GrowConfig* config) {
    json j{{"version", kTreeFormat},
           {"measure", tree.measure().name()},
           {"mode", mode_name(tree.mode())},
           {"schema", schema_to_json(tree.schema())}};
    if (config) j["config"] = grow_config_to_json(*config);
    j["nodes"] = nodes_to_json(tree);
    return j;
}

ContrastTree tree_from_json(const json& j) {
    if (!j.is_object() || get_or_throw<std::string>(j, "version") != kTreeFormat)
        throw DataError(std::string("not a ") + kTreeFormat + " document");
    return ContrastTree(schema_from_json(j.at("schema")), measure_from(j, "measure"),
                        mode_from(get_or_throw<std::string>(j, "mode")), nodes_from_json(j.at("nodes")));
}

json model_to_json(const BoostModel& m) {
    const auto& c = m.config;
    json zs{{"kind", m.z_source.name()}};
    if (m.z_source.kind == ZSource::Kind::GaussY) {
        zs["mean"] = m.z_source.mean;
        zs["sd"] = m.z_source.sd;
    }
    if (!m.z_source.pool.empty()) zs["pool"] = m.z_source.pool;

    json trees = json::array();
    for (const auto& t : m.trees) trees.push_back(json{{"nodes", nodes_to_json(t)}});
    return json{{"version", kBoostFormat},
                {"mode", m.mode == BoostMode::Estimation ? "estimation" : "distribution"},
                {"measure", m.measure.name()},
                {"config",
                 {{"trees", c.trees},
                  {"alpha", c.alpha},
                  {"knots", c.knots},
                  {"seed", c.seed},
                  {"patience", c.patience},
                  {"tree", grow_config_to_json(c.tree)}}},
                {"schema", schema_to_json(m.schema)},
                {"z_source", std::move(zs)},
                {"trees", std::move(trees)}};
}

BoostModel model_from_json(const json& j) {
    if (!j.is_object() || get_or_throw<std::string>(j, "version") != kBoostFormat)
        throw DataError(std::string("not a ") + kBoostFormat + " document");
    BoostModel m;
    const auto mode = get_or_throw<std::string>(j, "mode");
    if (mode == "estimation")
        m.mode = BoostMode::Estimation;
    else if (mode == "distribution")
        m.mode = BoostMode::Distribution;
    else
        throw DataError("unknown boost mode '" + mode + "'");
    m.measure = measure_from(j, "measure");
    const auto& jc = j.at("config");
    m.config.trees = get_or_throw<std::size_t>(jc, "trees");
    m.config.alpha = get_or_throw<double>(jc, "alpha");
    m.config.knots = get_or_throw<std::size_t>(jc, "knots");
    m.config.seed = get_or_throw<std::uint64_t>(jc, "seed");
    m.config.patience = get_or_throw<std::size_t>(jc, "patience");
    m.config.tree = grow_config_from_json(jc.at("tree"));
    m.schema = schema_from_json(j.at("schema"));

    const auto& jz = j.at("z_source");
    try {
        m.z_source = ZSource::parse(get_or_throw<std::string>(jz, "kind"));
    } catch (const ConfigError& e) {
        throw DataError(e.what());
    }
    if (jz.contains("mean")) m.z_source.mean = jz["mean"].get<double>();
    if (jz.contains("sd")) m.z_source.sd = jz["sd"].get<double>();
    if (jz.contains("pool")) m.z_source.pool = jz["pool"].get<std::vector<double>>();

    for (const auto& jt : j.at("trees")) {
        ContrastTree t(m.schema, m.measure, SampleMode::Paired, nodes_from_json(jt.at("nodes")));
        for (const auto& [id, n] : t.nodes()) {
            if (!n.is_terminal()) continue;
            const bool ok = m.mode == BoostMode::Estimation ? std::holds_alternative<double>(n.payload)
                                                            : std::holds_alternative<TransformFn>(n.payload);
            if (!ok) throw DataError("terminal " + std::to_string(id) + " lacks a matching payload");
        }
        m.trees.push_back(std::move(t));
    }
    return m;
}

json sim_model_to_json(const sim::SimModel& m) {
    return json{{"kind", "asym-logistic"},
                {"p", m.p},
                {"seed", m.seed},
                {"mode", basis_to_json(m.mode)},
                {"log_lower", basis_to_json(m.log_lower)},
                {"log_upper", basis_to_json(m.log_upper)}};
}

sim::SimModel sim_model_from_json(const json& j) {
    if (get_or_throw<std::string>(j, "kind") != "asym-logistic") throw DataError("not an asym-logistic model");
    sim::SimModel m;
    m.p = get_or_throw<std::size_t>(j, "p");
    m.seed = get_or_throw<std::uint64_t>(j, "seed");
    m.mode = basis_from_json(j.at("mode"));
    m.log_lower = basis_from_json(j.at("log_lower"));
    m.log_upper = basis_from_json(j.at("log_upper"));
    return m;
}

json hetero_model_to_json(const sim::HeteroModel& m) {
    return json{{"kind", "hetero"},
                {"p", m.p},
                {"seed", m.seed},
                {"scale_factor", m.scale_factor},
                {"location", basis_to_json(m.location)},
                {"log_scale", basis_to_json(m.log_scale)}};
}

sim::HeteroModel hetero_model_from_json(const json& j) {
    if (get_or_throw<std::string>(j, "kind") != "hetero") throw DataError("not a hetero model");
    sim::HeteroModel m;
    m.p = get_or_throw<std::size_t>(j, "p");
    m.seed = get_or_throw<std::uint64_t>(j, "seed");
    m.scale_factor = get_or_throw<double>(j, "scale_factor");
    m.location = basis_from_json(j.at("location"));
    m.log_scale = basis_from_json(j.at("log_scale"));
    return m;
}

std::string dump(const json& j) { return j.dump(1) + "\n"; }

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw DataError("'" + path + "' is not valid JSON: " + e.what());
    }
}

}  // namespace contrast
