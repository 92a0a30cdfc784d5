#include "linobs/io.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "linobs/format.hpp"

namespace linobs {

namespace {

using nlohmann::json;

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw std::runtime_error("malformed JSON in " + path + ": " + e.what());
    }
    return doc;
}

void dump_json(const std::string& path, const json& doc) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << doc.dump(2) << '\n';
}

json trained_map_to_json(const TrainedMap& map) {
    json doc;
    doc["type"] = "mlp";
    doc["input_dim"] = map.cfg.input_dim;
    doc["hidden1"] = map.cfg.hidden1;
    doc["hidden2"] = map.cfg.hidden2;
    doc["output_dim"] = map.cfg.output_dim;
    doc["activation"] =
        map.cfg.activation == MlpConfig::Activation::Sigmoid ? "sigmoid" : "identity";
    doc["params"] = map.params;
    doc["source"] = map.source;
    doc["schedule"] = map.schedule;
    doc["seed"] = map.seed;
    doc["final_cost"] = map.final_cost;
    return doc;
}

TrainedMap trained_map_from_json(const json& doc, const std::string& path) {
    try {
        MlpConfig cfg;
        cfg.input_dim = doc.at("input_dim").get<int>();
        cfg.hidden1 = doc.at("hidden1").get<int>();
        cfg.hidden2 = doc.at("hidden2").get<int>();
        cfg.output_dim = doc.at("output_dim").get<int>();
        const std::string act = doc.at("activation").get<std::string>();
        if (act == "sigmoid")
            cfg.activation = MlpConfig::Activation::Sigmoid;
        else if (act == "identity")
            cfg.activation = MlpConfig::Activation::Identity;
        else
            throw std::runtime_error("unknown activation '" + act + "'");
        TrainedMap map(cfg, doc.at("params").get<Vec>());
        map.source = doc.value("source", std::string{});
        map.schedule = doc.value("schedule", std::vector<double>{});
        map.seed = doc.value("seed", std::uint64_t{0});
        map.final_cost = doc.value("final_cost", 0.0);
        return map;
    } catch (const json::exception& e) {
        throw std::runtime_error("invalid network document " + path + ": " + e.what());
    }
}

json poly_map_to_json(const PolyMap& map) {
    json comps = json::array();
    for (const TruncatedSeries& s : map.components) {
        json terms = json::array();
        const SeriesLayout& layout = s.layout();
        for (int i = 0; i < layout.size(); ++i) {
            if (s.coeffs()[i] == 0.0) continue;
            json term;
            term["coeff"] = s.coeffs()[i];
            const auto exps = layout.exponents(i);
            term["exponents"] = std::vector<int>(exps.begin(), exps.end());
            terms.push_back(term);
        }
        comps.push_back(terms);
    }
    json doc;
    doc["type"] = "poly";
    doc["arity"] = map.arity();
    doc["order"] = map.order();
    doc["components"] = comps;
    return doc;
}

PolyMap poly_map_from_json(const json& doc, const std::string& path) {
    try {
        const int arity = doc.at("arity").get<int>();
        const int order = doc.at("order").get<int>();
        PolyMap map;
        for (const json& terms : doc.at("components")) {
            TruncatedSeries s(arity, order);
            for (const json& term : terms) {
                const auto exps = term.at("exponents").get<std::vector<int>>();
                s.set_coeff(exps, term.at("coeff").get<double>());
            }
            map.components.push_back(std::move(s));
        }
        if (map.components.empty()) throw std::runtime_error("no components");
        return map;
    } catch (const json::exception& e) {
        throw std::runtime_error("invalid polynomial document " + path + ": " + e.what());
    }
}

} // namespace

void save_trained_map(const std::string& path, const TrainedMap& map) {
    dump_json(path, trained_map_to_json(map));
}

TrainedMap load_trained_map(const std::string& path) {
    const json doc = load_json(path);
    if (doc.value("type", std::string{}) != "mlp")
        throw std::runtime_error(path + ": not a network document");
    return trained_map_from_json(doc, path);
}

void save_poly_map(const std::string& path, const PolyMap& map) {
    dump_json(path, poly_map_to_json(map));
}

PolyMap load_poly_map(const std::string& path) {
    const json doc = load_json(path);
    if (doc.value("type", std::string{}) != "poly")
        throw std::runtime_error(path + ": not a polynomial document");
    return poly_map_from_json(doc, path);
}

std::unique_ptr<TransformMap> load_transform(const std::string& path) {
    const json doc = load_json(path);
    const std::string type = doc.value("type", std::string{});
    if (type == "mlp")
        return std::make_unique<TrainedMap>(trained_map_from_json(doc, path));
    if (type == "poly")
        return std::make_unique<PolyTransform>(poly_map_from_json(doc, path));
    throw std::runtime_error(path + ": unknown map type '" + type + "'");
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
    const int n = traj.n;
    os << "t";
    for (int i = 1; i <= n; ++i) os << ",x" << i;
    os << ",y";
    for (int i = 1; i <= n; ++i) os << ",z" << i;
    for (int i = 1; i <= n; ++i) os << ",xhat" << i;
    os << ",ez_inf,ex_inf,newton_iters\n";
    for (std::size_t t = 0; t < traj.size(); ++t) {
        os << t;
        for (int i = 0; i < n; ++i) os << ',' << fmt_double(traj.x[t][i]);
        os << ',' << fmt_double(traj.y[t]);
        for (int i = 0; i < n; ++i) os << ',' << fmt_double(traj.z[t][i]);
        for (int i = 0; i < n; ++i) os << ',' << fmt_double(traj.xhat[t][i]);
        os << ',' << fmt_double(inf_norm(traj.ez[t]));
        os << ',' << fmt_double(inf_norm(traj.ex[t]));
        os << ',' << traj.newton_iters[t] << '\n';
    }
}

void write_error_field_csv(std::ostream& os, const std::vector<Vec>& points,
                           const std::vector<Vec>& errors) {
    if (points.size() != errors.size())
        throw std::invalid_argument("write_error_field_csv: row count mismatch");
    if (points.empty()) throw std::invalid_argument("write_error_field_csv: empty field");
    const std::size_t n = points[0].size();
    const std::size_t m = errors[0].size();
    for (std::size_t i = 1; i <= n; ++i) os << (i > 1 ? "," : "") << 'x' << i;
    for (std::size_t i = 1; i <= m; ++i) os << ",e" << i;
    os << '\n';
    for (std::size_t r = 0; r < points.size(); ++r) {
        for (std::size_t i = 0; i < n; ++i) os << (i ? "," : "") << fmt_double(points[r][i]);
        for (std::size_t i = 0; i < m; ++i) os << ',' << fmt_double(errors[r][i]);
        os << '\n';
    }
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

} // namespace linobs
