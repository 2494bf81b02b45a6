#include "bss/io.hpp"

#include "bss/error.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace bss::io {

namespace {

[[noreturn]] void config_error(const std::string& message) { throw Error(ErrorKind::config, message); }

const json& field(const json& obj, const char* key) {
    if (!obj.contains(key)) config_error(std::string("missing field '") + key + "'");
    return obj.at(key);
}

int int_field(const json& obj, const char* key) {
    const auto& v = field(obj, key);
    if (!v.is_number_integer()) config_error(std::string("field '") + key + "' must be an integer");
    return v.get<int>();
}

double number(const json& v, const std::string& where) {
    if (!v.is_number()) config_error(where + " must be a number");
    return v.get<double>();
}

Eigen::MatrixXd matrix_field(const json& obj, const char* key, int n) {
    const auto& v = field(obj, key);
    if (!v.is_array() || static_cast<int>(v.size()) != n) {
        config_error(std::string("field '") + key + "' must be an array of N rows");
    }
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        const auto& row = v[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<int>(row.size()) != n) {
            config_error(std::string("row ") + std::to_string(i + 1) + " of '" + key + "' must have N entries");
        }
        for (int j = 0; j < n; ++j) {
            const auto& x = row[static_cast<std::size_t>(j)];
            if (i == j && x.is_null()) continue;
            m(i, j) = number(x, std::string(key) + "[" + std::to_string(i) + "][" + std::to_string(j) + "]");
        }
    }
    return m;
}

json matrix_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

NetworkParams params_from_json(const json& config) {
    if (!config.is_object()) config_error("config must be a JSON object");
    NetworkParams p;
    p.N = int_field(config, "N");
    p.C = int_field(config, "C");
    p.K = int_field(config, "K");
    if (p.N < 1 || p.N > 64) config_error("N must be between 1 and 64");
    const auto& lambda = field(config, "lambda");
    if (!lambda.is_array() || static_cast<int>(lambda.size()) != p.N) config_error("'lambda' must have N entries");
    for (std::size_t i = 0; i < lambda.size(); ++i) p.lambda.push_back(number(lambda[i], "lambda[" + std::to_string(i) + "]"));
    p.p_first = matrix_field(config, "p_first", p.N);
    p.mu = matrix_field(config, "mu", p.N);
    p.alpha = matrix_field(config, "alpha", p.N);
    p.xi = matrix_field(config, "xi", p.N);
    return p;
}

json to_json(const NetworkParams& params) {
    json j;
    j["N"] = params.N;
    j["C"] = params.C;
    j["K"] = params.K;
    j["lambda"] = params.lambda;
    j["p_first"] = matrix_json(params.p_first);
    j["mu"] = matrix_json(params.mu);
    j["alpha"] = matrix_json(params.alpha);
    j["xi"] = matrix_json(params.xi);
    return j;
}

json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) config_error("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        config_error(path.string() + ": " + e.what());
    }
}

NetworkParams load_params(const std::filesystem::path& path) { return params_from_json(read_json(path)); }

SolverSettings solver_settings(const json& config) {
    SolverSettings s;
    if (!config.contains("solver")) return s;
    const auto& section = config.at("solver");
    if (!section.is_object()) config_error("'solver' must be an object");
    try {
        s.max_states = section.value("max_states", s.max_states);
        s.direct_limit = section.value("direct_limit", s.direct_limit);
        s.max_iterations = section.value("max_iterations", s.max_iterations);
        s.tolerance = section.value("tolerance", s.tolerance);
    } catch (const json::exception& e) {
        config_error(std::string("bad 'solver' section: ") + e.what());
    }
    return s;
}

SimConfig simulation_settings(const json& config) {
    SimConfig c;
    if (!config.contains("simulation")) return c;
    const auto& section = config.at("simulation");
    if (!section.is_object()) config_error("'simulation' must be an object");
    try {
        c.horizon = section.value("horizon", c.horizon);
        c.warmup = section.value("warmup", c.warmup);
        c.replications = section.value("replications", c.replications);
        c.seed = section.value("seed", c.seed);
    } catch (const json::exception& e) {
        config_error(std::string("bad 'simulation' section: ") + e.what());
    }
    return c;
}

json to_json(const RunManifest& m) {
    json j;
    j["config_path"] = m.config_path;
    j["subcommand"] = m.subcommand;
    j["options"] = m.options;
    j["tool_version"] = m.tool_version;
    j["timestamp"] = m.timestamp;
    return j;
}

json to_json(const ValidationReport& report) {
    json j;
    j["ok"] = report.ok();
    j["regime"] = to_string(report.regime);
    j["total_bikes"] = report.total_bikes;
    j["K"] = report.capacity;
    j["NC_ge_K"] = report.full_reachable();
    json violations = json::array();
    for (const auto& v : report.violations) {
        violations.push_back({{"code", v.code}, {"message", v.message}, {"indices", v.indices}});
    }
    j["violations"] = std::move(violations);
    return j;
}

json to_json(const VisitRatios& ratios) {
    json j;
    j["station"] = ratios.station;
    j["road1"] = matrix_json(ratios.road1);
    j["road2"] = matrix_json(ratios.road2);
    j["beta"] = ratios.beta;
    return j;
}

json to_json(const PerformanceReport& report) {
    json j;
    j["source"] = to_string(report.source);
    json stations = json::array();
    for (std::size_t i = 0; i < report.stations.size(); ++i) {
        const auto& s = report.stations[i];
        stations.push_back({{"station", i + 1},
                            {"empty", s.empty},
                            {"full", s.full},
                            {"problematic", s.problematic},
                            {"mean_occupancy", report.queues.station[i]}});
    }
    j["stations"] = std::move(stations);
    j["riding_direct"] = report.queues.riding_direct;
    j["riding_complement"] = report.queues.riding_complement;
    j["mean_problematic_extension"] = report.mean_problematic;
    return j;
}

json to_json(const Estimate& e) {
    return {{"mean", e.mean}, {"std_error", e.std_error}, {"ci95_half_width", e.ci_half_width}};
}

json distribution_json(const StationaryDistribution& dist, const StateSpace* space) {
    json table = json::array();
    for (std::size_t k = 0; k < dist.ranks.size(); ++k) {
        json row;
        row["rank"] = dist.ranks[k];
        if (space) {
            const auto s = space->state(dist.ranks[k]);
            row["state"] = std::vector<int>(s.begin(), s.end());
        }
        row["p"] = dist.probability[k];
        table.push_back(std::move(row));
    }
    return table;
}

Source source_from_string(const std::string& name) {
    for (auto s : {Source::product_form_literal, Source::product_form_standard, Source::ctmc, Source::simulation}) {
        if (name == to_string(s)) return s;
    }
    config_error("unknown distribution source '" + name + "'");
}

StationaryDistribution distribution_from_json(const json& result) {
    StationaryDistribution d;
    try {
        d.source = source_from_string(result.at("source").get<std::string>());
        d.space_size = result.at("space_size").get<std::size_t>();
        for (const auto& row : result.at("distribution")) {
            d.ranks.push_back(row.at("rank").get<std::size_t>());
            d.probability.push_back(row.at("p").get<double>());
        }
    } catch (const json::exception& e) {
        config_error(std::string("result file has no readable distribution: ") + e.what());
    }
    return d;
}

std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return {buf, res.ptr};
}

std::string csv_header(const RunManifest& manifest) { return "# manifest: " + to_json(manifest).dump() + "\n"; }

std::string distribution_csv(const RunManifest& manifest, const StationaryDistribution& dist, const StateSpace& space,
                             const SimEstimate* estimate) {
    std::ostringstream os;
    os << csv_header(manifest);
    os << "rank";
    for (std::size_t c = 0; c < space.dimension(); ++c) {
        const auto comp = space.layout().describe(c);
        if (comp.kind == StateLayout::Kind::station) {
            os << ",n" << comp.from + 1;
        } else {
            os << ",m" << comp.cls << '_' << comp.from + 1 << '_' << comp.to + 1;
        }
    }
    os << ",probability";
    if (estimate) os << ",std_error,ci95_half_width";
    os << '\n';
    for (std::size_t k = 0; k < dist.ranks.size(); ++k) {
        os << dist.ranks[k];
        for (int v : space.state(dist.ranks[k])) os << ',' << v;
        os << ',' << format_double(dist.probability[k]);
        if (estimate) {
            os << ',' << format_double(estimate->state_probability[k].std_error) << ','
               << format_double(estimate->state_probability[k].ci_half_width);
        }
        os << '\n';
    }
    return os.str();
}

std::string report_csv(const RunManifest& manifest, const PerformanceReport& report) {
    std::ostringstream os;
    os << csv_header(manifest);
    os << "station,empty,full,problematic,mean_occupancy\n";
    for (std::size_t i = 0; i < report.stations.size(); ++i) {
        const auto& s = report.stations[i];
        os << i + 1 << ',' << format_double(s.empty) << ',' << format_double(s.full) << ','
           << format_double(s.problematic) << ',' << format_double(report.queues.station[i]) << '\n';
    }
    return os.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
    out << text;
    if (!out) throw Error(ErrorKind::io, "write failed for " + path.string());
}

}  // namespace bss::io
