#include "bss/cli.hpp"

#include "bss/ctmc.hpp"
#include "bss/desim.hpp"
#include "bss/io.hpp"
#include "bss/metrics.hpp"
#include "bss/productform.hpp"
#include "bss/routing.hpp"
#include "bss/statespace.hpp"
#include "bss/traffic.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

namespace bss::cli {

int exit_code(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::config: return kConfig;
        case ErrorKind::invalid_params: return kInvalidParams;
        case ErrorKind::resource_limit: return kResourceLimit;
        case ErrorKind::non_convergence: return kNonConvergence;
        case ErrorKind::regime: return kRegime;
        case ErrorKind::mismatched_space: return kMismatchedSpace;
        case ErrorKind::io: return kIo;
        case ErrorKind::not_a_member:
        case ErrorKind::out_of_range:
        case ErrorKind::absorbing_state:
        case ErrorKind::singular:
        case ErrorKind::degenerate: return kNumerical;
    }
    return kInternal;
}

namespace {

using io::json;

std::string utc_now() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct Common {
    std::string out_prefix;
    std::string timestamp;
};

struct Options {
    Common common;
    std::string config;
    // solver
    std::optional<std::size_t> max_states;
    std::optional<std::size_t> direct_limit;
    // enumerate
    std::string dump_states, dump_literal, dump_jump;
    // solve-ctmc
    std::string dump_generator;
    // solve-pf
    std::string convention = "standard";
    std::string beta = "zero";
    // simulate
    std::optional<std::uint64_t> seed;
    std::optional<int> replications;
    std::optional<double> horizon, warmup;
    std::string trace;
    // metrics / compare
    std::string source;
    std::vector<std::string> results;
};

class Runner {
public:
    Runner(Options opts, std::string subcommand, std::ostream& out)
        : opts_(std::move(opts)), subcommand_(std::move(subcommand)), out_(out) {
        manifest_.subcommand = subcommand_;
        manifest_.config_path = opts_.config;
        manifest_.timestamp = opts_.common.timestamp.empty() ? utc_now() : opts_.common.timestamp;
        if (opts_.common.out_prefix.empty()) opts_.common.out_prefix = subcommand_;
    }

    int run() {
        if (subcommand_ == "validate") return validate_cmd();
        if (subcommand_ == "enumerate") return enumerate_cmd();
        if (subcommand_ == "solve-ctmc") return solve_ctmc_cmd();
        if (subcommand_ == "solve-pf") return solve_pf_cmd();
        if (subcommand_ == "simulate") return simulate_cmd();
        if (subcommand_ == "metrics") return metrics_cmd();
        if (subcommand_ == "compare") return compare_cmd();
        throw Error(ErrorKind::config, "unknown subcommand " + subcommand_);
    }

private:
    void load_config() {
        config_ = io::read_json(opts_.config);
        params_ = io::params_from_json(config_);
        settings_ = io::solver_settings(config_);
        if (opts_.max_states) settings_.max_states = *opts_.max_states;
        if (opts_.direct_limit) settings_.direct_limit = *opts_.direct_limit;
        manifest_.options["max_states"] = settings_.max_states;
        manifest_.options["direct_limit"] = settings_.direct_limit;
    }

    json envelope() const {
        json j;
        j["manifest"] = io::to_json(manifest_);
        j["params"] = io::to_json(params_);
        return j;
    }

    void emit(const json& result, const std::string& csv) {
        const std::string json_path = opts_.common.out_prefix + ".json";
        const std::string csv_path = opts_.common.out_prefix + ".csv";
        io::write_text(json_path, result.dump(2) + "\n");
        io::write_text(csv_path, csv);
        out_ << "wrote " << json_path << " and " << csv_path << '\n';
    }

    static void dump_to(const std::string& path, const auto& writer) {
        if (path.empty()) return;
        std::ofstream f(path);
        if (!f) throw Error(ErrorKind::io, "cannot write " + path);
        writer(f);
    }

    int validate_cmd() {
        load_config();
        const auto report = validate(params_);
        auto j = envelope();
        j["validation"] = io::to_json(report);
        std::ostringstream csv;
        csv << io::csv_header(manifest_) << "code,message,indices\n";
        for (const auto& v : report.violations) {
            csv << v.code << ",\"" << v.message << "\",";
            for (std::size_t k = 0; k < v.indices.size(); ++k) csv << (k ? ";" : "") << v.indices[k];
            csv << '\n';
        }
        emit(j, csv.str());
        out_ << (report.ok() ? "valid" : "INVALID") << "; regime " << to_string(report.regime) << " (NC=" << report.total_bikes
             << ", K=" << report.capacity << ")\n";
        for (const auto& v : report.violations) out_ << "  [" << v.code << "] " << v.message << '\n';
        return report.ok() ? kOk : kInvalidParams;
    }

    StateSpace checked_space() {
        require_valid(params_);
        return StateSpace::enumerate(params_, settings_.max_states);
    }

    int enumerate_cmd() {
        load_config();
        const auto space = checked_space();
        const auto box = box_size(params_);
        const auto reach = reachable_class(space, params_);
        const auto literal = literal_routing_entries(space, params_);
        const auto diag = literal_diagnostics(literal, params_);
        dump_to(opts_.dump_states, [&](std::ostream& os) { space.dump(os); });
        dump_to(opts_.dump_literal, [&](std::ostream& os) { literal.dump(os); });
        dump_to(opts_.dump_jump, [&](std::ostream& os) { jump_chain(space, params_).dump(os); });

        auto j = envelope();
        j["regime"] = to_string(regime_of(params_));
        j["state_count"] = space.size();
        j["box_size"] = box.exact ? json(*box.exact) : json(nullptr);
        j["box_size_log10"] = box.log10;
        j["box_size_differs_from_state_count"] = !box.exact || *box.exact != space.size();
        j["reachable_count"] = reach.size();
        j["literal_routing"] = {{"nonzeros", diag.nonzeros},
                                {"min_row_sum", diag.min_row_sum},
                                {"max_row_sum", diag.max_row_sum},
                                {"stochastic_rows", diag.stochastic_rows},
                                {"zero_count", diag.actual_zero_count},
                                {"printed_minimal_zero_count", diag.printed_zero_count}};
        std::ostringstream csv;
        csv << io::csv_header(manifest_) << "quantity,value\n"
            << "state_count," << space.size() << '\n'
            << "box_size," << (box.exact ? std::to_string(*box.exact) : "1e" + io::format_double(box.log10)) << '\n'
            << "reachable_count," << reach.size() << '\n'
            << "literal_nonzeros," << diag.nonzeros << '\n';
        emit(j, csv.str());
        out_ << "|Omega| = " << space.size() << ", box size = "
             << (box.exact ? std::to_string(*box.exact) : "10^" + io::format_double(box.log10))
             << ", reachable = " << reach.size() << '\n';
        if (!box.exact || *box.exact != space.size()) {
            out_ << "note: the box size (K+1)^N (NC+1)^(2N(N-1)) counts unconstrained vectors; |Omega| enforces bike conservation\n";
        }
        return kOk;
    }

    json distribution_result(const StationaryDistribution& dist, const StateSpace& space) {
        auto j = envelope();
        j["source"] = to_string(dist.source);
        j["space_size"] = space.size();
        j["metrics"] = io::to_json(performance_report(dist, space));
        return j;
    }

    int solve_ctmc_cmd() {
        load_config();
        const auto space = checked_space();
        StationaryOptions so;
        so.direct_limit = settings_.direct_limit;
        so.max_iterations = settings_.max_iterations;
        so.tolerance = settings_.tolerance;
        const auto sol = solve_ctmc(space, params_, so);
        dump_to(opts_.dump_generator, [&](std::ostream& os) { build_generator(space, params_).dump(os); });

        auto j = distribution_result(sol.distribution, space);
        j["solver"] = {{"method", sol.method}, {"residual", sol.residual}, {"iterations", sol.iterations},
                       {"reachable_count", sol.reachable.size()}};
        j["distribution"] = io::distribution_json(sol.distribution, &space);
        emit(j, io::distribution_csv(manifest_, sol.distribution, space));
        out_ << "CTMC solved on " << sol.reachable.size() << " reachable states, residual " << sol.residual << '\n';
        return kOk;
    }

    int solve_pf_cmd() {
        load_config();
        manifest_.options["convention"] = opts_.convention;
        manifest_.options["beta"] = opts_.beta;
        Convention conv;
        if (opts_.convention == "literal") {
            conv = Convention::literal;
        } else if (opts_.convention == "standard") {
            conv = Convention::standard;
        } else {
            throw Error(ErrorKind::config, "--convention must be literal or standard");
        }
        const auto space = checked_space();
        const auto n = static_cast<std::size_t>(params_.N);

        VisitRatios ratios;
        std::optional<FixedPointResult> fixed;
        if (opts_.beta == "zero") {
            ratios = solve_node_level(params_, std::vector<double>(n, 0.0));
        } else if (opts_.beta == "fixed-point") {
            fixed = fixed_point_beta(params_, full_station_evaluator(space, params_, conv));
            ratios = fixed->ratios;
        } else if (opts_.beta.rfind("fixed=", 0) == 0) {
            std::vector<double> beta;
            std::stringstream ss(opts_.beta.substr(6));
            for (std::string item; std::getline(ss, item, ',');) {
                try {
                    beta.push_back(std::stod(item));
                } catch (const std::exception&) {
                    throw Error(ErrorKind::config, "bad beta value '" + item + "'");
                }
            }
            if (beta.size() != n) throw Error(ErrorKind::config, "--beta fixed=<list> needs N values");
            ratios = solve_node_level(params_, beta);
        } else {
            throw Error(ErrorKind::config, "--beta must be zero, fixed=<list> or fixed-point");
        }

        const auto norm = normalize_direct(space, ratios, params_, conv);
        const auto reach = reachable_class(space, params_);
        CompensatedSum outside;
        for (std::size_t r = 0; r < space.size(); ++r) {
            if (!reach.contains(r)) outside.add(norm.distribution.probability[r]);
        }

        auto j = distribution_result(norm.distribution, space);
        j["convention"] = to_string(conv);
        j["G"] = norm.G;
        j["log_G"] = norm.log_G;
        if (conv == Convention::standard && regime_of(params_) == Regime::no_full) {
            j["G_convolution"] = normalize_convolution(params_, ratios);
        }
        j["mass_outside_reachable"] = outside.value();
        j["visit_ratios"] = io::to_json(ratios);
        if (fixed) {
            j["fixed_point"] = {{"converged", fixed->converged},
                                {"iterations", fixed->iterations},
                                {"last_change", fixed->last_change},
                                {"full_probability", fixed->full_probability}};
        }
        j["distribution"] = io::distribution_json(norm.distribution, &space);
        emit(j, io::distribution_csv(manifest_, norm.distribution, space));
        out_ << "product form (" << to_string(conv) << "): G = " << norm.G << ", mass outside reachable class "
             << outside.value() << '\n';
        return kOk;
    }

    int simulate_cmd() {
        load_config();
        auto cfg = io::simulation_settings(config_);
        if (opts_.seed) cfg.seed = *opts_.seed;
        if (opts_.replications) cfg.replications = *opts_.replications;
        if (opts_.horizon) cfg.horizon = *opts_.horizon;
        if (opts_.warmup) cfg.warmup = *opts_.warmup;
        if (!opts_.trace.empty()) cfg.trace_events = 1000;
        manifest_.options["seed"] = cfg.seed;
        manifest_.options["replications"] = cfg.replications;
        manifest_.options["horizon"] = cfg.horizon;
        manifest_.options["warmup"] = cfg.warmup;
        const auto space = checked_space();
        const auto est = simulate(params_, cfg);
        const auto dist = est.distribution(space.size());
        dump_to(opts_.trace, [&](std::ostream& os) {
            os << "time,kind,station,source,destination\n";
            for (const auto& t : est.trace) {
                os << io::format_double(t.time) << ',' << t.kind << ',' << t.station << ',' << t.source << ','
                   << t.destination << '\n';
            }
        });

        auto j = distribution_result(dist, space);
        json stations = json::array();
        for (std::size_t i = 0; i < est.empty.size(); ++i) {
            stations.push_back({{"station", i + 1},
                                {"empty", io::to_json(est.empty[i])},
                                {"full", io::to_json(est.full[i])},
                                {"problematic", io::to_json(est.problematic[i])},
                                {"mean_occupancy", io::to_json(est.mean_occupancy[i])}});
        }
        j["estimates"] = {{"replications", est.replications},
                          {"stations", std::move(stations)},
                          {"riding", io::to_json(est.riding)},
                          {"events", est.events},
                          {"lost_customers", est.lost_customers},
                          {"redirects", est.redirects},
                          {"conservation_checks", est.conservation_checks}};
        json table = io::distribution_json(dist, &space);
        for (std::size_t k = 0; k < table.size(); ++k) {
            table[k]["std_error"] = est.state_probability[k].std_error;
            table[k]["ci95_half_width"] = est.state_probability[k].ci_half_width;
        }
        j["distribution"] = std::move(table);
        emit(j, io::distribution_csv(manifest_, dist, space, &est));
        out_ << "simulated " << est.replications << " replications, " << est.events << " events, "
             << est.lost_customers << " lost customers\n";
        return kOk;
    }

    int metrics_cmd() {
        manifest_.config_path = opts_.source;
        manifest_.options["source"] = opts_.source;
        const auto result = io::read_json(opts_.source);
        if (!result.contains("params")) throw Error(ErrorKind::config, "result file has no params");
        params_ = io::params_from_json(result.at("params"));
        const auto space = checked_space();
        const auto dist = io::distribution_from_json(result);
        if (dist.space_size != space.size()) {
            throw Error(ErrorKind::mismatched_space, "distribution does not match the embedded parameters");
        }
        const auto report = performance_report(dist, space);
        auto j = envelope();
        j["metrics"] = io::to_json(report);
        emit(j, io::report_csv(manifest_, report));
        for (std::size_t i = 0; i < report.stations.size(); ++i) {
            out_ << "station " << i + 1 << ": problematic " << report.stations[i].problematic << ", Q = "
                 << report.queues.station[i] << '\n';
        }
        out_ << "Q0 = " << report.queues.riding_direct << " (complement " << report.queues.riding_complement << ")\n";
        return kOk;
    }

    int compare_cmd() {
        manifest_.options["results"] = opts_.results;
        if (opts_.results.size() < 2) throw Error(ErrorKind::config, "compare needs at least two result files");
        std::vector<StationaryDistribution> dists;
        std::optional<json> params;
        for (const auto& path : opts_.results) {
            const auto result = io::read_json(path);
            if (!result.contains("params")) throw Error(ErrorKind::config, path + " has no params");
            if (params && *params != result.at("params")) {
                throw Error(ErrorKind::mismatched_space, path + " was produced for different parameters");
            }
            params = result.at("params");
            dists.push_back(io::distribution_from_json(result));
        }
        params_ = io::params_from_json(*params);
        const auto block = compare(dists);

        auto j = envelope();
        json pairs = json::array();
        std::ostringstream csv;
        csv << io::csv_header(manifest_)
            << "first,second,first_source,second_source,total_variation,max_abs_difference,"
               "first_mass_outside_second,second_mass_outside_first\n";
        for (const auto& p : block.pairs) {
            pairs.push_back({{"first", opts_.results[p.first]},
                             {"second", opts_.results[p.second]},
                             {"first_source", to_string(block.sources[p.first])},
                             {"second_source", to_string(block.sources[p.second])},
                             {"total_variation", p.total_variation},
                             {"max_abs_difference", p.max_abs_difference},
                             {"first_mass_outside_second", p.first_mass_outside_second},
                             {"second_mass_outside_first", p.second_mass_outside_first}});
            csv << opts_.results[p.first] << ',' << opts_.results[p.second] << ',' << to_string(block.sources[p.first])
                << ',' << to_string(block.sources[p.second]) << ',' << io::format_double(p.total_variation) << ','
                << io::format_double(p.max_abs_difference) << ',' << io::format_double(p.first_mass_outside_second)
                << ',' << io::format_double(p.second_mass_outside_first) << '\n';
            out_ << opts_.results[p.first] << " vs " << opts_.results[p.second] << ": TV = " << p.total_variation
                 << '\n';
        }
        j["comparisons"] = std::move(pairs);
        emit(j, csv.str());
        return kOk;
    }

    Options opts_;
    std::string subcommand_;
    std::ostream& out_;
    io::RunManifest manifest_;
    json config_;
    NetworkParams params_;
    io::SolverSettings settings_;
};

void error_record(std::ostream& err, ErrorKind kind, int code, const std::string& message) {
    json j;
    j["error"] = {{"kind", to_string(kind)}, {"exit_code", code}, {"message", message}};
    err << j.dump() << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Closed queueing network analysis of bike-sharing systems", "bss"};
    app.require_subcommand(1, 1);
    Options opts;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("-o,--out", opts.common.out_prefix, "Output prefix for <prefix>.json and <prefix>.csv");
        sub->add_option("--timestamp", opts.common.timestamp, "Manifest timestamp (default: current UTC time)");
    };
    auto add_config = [&](CLI::App* sub) {
        sub->add_option("config", opts.config, "Model config file (JSON)")->required();
        sub->add_option("--max-states", opts.max_states, "State-space size cap");
        add_common(sub);
    };

    auto* validate_sub = app.add_subcommand("validate", "Check model parameters and report the regime");
    add_config(validate_sub);

    auto* enumerate_sub = app.add_subcommand("enumerate", "Count the state space, box size and reachable class");
    add_config(enumerate_sub);
    enumerate_sub->add_option("--dump-states", opts.dump_states, "Write one state per line");
    enumerate_sub->add_option("--dump-literal", opts.dump_literal, "Write the literal routing matrix (row col value)");
    enumerate_sub->add_option("--dump-jump", opts.dump_jump, "Write the jump chain (row col value)");

    auto* ctmc_sub = app.add_subcommand("solve-ctmc", "Exact stationary distribution of the CTMC");
    add_config(ctmc_sub);
    ctmc_sub->add_option("--direct-limit", opts.direct_limit, "Largest state count solved by sparse LU");
    ctmc_sub->add_option("--dump-generator", opts.dump_generator, "Write the generator (row col value)");

    auto* pf_sub = app.add_subcommand("solve-pf", "Product-form stationary distribution");
    add_config(pf_sub);
    pf_sub->add_option("--convention", opts.convention, "literal or standard")->check(CLI::IsMember({"literal", "standard"}));
    pf_sub->add_option("--beta", opts.beta, "zero | fixed=<b1,...,bN> | fixed-point");

    auto* sim_sub = app.add_subcommand("simulate", "Discrete-event simulation with replications");
    add_config(sim_sub);
    sim_sub->add_option("--seed", opts.seed, "Base seed");
    sim_sub->add_option("--replications", opts.replications, "Independent replications");
    sim_sub->add_option("--horizon", opts.horizon, "Simulated time per replication");
    sim_sub->add_option("--warmup", opts.warmup, "Discarded initial time");
    sim_sub->add_option("--trace", opts.trace, "Write the first 1000 events of replication 0 as CSV");

    auto* metrics_sub = app.add_subcommand("metrics", "Performance measures of a result file");
    metrics_sub->add_option("--source", opts.source, "Result file from solve-ctmc, solve-pf or simulate")->required();
    add_common(metrics_sub);

    auto* compare_sub = app.add_subcommand("compare", "Pairwise total-variation distances between result files");
    compare_sub->add_option("results", opts.results, "Result files")->required();
    add_common(compare_sub);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        error_record(err, ErrorKind::config, kUsage, e.what());
        return kUsage;
    }

    const std::string name = app.get_subcommands().front()->get_name();
    try {
        Runner runner(opts, name, out);
        return runner.run();
    } catch (const Error& e) {
        const int code = exit_code(e.kind());
        error_record(err, e.kind(), code, e.what());
        return code;
    } catch (const std::exception& e) {
        json j;
        j["error"] = {{"kind", "internal"}, {"exit_code", static_cast<int>(kInternal)}, {"message", e.what()}};
        err << j.dump() << '\n';
        return kInternal;
    }
}

}  // namespace bss::cli
