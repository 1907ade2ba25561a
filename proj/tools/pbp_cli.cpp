// pbp: simulate constructions, run verification scenarios, sweep step sizes,
// and tabulate oracles.

#include "pbp/constructor.hpp"
#include "pbp/oracles.hpp"
#include "pbp/scenarios.hpp"

#include <CLI11.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

/// Raised for bad flags or config content; maps to exit code 2.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Flags {
    std::string config_path;
    std::string scenario;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> n_seeds;
    std::optional<double> grid_h;
    std::optional<unsigned> workers;
    std::string out;
    std::string suite;
    int sign = 1;
    bool strict = false;
    std::string seed_csv_dir;
    std::vector<double> h_values{1e-2, 1e-3, 1e-4};
    std::string oracle_id;
    double min = -3.0, max = 3.0, step = 0.1, t = 0.5;
    std::size_t points = 201;
};

fs::path default_dir() {
    const char* env = std::getenv("PBP_OUT_DIR");
    return env && *env ? fs::path(env) : fs::current_path();
}

fs::path output_file(const Flags& f, const std::string& fallback_name) {
    return f.out.empty() ? default_dir() / fallback_name : fs::path(f.out);
}

std::ofstream open_out(const fs::path& p) {
    if (p.has_parent_path()) {
        fs::create_directories(p.parent_path());
    }
    std::ofstream os(p);
    if (!os) {
        throw std::runtime_error("cannot write " + p.string());
    }
    return os;
}

boost::property_tree::ptree load_ini(const std::string& path) {
    boost::property_tree::ptree tree;
    if (path.empty()) {
        return tree;
    }
    try {
        boost::property_tree::read_ini(path, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw UsageError("config: " + std::string(e.what()));
    }
    return tree;
}

template <class T>
std::optional<T> ini_get(const boost::property_tree::ptree& tree, const std::string& key) {
    try {
        if (const auto v = tree.get_optional<T>(key)) {
            return *v;
        }
    } catch (const boost::property_tree::ptree_bad_data&) {
        throw UsageError("config: bad value for " + key);
    }
    return std::nullopt;
}

/// Defaults, then config file ([global], [scheme], [<scenario>]), then flags.
pbp::ScenarioConfig effective_config(const std::string& scenario, const Flags& f,
                                     const boost::property_tree::ptree& ini) {
    pbp::ScenarioConfig cfg;
    try {
        cfg = pbp::default_config(scenario);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    if (auto v = ini_get<std::uint64_t>(ini, "global.seed")) cfg.base_seed = *v;
    if (auto v = ini_get<unsigned>(ini, "global.workers")) cfg.workers = *v;
    if (auto v = ini_get<std::size_t>(ini, "global.n_seeds")) cfg.n_seeds = *v;
    if (auto v = ini_get<double>(ini, "scheme.h")) cfg.scheme.h = *v;
    if (auto v = ini_get<double>(ini, "scheme.gamma")) cfg.scheme.gamma = *v;
    if (auto v = ini_get<double>(ini, "scheme.delta_end")) cfg.scheme.delta_end = *v;
    if (auto v = ini_get<bool>(ini, "scheme.implicit_singular")) cfg.scheme.implicit_singular = *v;
    if (auto v = ini_get<double>(ini, "scheme.explicit_guard")) cfg.scheme.explicit_guard = *v;
    if (const auto section = ini.get_child_optional(scenario)) {
        for (const auto& [key, node] : *section) {
            if (key == "n_seeds") {
                cfg.n_seeds = ini_get<std::size_t>(*section, key).value();
            } else {
                cfg.params[key] = ini_get<double>(*section, key).value();
            }
        }
    }
    if (f.seed) cfg.base_seed = *f.seed;
    if (f.n_seeds) cfg.n_seeds = *f.n_seeds;
    if (f.grid_h) cfg.scheme.h = *f.grid_h;
    if (f.workers) cfg.workers = *f.workers;
    try {
        pbp::validate(cfg);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    return cfg;
}

void write_metadata(std::ostream& os, const json& config) {
    os << "# pbp " << pbp::kArtifactVersion << "\n# config " << config.dump() << '\n';
}

json solution_sidecar(const pbp::SolutionPath& sol, const pbp::DriftField& drift, const pbp::BrownianPath& path,
                      const pbp::ScenarioConfig& cfg) {
    json pinned = json::array();
    for (const auto& p : sol.pinned_nodes) {
        pinned.push_back({{"t", p.time}, {"component", p.component}, {"value", p.value}});
    }
    const auto& d = sol.diagnostics;
    json min_pole = json::array();
    for (double v : d.min_pole_distance) {
        min_pole.push_back(std::isfinite(v) ? json(v) : json(nullptr));
    }
    return {{"schema", "pbp.solution/1"},
            {"artifact_version", pbp::kArtifactVersion},
            {"construction", pbp::to_string(sol.construction())},
            {"drift", drift.id()},
            {"seed", path.seed()},
            {"stream_id", path.stream_id()},
            {"sign_selection", sol.sign_selection()},
            {"grid_nodes", sol.grid().size()},
            {"pinned_nodes", pinned},
            {"diagnostics",
             {{"residual", std::isnan(d.residual) ? json(nullptr) : json(d.residual)},
              {"min_pole_distance", min_pole},
              {"implicit_steps", d.implicit_steps},
              {"explicit_singular_steps", d.explicit_singular_steps}}},
            {"config", pbp::to_json(cfg)}};
}

void emit_solution(const fs::path& dir, const std::string& stem, pbp::SolutionPath sol, const pbp::DriftField& drift,
                   const pbp::BrownianPath& path, const pbp::ScenarioConfig& cfg) {
    sol.diagnostics.residual = pbp::residual(sol, drift, path, pbp::refine_midpoints(path), cfg.scheme);
    {
        auto os = open_out(dir / (stem + ".csv"));
        write_metadata(os, pbp::to_json(cfg));
        pbp::write_csv(os, sol, &path);
    }
    auto js = open_out(dir / (stem + ".json"));
    js << solution_sidecar(sol, drift, path, cfg).dump(2) << '\n';
    std::cout << "wrote " << (dir / (stem + ".csv")).string() << '\n';
}

int cmd_simulate(const Flags& f) {
    if (f.scenario.empty()) throw UsageError("simulate: --scenario is required");
    if (!f.seed) throw UsageError("simulate: --seed is required");
    if (f.sign != 1 && f.sign != -1) throw UsageError("simulate: --sign must be +1 or -1");
    const auto ini = load_ini(f.config_path);
    const auto cfg = effective_config(f.scenario, f, ini);
    const fs::path dir = f.out.empty() ? default_dir() : fs::path(f.out);
    const auto seed = cfg.base_seed;
    const std::string tag = f.scenario + "_seed" + std::to_string(seed);
    const auto& opts = cfg.scheme;

    if (f.scenario == "helper_bridge") {
        const auto drift = pbp::DriftField::helper_f();
        const auto path = pbp::generate(1, pbp::scheme_grid(drift, opts), seed, 1);
        const double x0[1] = {0.0};
        const int sel[1] = {f.sign};
        auto sol = pbp::integrate(drift, path, x0, opts, sel);
        sol.set_construction(f.sign > 0 ? pbp::Construction::bridge_pos : pbp::Construction::bridge_neg);
        emit_solution(dir, tag + (f.sign > 0 ? "_pos" : "_neg"), std::move(sol), drift, path, cfg);
    } else if (f.scenario == "sys3d") {
        const auto drift = pbp::DriftField::sys3d();
        auto path = std::make_shared<const pbp::BrownianPath>(pbp::generate(3, pbp::scheme_grid(drift, opts), seed, 3));
        auto pair = pbp::duplicate_pair(path, opts);
        std::cout << "sup distance " << pbp::format_full(pair.sup_distance()) << '\n';
        emit_solution(dir, tag + "_strong", std::move(pair.solutions[0]), drift, *path, cfg);
        emit_solution(dir, tag + "_nonadapted", std::move(pair.solutions[1]), drift, *path, cfg);
    } else if (f.scenario == "sys2d") {
        const auto drift = pbp::DriftField::sys2d();
        const auto path = pbp::generate(2, pbp::scheme_grid(drift, opts), seed, 2);
        emit_solution(dir, tag + "_pbp2d", pbp::build_2d_pathbypath(path, opts), drift, path, cfg);
    } else if (f.scenario == "product_block") {
        const auto base_drift = pbp::DriftField::sys2d();
        const auto path = pbp::generate(2, pbp::scheme_grid(base_drift, opts), seed, 8);
        emit_solution(dir, tag + "_base", pbp::build_2d_pathbypath(path, opts), base_drift, path, cfg);
        const auto blocks = static_cast<int>(std::llround(cfg.params.at("blocks")));
        for (int k = 1; k <= blocks; ++k) {
            const auto drift = pbp::DriftField::product_block(k);
            const auto scaled = pbp::rescale(path, drift.lambda());
            emit_solution(dir, tag + "_block" + std::to_string(k), pbp::build_2d_pathbypath(scaled, opts, drift), drift,
                          scaled, cfg);
        }
    } else if (f.scenario == "nosol_probe") {
        const auto grid = pbp::TimeGrid::uniform(1.0, static_cast<std::size_t>(cfg.params.at("base_steps")));
        const auto path = pbp::generate(1, grid, seed, 7);
        const std::array<double, 3> cutoffs{1e-2, 1e-3, 1e-4};
        auto os = open_out(dir / (tag + ".csv"));
        write_metadata(os, pbp::to_json(cfg));
        os << "drift,eps,step,accumulated,near_fraction,sign_changes\n";
        for (double coeff : {-0.5, 0.5}) {
            for (const auto& r : pbp::probe_nosolution(path, cutoffs, {coeff, cfg.params.at("step_exponent")})) {
                os << (coeff < 0 ? "nosol" : "bessel(2)") << ',' << pbp::format_full(r.eps) << ','
                   << pbp::format_full(r.step) << ',' << pbp::format_full(r.accumulated) << ','
                   << pbp::format_full(r.near_fraction) << ',' << r.sign_changes << '\n';
            }
        }
        std::cout << "wrote " << (dir / (tag + ".csv")).string() << '\n';
    } else {
        throw UsageError("simulate supports helper_bridge, sys2d, sys3d, product_block and nosol_probe");
    }
    return kExitPass;
}

void write_seed_tables(const fs::path& dir, const pbp::VerificationReport& rep) {
    for (std::size_t i = 0; i < rep.seed_tables.size(); ++i) {
        const auto& t = rep.seed_tables[i];
        auto os = open_out(dir / (t.scenario + "_seeds.csv"));
        write_metadata(os, pbp::to_json(rep.configs.at(i)));
        for (std::size_t c = 0; c < t.header.size(); ++c) {
            os << (c ? "," : "") << t.header[c];
        }
        os << '\n';
        for (const auto& row : t.rows) {
            for (std::size_t c = 0; c < row.size(); ++c) {
                os << (c ? "," : "") << pbp::format_full(row[c]);
            }
            os << '\n';
        }
    }
}

int cmd_verify(const Flags& f) {
    if (!f.suite.empty() && f.suite != "all") throw UsageError("verify: --suite accepts only 'all'");
    if (!f.suite.empty() && !f.scenario.empty()) throw UsageError("verify: give --suite or --scenario, not both");
    const auto ini = load_ini(f.config_path);
    std::vector<pbp::ScenarioConfig> configs;
    if (f.scenario.empty()) {
        for (const auto& id : pbp::scenario_ids()) {
            configs.push_back(effective_config(id, f, ini));
        }
    } else {
        configs.push_back(effective_config(f.scenario, f, ini));
    }
    const auto rep = pbp::run_suite(configs);
    const auto path = output_file(f, "report.json");
    auto os = open_out(path);
    os << rep.to_json().dump(2) << '\n';
    if (!f.seed_csv_dir.empty()) {
        write_seed_tables(f.seed_csv_dir, rep);
    }
    for (const auto& c : rep.checks) {
        std::cout << (c.criterion ? "C" + std::to_string(c.criterion) : std::string("  ")) << "\t"
                  << pbp::to_string(c.status) << "\t" << c.name << "\t" << pbp::format_full(c.statistic) << '\n';
    }
    std::cout << "report " << path.string() << " (" << rep.count(pbp::Status::pass) << " pass, "
              << rep.count(pbp::Status::fail) << " fail, " << rep.count(pbp::Status::inconclusive)
              << " inconclusive)\n";
    return rep.passed(f.strict) ? kExitPass : kExitFail;
}

int cmd_sweep(const Flags& f) {
    if (f.scenario.empty()) throw UsageError("sweep: --scenario is required");
    const auto ini = load_ini(f.config_path);
    pbp::ScenarioConfig cfg;
    if (f.scenario == "zero") {
        cfg.scenario = "zero";
        cfg.n_seeds = f.n_seeds.value_or(100);
        cfg.base_seed = f.seed.value_or(cfg.base_seed);
        cfg.workers = f.workers.value_or(1);
    } else {
        Flags g = f;
        g.n_seeds = f.n_seeds.value_or(100);
        cfg = effective_config(f.scenario, g, ini);
    }
    pbp::SweepTable table;
    try {
        table = pbp::sweep(cfg, f.h_values);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    const json out = table.to_json(cfg);
    std::cout << "h,n,median_residual_own_grid,median_residual_refined,statistic\n";
    for (const auto& r : table.rows) {
        std::cout << pbp::format_full(r.h) << ',' << r.n << ',' << pbp::format_full(r.residual_own) << ','
                  << pbp::format_full(r.residual_refined) << ',' << pbp::format_full(r.statistic) << '\n';
    }
    std::cout << "monotone " << (table.monotone ? "yes" : "no") << '\n';
    auto os = open_out(output_file(f, "sweep_" + f.scenario + ".json"));
    os << out.dump(2) << '\n';
    return kExitPass;
}

int cmd_oracle(const Flags& f) {
    std::ostringstream body;
    json meta{{"oracle", f.oracle_id}};
    if (f.oracle_id == "heat_sgn") {
        if (!(f.step > 0.0) || !(f.max >= f.min)) throw UsageError("oracle heat_sgn: need step > 0 and max >= min");
        const auto rows = static_cast<std::size_t>(std::llround((f.max - f.min) / f.step)) + 1;
        meta.update({{"min", f.min}, {"max", f.max}, {"step", f.step}});
        body << "x,heat_sgn\n";
        for (std::size_t i = 0; i < rows; ++i) {
            const double x = f.min + static_cast<double>(i) * f.step;
            body << pbp::format_full(x) << ',' << pbp::format_full(pbp::heat_sgn(x)) << '\n';
        }
    } else if (f.oracle_id == "bes3_marginal") {
        if (!(f.t > 0.0 && f.t < 1.0)) throw UsageError("oracle bes3_marginal: --t must lie in (0, 1)");
        if (f.points < 2) throw UsageError("oracle bes3_marginal: --points must be >= 2");
        const auto law = pbp::bes3_bridge_marginal(f.t);
        const double upper = f.t + 8.0 * std::sqrt(f.t * (1.0 - f.t));
        meta.update({{"t", f.t}, {"points", f.points}});
        body << "r,cdf\n";
        for (std::size_t i = 0; i < f.points; ++i) {
            const double r = upper * static_cast<double>(i) / static_cast<double>(f.points - 1);
            body << pbp::format_full(r) << ',' << pbp::format_full(law.cdf(r)) << '\n';
        }
    } else {
        throw UsageError("unknown oracle '" + f.oracle_id + "' (known: heat_sgn, bes3_marginal)");
    }
    std::ostringstream all;
    write_metadata(all, meta);
    all << body.str();
    if (f.out.empty() && !std::getenv("PBP_OUT_DIR")) {
        std::cout << all.str();
    } else {
        auto os = open_out(output_file(f, "oracle_" + f.oracle_id + ".csv"));
        os << all.str();
    }
    return kExitPass;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Path-by-path vs pathwise uniqueness: simulations and verification suite"};
    app.require_subcommand(1);
    Flags f;

    auto common = [&f](CLI::App* sub) {
        sub->add_option("--config", f.config_path, "INI config file")->check(CLI::ExistingFile);
        sub->add_option("--seed", f.seed, "Base seed");
        sub->add_option("--n-seeds", f.n_seeds, "Number of seeds")->check(CLI::PositiveNumber);
        sub->add_option("--grid-h", f.grid_h, "Base step size")->check(CLI::PositiveNumber);
        sub->add_option("--workers", f.workers, "Worker threads")->check(CLI::PositiveNumber);
        sub->add_option("--out", f.out, "Output path");
    };

    auto* simulate = app.add_subcommand("simulate", "Write solution CSVs for one seed");
    common(simulate);
    simulate->add_option("--scenario", f.scenario, "Scenario id");
    simulate->add_option("--sign", f.sign, "Bridge branch for helper_bridge (+1 or -1)");

    auto* verify = app.add_subcommand("verify", "Run verification scenarios and write a report");
    common(verify);
    verify->add_option("--scenario", f.scenario, "Single scenario id");
    verify->add_option("--suite", f.suite, "Scenario suite (all)");
    verify->add_flag("--strict", f.strict, "Treat inconclusive checks as failures");
    verify->add_option("--seed-csv-dir", f.seed_csv_dir, "Directory for per-seed CSVs");

    auto* sweep = app.add_subcommand("sweep", "Residual and statistic across step sizes");
    common(sweep);
    sweep->add_option("--scenario", f.scenario, "helper_bridge, sys2d, sys3d or zero");
    sweep->add_option("--h-values", f.h_values, "Step sizes")->delimiter(',');

    auto* oracle = app.add_subcommand("oracle", "Tabulate an oracle as CSV");
    oracle->add_option("id", f.oracle_id, "heat_sgn or bes3_marginal")->required();
    oracle->add_option("--min", f.min);
    oracle->add_option("--max", f.max);
    oracle->add_option("--step", f.step);
    oracle->add_option("--t", f.t);
    oracle->add_option("--points", f.points);
    oracle->add_option("--out", f.out, "Output CSV (stdout by default)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitPass : kExitUsage;
    }

    try {
        if (*simulate) return cmd_simulate(f);
        if (*verify) return cmd_verify(f);
        if (*sweep) return cmd_sweep(f);
        return cmd_oracle(f);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const pbp::ConstructionRejected& e) {
        std::cerr << "rejected: " << e.what() << '\n';
        return kExitFail;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFail;
    }
}
