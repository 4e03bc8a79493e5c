#include "scenopt/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "scenopt/detail/parallel.hpp"
#include "scenopt/grid.hpp"
#include "scenopt/presets.hpp"
#include "scenopt/risk_bounds.hpp"
#include "scenopt/sphere.hpp"
#include "scenopt/version.hpp"

namespace scenopt::cli {

namespace {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

struct Common {
    std::uint64_t seed = 1;
    int jobs = detail::default_jobs();
    std::string out_path;
    std::string format = "csv";
    std::uint64_t config_hash = 0;
};

std::string meta_comment(const Common& c) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "# scenopt %s config=%016llx seed=%llu\n", kVersion,
                  (unsigned long long)c.config_hash, (unsigned long long)c.seed);
    return buf;
}

nlohmann::ordered_json meta_json(const Common& c) {
    char hex[32];
    std::snprintf(hex, sizeof hex, "%016llx", (unsigned long long)c.config_hash);
    return {{"version", kVersion}, {"config", hex}, {"seed", c.seed}};
}

void emit(const Common& c, const std::string& content, std::ostream& out,
          const std::string& suffix = "") {
    if (c.out_path.empty()) {
        out << content;
        return;
    }
    const std::string path = c.out_path + suffix;
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open output file: " + path);
    f << content;
    if (!f) throw IoError("failed writing output file: " + path);
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open input file: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

int cmd_bounds(const Common& common, std::int64_t n, std::int64_t d, double beta,
               std::int64_t rmax, bool figure1, bool samples_for, bool paper_sizes, double eps,
               std::int64_t r, std::ostream& out) {
    if (paper_sizes) {
        // published sample sizes next to the exact binomial-inversion values
        struct Case {
            const char* label;
            double eps, beta;
            std::int64_t d, r, paper_n;
        };
        const Case cases[] = {
            {"basic d=30", 0.05, 1e-3, 30, 0, presets::kTableOneA.n_basic},
            {"basic d=100", 0.05, 1e-3, 100, 0, presets::kTableOneB.n_basic},
            {"discard d=30 r=5", 0.05, 1e-3, 30, presets::kTableOneA.r_discard,
             presets::kTableOneA.n_discard},
            {"discard d=100 r=17", 0.05, 1e-3, 100, presets::kTableOneB.r_discard,
             presets::kTableOneB.n_discard},
        };
        std::ostringstream ss;
        ss << meta_comment(common) << "case,eps,beta,d,r,paper_n,exact_n\n";
        for (const auto& c : cases) {
            const std::int64_t exact = c.r == 0 ? min_samples_basic(c.eps, c.beta, c.d)
                                                : min_samples_discard(c.eps, c.beta, c.d, c.r);
            ss << c.label << ',' << c.eps << ',' << c.beta << ',' << c.d << ',' << c.r << ','
               << c.paper_n << ',' << exact << '\n';
        }
        emit(common, ss.str(), out);
        return 0;
    }
    if (samples_for) {
        const std::int64_t n_needed = r > 0 ? min_samples_discard(eps, beta, d, r)
                                            : min_samples_basic(eps, beta, d);
        std::ostringstream ss;
        ss << meta_comment(common) << n_needed << '\n';
        emit(common, ss.str(), out);
        return 0;
    }
    if (figure1) {
        n = presets::kFigureOne.n_scenarios;
        d = presets::kFigureOne.dimension;
        beta = presets::kFigureOne.beta;
        rmax = presets::kFigureOne.r_max;
    }
    const RiskTable table = build_risk_table(n, d, beta, rmax);
    std::ostringstream ss;
    if (common.format == "json") {
        nlohmann::ordered_json j;
        j["_meta"] = meta_json(common);
        j["n"] = table.n_scenarios;
        j["d"] = table.n_decision;
        j["beta"] = table.confidence;
        j["r_max"] = table.r_max;
        j["epsilon"] = nlohmann::ordered_json::array();
        for (std::int64_t k = 0; k <= table.n_decision; ++k) {
            nlohmann::ordered_json row = nlohmann::ordered_json::array();
            for (std::int64_t ri = 0; ri <= table.r_max; ++ri) row.push_back(table.at(k, ri));
            j["epsilon"].push_back(row);
        }
        ss << j.dump(2) << '\n';
    } else {
        ss << meta_comment(common);
        table.write_csv(ss);
    }
    emit(common, ss.str(), out);
    return 0;
}

int cmd_sphere(const Common& common, const presets::TableOnePreset& preset, std::int64_t trials,
               std::ostream& out) {
    TableOneConfig config;
    config.preset = preset;
    config.trials = trials;
    config.seed = common.seed;
    config.jobs = common.jobs;
    const auto rows = reproduce_table_one(config);
    std::ostringstream ss;
    if (common.format == "json") {
        nlohmann::ordered_json j;
        j["_meta"] = meta_json(common);
        j["rows"] = nlohmann::ordered_json::array();
        for (const auto& row : rows)
            j["rows"].push_back({{"dist", row.dist},
                                 {"approach", row.approach},
                                 {"N", row.n},
                                 {"r", row.r},
                                 {"mean_radius", row.mean_radius},
                                 {"stderr", row.stderr_},
                                 {"trials", row.trials},
                                 {"seed", row.seed}});
        ss << j.dump(2) << '\n';
    } else {
        ss << meta_comment(common);
        write_table_one_csv(ss, rows);
    }
    emit(common, ss.str(), out);
    return 0;
}

int cmd_opf(const Common& common, const std::string& grid_path, const std::string& loads_path,
            const std::string& emit_demo_grid, std::int64_t steps, double eps, double beta,
            std::int64_t n_scenarios, std::int64_t fresh, bool no_uncertainty,
            const std::string& approaches_csv, std::ostream& out) {
    if (!emit_demo_grid.empty()) {
        const GridModel demo = demo_feeder();
        std::ofstream f(emit_demo_grid, std::ios::binary);
        if (!f) throw IoError("cannot open output file: " + emit_demo_grid);
        f << demo.to_json() << '\n';
        if (!f) throw IoError("failed writing output file: " + emit_demo_grid);
        return 0;
    }
    const GridModel grid =
        grid_path.empty() ? demo_feeder() : GridModel::from_json(read_file(grid_path));

    std::unique_ptr<LoadSampler> sampler;
    if (!loads_path.empty())
        sampler = std::make_unique<CsvLoadSampler>(grid, read_file(loads_path), common.seed);
    else
        sampler = std::make_unique<LognormalLoadSampler>(grid, common.seed, 0.06, 0.12, 0.06,
                                                         no_uncertainty);

    SimulationConfig config;
    config.eps = eps;
    config.beta = beta;
    config.n_steps = steps;
    config.seed = common.seed;
    config.n_scenarios = n_scenarios;
    config.fresh_samples = fresh;
    config.jobs = common.jobs;
    if (!approaches_csv.empty()) {
        config.approaches.clear();
        std::istringstream fields(approaches_csv);
        std::string tok;
        while (std::getline(fields, tok, ',')) config.approaches.push_back(tok);
    }

    const SimulationReport report = run_four_approach_simulation(grid, *sampler, config);

    std::ostringstream csv;
    csv << meta_comment(common);
    report.write_csv(csv);
    nlohmann::ordered_json summary = nlohmann::ordered_json::parse(report.summary_json());
    summary["_meta"] = meta_json(common);
    const std::string summary_text = summary.dump(2) + "\n";

    if (common.out_path.empty()) {
        out << csv.str() << summary_text;
    } else {
        Common csv_target = common;
        csv_target.out_path = common.out_path + "_steps.csv";
        emit(csv_target, csv.str(), out);
        Common json_target = common;
        json_target.out_path = common.out_path + "_summary.json";
        emit(json_target, summary_text, out);
    }
    return 0;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"scenario-optimization toolkit"};
    app.require_subcommand(1);

    Common common;
    std::string joined;
    for (const auto& a : args) {
        joined += a;
        joined += '\x1f';
    }
    common.config_hash = fnv1a(joined);
    if (const char* env_seed = std::getenv("SCENOPT_SEED"))
        common.seed = std::strtoull(env_seed, nullptr, 10);

    bool seed_given = false;
    std::uint64_t seed_flag = 1;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--seed", seed_flag, "RNG seed (flag wins over SCENOPT_SEED)")
            ->each([&](const std::string&) { seed_given = true; });
        cmd->add_option("--jobs", common.jobs, "worker threads")->check(CLI::PositiveNumber);
        cmd->add_option("--out", common.out_path, "output path (default: stdout)");
        cmd->add_option("--format", common.format, "csv or json")
            ->check(CLI::IsMember({"csv", "json"}));
    };

    // bounds
    auto* bounds = app.add_subcommand("bounds", "risk-bound tables and sample sizing");
    std::int64_t b_n = 100, b_d = 10, b_rmax = 0, b_r = 0;
    double b_beta = 1e-3, b_eps = 0.05;
    bool b_fig1 = false, b_samples_for = false, b_paper = false;
    bounds->add_option("--n", b_n, "remaining scenario count N");
    bounds->add_option("--d", b_d, "decision dimension d");
    bounds->add_option("--beta", b_beta, "confidence level beta");
    bounds->add_option("--rmax", b_rmax, "largest removal count R in the table");
    bounds->add_option("--eps", b_eps, "risk level (with --samples-for)");
    bounds->add_option("--r", b_r, "removals (with --samples-for)");
    bounds->add_flag("--figure1", b_fig1, "preset: N=1000, d=30, beta=1e-3, rmax=50");
    bounds->add_flag("--samples-for", b_samples_for,
                     "print the smallest N meeting (eps, beta, d[, r])");
    bounds->add_flag("--paper-sizes", b_paper,
                     "print published sample sizes next to exact inversions");
    add_common(bounds);

    // sphere
    auto* sphere = app.add_subcommand("sphere", "random-sphere example reproduction");
    bool s_a = false, s_b = false;
    std::int64_t s_trials = 10000;
    sphere->add_flag("--table1a", s_a, "d=30 preset");
    sphere->add_flag("--table1b", s_b, "d=100 preset");
    sphere->add_option("--trials", s_trials, "Monte Carlo trials")->check(CLI::PositiveNumber);
    add_common(sphere);

    // opf
    auto* opf = app.add_subcommand("opf", "chance-constrained OPF simulation");
    std::string o_grid, o_loads, o_emit_demo, o_approaches;
    std::int64_t o_steps = presets::kOpfSteps, o_nscen = 0, o_fresh = 10000;
    double o_eps = presets::kOpfEps, o_beta = presets::kOpfBeta;
    bool o_demo = false, o_nounc = false;
    opf->add_flag("--demo", o_demo, "use the bundled 8-node feeder");
    opf->add_option("--grid", o_grid, "grid model JSON path");
    opf->add_option("--loads", o_loads, "load scenario pool CSV path");
    opf->add_option("--emit-demo-grid", o_emit_demo, "write the demo grid JSON and exit");
    opf->add_option("--steps", o_steps, "time steps")->check(CLI::PositiveNumber);
    opf->add_option("--eps", o_eps, "risk level");
    opf->add_option("--beta", o_beta, "confidence level");
    opf->add_option("--n-scenarios", o_nscen, "scenario pool size (0: size from the bound)");
    opf->add_option("--fresh", o_fresh, "fresh samples for violation estimates");
    opf->add_flag("--no-uncertainty", o_nounc, "degenerate sampler (all draws = truth)");
    opf->add_option("--approaches", o_approaches,
                    "comma list: optimum,expectation,standard,new");
    add_common(opf);

    std::vector<const char*> argv;
    argv.push_back("scenopt");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(int(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
    if (seed_given) common.seed = seed_flag;

    try {
        if (bounds->parsed())
            return cmd_bounds(common, b_n, b_d, b_beta, b_rmax, b_fig1, b_samples_for, b_paper,
                              b_eps, b_r, out);
        if (sphere->parsed()) {
            if (s_a == s_b)
                throw std::invalid_argument("sphere: pass exactly one of --table1a/--table1b");
            return cmd_sphere(common, s_a ? presets::kTableOneA : presets::kTableOneB, s_trials,
                              out);
        }
        if (opf->parsed()) {
            if (!o_demo && o_grid.empty() && o_emit_demo.empty())
                throw std::invalid_argument("opf: pass --demo or --grid PATH");
            return cmd_opf(common, o_grid, o_loads, o_emit_demo, o_steps, o_eps, o_beta, o_nscen,
                           o_fresh, o_nounc, o_approaches, out);
        }
        err << "error: no subcommand\n";
        return 2;
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

} // namespace scenopt::cli
