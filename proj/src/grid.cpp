#include "scenopt/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "scenopt/detail/numeric.hpp"
#include "scenopt/detail/parallel.hpp"

namespace scenopt {

namespace {

constexpr double kVoltTol = 1e-9; // absolute, voltages are O(1) per-unit

void check_vector(const std::vector<double>& v, std::size_t n, const char* what) {
    if (v.size() != n) throw std::invalid_argument(std::string(what) + ": size mismatch");
}

// Row of voltage sensitivities of node l to the generator increments,
// ordered (dP_1..dP_G, dQ_1..dQ_G).
std::vector<double> sensitivity_row(const GridModel& grid, std::size_t l) {
    const std::size_t g = grid.generators.size();
    std::vector<double> row(2 * g, 0.0);
    for (std::size_t gi = 0; gi < g; ++gi) {
        const auto node = std::size_t(grid.generators[gi].node);
        row[gi] = grid.zp[l][node] / grid.v0[l];
        row[g + gi] = grid.zq[l][node] / grid.v0[l];
    }
    return row;
}

LinearProgram opf_skeleton(const GridModel& grid, const std::vector<GeneratorLimits>& caps) {
    const std::size_t g = grid.generators.size();
    if (caps.size() != g)
        throw std::invalid_argument("opf: one GeneratorLimits entry per generator required");
    LinearProgram lp;
    lp.objective.assign(2 * g, 1.0);
    lp.lower.assign(2 * g, 0.0);
    lp.upper.resize(2 * g);
    for (std::size_t gi = 0; gi < g; ++gi) {
        lp.upper[gi] = std::max(0.0, caps[gi].p_cap);
        lp.upper[g + gi] = std::max(0.0, caps[gi].q_cap);
    }
    return lp;
}

void add_band_rows(LinearProgram& lp, const GridModel& grid, std::size_t l,
                   const std::vector<double>& row, double v_for_upper, std::int64_t tag_upper,
                   double v_for_lower, std::int64_t tag_lower) {
    lp.add_row(row, grid.v_max - v_for_upper, tag_upper);
    std::vector<double> neg(row.size());
    for (std::size_t j = 0; j < row.size(); ++j) neg[j] = -row[j];
    lp.add_row(std::move(neg), v_for_lower - grid.v_min, tag_lower);
    (void)l;
}

} // namespace

void GridModel::validate() const {
    if (n_nodes < 1) throw std::invalid_argument("GridModel: n_nodes must be >= 1");
    const auto n = std::size_t(n_nodes);
    check_vector(v0, n, "GridModel v0");
    for (double v : v0)
        if (!(v > 0.0)) throw std::invalid_argument("GridModel: v0 entries must be positive");
    if (zp.size() != n || zq.size() != n)
        throw std::invalid_argument("GridModel: sensitivity matrices must be n x n");
    for (std::size_t i = 0; i < n; ++i) {
        check_vector(zp[i], n, "GridModel zp row");
        check_vector(zq[i], n, "GridModel zq row");
    }
    if (!(v_min < v_max)) throw std::invalid_argument("GridModel: requires v_min < v_max");
    for (const auto& gen : generators)
        if (gen.node < 0 || gen.node >= n_nodes)
            throw std::invalid_argument("GridModel: generator node out of range");
}

std::string GridModel::to_json() const {
    nlohmann::ordered_json j;
    j["n_nodes"] = n_nodes;
    j["v0"] = v0;
    j["zp"] = zp;
    j["zq"] = zq;
    j["v_min"] = v_min;
    j["v_max"] = v_max;
    j["generators"] = nlohmann::ordered_json::array();
    for (const auto& gen : generators)
        j["generators"].push_back(
            {{"node", gen.node}, {"p_cap", gen.p_cap}, {"q_cap", gen.q_cap}});
    return j.dump(2);
}

GridModel GridModel::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("GridModel: bad JSON: ") + e.what());
    }
    GridModel grid;
    try {
        grid.n_nodes = j.at("n_nodes").get<std::int64_t>();
        grid.v0 = j.at("v0").get<std::vector<double>>();
        grid.zp = j.at("zp").get<std::vector<std::vector<double>>>();
        grid.zq = j.at("zq").get<std::vector<std::vector<double>>>();
        grid.v_min = j.at("v_min").get<double>();
        grid.v_max = j.at("v_max").get<double>();
        for (const auto& gj : j.at("generators"))
            grid.generators.push_back({gj.at("node").get<std::int64_t>(),
                                       gj.at("p_cap").get<double>(),
                                       gj.at("q_cap").get<double>()});
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("GridModel: schema error: ") + e.what());
    }
    grid.validate();
    return grid;
}

GridModel generate_synthetic_feeder(std::int64_t n_nodes, const std::vector<FeederLine>& lines,
                                    const std::vector<Generator>& generators) {
    if (n_nodes < 2) throw std::invalid_argument("feeder: need at least two nodes");
    const auto n = std::size_t(n_nodes);
    if (lines.size() != n - 1)
        throw std::invalid_argument("feeder: a radial network on n nodes has n-1 lines");

    // union-find cycle check
    std::vector<std::size_t> parent_uf(n);
    std::iota(parent_uf.begin(), parent_uf.end(), 0);
    std::function<std::size_t(std::size_t)> find = [&](std::size_t a) {
        while (parent_uf[a] != a) a = parent_uf[a] = parent_uf[parent_uf[a]];
        return a;
    };
    for (const auto& line : lines) {
        if (line.from < 0 || line.from >= n_nodes || line.to < 0 || line.to >= n_nodes ||
            line.from == line.to)
            throw std::invalid_argument("feeder: line endpoint out of range");
        const std::size_t a = find(std::size_t(line.from));
        const std::size_t b = find(std::size_t(line.to));
        if (a == b) throw std::invalid_argument("feeder: lines contain a cycle (not radial)");
        parent_uf[a] = b;
    }

    // orient the tree away from the slack (node 0)
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adj(n); // (neighbor, line)
    for (std::size_t e = 0; e < lines.size(); ++e) {
        adj[std::size_t(lines[e].from)].push_back({std::size_t(lines[e].to), e});
        adj[std::size_t(lines[e].to)].push_back({std::size_t(lines[e].from), e});
    }
    std::vector<std::vector<std::size_t>> path(n); // edge ids root -> node, in order
    std::vector<bool> seen(n, false);
    std::vector<std::size_t> stack{0};
    seen[0] = true;
    while (!stack.empty()) {
        const std::size_t u = stack.back();
        stack.pop_back();
        for (const auto& [v, e] : adj[u])
            if (!seen[v]) {
                seen[v] = true;
                path[v] = path[u];
                path[v].push_back(e);
                stack.push_back(v);
            }
    }

    GridModel grid;
    grid.n_nodes = n_nodes;
    grid.v0.assign(n, 1.0);
    grid.zp.assign(n, std::vector<double>(n, 0.0));
    grid.zq.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            double rp = 0.0, rq = 0.0;
            const std::size_t common = std::min(path[i].size(), path[j].size());
            for (std::size_t s = 0; s < common && path[i][s] == path[j][s]; ++s) {
                rp += lines[path[i][s]].resistance;
                rq += lines[path[i][s]].reactance;
            }
            grid.zp[i][j] = grid.zp[j][i] = rp;
            grid.zq[i][j] = grid.zq[j][i] = rq;
        }
    grid.generators = generators;
    grid.validate();
    return grid;
}

GridModel demo_feeder() {
    const std::vector<FeederLine> lines = {
        {0, 1, 0.020, 0.040},  {1, 2, 0.030, 0.050}, {2, 3, 0.025, 0.045},
        {3, 4, 0.030, 0.050},  {2, 5, 0.035, 0.055}, {5, 6, 0.030, 0.050},
        {3, 7, 0.040, 0.060},  {7, 8, 0.030, 0.045}, {4, 9, 0.035, 0.050},
        {9, 10, 0.030, 0.050}, {1, 11, 0.045, 0.065},
    };
    const std::vector<Generator> generators = {{3, 0.70, 0.45},  {4, 0.60, 0.40},
                                               {6, 0.55, 0.35},  {8, 0.60, 0.40},
                                               {10, 0.55, 0.35}, {11, 0.70, 0.45}};
    return generate_synthetic_feeder(12, lines, generators);
}

std::vector<double> voltage_from_loads(const GridModel& grid, const std::vector<double>& p_load,
                                       const std::vector<double>& q_load,
                                       const std::vector<double>& p_gen,
                                       const std::vector<double>& q_gen) {
    const auto n = std::size_t(grid.n_nodes);
    check_vector(p_load, n, "voltage_from_loads p_load");
    check_vector(q_load, n, "voltage_from_loads q_load");
    check_vector(p_gen, n, "voltage_from_loads p_gen");
    check_vector(q_gen, n, "voltage_from_loads q_gen");
    std::vector<double> v(n);
    for (std::size_t l = 0; l < n; ++l) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            acc += grid.zp[l][j] * (p_gen[j] + p_load[j]) + grid.zq[l][j] * (q_gen[j] + q_load[j]);
        v[l] = grid.v0[l] + acc / grid.v0[l];
    }
    return v;
}

std::vector<double> voltage_increment(const GridModel& grid, const std::vector<double>& voltage,
                                      const std::vector<double>& dp_gen,
                                      const std::vector<double>& dq_gen) {
    const auto n = std::size_t(grid.n_nodes);
    const std::size_t g = grid.generators.size();
    check_vector(voltage, n, "voltage_increment voltage");
    check_vector(dp_gen, g, "voltage_increment dp_gen");
    check_vector(dq_gen, g, "voltage_increment dq_gen");
    std::vector<double> v(voltage);
    for (std::size_t l = 0; l < n; ++l) {
        double acc = 0.0;
        for (std::size_t gi = 0; gi < g; ++gi) {
            const auto node = std::size_t(grid.generators[gi].node);
            acc += grid.zp[l][node] * dp_gen[gi] + grid.zq[l][node] * dq_gen[gi];
        }
        v[l] += acc / grid.v0[l];
    }
    return v;
}

LoadScenario make_load_scenario(const GridModel& grid, std::vector<double> p_load,
                                std::vector<double> q_load) {
    const std::vector<double> zero(std::size_t(grid.n_nodes), 0.0);
    LoadScenario sc;
    sc.voltage = voltage_from_loads(grid, p_load, q_load, zero, zero);
    sc.p_load = std::move(p_load);
    sc.q_load = std::move(q_load);
    return sc;
}

LinearProgram build_scenario_opf(const GridModel& grid,
                                 const std::vector<std::vector<double>>& voltage_samples,
                                 const std::vector<GeneratorLimits>& caps) {
    grid.validate();
    if (voltage_samples.empty())
        throw std::invalid_argument("build_scenario_opf: need at least one sample");
    LinearProgram lp = opf_skeleton(grid, caps);
    const auto n = std::size_t(grid.n_nodes);
    for (std::size_t i = 0; i < voltage_samples.size(); ++i) {
        check_vector(voltage_samples[i], n, "build_scenario_opf sample");
        for (std::size_t l = 0; l < n; ++l)
            add_band_rows(lp, grid, l, sensitivity_row(grid, l), voltage_samples[i][l],
                          std::int64_t(i), voltage_samples[i][l], std::int64_t(i));
    }
    return lp;
}

ReducedOpf build_reduced_opf(const GridModel& grid,
                             const std::vector<std::vector<double>>& voltage_samples,
                             const std::vector<GeneratorLimits>& caps) {
    grid.validate();
    if (voltage_samples.empty())
        throw std::invalid_argument("build_reduced_opf: need at least one sample");
    const auto n = std::size_t(grid.n_nodes);
    ReducedOpf reduced;
    reduced.lp = opf_skeleton(grid, caps);
    reduced.argmin_scenario.assign(n, 0);
    reduced.argmax_scenario.assign(n, 0);
    for (std::size_t l = 0; l < n; ++l) {
        double lo = voltage_samples[0][l], hi = voltage_samples[0][l];
        std::int64_t arg_lo = 0, arg_hi = 0;
        for (std::size_t i = 1; i < voltage_samples.size(); ++i) {
            check_vector(voltage_samples[i], n, "build_reduced_opf sample");
            const double v = voltage_samples[i][l];
            if (v < lo) { lo = v; arg_lo = std::int64_t(i); }
            if (v > hi) { hi = v; arg_hi = std::int64_t(i); }
        }
        reduced.argmin_scenario[l] = arg_lo;
        reduced.argmax_scenario[l] = arg_hi;
        add_band_rows(reduced.lp, grid, l, sensitivity_row(grid, l), hi, arg_hi, lo, arg_lo);
    }
    return reduced;
}

GridOpfProgram::GridOpfProgram(const GridModel& grid,
                               std::vector<std::vector<double>> voltage_samples,
                               std::vector<GeneratorLimits> caps)
    : grid_(grid), samples_(std::move(voltage_samples)), caps_(std::move(caps)) {
    grid_.validate();
    if (samples_.empty()) throw std::invalid_argument("GridOpfProgram: empty sample pool");
    for (const auto& s : samples_)
        check_vector(s, std::size_t(grid_.n_nodes), "GridOpfProgram sample");
}

ScenarioSolution GridOpfProgram::solve(const std::vector<std::int64_t>& active) const {
    if (active.empty()) {
        // caps-only program: every increment saturates its availability box
        ScenarioSolution sol;
        const std::size_t g = grid_.generators.size();
        sol.x.resize(2 * g);
        for (std::size_t gi = 0; gi < g; ++gi) {
            sol.x[gi] = std::max(0.0, caps_[gi].p_cap);
            sol.x[g + gi] = std::max(0.0, caps_[gi].q_cap);
        }
        sol.objective = std::accumulate(sol.x.begin(), sol.x.end(), 0.0);
        return sol;
    }
    const auto n = std::size_t(grid_.n_nodes);
    LinearProgram lp = opf_skeleton(grid_, caps_);
    for (std::size_t l = 0; l < n; ++l) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        std::int64_t arg_lo = -1, arg_hi = -1;
        for (std::int64_t i : active) {
            const double v = samples_[std::size_t(i)][l];
            if (v < lo) { lo = v; arg_lo = i; }
            if (v > hi) { hi = v; arg_hi = i; }
        }
        add_band_rows(lp, grid_, l, sensitivity_row(grid_, l), hi, arg_hi, lo, arg_lo);
    }
    const LpSolution lps = solve_lp(lp);
    if (lps.status != LpStatus::optimal)
        throw std::runtime_error(lps.status == LpStatus::infeasible
                                     ? "GridOpfProgram: scenario program infeasible"
                                     : "GridOpfProgram: scenario program unbounded");
    return {lps.x, lps.objective};
}

bool GridOpfProgram::violates(const ScenarioSolution& solution, std::int64_t scenario) const {
    return violates_voltage(realized_voltage(samples_[std::size_t(scenario)], solution));
}

std::vector<std::int64_t>
GridOpfProgram::support_candidates(const ScenarioSolution& solution,
                                   const std::vector<std::int64_t>& active) const {
    (void)solution;
    std::vector<std::int64_t> candidates;
    const auto n = std::size_t(grid_.n_nodes);
    for (std::size_t l = 0; l < n; ++l) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        std::int64_t arg_lo = -1, arg_hi = -1;
        for (std::int64_t i : active) {
            const double v = samples_[std::size_t(i)][l];
            if (v < lo) { lo = v; arg_lo = i; }
            if (v > hi) { hi = v; arg_hi = i; }
        }
        if (arg_lo >= 0) candidates.push_back(arg_lo);
        if (arg_hi >= 0) candidates.push_back(arg_hi);
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    return candidates;
}

std::vector<double>
GridOpfProgram::realized_voltage(const std::vector<double>& base_voltage,
                                 const ScenarioSolution& solution) const {
    const std::size_t g = grid_.generators.size();
    std::vector<double> dp(solution.x.begin(), solution.x.begin() + std::ptrdiff_t(g));
    std::vector<double> dq(solution.x.begin() + std::ptrdiff_t(g), solution.x.end());
    return voltage_increment(grid_, base_voltage, dp, dq);
}

bool GridOpfProgram::violates_voltage(const std::vector<double>& voltage) const {
    for (double v : voltage)
        if (v > grid_.v_max + kVoltTol || v < grid_.v_min - kVoltTol) return true;
    return false;
}

LognormalLoadSampler::LognormalLoadSampler(const GridModel& grid, std::uint64_t seed,
                                           double load_scale, double sigma_shared,
                                           double sigma_node, bool no_uncertainty)
    : grid_(grid), seed_(seed), load_scale_(load_scale), sigma_shared_(sigma_shared),
      sigma_node_(sigma_node), no_uncertainty_(no_uncertainty) {
    CounterRng rng(seed_, rng_stream(1, 0));
    node_weight_.assign(std::size_t(grid_.n_nodes), 0.0);
    for (std::size_t l = 1; l < node_weight_.size(); ++l)
        node_weight_[l] = rng.next_uniform(0.6, 1.4); // slack carries no load
}

LoadScenario LognormalLoadSampler::sample(std::int64_t step, std::int64_t draw) const {
    const std::int64_t effective = no_uncertainty_ ? -1 : draw;
    const std::uint64_t sub =
        effective < 0 ? 0xffffffffULL : std::uint64_t(effective) + 1;
    CounterRng rng(seed_, rng_stream(2, (std::uint64_t(step) << 32) ^ sub));
    const auto n = std::size_t(grid_.n_nodes);
    // diurnal consumption shape with a 12 h period over 15-minute steps
    const double diurnal =
        0.75 + 0.25 * std::sin(2.0 * 3.14159265358979323846 * double(step) / 48.0 + 4.0);
    const double shared = rng.next_normal(0.0, 1.0);
    std::vector<double> p(n, 0.0), q(n, 0.0);
    for (std::size_t l = 1; l < n; ++l) {
        const double zl = rng.next_normal(0.0, 1.0);
        const double mult = std::exp(sigma_shared_ * shared + sigma_node_ * zl -
                                     0.5 * (sigma_shared_ * sigma_shared_ +
                                            sigma_node_ * sigma_node_));
        p[l] = -load_scale_ * node_weight_[l] * diurnal * mult;
        q[l] = 0.35 * p[l];
    }
    return make_load_scenario(grid_, std::move(p), std::move(q));
}

CsvLoadSampler::CsvLoadSampler(const GridModel& grid, const std::string& csv_text,
                               std::uint64_t seed)
    : grid_(grid), seed_(seed) {
    const auto n = std::size_t(grid_.n_nodes);
    std::istringstream in(csv_text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream fields(line);
        std::vector<double> vals;
        std::string tok;
        while (std::getline(fields, tok, ',')) {
            try {
                vals.push_back(std::stod(tok));
            } catch (const std::exception&) {
                vals.clear();
                break; // header or malformed line
            }
        }
        if (vals.empty()) continue;
        if (vals.size() != 2 * n)
            throw std::invalid_argument("load CSV: expected 2*n_nodes columns per row");
        std::vector<double> p(vals.begin(), vals.begin() + std::ptrdiff_t(n));
        std::vector<double> q(vals.begin() + std::ptrdiff_t(n), vals.end());
        pool_.push_back(make_load_scenario(grid_, std::move(p), std::move(q)));
    }
    if (pool_.empty()) throw std::invalid_argument("load CSV: no scenario rows found");
}

LoadScenario CsvLoadSampler::sample(std::int64_t step, std::int64_t draw) const {
    const std::uint64_t sub = draw < 0 ? 0xffffffffULL : std::uint64_t(draw) + 1;
    CounterRng rng(seed_, rng_stream(3, (std::uint64_t(step) << 32) ^ sub));
    return pool_[std::size_t(rng.next_below(pool_.size()))];
}

std::vector<GeneratorLimits> availability_caps(const GridModel& grid, std::int64_t step,
                                               std::int64_t n_steps, std::uint64_t seed) {
    CounterRng rng(seed, rng_stream(4, std::uint64_t(step)));
    const double diurnal =
        0.60 + 0.40 * std::sin(3.14159265358979323846 * (double(step) + 0.5) /
                               double(std::max<std::int64_t>(n_steps, 1)));
    std::vector<GeneratorLimits> caps;
    caps.reserve(grid.generators.size());
    for (const auto& gen : grid.generators) {
        const double noise = std::exp(0.08 * rng.next_normal(0.0, 1.0) - 0.0032);
        caps.push_back({gen.p_cap * diurnal * noise, gen.q_cap * diurnal * noise});
    }
    return caps;
}

void SimulationReport::write_csv(std::ostream& out) const {
    out << "t,approach,objective,v_max_true,v_min_true,violated\n";
    char buf[64];
    for (const auto& rec : records) {
        out << rec.step << ',' << rec.approach << ',';
        std::snprintf(buf, sizeof buf, "%.10g", rec.objective);
        out << buf << ',';
        std::snprintf(buf, sizeof buf, "%.10g", rec.v_max_true);
        out << buf << ',';
        std::snprintf(buf, sizeof buf, "%.10g", rec.v_min_true);
        out << buf << ',' << (rec.violated ? 1 : 0) << '\n';
    }
}

std::string SimulationReport::summary_json() const {
    nlohmann::ordered_json j;
    j["eps"] = config.eps;
    j["beta"] = config.beta;
    j["n_steps"] = config.n_steps;
    j["n_scenarios"] = n_scenarios_used;
    j["seed"] = config.seed;
    j["approaches"] = nlohmann::ordered_json::object();

    for (const auto& name : config.approaches) {
        std::vector<const StepRecord*> recs;
        for (const auto& r : records)
            if (r.approach == name) recs.push_back(&r);
        if (recs.empty()) continue;
        auto stats = [&](auto getter) {
            double mean = 0.0;
            std::int64_t cnt = 0;
            for (const auto* r : recs)
                if (r->solved) { mean += getter(*r); ++cnt; }
            if (cnt == 0) return std::pair<double, double>{0.0, 0.0};
            mean /= double(cnt);
            double ss = 0.0;
            for (const auto* r : recs)
                if (r->solved) ss += (getter(*r) - mean) * (getter(*r) - mean);
            const double sd = cnt > 1 ? std::sqrt(ss / double(cnt - 1)) : 0.0;
            return std::pair<double, double>{mean, sd};
        };
        const auto [vmax_mean, vmax_sd] = stats([](const StepRecord& r) { return r.v_max_true; });
        const auto [vmin_mean, vmin_sd] = stats([](const StepRecord& r) { return r.v_min_true; });
        const auto [obj_mean, obj_sd] = stats([](const StepRecord& r) { return r.objective; });
        std::int64_t violations = 0, failures = 0, solved = 0, cert_ok = 0, cert_total = 0;
        for (const auto* r : recs) {
            if (!r->solved) { ++failures; continue; }
            ++solved;
            if (r->violated) ++violations;
            if (r->fresh_rate >= 0.0 && r->risk_bound >= 0.0) {
                ++cert_total;
                const double half = 0.5 * (r->fresh_hi - r->fresh_lo);
                if (r->fresh_rate <= r->risk_bound + 3.0 * half) ++cert_ok;
            }
        }
        nlohmann::ordered_json a;
        a["steps_solved"] = solved;
        a["solver_failures"] = failures;
        a["v_max"] = {{"mean", vmax_mean}, {"std", vmax_sd}};
        a["v_min"] = {{"mean", vmin_mean}, {"std", vmin_sd}};
        a["objective_mean"] = obj_mean;
        a["objective_std"] = obj_sd;
        a["violations"] = violations;
        a["violation_rate"] = solved > 0 ? double(violations) / double(solved) : 0.0;
        if (cert_total > 0) {
            a["certificate_steps"] = cert_total;
            a["certificate_ok"] = cert_ok;
            double k_mean = 0.0, r_mean = 0.0, bound_mean = 0.0;
            for (const auto* r : recs)
                if (r->solved) {
                    k_mean += double(r->k);
                    r_mean += double(r->removed);
                    bound_mean += r->risk_bound;
                }
            a["k_mean"] = k_mean / double(std::max<std::int64_t>(solved, 1));
            a["removed_mean"] = r_mean / double(std::max<std::int64_t>(solved, 1));
            a["bound_mean"] = bound_mean / double(std::max<std::int64_t>(solved, 1));
        }
        j["approaches"][name] = a;
    }

    // generation share relative to the all-samples scenario approach
    double std_obj = 0.0;
    std::int64_t std_cnt = 0;
    for (const auto& r : records)
        if (r.approach == "standard" && r.solved) { std_obj += r.objective; ++std_cnt; }
    if (std_cnt > 0 && std_obj != 0.0) {
        for (const auto& name : config.approaches) {
            double obj = 0.0;
            std::int64_t cnt = 0;
            for (const auto& r : records)
                if (r.approach == name && r.solved) { obj += r.objective; ++cnt; }
            if (cnt > 0 && j["approaches"].contains(name))
                j["approaches"][name]["generation_pct_of_standard"] =
                    100.0 * (obj / double(cnt)) / (std_obj / double(std_cnt));
        }
    }
    return j.dump(2);
}

SimulationReport run_four_approach_simulation(const GridModel& grid, const LoadSampler& sampler,
                                              const SimulationConfig& config) {
    grid.validate();
    if (grid.generators.empty())
        throw std::invalid_argument("simulation: grid has no generators");
    for (const auto& a : config.approaches)
        if (a != "optimum" && a != "expectation" && a != "standard" && a != "new")
            throw std::invalid_argument("simulation: unknown approach '" + a + "'");
    if (config.n_steps < 1) throw std::invalid_argument("simulation: n_steps must be >= 1");

    const std::int64_t d = 2 * std::int64_t(grid.generators.size());
    const std::int64_t n_scen = config.n_scenarios > 0
                                    ? config.n_scenarios
                                    : min_samples_basic(config.eps, config.beta, d);
    const TheoremPolicy policy(config.eps, config.beta, config.r_cap);

    SimulationReport report;
    report.config = config;
    report.n_scenarios_used = n_scen;
    const std::size_t n_app = config.approaches.size();
    report.records.assign(std::size_t(config.n_steps) * n_app, StepRecord{});

    detail::parallel_for(config.n_steps, config.jobs, [&](std::int64_t t) {
        const auto caps = availability_caps(grid, t, config.n_steps, config.seed);
        const LoadScenario truth = sampler.sample(t, -1);

        std::vector<std::vector<double>> voltages(static_cast<std::size_t>(n_scen));
        for (std::int64_t i = 0; i < n_scen; ++i)
            voltages[std::size_t(i)] = sampler.sample(t, i).voltage;
        std::vector<double> v_mean(std::size_t(grid.n_nodes), 0.0);
        for (const auto& v : voltages)
            for (std::size_t l = 0; l < v_mean.size(); ++l) v_mean[l] += v[l];
        for (auto& v : v_mean) v /= double(n_scen);

        const GridOpfProgram pool_program(grid, voltages, caps);
        std::vector<std::int64_t> all(static_cast<std::size_t>(n_scen), 0);
        std::iota(all.begin(), all.end(), 0);

        // one fresh evaluation pool per step, shared by the scenario approaches
        const bool wants_fresh =
            config.fresh_samples > 0 &&
            std::any_of(config.approaches.begin(), config.approaches.end(),
                        [](const std::string& a) { return a == "standard" || a == "new"; });
        std::vector<std::vector<double>> fresh;
        if (wants_fresh) {
            fresh.resize(std::size_t(config.fresh_samples));
            for (std::int64_t jf = 0; jf < config.fresh_samples; ++jf)
                fresh[std::size_t(jf)] = sampler.sample(t, n_scen + jf).voltage;
        }

        for (std::size_t ai = 0; ai < n_app; ++ai) {
            StepRecord& rec = report.records[std::size_t(t) * n_app + ai];
            rec.step = t;
            rec.approach = config.approaches[ai];
            try {
                ScenarioSolution sol;
                if (rec.approach == "optimum") {
                    GridOpfProgram one(grid, std::vector<std::vector<double>>{truth.voltage}, caps);
                    sol = one.solve({0});
                } else if (rec.approach == "expectation") {
                    GridOpfProgram one(grid, std::vector<std::vector<double>>{v_mean}, caps);
                    sol = one.solve({0});
                } else if (rec.approach == "standard") {
                    sol = pool_program.solve(all);
                    const SupportReport support = find_support_set(pool_program, all, sol);
                    rec.k = support.k;
                    rec.removed = 0;
                    rec.risk_bound = policy.bound(support.k, 0, n_scen);
                } else { // new
                    const RemovalTrace trace = removal_loop(pool_program, policy);
                    if (trace.termination.rfind("solver-failure", 0) == 0)
                        throw std::runtime_error(trace.termination);
                    sol = trace.final_solution;
                    rec.k = trace.final_support.k;
                    rec.removed = std::int64_t(trace.removed.size());
                    rec.risk_bound = trace.risk_bound;
                }
                rec.objective = sol.objective;
                const auto realized = pool_program.realized_voltage(truth.voltage, sol);
                rec.v_max_true = *std::max_element(realized.begin(), realized.end());
                rec.v_min_true = *std::min_element(realized.begin(), realized.end());
                rec.violated = pool_program.violates_voltage(realized);
                if (wants_fresh && (rec.approach == "standard" || rec.approach == "new")) {
                    const auto est = estimate_violation(
                        config.fresh_samples, [&](std::int64_t jf) {
                            return pool_program.violates_voltage(pool_program.realized_voltage(
                                fresh[std::size_t(jf)], sol));
                        });
                    rec.fresh_rate = est.rate;
                    rec.fresh_lo = est.wilson_lo;
                    rec.fresh_hi = est.wilson_hi;
                }
                rec.solved = true;
            } catch (const std::exception& e) {
                rec.solved = false;
                rec.note = e.what();
            }
        }
    });
    return report;
}

} // namespace scenopt
