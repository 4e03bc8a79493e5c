#include "scenopt/sphere.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "scenopt/detail/numeric.hpp"
#include "scenopt/detail/parallel.hpp"

namespace scenopt {

double RadiusModel::sample(CounterRng& rng) const {
    if (kind == Kind::uniform01) return rng.next_double();
    double v;
    do {
        v = rng.next_normal(mu, sigma);
    } while (v <= 0.0); // a radius must be positive; redraw (p ~ 1.3e-3 at (3,1))
    return v;
}

double RadiusModel::cdf(double r) const {
    if (kind == Kind::uniform01) return std::clamp(r, 0.0, 1.0);
    if (r <= 0.0) return 0.0;
    const double mass_below_zero = detail::normal_cdf(-mu / sigma);
    return (detail::normal_cdf((r - mu) / sigma) - mass_below_zero) / (1.0 - mass_below_zero);
}

double RadiusModel::quantile(double p) const {
    if (!(p > 0.0 && p < 1.0))
        throw std::invalid_argument("RadiusModel::quantile: p must lie in (0,1)");
    if (kind == Kind::uniform01) return p;
    return mu + sigma * detail::normal_quantile(p);
}

std::string RadiusModel::label() const {
    if (kind == Kind::uniform01) return "uniform(0,1)";
    char buf[48];
    std::snprintf(buf, sizeof buf, "normal(%g,%g)", mu, sigma);
    return buf;
}

double exact_quantile(const RadiusModel& model, double eps) {
    return model.quantile(eps);
}

SphereSolution solve_sphere(const SphereInstance& instance,
                            const std::vector<std::int64_t>& removed) {
    double norm2 = 0.0;
    for (double c : instance.cost) norm2 += c * c;
    const double norm = std::sqrt(norm2);
    if (!(norm > 0.0)) throw std::invalid_argument("solve_sphere: cost vector must be nonzero");
    std::vector<bool> is_removed(instance.radii.size(), false);
    for (std::int64_t i : removed) {
        if (i < 0 || i >= std::int64_t(instance.radii.size()))
            throw std::invalid_argument("solve_sphere: removed index out of range");
        is_removed[std::size_t(i)] = true;
    }
    std::int64_t arg = -1;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < instance.radii.size(); ++i)
        if (!is_removed[i] && instance.radii[i] < best) {
            best = instance.radii[i];
            arg = std::int64_t(i);
        }
    if (arg < 0) throw std::invalid_argument("solve_sphere: empty active set");

    SphereSolution sol;
    sol.radius = best;
    sol.support_index = arg;
    sol.objective = -norm * best;
    sol.x.resize(instance.cost.size());
    for (std::size_t j = 0; j < instance.cost.size(); ++j)
        sol.x[j] = -best * instance.cost[j] / norm;
    return sol;
}

SphereProgram::SphereProgram(SphereInstance instance) : instance_(std::move(instance)) {
    double norm2 = 0.0;
    for (double c : instance_.cost) norm2 += c * c;
    cost_norm_ = std::sqrt(norm2);
    if (!(cost_norm_ > 0.0))
        throw std::invalid_argument("SphereProgram: cost vector must be nonzero");
    for (double r : instance_.radii)
        if (!std::isfinite(r)) throw std::invalid_argument("SphereProgram: non-finite radius");
}

ScenarioSolution SphereProgram::solve(const std::vector<std::int64_t>& active) const {
    std::int64_t arg = -1;
    double best = std::numeric_limits<double>::infinity();
    for (std::int64_t i : active)
        if (instance_.radii[std::size_t(i)] < best) {
            best = instance_.radii[std::size_t(i)];
            arg = i;
        }
    if (arg < 0) throw std::invalid_argument("SphereProgram: empty active set");
    ScenarioSolution sol;
    sol.objective = cost_norm_ * best; // maximization view of -c'x
    sol.x.resize(instance_.cost.size());
    for (std::size_t j = 0; j < instance_.cost.size(); ++j)
        sol.x[j] = -best * instance_.cost[j] / cost_norm_;
    return sol;
}

double SphereProgram::radius_of(const ScenarioSolution& solution) const {
    return solution.objective / cost_norm_;
}

bool SphereProgram::violates(const ScenarioSolution& solution, std::int64_t scenario) const {
    return instance_.radii[std::size_t(scenario)] < radius_of(solution);
}

std::vector<std::int64_t>
SphereProgram::support_candidates(const ScenarioSolution& solution,
                                  const std::vector<std::int64_t>& active) const {
    (void)solution;
    std::int64_t arg = -1;
    double best = std::numeric_limits<double>::infinity();
    for (std::int64_t i : active)
        if (instance_.radii[std::size_t(i)] < best) {
            best = instance_.radii[std::size_t(i)];
            arg = i;
        }
    return arg < 0 ? std::vector<std::int64_t>{} : std::vector<std::int64_t>{arg};
}

namespace {

struct Moments {
    double mean;
    double se;
};

Moments moments(const std::vector<double>& xs) {
    const auto n = double(xs.size());
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= n;
    if (xs.size() < 2) return {mean, std::numeric_limits<double>::infinity()};
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / (n - 1.0)) / std::sqrt(n)};
}

} // namespace

std::vector<TableOneRow> reproduce_table_one(const TableOneConfig& config) {
    if (config.trials < 1)
        throw std::invalid_argument("reproduce_table_one: trials must be >= 1");
    const auto& preset = config.preset;

    std::vector<RadiusModel> models(2);
    models[0] = {RadiusModel::Kind::normal, 3.0, 1.0};
    models[1] = {RadiusModel::Kind::uniform01, 0.0, 0.0};

    std::vector<TableOneRow> rows;
    for (std::size_t mi = 0; mi < models.size(); ++mi) {
        const RadiusModel& model = models[mi];
        rows.push_back({model.label(), "exact", 0, 0, exact_quantile(model, preset.eps), 0.0, 0,
                        config.seed});

        // approach id: 0 basic, 1 discard, 2 new
        for (int approach = 0; approach < 3; ++approach) {
            const std::int64_t n = approach == 1 ? preset.n_discard : preset.n_basic;
            const FixedBudgetPolicy discard_policy(preset.r_discard, preset.beta);
            const TheoremPolicy new_policy(preset.eps, preset.beta, 200);
            std::vector<double> binding(std::size_t(config.trials));
            std::vector<std::int64_t> removed_count(std::size_t(config.trials), 0);
            detail::parallel_for(config.trials, config.jobs, [&](std::int64_t t) {
                CounterRng rng(config.seed,
                               rng_stream(std::uint64_t(mi * 4 + std::size_t(approach) + 1),
                                          std::uint64_t(t)));
                SphereInstance inst;
                inst.dimension = preset.dimension;
                inst.cost.assign(std::size_t(preset.dimension), 1.0);
                inst.model = model;
                inst.radii.resize(std::size_t(n));
                for (auto& r : inst.radii) r = model.sample(rng);
                if (approach == 0) {
                    binding[std::size_t(t)] =
                        *std::min_element(inst.radii.begin(), inst.radii.end());
                    return;
                }
                const SphereProgram program(std::move(inst));
                const RiskPolicy& policy =
                    approach == 1 ? static_cast<const RiskPolicy&>(discard_policy)
                                  : static_cast<const RiskPolicy&>(new_policy);
                const RemovalTrace trace = removal_loop(program, policy);
                binding[std::size_t(t)] = program.radius_of(trace.final_solution);
                removed_count[std::size_t(t)] = std::int64_t(trace.removed.size());
            });
            const Moments m = moments(binding);
            std::int64_t r_reported = preset.r_discard;
            if (approach == 0) r_reported = 0;
            if (approach == 2) r_reported = removed_count[0]; // budget the loop settled on
            static const char* names[] = {"basic", "discard", "new"};
            rows.push_back({model.label(), names[approach], n, r_reported, m.mean, m.se,
                            config.trials, config.seed});
        }
    }
    return rows;
}

void write_table_one_csv(std::ostream& out, const std::vector<TableOneRow>& rows) {
    out << "dist,approach,N,r,mean_radius,stderr,trials,seed\n";
    char buf[64];
    for (const auto& row : rows) {
        out << row.dist << ',' << row.approach << ',' << row.n << ',' << row.r << ',';
        std::snprintf(buf, sizeof buf, "%.10g", row.mean_radius);
        out << buf << ',';
        std::snprintf(buf, sizeof buf, "%.10g", row.stderr_);
        out << buf << ',' << row.trials << ',' << row.seed << '\n';
    }
}

} // namespace scenopt
