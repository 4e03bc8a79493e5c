#include "scenopt/scenario_engine.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "scenopt/detail/numeric.hpp"

namespace scenopt {

namespace {

std::vector<std::int64_t> without(const std::vector<std::int64_t>& v, std::int64_t drop) {
    std::vector<std::int64_t> out;
    out.reserve(v.size() - 1);
    for (std::int64_t i : v)
        if (i != drop) out.push_back(i);
    return out;
}

} // namespace

SupportReport find_support_set(const ScenarioProgram& program,
                               const std::vector<std::int64_t>& active,
                               const ScenarioSolution& base) {
    SupportReport report;
    report.objective = base.objective;
    report.tolerance = 1e-9 * (1.0 + std::fabs(base.objective));
    for (std::int64_t i : program.support_candidates(base, active)) {
        ScenarioSolution trial;
        try {
            trial = program.solve(without(active, i));
        } catch (const std::exception& e) {
            throw std::runtime_error("find_support_set at scenario " + std::to_string(i) +
                                     ": " + e.what());
        }
        if (trial.objective - base.objective > report.tolerance) report.support.push_back(i);
    }
    std::sort(report.support.begin(), report.support.end());
    report.k = std::int64_t(report.support.size());
    return report;
}

double RiskPolicy::bound(std::int64_t k, std::int64_t r, std::int64_t n_total) const {
    const auto key = std::make_tuple(k, r, n_total);
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = eps_cache_.find(key);
    if (it != eps_cache_.end()) return it->second;
    const double eps = eps_discard_support(k, r, n_total - r, confidence_);
    eps_cache_.emplace(key, eps);
    return eps;
}

TheoremPolicy::TheoremPolicy(double eps_target, double confidence, std::int64_t r_cap)
    : RiskPolicy(confidence), eps_target_(eps_target), r_cap_(r_cap) {
    if (!(eps_target > 0.0 && eps_target < 1.0))
        throw std::invalid_argument("TheoremPolicy: eps_target must lie in (0,1)");
}

RemovalChoice TheoremPolicy::removals_for(std::int64_t k, std::int64_t n_total) const {
    const auto key = std::make_pair(k, n_total);
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = choice_cache_.find(key);
    if (it != choice_cache_.end()) return it->second;
    const RemovalChoice choice = choose_removals(k, eps_target_, n_total, confidence_, r_cap_);
    choice_cache_.emplace(key, choice);
    return choice;
}

FixedBudgetPolicy::FixedBudgetPolicy(std::int64_t budget, double confidence)
    : RiskPolicy(confidence), budget_(budget) {
    if (budget < 0) throw std::invalid_argument("FixedBudgetPolicy: budget must be >= 0");
}

RemovalChoice FixedBudgetPolicy::removals_for(std::int64_t k, std::int64_t n_total) const {
    RemovalChoice choice;
    choice.n_removed = budget_;
    choice.admissible = true;
    choice.eps_at_choice = bound(k, budget_, n_total);
    return choice;
}

RemovalTrace removal_loop(const ScenarioProgram& program, const RiskPolicy& policy,
                          std::optional<std::int64_t> max_iterations) {
    const std::int64_t n_total = program.n_scenarios();
    if (n_total < 1) throw std::invalid_argument("removal_loop: program has no scenarios");
    const std::int64_t cap = max_iterations.value_or(n_total);

    RemovalTrace trace;
    std::set<std::int64_t> removed;              // current I
    std::vector<std::int64_t> removal_order;     // for LIFO re-adds
    std::int64_t prev_k = -1;
    bool final_state_stale = true;

    auto active_set = [&]() {
        std::vector<std::int64_t> active;
        active.reserve(std::size_t(n_total) - removed.size());
        for (std::int64_t i = 0; i < n_total; ++i)
            if (!removed.count(i)) active.push_back(i);
        return active;
    };

    // Support indices ranked by the objective improvement their individual
    // removal yields, best first, ties broken by lowest scenario index.
    auto ranked_support = [&](const std::vector<std::int64_t>& active,
                              const SupportReport& support) {
        std::vector<std::pair<double, std::int64_t>> ranked;
        ranked.reserve(support.support.size());
        for (std::int64_t i : support.support) {
            const double obj = program.solve(without(active, i)).objective;
            ranked.emplace_back(obj, i);
        }
        std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first > b.first;
            return a.second < b.second;
        });
        std::vector<std::int64_t> order;
        order.reserve(ranked.size());
        for (const auto& [obj, i] : ranked) order.push_back(i);
        return order;
    };

    for (std::int64_t iter = 0; iter < cap; ++iter) {
        const auto active = active_set();
        ScenarioSolution sol;
        SupportReport support;
        try {
            sol = program.solve(active);
            support = find_support_set(program, active, sol);
        } catch (const std::exception& e) {
            trace.termination = std::string("solver-failure: ") + e.what();
            break; // partial trace
        }
        const RemovalChoice choice = policy.removals_for(support.k, n_total);

        RemovalIteration rec;
        rec.iteration = iter;
        rec.n_active = std::int64_t(active.size());
        rec.objective = sol.objective;
        rec.k = support.k;
        rec.r_target = choice.n_removed;

        trace.final_solution = sol;
        trace.final_support = support;
        final_state_stale = false;

        std::vector<std::int64_t> not_violated;
        for (std::int64_t i : removed)
            if (!program.violates(sol, i)) not_violated.push_back(i);

        if (!not_violated.empty()) {
            // Re-add satisfied removals and swap in alternatives so the
            // removed set stays almost-surely violated.
            for (std::int64_t i : not_violated) {
                removed.erase(i);
                removal_order.erase(
                    std::find(removal_order.begin(), removal_order.end(), i));
                rec.readded.push_back(i);
            }
            const std::int64_t budget =
                choice.n_removed - std::int64_t(removed.size());
            const std::int64_t want =
                std::min<std::int64_t>(std::int64_t(not_violated.size()), std::max<std::int64_t>(budget, 0));
            auto order = ranked_support(active, support);
            for (std::int64_t i : order) {
                if (std::int64_t(rec.removed.size()) >= want) break;
                if (removed.count(i)) continue;
                removed.insert(i);
                removal_order.push_back(i);
                rec.removed.push_back(i);
            }
            if (rec.removed.empty() && want > 0) {
                trace.iterations.push_back(rec);
                trace.termination = "violation-repair-exhausted";
                final_state_stale = true;
                break;
            }
            prev_k = support.k;
            trace.iterations.push_back(rec);
            final_state_stale = true;
            continue;
        }

        if (std::int64_t(removed.size()) > choice.n_removed) {
            // Budget overshoot after k increased: re-add the most recent
            // removals until |I| fits the current target.
            while (std::int64_t(removed.size()) > choice.n_removed) {
                const std::int64_t back = removal_order.back();
                removal_order.pop_back();
                removed.erase(back);
                rec.readded.push_back(back);
            }
            prev_k = support.k;
            trace.iterations.push_back(rec);
            final_state_stale = true;
            continue;
        }

        const std::int64_t budget = choice.n_removed - std::int64_t(removed.size());
        const std::int64_t n_rem = std::min<std::int64_t>(support.k, budget);
        if (n_rem > 0) {
            auto order = ranked_support(active, support);
            for (std::int64_t idx = 0; idx < n_rem && idx < std::int64_t(order.size()); ++idx) {
                removed.insert(order[std::size_t(idx)]);
                removal_order.push_back(order[std::size_t(idx)]);
                rec.removed.push_back(order[std::size_t(idx)]);
            }
            prev_k = support.k;
            trace.iterations.push_back(rec);
            final_state_stale = true;
            continue;
        }

        trace.iterations.push_back(rec);
        if (budget == 0) { // |I| == r_target, everything in I violated
            trace.termination = "removal-target-reached";
            break;
        }
        if (support.k == prev_k) { // nothing removable and k settled
            trace.termination = "support-count-stable";
            break;
        }
        prev_k = support.k;
    }

    if (trace.termination.empty()) trace.termination = "iteration-cap";
    trace.removed.assign(removed.begin(), removed.end());
    if (trace.termination.rfind("solver-failure", 0) == 0) return trace;

    if (final_state_stale) {
        const auto active = active_set();
        trace.final_solution = program.solve(active);
        trace.final_support = find_support_set(program, active, trace.final_solution);
    }
    trace.risk_bound = policy.bound(trace.final_support.k,
                                    std::int64_t(trace.removed.size()), n_total);

    // Non-degeneracy spot check: the solution keeping only the support
    // constraints must reproduce the objective. Programs that reject an
    // empty active set skip the k = 0 case.
    try {
        const ScenarioSolution only_support = program.solve(trace.final_support.support);
        if (std::fabs(only_support.objective - trace.final_solution.objective) >
            trace.final_support.tolerance)
            trace.degenerate = true;
    } catch (const std::invalid_argument&) {
    }
    return trace;
}

std::pair<bool, std::vector<std::int64_t>>
verify_removed_violated(const ScenarioProgram& program, const ScenarioSolution& solution,
                        const std::vector<std::int64_t>& removed) {
    std::vector<std::int64_t> offenders;
    for (std::int64_t i : removed)
        if (!program.violates(solution, i)) offenders.push_back(i);
    return {offenders.empty(), offenders};
}

ViolationEstimate estimate_violation(std::int64_t n_fresh,
                                     const std::function<bool(std::int64_t)>& violates_fresh) {
    if (n_fresh < 1) throw std::invalid_argument("estimate_violation: n_fresh must be >= 1");
    ViolationEstimate est;
    est.n_fresh = n_fresh;
    for (std::int64_t j = 0; j < n_fresh; ++j)
        if (violates_fresh(j)) ++est.violations;
    est.rate = double(est.violations) / double(n_fresh);
    const auto iv = detail::wilson_interval(est.violations, n_fresh);
    est.wilson_lo = iv.lo;
    est.wilson_hi = iv.hi;
    return est;
}

std::string RemovalTrace::to_json() const {
    nlohmann::ordered_json j;
    j["iterations"] = nlohmann::ordered_json::array();
    for (const auto& it : iterations) {
        nlohmann::ordered_json rec;
        rec["iteration"] = it.iteration;
        rec["n_active"] = it.n_active;
        rec["objective"] = it.objective;
        rec["k"] = it.k;
        rec["r_target"] = it.r_target;
        rec["removed"] = it.removed;
        rec["readded"] = it.readded;
        j["iterations"].push_back(rec);
    }
    j["removed"] = removed;
    j["k_final"] = final_support.k;
    j["support"] = final_support.support;
    j["objective"] = final_solution.objective;
    j["risk_bound"] = risk_bound;
    j["termination"] = termination;
    j["degenerate"] = degenerate;
    return j.dump(2);
}

} // namespace scenopt
