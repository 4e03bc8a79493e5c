#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "scenopt/risk_bounds.hpp"

namespace scenopt {

/// Solution handle produced by a scenario program. Objectives follow the
/// maximization convention: removing scenarios can only increase them.
struct ScenarioSolution {
    std::vector<double> x;
    double objective = 0.0;
};

/**
 * Abstract convex scenario program over an indexed scenario set.
 *
 * Contract: solve() is deterministic for a fixed index set and callable
 * concurrently on disjoint sets; enlarging the active set never improves
 * the objective; violates() tests one scenario's constraint against a
 * solution; support_candidates() may narrow the leave-one-out search and
 * defaults to the whole active set.
 */
class ScenarioProgram {
  public:
    virtual ~ScenarioProgram() = default;

    virtual std::int64_t dimension() const = 0;
    virtual std::int64_t n_scenarios() const = 0;
    virtual ScenarioSolution solve(const std::vector<std::int64_t>& active) const = 0;
    virtual bool violates(const ScenarioSolution& solution, std::int64_t scenario) const = 0;
    virtual std::vector<std::int64_t>
    support_candidates(const ScenarioSolution& solution,
                       const std::vector<std::int64_t>& active) const {
        return active;
    }
};

struct SupportReport {
    std::vector<std::int64_t> support; ///< indices, ascending
    std::int64_t k = 0;                ///< |support|
    double objective = 0.0;            ///< objective of the base solution
    double tolerance = 0.0;            ///< improvement threshold used
};

/**
 * Leave-one-out support detection: scenario i is a support constraint when
 * re-solving without it improves the objective by more than
 * 1e-9 * (1 + |objective|).
 */
SupportReport find_support_set(const ScenarioProgram& program,
                               const std::vector<std::int64_t>& active,
                               const ScenarioSolution& base);

/**
 * Maps an observed support count to a removal budget and to the posterior
 * risk certificate. TheoremPolicy drives the budget from the eps(k,R)
 * equation; FixedBudgetPolicy uses a constant budget (the plain
 * constraint-discarding recipe). Both memoize root finds and are safe to
 * share across threads.
 */
class RiskPolicy {
  public:
    explicit RiskPolicy(double confidence) : confidence_(confidence) {}
    virtual ~RiskPolicy() = default;
    virtual RemovalChoice removals_for(std::int64_t k, std::int64_t n_total) const = 0;

    /// eps(k, r) with n_total - r scenarios remaining; memoized.
    double bound(std::int64_t k, std::int64_t r, std::int64_t n_total) const;
    double confidence() const { return confidence_; }

  protected:
    double confidence_;
    mutable std::mutex mutex_;
    mutable std::map<std::tuple<std::int64_t, std::int64_t, std::int64_t>, double> eps_cache_;
};

class TheoremPolicy final : public RiskPolicy {
  public:
    TheoremPolicy(double eps_target, double confidence, std::int64_t r_cap);
    RemovalChoice removals_for(std::int64_t k, std::int64_t n_total) const override;
    double eps_target() const { return eps_target_; }

  private:
    double eps_target_;
    std::int64_t r_cap_;
    mutable std::map<std::pair<std::int64_t, std::int64_t>, RemovalChoice> choice_cache_;
};

class FixedBudgetPolicy final : public RiskPolicy {
  public:
    FixedBudgetPolicy(std::int64_t budget, double confidence);
    RemovalChoice removals_for(std::int64_t k, std::int64_t n_total) const override;

  private:
    std::int64_t budget_;
};

struct RemovalIteration {
    std::int64_t iteration = 0;
    std::int64_t n_active = 0;
    double objective = 0.0;
    std::int64_t k = 0;
    std::int64_t r_target = 0;
    std::vector<std::int64_t> removed; ///< indices removed this round
    std::vector<std::int64_t> readded; ///< indices put back this round
};

/// Full record of one removal-loop run. JSON schema: see README.
struct RemovalTrace {
    std::vector<RemovalIteration> iterations;
    std::vector<std::int64_t> removed; ///< final removed set I, ascending
    SupportReport final_support;
    ScenarioSolution final_solution;
    double risk_bound = 1.0; ///< eps(k_final, |I|)
    std::string termination;
    bool degenerate = false; ///< non-degeneracy spot check failed

    std::string to_json() const;
};

/**
 * Iterative constraint removal: solve with the removed set I excluded,
 * observe the support count k, derive the removal budget from the policy,
 * greedily remove up to min(k, budget) support constraints (largest
 * objective improvement first, ties to the lowest index), and repeat.
 *
 * Terminates when the budget is exhausted ("removal-target-reached"), when
 * k is stable between rounds with nothing left to remove
 * ("support-count-stable"), when a non-violated removed index cannot be
 * swapped for an alternative ("violation-repair-exhausted"), or at the
 * iteration cap ("iteration-cap"). Removed indices not violated by the
 * current solution are re-added and replaced before normal termination.
 */
RemovalTrace removal_loop(const ScenarioProgram& program, const RiskPolicy& policy,
                          std::optional<std::int64_t> max_iterations = std::nullopt);

/// Checks that every removed index is violated; returns the offenders.
std::pair<bool, std::vector<std::int64_t>>
verify_removed_violated(const ScenarioProgram& program, const ScenarioSolution& solution,
                        const std::vector<std::int64_t>& removed);

struct ViolationEstimate {
    std::int64_t n_fresh = 0;
    std::int64_t violations = 0;
    double rate = 0.0;
    double wilson_lo = 0.0;
    double wilson_hi = 1.0;
};

/**
 * Monte Carlo violation frequency over n_fresh scenarios (drawn
 * independently of those used to solve), with a 95% Wilson interval.
 * violates_fresh(j) tests the solution against fresh scenario j.
 */
ViolationEstimate estimate_violation(std::int64_t n_fresh,
                                     const std::function<bool(std::int64_t)>& violates_fresh);

} // namespace scenopt
