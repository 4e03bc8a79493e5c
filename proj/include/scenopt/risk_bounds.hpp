#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace scenopt {

/**
 * Parameter bundle shared by the bound equations.
 *
 *   n_scenarios  N, samples enforced by the program
 *   n_decision   d, decision variables
 *   risk         epsilon, admissible violation probability
 *   confidence   beta, admissible probability of exceeding the risk
 *   n_removed    R, scenarios deliberately removed
 *   n_support    k, observed support constraints
 *
 * Combinatorial indices are kept as exact integers throughout.
 */
struct BoundParams {
    std::int64_t n_scenarios = 0;
    std::int64_t n_decision = 0;
    double risk = 0.0;
    double confidence = 0.0;
    std::int64_t n_removed = 0;
    std::int64_t n_support = 0;

    /// Throws std::invalid_argument on any violated range constraint.
    void validate() const;
};

/**
 * Confidence level of the a-priori scenario bound: the probability, over
 * sample draws, that the violation of the optimal solution exceeds eps.
 * Equals the binomial lower tail P(Bin(N, eps) <= d - 1), evaluated in log
 * space. Exactly 1 when d - 1 >= N.
 */
double beta_basic(std::int64_t n, std::int64_t d, double eps);

/// Smallest N with beta_basic(N, d, eps) <= beta.
std::int64_t min_samples_basic(double eps, double beta, std::int64_t d);

/**
 * Confidence level of the constraint-discarding bound:
 * C(R+d-1, R) * P(Bin(N, eps) <= R+d-1). The value may exceed 1; it is
 * returned as computed (callers clamp for reporting only). Requires
 * R + d - 1 < N.
 */
double beta_discard(std::int64_t n, std::int64_t r, std::int64_t d, double eps);

/// Smallest N with beta_discard(N, r, d, eps) <= beta.
std::int64_t min_samples_discard(double eps, double beta, std::int64_t d, std::int64_t r);

/**
 * Posterior risk certificate eps(k): the unique root in (0,1) of
 *
 *   beta/(N+1) * sum_{m=k}^{N} C(m,k) (1-eps)^(m-k)  =  C(N,k) (1-eps)^(N-k)
 *
 * found by bisection to absolute tolerance 1e-12 after a verified sign
 * bracket. k = 0 uses the same equation. k = N yields 1 (no non-trivial
 * certificate exists when every sample is a support constraint).
 */
double eps_wait_judge(std::int64_t k, std::int64_t n, double beta);

/**
 * Posterior risk certificate eps(k,R) after additionally removing R
 * scenarios; n counts the scenarios REMAINING after removal (the total
 * drawn is n + r). Root in (0,1) of
 *
 *   beta/(N+1) * sum_{m=k}^{N} C(m,k) (1-eps)^(m-k)
 *     =  C(N+R,R) C(N,k) (1-eps)^(N-k)
 *
 * with both sides compared in the log domain so that C(N+R,R) never
 * overflows. Reduces to eps_wait_judge when r = 0.
 */
double eps_discard_support(std::int64_t k, std::int64_t r, std::int64_t n, double beta);

/// Signed log-domain residual of the eps(k,R) equation; negative below the
/// root, positive above it. Exposed for bracket and feasibility checks.
double eps_equation_log_residual(std::int64_t k, std::int64_t r, std::int64_t n, double beta,
                                 double eps);

struct RemovalChoice {
    std::int64_t n_removed = 0; ///< chosen R
    bool admissible = false;    ///< eps(k, R) <= eps_target held at the choice
    bool saturated = false;     ///< search stopped at r_max (or sample exhaustion)
    double eps_at_choice = 1.0; ///< eps(k, R) at the returned R
};

/**
 * Largest R <= r_max whose certificate stays within eps_target, where each
 * candidate R is evaluated with n_total - R remaining scenarios. Returns
 * R = 0 (admissible = false) when even eps(k, 0) exceeds the target.
 */
RemovalChoice choose_removals(std::int64_t k, double eps_target, std::int64_t n_total,
                              double beta, std::int64_t r_max);

/**
 * Precomputed eps(k,R) grid over k in [0..d], R in [0..r_max], with the
 * remaining-sample count held fixed at n for every entry. Immutable after
 * construction.
 */
struct RiskTable {
    std::int64_t n_scenarios = 0;
    std::int64_t n_decision = 0;
    double confidence = 0.0;
    std::int64_t r_max = 0;
    std::vector<double> entries; // (d+1) x (r_max+1), row-major in k

    double at(std::int64_t k, std::int64_t r) const;

    /// CSV with header `k,R,epsilon`, epsilon printed to 12 significant digits.
    void write_csv(std::ostream& out) const;
};

RiskTable build_risk_table(std::int64_t n, std::int64_t d, double beta, std::int64_t r_max);

} // namespace scenopt
