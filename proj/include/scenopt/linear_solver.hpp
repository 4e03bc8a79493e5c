#pragma once

#include <cstdint>
#include <vector>

namespace scenopt {

/**
 * Dense inequality-form linear program
 *
 *   maximize c'x  subject to  Ax <= b,  lower <= x <= upper
 *
 * Bounds may be +-infinity. Every row carries an opaque integer tag; tags
 * are how callers map rows back to scenario indices and need not be unique.
 */
struct LinearProgram {
    std::vector<double> objective;
    std::vector<std::vector<double>> rows;
    std::vector<double> rhs;
    std::vector<std::int64_t> tags;
    std::vector<double> lower;
    std::vector<double> upper;

    std::size_t n_vars() const { return objective.size(); }
    std::size_t n_rows() const { return rows.size(); }

    void add_row(std::vector<double> coeffs, double bound, std::int64_t tag);

    /// Throws std::invalid_argument on inconsistent dimensions.
    void validate() const;
};

enum class LpStatus { optimal, infeasible, unbounded };

/**
 * Vertex solution. For status == optimal the KKT certificate
 * (row_duals >= 0, bound multipliers >= 0) satisfies stationarity
 *   c - A'y - mu_upper + mu_lower = 0
 * and complementary slackness to the solver's 1e-8 relative tolerance.
 */
struct LpSolution {
    LpStatus status = LpStatus::infeasible;
    std::vector<double> x;
    double objective = 0.0;
    std::vector<std::size_t> active_rows;     ///< indices of rows binding at x
    std::vector<std::int64_t> active_tags;    ///< distinct tags of those rows, sorted
    std::vector<double> row_duals;            ///< y, one per input row
    std::vector<double> lower_duals;          ///< multipliers of x >= lower
    std::vector<double> upper_duals;          ///< multipliers of x <= upper
};

/// Relative feasibility tolerance shared by the solver and active-set
/// detection (and by support detection upstream).
inline constexpr double kLpFeasTol = 1e-8;

/**
 * Dense two-phase tableau simplex with Bland's rule. Deterministic: the
 * same input bytes take the same pivot path. Intended for instances up to
 * a few hundred rows/variables.
 */
LpSolution solve_lp(const LinearProgram& lp);

/// solve_lp on the system with every row whose tag appears in
/// excluded_tags removed (leave-one-out re-solves for support detection).
LpSolution solve_lp_excluding(const LinearProgram& lp,
                              const std::vector<std::int64_t>& excluded_tags);

} // namespace scenopt
