#include "scenopt/linear_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace scenopt {

namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kInf = std::numeric_limits<double>::infinity();

// How each original variable is represented in the nonnegative standard form.
struct ColMap {
    enum Kind { shifted, flipped, split } kind;
    std::size_t col;        // primary column
    std::size_t col_neg;    // second column for split variables
    double offset;          // shifted: x = offset + z ; flipped: x = offset - z
};

// Standard-form tableau: maximize c'z, A z <= b, z >= 0.
struct Tableau {
    std::size_t n_struct = 0;
    std::size_t n_slack = 0;
    std::size_t n_art = 0;
    std::vector<std::vector<double>> a; // m x n_cols
    std::vector<double> rhs;            // m, kept nonnegative
    std::vector<double> obj;            // phase-2 reduced costs, n_cols
    std::vector<double> art_obj;        // phase-1 reduced costs
    std::vector<std::size_t> basis;     // basic column per row
    double obj_shift = 0.0;             // accumulated constant of obj
    double art_shift = 0.0;

    std::size_t n_cols() const { return n_struct + n_slack + n_art; }

    void pivot(std::size_t pr, std::size_t pc) {
        const double piv = a[pr][pc];
        for (double& v : a[pr]) v /= piv;
        rhs[pr] /= piv;
        a[pr][pc] = 1.0; // cut roundoff on the pivot itself
        auto eliminate = [&](std::vector<double>& row, double& rhs_or_shift) {
            const double f = row[pc];
            if (f == 0.0) return;
            for (std::size_t j = 0; j < row.size(); ++j) row[j] -= f * a[pr][j];
            row[pc] = 0.0;
            rhs_or_shift -= f * rhs[pr];
        };
        for (std::size_t i = 0; i < a.size(); ++i)
            if (i != pr) eliminate(a[i], rhs[i]);
        eliminate(obj, obj_shift);
        if (!art_obj.empty()) eliminate(art_obj, art_shift);
        basis[pr] = pc;
    }

    // One simplex phase under Bland's rule on `costs` (maximization).
    // max_col bounds the entering columns. Returns false on unboundedness.
    bool run(std::vector<double>& costs, std::size_t max_col) {
        for (long iter = 0; iter < 100000; ++iter) {
            std::size_t entering = max_col;
            for (std::size_t j = 0; j < max_col; ++j)
                if (costs[j] > 1e-9) { entering = j; break; }
            if (entering == max_col) return true; // optimal
            std::size_t leave = a.size();
            double best_ratio = kInf;
            double best_pivot = 0.0;
            for (std::size_t i = 0; i < a.size(); ++i) {
                const double aij = a[i][entering];
                if (aij > kPivotTol) {
                    const double ratio = rhs[i] / aij;
                    if (ratio < best_ratio - 1e-12 ||
                        (ratio < best_ratio + 1e-12 &&
                         (leave == a.size() || basis[i] < basis[leave]))) {
                        best_ratio = ratio;
                        leave = i;
                        best_pivot = aij;
                    }
                }
            }
            if (leave == a.size()) {
                // no admissible pivot: genuinely increasing column means
                // unbounded, a column of near-zero noise means breakdown
                for (std::size_t i = 0; i < a.size(); ++i)
                    if (a[i][entering] > 0.0 && a[i][entering] <= kPivotTol)
                        throw std::runtime_error(
                            "solve_lp: numeric breakdown (pivot below 1e-11)");
                return false;
            }
            (void)best_pivot;
            pivot(leave, entering);
        }
        throw std::runtime_error("solve_lp: iteration cap reached");
    }
};

} // namespace

void LinearProgram::add_row(std::vector<double> coeffs, double bound, std::int64_t tag) {
    rows.push_back(std::move(coeffs));
    rhs.push_back(bound);
    tags.push_back(tag);
}

void LinearProgram::validate() const {
    const std::size_t n = n_vars();
    if (lower.size() != n || upper.size() != n)
        throw std::invalid_argument("LinearProgram: bounds size mismatch");
    if (rhs.size() != rows.size() || tags.size() != rows.size())
        throw std::invalid_argument("LinearProgram: row metadata size mismatch");
    for (const auto& row : rows)
        if (row.size() != n) throw std::invalid_argument("LinearProgram: row width mismatch");
    for (std::size_t j = 0; j < n; ++j)
        if (!(lower[j] <= upper[j]))
            throw std::invalid_argument("LinearProgram: lower bound exceeds upper bound");
}

LpSolution solve_lp(const LinearProgram& lp) {
    lp.validate();
    const std::size_t n = lp.n_vars();
    const std::size_t m = lp.n_rows();

    // Map to nonnegative variables; finite two-sided bounds become rows.
    std::vector<ColMap> cmap(n);
    std::size_t n_struct = 0;
    for (std::size_t j = 0; j < n; ++j) {
        if (std::isfinite(lp.lower[j])) {
            cmap[j] = {ColMap::shifted, n_struct++, 0, lp.lower[j]};
        } else if (std::isfinite(lp.upper[j])) {
            cmap[j] = {ColMap::flipped, n_struct++, 0, lp.upper[j]};
        } else {
            cmap[j] = {ColMap::split, n_struct, n_struct + 1, 0.0};
            n_struct += 2;
        }
    }
    struct BoundRow {
        std::size_t var;
        double width;
    };
    std::vector<BoundRow> bound_rows;
    for (std::size_t j = 0; j < n; ++j)
        if (std::isfinite(lp.lower[j]) && std::isfinite(lp.upper[j]) &&
            lp.upper[j] > lp.lower[j])
            bound_rows.push_back({j, lp.upper[j] - lp.lower[j]});
        else if (std::isfinite(lp.lower[j]) && lp.upper[j] == lp.lower[j])
            bound_rows.push_back({j, 0.0}); // fixed variable, z_j <= 0

    const std::size_t m_all = m + bound_rows.size();
    Tableau t;
    t.n_struct = n_struct;
    t.n_slack = m_all;
    t.a.assign(m_all, std::vector<double>(n_struct, 0.0));
    t.rhs.assign(m_all, 0.0);
    std::vector<double> row_scale(m_all, 1.0);

    double obj_const = 0.0;
    std::vector<double> c(n_struct, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        const double cj = lp.objective[j];
        switch (cmap[j].kind) {
        case ColMap::shifted:
            c[cmap[j].col] = cj;
            obj_const += cj * cmap[j].offset;
            break;
        case ColMap::flipped:
            c[cmap[j].col] = -cj;
            obj_const += cj * cmap[j].offset;
            break;
        case ColMap::split:
            c[cmap[j].col] = cj;
            c[cmap[j].col_neg] = -cj;
            break;
        }
    }
    for (std::size_t i = 0; i < m; ++i) {
        double b = lp.rhs[i];
        auto& row = t.a[i];
        for (std::size_t j = 0; j < n; ++j) {
            const double aij = lp.rows[i][j];
            if (aij == 0.0) continue;
            switch (cmap[j].kind) {
            case ColMap::shifted:
                row[cmap[j].col] += aij;
                b -= aij * cmap[j].offset;
                break;
            case ColMap::flipped:
                row[cmap[j].col] -= aij;
                b -= aij * cmap[j].offset;
                break;
            case ColMap::split:
                row[cmap[j].col] += aij;
                row[cmap[j].col_neg] -= aij;
                break;
            }
        }
        double scale = 1.0;
        for (double v : row) scale = std::max(scale, std::fabs(v));
        for (double& v : row) v /= scale;
        row_scale[i] = scale;
        t.rhs[i] = b / scale;
    }
    for (std::size_t bi = 0; bi < bound_rows.size(); ++bi) {
        const auto& br = bound_rows[bi];
        t.a[m + bi][cmap[br.var].col] = 1.0;
        t.rhs[m + bi] = br.width;
    }

    // Slack columns; rows with negative rhs get an artificial instead.
    std::vector<std::size_t> art_cols;
    for (auto& row : t.a) row.resize(n_struct + m_all, 0.0);
    t.basis.assign(m_all, 0);
    std::vector<std::size_t> art_of_row(m_all, SIZE_MAX);
    for (std::size_t i = 0; i < m_all; ++i) {
        if (t.rhs[i] < 0.0) {
            for (double& v : t.a[i]) v = -v;
            t.rhs[i] = -t.rhs[i];
            t.a[i][n_struct + i] = -1.0;
            art_of_row[i] = i;
        } else {
            t.a[i][n_struct + i] = 1.0;
            t.basis[i] = n_struct + i;
        }
    }
    std::size_t n_art = 0;
    for (std::size_t i = 0; i < m_all; ++i)
        if (art_of_row[i] != SIZE_MAX) ++n_art;
    t.n_art = n_art;
    if (n_art > 0) {
        std::size_t next = n_struct + m_all;
        for (auto& row : t.a) row.resize(n_struct + m_all + n_art, 0.0);
        for (std::size_t i = 0; i < m_all; ++i)
            if (art_of_row[i] != SIZE_MAX) {
                t.a[i][next] = 1.0;
                t.basis[i] = next;
                ++next;
            }
    }

    t.obj.assign(t.n_cols(), 0.0);
    std::copy(c.begin(), c.end(), t.obj.begin());
    t.obj_shift = 0.0;

    LpSolution sol;
    sol.x.assign(n, 0.0);
    sol.row_duals.assign(m, 0.0);
    sol.lower_duals.assign(n, 0.0);
    sol.upper_duals.assign(n, 0.0);

    if (n_art > 0) {
        // Phase 1: maximize -(sum of artificials), priced out over the basis.
        t.art_obj.assign(t.n_cols(), 0.0);
        for (std::size_t j = n_struct + m_all; j < t.n_cols(); ++j) t.art_obj[j] = -1.0;
        t.art_shift = 0.0;
        for (std::size_t i = 0; i < m_all; ++i)
            if (t.basis[i] >= n_struct + m_all) {
                for (std::size_t j = 0; j < t.n_cols(); ++j) t.art_obj[j] += t.a[i][j];
                t.art_shift += t.rhs[i];
            }
        for (std::size_t j = n_struct + m_all; j < t.n_cols(); ++j) t.art_obj[j] = 0.0;
        t.run(t.art_obj, n_struct + m_all);
        if (t.art_shift > 1e-7) {
            sol.status = LpStatus::infeasible;
            return sol;
        }
        // Drive leftover artificials out of the basis; an undrivable row is
        // redundant and pivoting is skipped (its rhs is ~0).
        for (std::size_t i = 0; i < m_all; ++i) {
            if (t.basis[i] < n_struct + m_all) continue;
            std::size_t pc = SIZE_MAX;
            for (std::size_t j = 0; j < n_struct + m_all; ++j)
                if (std::fabs(t.a[i][j]) > kPivotTol) { pc = j; break; }
            if (pc != SIZE_MAX) t.pivot(i, pc);
        }
        t.art_obj.clear();
    }

    if (!t.run(t.obj, n_struct + m_all)) {
        sol.status = LpStatus::unbounded;
        return sol;
    }

    // Recover z, x, objective.
    std::vector<double> z(n_struct, 0.0);
    for (std::size_t i = 0; i < m_all; ++i)
        if (t.basis[i] < n_struct) z[t.basis[i]] = t.rhs[i];
    for (std::size_t j = 0; j < n; ++j) {
        switch (cmap[j].kind) {
        case ColMap::shifted: sol.x[j] = cmap[j].offset + z[cmap[j].col]; break;
        case ColMap::flipped: sol.x[j] = cmap[j].offset - z[cmap[j].col]; break;
        case ColMap::split: sol.x[j] = z[cmap[j].col] - z[cmap[j].col_neg]; break;
        }
    }
    sol.objective = 0.0;
    for (std::size_t j = 0; j < n; ++j) sol.objective += lp.objective[j] * sol.x[j];

    // Duals: y_i = -reduced cost of slack i, unscaled; bound-row duals fold
    // into the bound multipliers, nonbasic structural columns likewise.
    for (std::size_t i = 0; i < m; ++i)
        sol.row_duals[i] = std::max(0.0, -t.obj[n_struct + i]) / row_scale[i];
    for (std::size_t bi = 0; bi < bound_rows.size(); ++bi) {
        const double y = std::max(0.0, -t.obj[n_struct + m + bi]);
        const auto& br = bound_rows[bi];
        if (cmap[br.var].kind == ColMap::shifted)
            sol.upper_duals[br.var] += y;
        else
            sol.lower_duals[br.var] += y;
    }
    std::vector<bool> basic(t.n_cols(), false);
    for (std::size_t b : t.basis) basic[b] = true;
    for (std::size_t j = 0; j < n; ++j) {
        const auto& cm = cmap[j];
        if (cm.kind == ColMap::split) continue;
        if (!basic[cm.col]) {
            const double rc = std::max(0.0, -t.obj[cm.col]);
            if (cm.kind == ColMap::shifted)
                sol.lower_duals[j] += rc;
            else
                sol.upper_duals[j] += rc;
        }
    }

    // Primal feasibility audit; failures here indicate numeric breakdown.
    for (std::size_t i = 0; i < m; ++i) {
        double ax = 0.0;
        for (std::size_t j = 0; j < n; ++j) ax += lp.rows[i][j] * sol.x[j];
        const double slack = lp.rhs[i] - ax;
        if (slack < -kLpFeasTol * (1.0 + std::fabs(lp.rhs[i])))
            throw std::runtime_error("solve_lp: numeric breakdown (infeasible vertex)");
        if (slack <= kLpFeasTol * (1.0 + std::fabs(lp.rhs[i]))) sol.active_rows.push_back(i);
    }
    for (std::size_t j = 0; j < n; ++j)
        if (sol.x[j] < lp.lower[j] - kLpFeasTol * (1.0 + std::fabs(lp.lower[j])) ||
            sol.x[j] > lp.upper[j] + kLpFeasTol * (1.0 + std::fabs(lp.upper[j])))
            throw std::runtime_error("solve_lp: numeric breakdown (bound violated)");

    sol.active_tags.reserve(sol.active_rows.size());
    for (std::size_t i : sol.active_rows) sol.active_tags.push_back(lp.tags[i]);
    std::sort(sol.active_tags.begin(), sol.active_tags.end());
    sol.active_tags.erase(std::unique(sol.active_tags.begin(), sol.active_tags.end()),
                          sol.active_tags.end());
    sol.status = LpStatus::optimal;
    return sol;
}

LpSolution solve_lp_excluding(const LinearProgram& lp,
                              const std::vector<std::int64_t>& excluded_tags) {
    LinearProgram filtered;
    filtered.objective = lp.objective;
    filtered.lower = lp.lower;
    filtered.upper = lp.upper;
    for (std::size_t i = 0; i < lp.n_rows(); ++i) {
        if (std::find(excluded_tags.begin(), excluded_tags.end(), lp.tags[i]) !=
            excluded_tags.end())
            continue;
        filtered.add_row(lp.rows[i], lp.rhs[i], lp.tags[i]);
    }
    return solve_lp(filtered);
}

} // namespace scenopt
