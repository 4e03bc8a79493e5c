#include "scenopt/risk_bounds.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

#include "scenopt/detail/numeric.hpp"

namespace scenopt {

using detail::log_binom;

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument(what);
}

// log of sum_{m=k}^{n} C(m,k) (1-eps)^(m-k), accumulated with the stable
// term recurrence t_{j+1} = t_j * (1-eps) * (k+j+1)/(j+1) and power-of-two
// rescaling, so the hockey-stick total C(n+1,k+1) never overflows.
double log_series(std::int64_t k, std::int64_t n, double eps) {
    const double t = 1.0 - eps;
    double term = 1.0;
    double sum = 0.0;
    std::int64_t shift = 0;
    for (std::int64_t j = 0; j <= n - k; ++j) {
        sum += term;
        term *= t * double(k + j + 1) / double(j + 1);
        if (sum > 1e280) {
            sum = std::ldexp(sum, -512);
            term = std::ldexp(term, -512);
            shift += 512;
        }
    }
    return std::log(sum) + double(shift) * detail::kLn2;
}

} // namespace

void BoundParams::validate() const {
    require(n_scenarios >= 1, "n_scenarios must be >= 1");
    require(n_decision >= 1, "n_decision must be >= 1");
    require(risk > 0.0 && risk < 1.0, "risk must lie in (0,1)");
    require(confidence > 0.0 && confidence < 1.0, "confidence must lie in (0,1)");
    require(n_removed >= 0, "n_removed must be >= 0");
    require(n_removed < n_scenarios, "n_removed must be < n_scenarios");
    require(n_support >= 0 && n_support <= n_decision, "n_support must lie in [0, n_decision]");
}

double beta_basic(std::int64_t n, std::int64_t d, double eps) {
    require(n >= 1, "beta_basic: n must be >= 1");
    require(d >= 1, "beta_basic: d must be >= 1");
    require(eps > 0.0 && eps < 1.0, "beta_basic: eps must lie in (0,1)");
    if (d - 1 >= n) return 1.0; // the full binomial mass
    const double le = std::log(eps);
    const double l1e = std::log1p(-eps);
    std::vector<double> terms;
    terms.reserve(std::size_t(d));
    for (std::int64_t i = 0; i < d; ++i)
        terms.push_back(log_binom(n, i) + double(i) * le + double(n - i) * l1e);
    return std::exp(detail::log_sum_exp(terms));
}

std::int64_t min_samples_basic(double eps, double beta, std::int64_t d) {
    require(d >= 1, "min_samples_basic: d must be >= 1");
    require(eps > 0.0 && eps < 1.0, "min_samples_basic: eps must lie in (0,1)");
    require(beta > 0.0 && beta < 1.0, "min_samples_basic: beta must lie in (0,1)");
    // beta_basic is strictly decreasing in n; bracket exponentially, then bisect.
    std::int64_t lo = d; // beta_basic(d, d, eps) = 1 - eps^d, never <= beta for beta < 1 - eps^d
    if (beta_basic(lo, d, eps) <= beta) return lo;
    std::int64_t hi = lo;
    do {
        if (hi > (std::int64_t(1) << 40))
            throw std::runtime_error("min_samples_basic: bracket search exceeded 2^40 samples");
        hi *= 2;
    } while (beta_basic(hi, d, eps) > beta);
    while (lo + 1 < hi) {
        const std::int64_t mid = lo + (hi - lo) / 2;
        (beta_basic(mid, d, eps) <= beta ? hi : lo) = mid;
    }
    return hi;
}

double beta_discard(std::int64_t n, std::int64_t r, std::int64_t d, double eps) {
    require(r >= 0, "beta_discard: r must be >= 0");
    require(d >= 1, "beta_discard: d must be >= 1");
    require(r + d - 1 < n, "beta_discard: requires r + d - 1 < n");
    require(eps > 0.0 && eps < 1.0, "beta_discard: eps must lie in (0,1)");
    const double le = std::log(eps);
    const double l1e = std::log1p(-eps);
    std::vector<double> terms;
    terms.reserve(std::size_t(r + d));
    for (std::int64_t i = 0; i <= r + d - 1; ++i)
        terms.push_back(log_binom(n, i) + double(i) * le + double(n - i) * l1e);
    return std::exp(log_binom(r + d - 1, r) + detail::log_sum_exp(terms));
}

std::int64_t min_samples_discard(double eps, double beta, std::int64_t d, std::int64_t r) {
    require(d >= 1, "min_samples_discard: d must be >= 1");
    require(r >= 0, "min_samples_discard: r must be >= 0");
    require(eps > 0.0 && eps < 1.0, "min_samples_discard: eps must lie in (0,1)");
    require(beta > 0.0 && beta < 1.0, "min_samples_discard: beta must lie in (0,1)");
    std::int64_t lo = r + d; // smallest n with r + d - 1 < n
    if (beta_discard(lo, r, d, eps) <= beta) return lo;
    std::int64_t hi = lo;
    do {
        if (hi > (std::int64_t(1) << 40))
            throw std::runtime_error("min_samples_discard: bracket search exceeded 2^40 samples");
        hi *= 2;
    } while (beta_discard(hi, r, d, eps) > beta);
    while (lo + 1 < hi) {
        const std::int64_t mid = lo + (hi - lo) / 2;
        (beta_discard(mid, r, d, eps) <= beta ? hi : lo) = mid;
    }
    return hi;
}

double eps_equation_log_residual(std::int64_t k, std::int64_t r, std::int64_t n, double beta,
                                 double eps) {
    const double lhs = std::log(beta) - std::log(double(n + 1)) + log_series(k, n, eps);
    const double rhs =
        log_binom(n + r, r) + log_binom(n, k) + double(n - k) * std::log1p(-eps);
    return lhs - rhs;
}

double eps_discard_support(std::int64_t k, std::int64_t r, std::int64_t n, double beta) {
    require(n >= 1, "eps_discard_support: n must be >= 1");
    require(k >= 0 && k <= n, "eps_discard_support: k must lie in [0, n]");
    require(r >= 0, "eps_discard_support: r must be >= 0");
    require(beta > 0.0 && beta < 1.0, "eps_discard_support: beta must lie in (0,1)");
    if (k == n) return 1.0;

    double lo = 0.0;
    double hi = 1.0;
    if (!(eps_equation_log_residual(k, r, n, beta, lo) < 0.0 &&
          eps_equation_log_residual(k, r, n, beta, hi) > 0.0))
        throw std::runtime_error("eps_discard_support: sign bracket failed (internal bug)");
    // 200-iteration hard cap; the 1e-12 tolerance is reached after ~40.
    for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
        const double mid = 0.5 * (lo + hi);
        (eps_equation_log_residual(k, r, n, beta, mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double eps_wait_judge(std::int64_t k, std::int64_t n, double beta) {
    return eps_discard_support(k, 0, n, beta);
}

RemovalChoice choose_removals(std::int64_t k, double eps_target, std::int64_t n_total,
                              double beta, std::int64_t r_max) {
    require(eps_target > 0.0 && eps_target < 1.0, "choose_removals: eps_target must lie in (0,1)");
    require(r_max >= 0, "choose_removals: r_max must be >= 0");
    require(n_total > k, "choose_removals: n_total must exceed k");

    RemovalChoice choice;
    choice.eps_at_choice = eps_discard_support(k, 0, n_total, beta);
    if (choice.eps_at_choice > eps_target) return choice; // no removal admissible
    choice.admissible = true;
    while (choice.n_removed < r_max) {
        const std::int64_t next = choice.n_removed + 1;
        if (n_total - next <= k) { // cannot leave fewer remaining samples than k
            choice.saturated = true;
            return choice;
        }
        const double eps_next = eps_discard_support(k, next, n_total - next, beta);
        if (eps_next > eps_target) return choice;
        choice.n_removed = next;
        choice.eps_at_choice = eps_next;
    }
    choice.saturated = true;
    return choice;
}

double RiskTable::at(std::int64_t k, std::int64_t r) const {
    if (k < 0 || k > n_decision || r < 0 || r > r_max)
        throw std::invalid_argument("RiskTable::at: index out of range");
    return entries[std::size_t(k) * std::size_t(r_max + 1) + std::size_t(r)];
}

void RiskTable::write_csv(std::ostream& out) const {
    out << "k,R,epsilon\n";
    char buf[64];
    for (std::int64_t k = 0; k <= n_decision; ++k)
        for (std::int64_t r = 0; r <= r_max; ++r) {
            std::snprintf(buf, sizeof buf, "%.12g", at(k, r));
            out << k << ',' << r << ',' << buf << '\n';
        }
}

RiskTable build_risk_table(std::int64_t n, std::int64_t d, double beta, std::int64_t r_max) {
    require(n >= 1, "build_risk_table: n must be >= 1");
    require(d >= 0 && d <= n, "build_risk_table: d must lie in [0, n]");
    require(beta > 0.0 && beta < 1.0, "build_risk_table: beta must lie in (0,1)");
    require(r_max >= 0, "build_risk_table: r_max must be >= 0");
    RiskTable table;
    table.n_scenarios = n;
    table.n_decision = d;
    table.confidence = beta;
    table.r_max = r_max;
    table.entries.resize(std::size_t(d + 1) * std::size_t(r_max + 1));
    for (std::int64_t k = 0; k <= d; ++k)
        for (std::int64_t r = 0; r <= r_max; ++r) {
            try {
                table.entries[std::size_t(k) * std::size_t(r_max + 1) + std::size_t(r)] =
                    eps_discard_support(k, r, n, beta);
            } catch (const std::exception& e) {
                throw std::runtime_error("build_risk_table at k=" + std::to_string(k) +
                                         ", R=" + std::to_string(r) + ": " + e.what());
            }
        }
    return table;
}

} // namespace scenopt
