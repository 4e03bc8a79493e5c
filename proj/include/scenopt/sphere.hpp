#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "scenopt/presets.hpp"
#include "scenopt/rng.hpp"
#include "scenopt/scenario_engine.hpp"

namespace scenopt {

/// Radius distribution of the random-sphere testbed. Normal sampling
/// rejects non-positive draws (a radius must be positive); cdf() describes
/// that truncated sampling law, while quantile() stays untruncated so the
/// closed-form reference column keeps its textbook value.
struct RadiusModel {
    enum class Kind { uniform01, normal } kind = Kind::uniform01;
    double mu = 3.0;
    double sigma = 1.0;

    double sample(CounterRng& rng) const;
    double cdf(double r) const;
    double quantile(double p) const;
    std::string label() const;
};

/**
 * min c'x subject to ||x|| <= delta_i for every sampled radius: the point
 * slides along -c until the smallest active sphere binds, so the smallest
 * radius is the single support constraint.
 */
struct SphereInstance {
    std::int64_t dimension = 2;
    std::vector<double> cost; ///< nonzero
    std::vector<double> radii;
    RadiusModel model;
};

struct SphereSolution {
    std::vector<double> x;
    double objective = 0.0; ///< minimized c'x = -||c|| * delta_min
    std::int64_t support_index = -1;
    double radius = 0.0; ///< ||x|| = smallest active radius
};

/// Closed-form solve over the non-removed radii; ties go to the lowest
/// index. Throws std::invalid_argument when no scenario remains active.
SphereSolution solve_sphere(const SphereInstance& instance,
                            const std::vector<std::int64_t>& removed);

/// Largest admissible radius at risk eps: the eps-quantile of the radius law.
double exact_quantile(const RadiusModel& model, double eps);

/// ScenarioProgram adapter (engine objective = ||c|| * delta_min, maximized).
class SphereProgram final : public ScenarioProgram {
  public:
    explicit SphereProgram(SphereInstance instance);

    std::int64_t dimension() const override { return instance_.dimension; }
    std::int64_t n_scenarios() const override {
        return std::int64_t(instance_.radii.size());
    }
    ScenarioSolution solve(const std::vector<std::int64_t>& active) const override;
    bool violates(const ScenarioSolution& solution, std::int64_t scenario) const override;
    std::vector<std::int64_t>
    support_candidates(const ScenarioSolution& solution,
                       const std::vector<std::int64_t>& active) const override;

    const SphereInstance& instance() const { return instance_; }
    double radius_of(const ScenarioSolution& solution) const;

  private:
    SphereInstance instance_;
    double cost_norm_;
};

struct TableOneRow {
    std::string dist;
    std::string approach; ///< exact | basic | discard | new
    std::int64_t n = 0;
    std::int64_t r = 0;
    double mean_radius = 0.0;
    double stderr_ = 0.0;
    std::int64_t trials = 0;
    std::uint64_t seed = 0;
};

struct TableOneConfig {
    presets::TableOnePreset preset = presets::kTableOneA;
    std::int64_t trials = 10000;
    std::uint64_t seed = 1;
    int jobs = 1;
};

/**
 * Monte Carlo reproduction of the illustrative-example table: for both
 * radius laws runs the plain approach (min of n_basic radii), the
 * fixed-budget discarding loop (n_discard radii, r_discard removals) and
 * the support-driven removal loop (n_basic radii, eps(k,R) budget), and
 * reports the mean binding radius per approach plus the closed-form row.
 */
std::vector<TableOneRow> reproduce_table_one(const TableOneConfig& config);

/// CSV schema: dist,approach,N,r,mean_radius,stderr,trials,seed
void write_table_one_csv(std::ostream& out, const std::vector<TableOneRow>& rows);

} // namespace scenopt
