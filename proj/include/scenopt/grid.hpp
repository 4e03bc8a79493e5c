#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "scenopt/linear_solver.hpp"
#include "scenopt/presets.hpp"
#include "scenopt/rng.hpp"
#include "scenopt/scenario_engine.hpp"

namespace scenopt {

struct Generator {
    std::int64_t node = 0;
    double p_cap = 0.0;
    double q_cap = 0.0;
};

/**
 * Linearized distribution-feeder model: voltage magnitudes respond
 * affinely to injected powers through the sensitivity matrices Zp, Zq
 * around the no-load profile v0 (all per-unit). Node 0 is the slack.
 */
struct GridModel {
    std::int64_t n_nodes = 0;
    std::vector<double> v0;
    std::vector<std::vector<double>> zp;
    std::vector<std::vector<double>> zq;
    double v_min = presets::kOpfVmin;
    double v_max = presets::kOpfVmax;
    std::vector<Generator> generators;

    void validate() const;
    std::string to_json() const;
    static GridModel from_json(const std::string& text);
};

struct FeederLine {
    std::int64_t from = 0;
    std::int64_t to = 0;
    double resistance = 0.0;
    double reactance = 0.0;
};

/**
 * Radial feeder with the shared-path impedance construction:
 * Zp[i][j] sums the resistances on the common root path of nodes i and j
 * (reactances for Zq), which makes both matrices symmetric PSD. Non-tree
 * line sets are rejected. v0 is the flat 1 pu profile.
 */
GridModel generate_synthetic_feeder(std::int64_t n_nodes, const std::vector<FeederLine>& lines,
                                    const std::vector<Generator>& generators);

/// The 8-node, 3-generator feeder bundled with the CLI demo.
GridModel demo_feeder();

/// |V| = v0 + diag(v0)^-1 (Zp (P_G + P_L) + Zq (Q_G + Q_L)); all n-vectors.
std::vector<double> voltage_from_loads(const GridModel& grid, const std::vector<double>& p_load,
                                       const std::vector<double>& q_load,
                                       const std::vector<double>& p_gen,
                                       const std::vector<double>& q_gen);

/// |V|_new = |V| + diag(v0)^-1 (Zp dP + Zq dQ) with per-generator
/// increments scattered to the node dimension.
std::vector<double> voltage_increment(const GridModel& grid, const std::vector<double>& voltage,
                                      const std::vector<double>& dp_gen,
                                      const std::vector<double>& dq_gen);

/// One sampled load realization and its derived voltage profile (no
/// generation): loads are negative injections.
struct LoadScenario {
    std::vector<double> p_load;
    std::vector<double> q_load;
    std::vector<double> voltage;
};

LoadScenario make_load_scenario(const GridModel& grid, std::vector<double> p_load,
                                std::vector<double> q_load);

/// Availability caps of one generator at one time step.
struct GeneratorLimits {
    double p_cap = 0.0;
    double q_cap = 0.0;
};

/**
 * Full scenario formulation: maximize sum of generation increments
 * subject to per-scenario voltage bands (2 n rows per scenario, each row
 * tagged with its scenario index) and the availability boxes
 * 0 <= increment <= cap. Decision order: dP per generator, then dQ.
 */
LinearProgram build_scenario_opf(const GridModel& grid,
                                 const std::vector<std::vector<double>>& voltage_samples,
                                 const std::vector<GeneratorLimits>& caps);

struct ReducedOpf {
    LinearProgram lp;                          ///< 2 n rows total
    std::vector<std::int64_t> argmin_scenario; ///< per node, ties to lowest index
    std::vector<std::int64_t> argmax_scenario;
};

/**
 * Per-node extremes reduction: one lower row per node using the smallest
 * sampled voltage and one upper row using the largest. Equivalent to the
 * full formulation; rows carry the extreme scenario's index as tag.
 */
ReducedOpf build_reduced_opf(const GridModel& grid,
                             const std::vector<std::vector<double>>& voltage_samples,
                             const std::vector<GeneratorLimits>& caps);

/// Scenario-program adapter over a fixed pool of sampled voltage profiles.
class GridOpfProgram final : public ScenarioProgram {
  public:
    GridOpfProgram(const GridModel& grid, std::vector<std::vector<double>> voltage_samples,
                   std::vector<GeneratorLimits> caps);

    std::int64_t dimension() const override {
        return 2 * std::int64_t(grid_.generators.size());
    }
    std::int64_t n_scenarios() const override {
        return std::int64_t(samples_.size());
    }
    ScenarioSolution solve(const std::vector<std::int64_t>& active) const override;
    bool violates(const ScenarioSolution& solution, std::int64_t scenario) const override;
    std::vector<std::int64_t>
    support_candidates(const ScenarioSolution& solution,
                       const std::vector<std::int64_t>& active) const override;

    /// Node voltages that the decision induces on a given base profile.
    std::vector<double> realized_voltage(const std::vector<double>& base_voltage,
                                         const ScenarioSolution& solution) const;
    bool violates_voltage(const std::vector<double>& voltage) const;

  private:
    const GridModel& grid_;
    std::vector<std::vector<double>> samples_;
    std::vector<GeneratorLimits> caps_;
};

/**
 * Load process abstraction: sample(step, draw) must be deterministic in
 * (step, draw); draw = -1 denotes the true realization of that step,
 * nonnegative draws index an unbounded stream of independent scenarios.
 */
class LoadSampler {
  public:
    virtual ~LoadSampler() = default;
    virtual LoadScenario sample(std::int64_t step, std::int64_t draw) const = 0;
};

/**
 * Default synthetic load process: per-node multiplicative lognormal noise
 * on a smooth diurnal base profile, correlated through a shared factor.
 * A stand-in for metered household data, not a calibrated model.
 */
class LognormalLoadSampler final : public LoadSampler {
  public:
    LognormalLoadSampler(const GridModel& grid, std::uint64_t seed, double load_scale = 0.06,
                         double sigma_shared = 0.12, double sigma_node = 0.06,
                         bool no_uncertainty = false);
    LoadScenario sample(std::int64_t step, std::int64_t draw) const override;

  private:
    const GridModel& grid_;
    std::uint64_t seed_;
    double load_scale_;
    double sigma_shared_;
    double sigma_node_;
    bool no_uncertainty_;
    std::vector<double> node_weight_;
};

/// Scenario pool read from CSV (columns p_1..p_n,q_1..q_n, one row per
/// scenario); draws are seeded picks from the pool.
class CsvLoadSampler final : public LoadSampler {
  public:
    CsvLoadSampler(const GridModel& grid, const std::string& csv_text, std::uint64_t seed);
    LoadScenario sample(std::int64_t step, std::int64_t draw) const override;
    std::size_t pool_size() const { return pool_.size(); }

  private:
    const GridModel& grid_;
    std::uint64_t seed_;
    std::vector<LoadScenario> pool_;
};

/// Per-step generation availability: a smooth diurnal curve with seeded
/// per-generator noise, scaled onto the nameplate capacities.
std::vector<GeneratorLimits> availability_caps(const GridModel& grid, std::int64_t step,
                                               std::int64_t n_steps, std::uint64_t seed);

struct SimulationConfig {
    double eps = presets::kOpfEps;
    double beta = presets::kOpfBeta;
    std::int64_t n_steps = presets::kOpfSteps;
    std::uint64_t seed = 1;
    std::int64_t n_scenarios = 0; ///< 0: size by the a-priori bound
    std::int64_t fresh_samples = 10000;
    std::int64_t r_cap = 200;
    int jobs = 1;
    std::vector<std::string> approaches = {"optimum", "expectation", "standard", "new"};
};

struct StepRecord {
    std::int64_t step = 0;
    std::string approach;
    bool solved = false;
    double objective = 0.0;
    double v_max_true = 0.0;
    double v_min_true = 0.0;
    bool violated = false;
    std::int64_t k = -1;       ///< support count (scenario approaches)
    std::int64_t removed = 0;  ///< |I| (new approach)
    double risk_bound = -1.0;  ///< eps(k,|I|) certificate
    double fresh_rate = -1.0;  ///< fresh-sample violation frequency
    double fresh_lo = -1.0;    ///< 95% Wilson interval of that frequency
    double fresh_hi = -1.0;
    std::string note;          ///< solver failure message, if any
};

struct SimulationReport {
    SimulationConfig config;
    std::int64_t n_scenarios_used = 0;
    std::vector<StepRecord> records; // step-major, approach order fixed

    /// CSV schema: t,approach,objective,v_max_true,v_min_true,violated
    void write_csv(std::ostream& out) const;
    /// Aggregates per approach (voltage mean +- std, violation counts,
    /// generation share of the standard approach, certificate audit).
    std::string summary_json() const;
};

/**
 * The four-approach rolling simulation: at every step draws the scenario
 * pool, solves the clairvoyant, expectation, all-samples and
 * support-driven-removal programs on the same data, and scores every
 * decision against the true realization. Solver failures are recorded per
 * step and the simulation continues.
 */
SimulationReport run_four_approach_simulation(const GridModel& grid, const LoadSampler& sampler,
                                              const SimulationConfig& config);

} // namespace scenopt
