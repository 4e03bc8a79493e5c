#pragma once

#include <cstdint>

// Single auditable home for the published experiment parameters the CLI
// presets reproduce. The sample sizes are used verbatim even where the
// exact binomial inversion disagrees; `bounds --paper-sizes` prints both.

namespace scenopt::presets {

struct TableOnePreset {
    std::int64_t dimension;
    double eps;
    double beta;
    std::int64_t n_basic;   // samples for the plain approach
    std::int64_t n_discard; // samples for the fixed-budget discard approach
    std::int64_t r_discard; // its removal budget
};

inline constexpr TableOnePreset kTableOneA{30, 0.05, 1e-3, 923, 1535, 5};
inline constexpr TableOnePreset kTableOneB{100, 0.05, 1e-3, 2230, 4920, 17};

struct RiskCurvePreset {
    std::int64_t n_scenarios;
    std::int64_t dimension;
    double beta;
    std::int64_t r_max;
};

inline constexpr RiskCurvePreset kFigureOne{1000, 30, 1e-3, 50};

// Default chance-constraint levels of the grid application.
inline constexpr double kOpfEps = 0.05;
inline constexpr double kOpfBeta = 1e-3;
inline constexpr double kOpfVmin = 0.95;
inline constexpr double kOpfVmax = 1.05;
inline constexpr std::int64_t kOpfSteps = 41; // 10:00 to 20:00, every 15 minutes

} // namespace scenopt::presets
