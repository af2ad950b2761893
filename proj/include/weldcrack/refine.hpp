#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "weldcrack/de.hpp"
#include "weldcrack/fitness.hpp"
#include "weldcrack/lbfgsb.hpp"

namespace weldcrack {

struct RefineConfig {
    double expand_lo = 0.1;            // lower bound factor on initial values
    double expand_hi = 10.0;           // upper bound factor
    int local_max_iterations = 5000;
    double reversion_threshold = 0.01; // neighborhood width vs. global range
    double fd_step = 1e-6;
    double grad_tol = 1e-8;
    bool smooth_loss = true;           // false: coordinate search on accuracy
    std::uint64_t seed = 0;
};

struct RefineDatasets {
    Dataset fit;         // drives the smooth local objective
    Dataset validation;  // comprehensive-fitness component
    Dataset original;    // comprehensive-fitness component
};

struct StageLog {
    std::string stage;
    long evaluations = 0;
    double best_fitness = 0.0;
};

struct RefineResult {
    ModelParameters theta{};
    FitnessReport fitness{};
    std::vector<StageLog> stages;
};

/// Per-parameter neighborhood [expand_lo*v, expand_hi*v] intersected with the
/// global box; neighborhoods narrower than `reversion_threshold` of the global
/// range revert to the full global bound.
ParameterBounds expanded_bounds(const ModelParameters& theta0, const ParameterBounds& global_bounds,
                                const RefineConfig& cfg = {});

/// Box-constrained local descent on the smooth surrogate (or a coordinate
/// search on accuracy), never returning a theta with lower comprehensive
/// fitness than theta_init.
RefineResult local_refine(const Expression& expr, const ModelParameters& theta_init,
                          const ParameterBounds& bounds, const RefineDatasets& data,
                          const RefineConfig& cfg = {}, const LogisticConfig& logistic = {},
                          const TermConfig& term_cfg = {});

/// Global DE over the expanded neighborhood followed by the local phase;
/// returns the best of {theta0, DE best, local result}, latest stage on ties.
RefineResult refine_pipeline(const Expression& expr, const ModelParameters& theta0,
                             const ParameterBounds& global_bounds, const RefineDatasets& data,
                             const DeConfig& de_cfg, const RefineConfig& cfg = {},
                             const LogisticConfig& logistic = {}, const TermConfig& term_cfg = {});

}  // namespace weldcrack
