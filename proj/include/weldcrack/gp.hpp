#pragma once

#include <cstdint>
#include <vector>

#include "weldcrack/de.hpp"
#include "weldcrack/fitness.hpp"
#include "weldcrack/rng.hpp"

namespace weldcrack {

struct GpConfig {
    int population = 100;
    int generations = 5;
    int tournament_size = 3;
    double crossover_prob = 0.7;
    double mutation_prob = 0.2;
    int elitism = 1;
    int max_depth = 5;
    int max_nodes = 63;
    double constant_leaf_prob = 0.15;  // remaining leaves are term symbols
    bool seed_canonical = false;       // plant the known structure in gen 1
    bool co_optimize_k = false;        // also fit the logistic steepness
    int threads = 1;
    std::uint64_t seed = 0;
};

struct GpResult {
    Expression best_expr;
    ModelParameters best_theta;
    FitnessReport best_fitness;
    double best_k = 2.0;                 // logistic steepness actually used
    std::vector<double> fitness_trace;   // best-ever after each generation
    long inner_evaluations = 0;          // DE objective calls, evolution total
};

/// Nested structure/parameter search: GP over expression trees, DE fitting
/// ModelParameters per candidate against 1 - comprehensive fitness.
GpResult gp_search(const Dataset& validation, const Dataset& original,
                   const ParameterBounds& theta_bounds, const GpConfig& gp_cfg,
                   const DeConfig& de_cfg, const LogisticConfig& logistic = {},
                   const TermConfig& term_cfg = {});

/// Random tree of at most `max_depth` levels; used by the search and tests.
Expression random_expression(Rng& rng, int max_depth, double constant_leaf_prob);

}  // namespace weldcrack
