#include "weldcrack/de.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "weldcrack/rng.hpp"
#include "weldcrack/types.hpp"

namespace weldcrack {

namespace {

/// Reflects x back into [lo, hi]; falls back to clamping for wild overshoot.
double reflect(double x, double lo, double hi) {
    if (x >= lo && x <= hi) return x;
    const double width = hi - lo;
    if (width <= 0.0) return lo;
    if (x < lo) x = lo + (lo - x);
    else x = hi - (x - hi);
    if (x < lo || x > hi) x = lo + std::fmod(std::abs(x - lo), width);
    return x;
}

}  // namespace

DeResult de_optimize(const Objective& objective, const std::vector<double>& lo,
                     const std::vector<double>& hi, const DeConfig& cfg) {
    const size_t dim = lo.size();
    if (dim == 0 || hi.size() != dim) throw UsageError("de_optimize: bounds dimension mismatch");
    for (size_t i = 0; i < dim; ++i) {
        if (!(std::isfinite(lo[i]) && std::isfinite(hi[i]) && lo[i] <= hi[i]))
            throw UsageError("de_optimize: invalid bounds at dimension " + std::to_string(i));
    }
    if (cfg.population < 4) throw UsageError("de_optimize: population must be >= 4");
    if (!(cfg.F > 0.0 && cfg.F <= 2.0)) throw UsageError("de_optimize: F must be in (0, 2]");
    if (!(cfg.CR >= 0.0 && cfg.CR <= 1.0)) throw UsageError("de_optimize: CR must be in [0, 1]");

    Rng rng(cfg.seed);
    const int np = cfg.population;

    std::vector<std::vector<double>> pop(np, std::vector<double>(dim));
    std::vector<double> score(np);
    DeResult result;
    result.best_value = std::numeric_limits<double>::infinity();

    for (int i = 0; i < np; ++i) {
        for (size_t j = 0; j < dim; ++j) pop[i][j] = rng.uniform(lo[j], hi[j]);
        score[i] = objective(pop[i]);
        ++result.evaluations;
        if (score[i] < result.best_value) {
            result.best_value = score[i];
            result.best = pop[i];
        }
    }

    std::vector<double> trial(dim);
    for (int iter = 0; iter < cfg.iterations; ++iter) {
        for (int i = 0; i < np; ++i) {
            int r1, r2, r3;
            do { r1 = static_cast<int>(rng.below(np)); } while (r1 == i);
            do { r2 = static_cast<int>(rng.below(np)); } while (r2 == i || r2 == r1);
            do { r3 = static_cast<int>(rng.below(np)); } while (r3 == i || r3 == r1 || r3 == r2);

            const size_t j_rand = rng.below(dim);
            for (size_t j = 0; j < dim; ++j) {
                if (j == j_rand || rng.uniform() < cfg.CR) {
                    const double v = pop[r1][j] + cfg.F * (pop[r2][j] - pop[r3][j]);
                    trial[j] = reflect(v, lo[j], hi[j]);
                } else {
                    trial[j] = pop[i][j];
                }
            }
            const double s = objective(trial);
            ++result.evaluations;
            if (s <= score[i]) {
                pop[i] = trial;
                score[i] = s;
                if (s < result.best_value) {
                    result.best_value = s;
                    result.best = trial;
                }
            }
        }
    }
    return result;
}

}  // namespace weldcrack
