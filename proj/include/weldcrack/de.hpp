#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace weldcrack {

/// DE/rand/1/bin settings.
struct DeConfig {
    int iterations = 300;
    int population = 50;
    double F = 0.8;
    double CR = 0.9;
    std::uint64_t seed = 0;
};

struct DeResult {
    std::vector<double> best;
    double best_value = 0.0;
    long evaluations = 0;
};

using Objective = std::function<double(const std::vector<double>&)>;

/// Minimizes `objective` over the box [lo, hi] with DE/rand/1/bin and
/// reflection at the bounds. Deterministic for a fixed seed. Every vector
/// passed to the objective lies inside the box.
DeResult de_optimize(const Objective& objective, const std::vector<double>& lo,
                     const std::vector<double>& hi, const DeConfig& cfg);

}  // namespace weldcrack
