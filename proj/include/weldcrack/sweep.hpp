#pragma once

#include <optional>

#include "weldcrack/fitness.hpp"

namespace weldcrack {

struct GridAxis {
    double min = 0.0;
    double max = 0.0;
    int steps = 1;  // number of grid points along this axis
};

/// Cartesian process-window scan: a grid over any subset of the nine
/// parameters, the rest pinned at `fixed`.
struct SweepSpec {
    WeldParameters fixed{};
    std::array<std::optional<GridAxis>, WeldParameters::kDim> grid{};
    double probability_ceiling = 0.10;
    AdmissibleRanges ranges{};
};

struct SweepRow {
    WeldParameters params;
    double p_crack = 0.0;
};

struct SweepResult {
    std::vector<SweepRow> rows;  // p_crack < ceiling, sorted
    long evaluated = 0;
    long infeasible_skipped = 0;
};

/// Evaluates the full grid, skipping combinations that fail validation, and
/// returns the feasible low-probability rows sorted by (p_crack, parameters).
SweepResult sweep(const SweepSpec& spec, const FittedModel& model);

}  // namespace weldcrack
