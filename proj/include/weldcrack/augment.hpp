#pragma once

#include <array>
#include <cstdint>

#include "weldcrack/dataset.hpp"
#include "weldcrack/rng.hpp"
#include "weldcrack/types.hpp"

namespace weldcrack {

/// Per-parameter Gaussian noise amplitudes, canonical order, mean zero.
struct NoiseProfile {
    std::array<double, WeldParameters::kDim> sigma = {1.5, 1.5, 0.3, 0.5, 10.0,
                                                      20.0, 15.0, 5.0, 0.1};
};

/// One directional co-adjustment rule: a shift of `driver` (in units of its
/// noise sigma) drags `dependent` by sign * rho_c sigmas of its own.
struct CouplingRule {
    int driver = 0;
    int dependent = 0;
    double sign = 1.0;
};

/// The five fixed inter-parameter relationships, applied in order.
struct CouplingConfig {
    double rho_c = 0.5;
    std::array<CouplingRule, 5> rules = {{
        {0, 1, -1.0},  // current up        -> duration down
        {6, 5, +1.0},  // preheat up        -> interpass up
        {8, 0, +1.0},  // wire diameter up  -> current up
        {2, 8, +1.0},  // thickness up      -> wire diameter up
        {1, 5, +1.0},  // duration down     -> interpass down
    }};
};

/// Adds independent Gaussian noise to every parameter; label/source kept.
LabeledSample perturb(const LabeledSample& s, const NoiseProfile& np, Rng& rng);

/// Applies the coupling rules: dependent' += sign * rho_c * (ddriver/sigma_driver) * sigma_dependent,
/// where ddriver is the perturbation the driver received relative to `original`.
WeldParameters co_adjust(const WeldParameters& original, const WeldParameters& perturbed,
                         const CouplingConfig& cc, const NoiseProfile& np);

/// Geometric burn-through correction (d_w := min(d_w, t_b)) followed by
/// clipping every field into its admissible range.
WeldParameters enforce(const WeldParameters& p, const AdmissibleRanges& ranges = {});

struct AugmentConfig {
    int n_per_sample = 1000;
    NoiseProfile noise{};
    CouplingConfig coupling{};
    AdmissibleRanges ranges{};
    std::uint64_t seed = 0;
};

/// Full perturb -> co_adjust -> enforce pipeline, n_per_sample children per
/// parent. Each (parent, replica) pair uses its own RNG substream, so the
/// output is identical regardless of evaluation order.
Dataset augment_dataset(const Dataset& data, const AugmentConfig& cfg);

}  // namespace weldcrack
