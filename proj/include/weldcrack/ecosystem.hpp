#pragma once

#include <cstdint>

#include "weldcrack/fitness.hpp"

namespace weldcrack {

struct EcosystemWeights {
    double w_original = 5.0;
    double w_augmented = 1.0;
    double w_virtual = 1.0;
    double crack_class_weight = 1.5;  // applied during training, not here
};

struct SparsityConfig {
    int k_nearest = 5;
    int pool_multiplier = 4;
    int target = 32000;
    bool uniform_fallback = false;  // skip sparsity scoring, take the pool head
    AdmissibleRanges ranges{};
    std::uint64_t seed = 0;
};

/// Sparsity score of each candidate: distance to its k-th nearest reference
/// neighbor in z-scored parameter space. Brute force; exposed for the oracle
/// comparison in tests.
std::vector<double> kth_neighbor_scores(const std::vector<WeldParameters>& candidates,
                                        const Dataset& reference, int k);

/// Draws pool_multiplier * target candidates uniformly in range, enforces the
/// physical constraints, keeps the `target` most isolated relative to
/// `reference`, and labels each with the fitted model. Source = virtual.
Dataset generate_virtual(const FittedModel& model, const Dataset& reference,
                         const SparsityConfig& cfg);

/// Concatenates the three streams in order with per-source weights.
Dataset assemble(const Dataset& original, const Dataset& augmented, const Dataset& virt,
                 const EcosystemWeights& w = {});

}  // namespace weldcrack
