#pragma once

#include <string>

#include "weldcrack/augment.hpp"
#include "weldcrack/de.hpp"
#include "weldcrack/ecosystem.hpp"
#include "weldcrack/gp.hpp"
#include "weldcrack/neural.hpp"
#include "weldcrack/refine.hpp"

namespace weldcrack {

/// Aggregated run settings for the CLI; one document, one schema, strict
/// validation with field-path error messages and unknown-key rejection.
struct RunConfig {
    std::uint64_t seed = 0;
    NoiseProfile noise{};
    CouplingConfig coupling{};
    AdmissibleRanges ranges{};
    ParameterBounds bounds{};
    LogisticConfig logistic{};
    TermConfig term_cfg{};
    GpConfig gp{};
    DeConfig de{};
    RefineConfig refine{};
    TrainConfig train{};
    EcosystemWeights weights{};
    SparsityConfig sparsity{};
    int n_per_sample = 1000;
};

std::string default_config_json();
RunConfig parse_config_json(const std::string& text);
RunConfig load_config_file(const std::string& path);

}  // namespace weldcrack
