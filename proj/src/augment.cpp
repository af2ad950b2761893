#include "weldcrack/augment.hpp"

#include <algorithm>

namespace weldcrack {

LabeledSample perturb(const LabeledSample& s, const NoiseProfile& np, Rng& rng) {
    LabeledSample out = s;
    auto a = s.params.as_array();
    for (int i = 0; i < WeldParameters::kDim; ++i) a[i] += np.sigma[i] * rng.normal();
    out.params = WeldParameters::from_array(a);
    return out;
}

WeldParameters co_adjust(const WeldParameters& original, const WeldParameters& perturbed,
                         const CouplingConfig& cc, const NoiseProfile& np) {
    const auto orig = original.as_array();
    auto a = perturbed.as_array();
    for (const auto& rule : cc.rules) {
        const double sigma_driver = np.sigma[rule.driver];
        const double sigma_dep = np.sigma[rule.dependent];
        if (sigma_driver <= 0.0) continue;
        const double delta = a[rule.driver] - orig[rule.driver];
        a[rule.dependent] += rule.sign * cc.rho_c * (delta / sigma_driver) * sigma_dep;
    }
    return WeldParameters::from_array(a);
}

WeldParameters enforce(const WeldParameters& p, const AdmissibleRanges& ranges) {
    auto a = p.as_array();
    // burn-through first so the geometric fix cannot be undone by clipping
    if (a[3] > a[2]) a[3] = a[2];
    for (int i = 0; i < WeldParameters::kDim; ++i) a[i] = std::clamp(a[i], ranges.lo[i], ranges.hi[i]);
    return WeldParameters::from_array(a);
}

Dataset augment_dataset(const Dataset& data, const AugmentConfig& cfg) {
    if (data.empty()) throw UsageError("augment: input dataset is empty");
    if (cfg.n_per_sample < 1) throw UsageError("augment: n_per_sample must be >= 1");

    Dataset out;
    out.reserve(data.size() * static_cast<size_t>(cfg.n_per_sample));
    for (size_t parent = 0; parent < data.size(); ++parent) {
        for (int replica = 0; replica < cfg.n_per_sample; ++replica) {
            Rng rng(substream_seed(cfg.seed, parent, static_cast<std::uint64_t>(replica)));
            LabeledSample child = perturb(data[parent], cfg.noise, rng);
            child.params = co_adjust(data[parent].params, child.params, cfg.coupling, cfg.noise);
            child.params = enforce(child.params, cfg.ranges);
            child.source = Source::augmented;
            child.weight = 1.0;
            out.push_back(std::move(child));
        }
    }
    return out;
}

}  // namespace weldcrack
