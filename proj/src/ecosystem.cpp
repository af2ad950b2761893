#include "weldcrack/ecosystem.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "weldcrack/augment.hpp"
#include "weldcrack/rng.hpp"

namespace weldcrack {

namespace {

constexpr int kDim = WeldParameters::kDim;

struct ZStats {
    std::array<double, kDim> mean{};
    std::array<double, kDim> inv_std{};
};

ZStats reference_stats(const Dataset& reference) {
    ZStats st;
    const double n = static_cast<double>(reference.size());
    for (const auto& s : reference) {
        const auto a = s.params.as_array();
        for (int i = 0; i < kDim; ++i) st.mean[i] += a[i];
    }
    for (int i = 0; i < kDim; ++i) st.mean[i] /= n;
    std::array<double, kDim> var{};
    for (const auto& s : reference) {
        const auto a = s.params.as_array();
        for (int i = 0; i < kDim; ++i) var[i] += (a[i] - st.mean[i]) * (a[i] - st.mean[i]);
    }
    for (int i = 0; i < kDim; ++i) {
        const double sd = std::sqrt(var[i] / n);
        st.inv_std[i] = sd > 0.0 ? 1.0 / sd : 1.0;
    }
    return st;
}

WeldParameters draw_candidate(Rng& rng, const AdmissibleRanges& ranges) {
    std::array<double, kDim> a{};
    for (int i = 0; i < kDim; ++i) a[i] = rng.uniform(ranges.lo[i], ranges.hi[i]);
    return enforce(WeldParameters::from_array(a), ranges);
}

}  // namespace

std::vector<double> kth_neighbor_scores(const std::vector<WeldParameters>& candidates,
                                        const Dataset& reference, int k) {
    if (reference.empty()) throw UsageError("kth_neighbor_scores: empty reference set");
    if (k < 1) throw UsageError("kth_neighbor_scores: k must be >= 1");
    const ZStats st = reference_stats(reference);
    const int kk = std::min<int>(k, static_cast<int>(reference.size()));

    std::vector<std::array<double, kDim>> ref_z(reference.size());
    for (size_t j = 0; j < reference.size(); ++j) {
        const auto a = reference[j].params.as_array();
        for (int i = 0; i < kDim; ++i) ref_z[j][i] = (a[i] - st.mean[i]) * st.inv_std[i];
    }

    std::vector<double> scores(candidates.size());
    std::vector<double> d2(reference.size());
    for (size_t c = 0; c < candidates.size(); ++c) {
        std::array<double, kDim> z{};
        const auto a = candidates[c].as_array();
        for (int i = 0; i < kDim; ++i) z[i] = (a[i] - st.mean[i]) * st.inv_std[i];
        for (size_t j = 0; j < ref_z.size(); ++j) {
            double s = 0.0;
            for (int i = 0; i < kDim; ++i) {
                const double t = z[i] - ref_z[j][i];
                s += t * t;
            }
            d2[j] = s;
        }
        std::nth_element(d2.begin(), d2.begin() + (kk - 1), d2.end());
        scores[c] = std::sqrt(d2[kk - 1]);
    }
    return scores;
}

Dataset generate_virtual(const FittedModel& model, const Dataset& reference,
                         const SparsityConfig& cfg) {
    if (reference.empty()) throw UsageError("generate_virtual: empty reference set");
    if (cfg.target < 1) throw UsageError("generate_virtual: target must be >= 1");
    if (cfg.pool_multiplier < 1) throw UsageError("generate_virtual: pool multiplier must be >= 1");

    Rng rng(substream_seed(cfg.seed, 0x71, 0));
    const size_t pool_size = static_cast<size_t>(cfg.pool_multiplier) * cfg.target;

    std::vector<WeldParameters> pool(pool_size);
    for (auto& p : pool) p = draw_candidate(rng, cfg.ranges);

    std::vector<size_t> order(pool_size);
    std::iota(order.begin(), order.end(), size_t{0});
    if (!cfg.uniform_fallback) {
        const std::vector<double> scores = kth_neighbor_scores(pool, reference, cfg.k_nearest);
        std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
            if (scores[a] != scores[b]) return scores[a] > scores[b];
            return a < b;
        });
    }

    Dataset out;
    out.reserve(cfg.target);
    auto try_add = [&](const WeldParameters& p) {
        bool sentinel = false;
        const double prob = model.predict(p, &sentinel);
        if (sentinel) return false;
        LabeledSample s;
        s.params = p;
        s.label = classify(prob);
        s.source = Source::virtual_;
        s.weight = 1.0;
        out.push_back(std::move(s));
        return true;
    };
    for (size_t idx : order) {
        if (static_cast<int>(out.size()) == cfg.target) break;
        try_add(pool[idx]);
    }
    // replacements for sentinel-discarded candidates
    size_t extra_budget = pool_size;
    while (static_cast<int>(out.size()) < cfg.target && extra_budget-- > 0)
        try_add(draw_candidate(rng, cfg.ranges));
    if (static_cast<int>(out.size()) < cfg.target)
        throw UsageError("generate_virtual: model rejected too many candidates");
    return out;
}

Dataset assemble(const Dataset& original, const Dataset& augmented, const Dataset& virt,
                 const EcosystemWeights& w) {
    if (original.empty() && augmented.empty() && virt.empty())
        throw UsageError("assemble: all data sources are empty");
    if (!(w.w_original > 0.0 && w.w_augmented > 0.0 && w.w_virtual > 0.0))
        throw UsageError("assemble: source weights must be positive");
    Dataset out;
    out.reserve(original.size() + augmented.size() + virt.size());
    for (auto s : original) {
        s.source = Source::original;
        s.weight = w.w_original;
        out.push_back(std::move(s));
    }
    for (auto s : augmented) {
        s.source = Source::augmented;
        s.weight = w.w_augmented;
        out.push_back(std::move(s));
    }
    for (auto s : virt) {
        s.source = Source::virtual_;
        s.weight = w.w_virtual;
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace weldcrack
