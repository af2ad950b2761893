#include "weldcrack/sweep.hpp"

#include <algorithm>

namespace weldcrack {

SweepResult sweep(const SweepSpec& spec, const FittedModel& model) {
    std::vector<int> axes;
    std::vector<std::vector<double>> values;
    for (int i = 0; i < WeldParameters::kDim; ++i) {
        const auto& g = spec.grid[i];
        if (!g) continue;
        if (g->steps < 1) throw UsageError("sweep: steps must be >= 1");
        if (g->min < spec.ranges.lo[i] || g->max > spec.ranges.hi[i] || g->min > g->max)
            throw UsageError(std::string("sweep: grid for ") + kParameterNames[i] +
                             " outside the admissible range");
        std::vector<double> v;
        if (g->steps == 1) {
            v.push_back(g->min);
        } else {
            for (int s = 0; s < g->steps; ++s)
                v.push_back(g->min + (g->max - g->min) * s / (g->steps - 1));
        }
        axes.push_back(i);
        values.push_back(std::move(v));
    }

    SweepResult out;
    std::vector<size_t> idx(axes.size(), 0);
    auto base = spec.fixed.as_array();
    while (true) {
        auto a = base;
        for (size_t d = 0; d < axes.size(); ++d) a[axes[d]] = values[d][idx[d]];
        const WeldParameters p = WeldParameters::from_array(a);
        if (is_validated(p, spec.ranges)) {
            ++out.evaluated;
            const double prob = model.predict(p);
            if (prob < spec.probability_ceiling) out.rows.push_back({p, prob});
        } else {
            ++out.infeasible_skipped;
        }
        // advance the multi-index
        size_t d = 0;
        for (; d < idx.size(); ++d) {
            if (++idx[d] < values[d].size()) break;
            idx[d] = 0;
        }
        if (d == idx.size()) break;
    }

    std::sort(out.rows.begin(), out.rows.end(), [](const SweepRow& a, const SweepRow& b) {
        if (a.p_crack != b.p_crack) return a.p_crack < b.p_crack;
        return a.params.as_array() < b.params.as_array();
    });
    return out;
}

}  // namespace weldcrack
