#include "weldcrack/refine.hpp"

#include <algorithm>
#include <cmath>

#include "weldcrack/rng.hpp"

namespace weldcrack {

namespace {

ModelParameters theta_from_vec(const std::vector<double>& v) {
    std::array<double, ModelParameters::kDim> a{};
    std::copy_n(v.begin(), ModelParameters::kDim, a.begin());
    return ModelParameters::from_array(a);
}

std::vector<double> vec_from_theta(const ModelParameters& m) {
    const auto a = m.as_array();
    return std::vector<double>(a.begin(), a.end());
}

FitnessReport score(const Expression& expr, const ModelParameters& theta,
                    const PreparedDataset& val, const PreparedDataset& orig,
                    const LogisticConfig& logistic) {
    try {
        return comprehensive_fitness(expr, theta, val, orig, logistic);
    } catch (const DomainError&) {
        FitnessReport r;
        r.degenerate = true;
        return r;
    }
}

/// Compass coordinate search on 1 - comprehensive fitness; the opt-in
/// alternative to the smooth surrogate.
std::vector<double> coordinate_search(const ScalarObjective& f, std::vector<double> x,
                                      const std::vector<double>& lo, const std::vector<double>& hi,
                                      int max_iterations, long& evals) {
    const size_t dim = x.size();
    std::vector<double> step(dim);
    for (size_t i = 0; i < dim; ++i) step[i] = 0.1 * (hi[i] - lo[i]);
    double fx = f(x);
    ++evals;
    for (int iter = 0; iter < max_iterations; ++iter) {
        bool improved = false;
        for (size_t i = 0; i < dim; ++i) {
            for (double sign : {+1.0, -1.0}) {
                std::vector<double> cand = x;
                cand[i] = std::clamp(cand[i] + sign * step[i], lo[i], hi[i]);
                if (cand[i] == x[i]) continue;
                const double fc = f(cand);
                ++evals;
                if (fc < fx) {
                    x = std::move(cand);
                    fx = fc;
                    improved = true;
                }
            }
        }
        if (!improved) {
            bool any = false;
            for (size_t i = 0; i < dim; ++i) {
                step[i] *= 0.5;
                if (step[i] > 1e-12 * (hi[i] - lo[i])) any = true;
            }
            if (!any) break;
        }
    }
    return x;
}

}  // namespace

ParameterBounds expanded_bounds(const ModelParameters& theta0, const ParameterBounds& global_bounds,
                                const RefineConfig& cfg) {
    if (!(cfg.expand_lo < cfg.expand_hi))
        throw UsageError("expanded_bounds: expand_lo must be below expand_hi");
    if (!(cfg.reversion_threshold > 0.0 && cfg.reversion_threshold < 1.0))
        throw UsageError("expanded_bounds: reversion threshold must lie in (0, 1)");
    ParameterBounds out = global_bounds;
    const auto v = theta0.as_array();
    for (int i = 0; i < ModelParameters::kDim; ++i) {
        const double glo = global_bounds.lo[i];
        const double ghi = global_bounds.hi[i];
        double lo = std::max(glo, cfg.expand_lo * v[i]);
        double hi = std::min(ghi, cfg.expand_hi * v[i]);
        const double width = hi - lo;
        if (!(width > cfg.reversion_threshold * (ghi - glo))) {
            lo = glo;
            hi = ghi;
        }
        out.lo[i] = lo;
        out.hi[i] = hi;
    }
    return out;
}

RefineResult local_refine(const Expression& expr, const ModelParameters& theta_init,
                          const ParameterBounds& bounds, const RefineDatasets& data,
                          const RefineConfig& cfg, const LogisticConfig& logistic,
                          const TermConfig& term_cfg) {
    if (!bounds.contains(theta_init)) throw UsageError("local_refine: theta_init outside bounds");

    const PreparedDataset prep_fit(data.fit.empty() ? data.validation : data.fit, term_cfg);
    const PreparedDataset prep_val(data.validation, term_cfg);
    const PreparedDataset prep_orig(data.original, term_cfg);

    const FitnessReport init_fit = score(expr, theta_init, prep_val, prep_orig, logistic);

    const std::vector<double> lo(bounds.lo.begin(), bounds.lo.end());
    const std::vector<double> hi(bounds.hi.begin(), bounds.hi.end());

    long evals = 0;
    auto check_bounds = [&](const std::vector<double>& v) {
        for (size_t i = 0; i < v.size(); ++i)
            if (v[i] < lo[i] || v[i] > hi[i])
                throw UsageError("local_refine: evaluated point escaped the bounds");
    };

    std::vector<double> best_vec;
    if (cfg.smooth_loss) {
        auto objective = [&](const std::vector<double>& v) -> double {
            check_bounds(v);
            ++evals;
            try {
                return smooth_loss(expr, theta_from_vec(v), prep_fit, logistic);
            } catch (const DomainError&) {
                return 1e12;
            }
        };
        const double f0 = objective(vec_from_theta(theta_init));
        if (!std::isfinite(f0)) throw UsageError("local_refine: non-finite loss at theta_init");
        LbfgsbConfig lc;
        lc.max_iterations = cfg.local_max_iterations;
        lc.grad_tol = cfg.grad_tol;
        lc.fd_step = cfg.fd_step;
        best_vec = lbfgsb_minimize(objective, vec_from_theta(theta_init), lo, hi, lc).x;
    } else {
        auto objective = [&](const std::vector<double>& v) -> double {
            check_bounds(v);
            const FitnessReport r = score(expr, theta_from_vec(v), prep_val, prep_orig, logistic);
            return 1.0 - r.comprehensive;
        };
        best_vec = coordinate_search(objective, vec_from_theta(theta_init), lo, hi,
                                     cfg.local_max_iterations, evals);
    }

    const ModelParameters refined = theta_from_vec(best_vec);
    const FitnessReport refined_fit = score(expr, refined, prep_val, prep_orig, logistic);

    RefineResult out;
    if (refined_fit.comprehensive >= init_fit.comprehensive) {
        out.theta = refined;
        out.fitness = refined_fit;
    } else {
        out.theta = theta_init;
        out.fitness = init_fit;
    }
    out.stages.push_back({"local", evals, out.fitness.comprehensive});
    return out;
}

RefineResult refine_pipeline(const Expression& expr, const ModelParameters& theta0,
                             const ParameterBounds& global_bounds, const RefineDatasets& data,
                             const DeConfig& de_cfg, const RefineConfig& cfg,
                             const LogisticConfig& logistic, const TermConfig& term_cfg) {
    if (!global_bounds.contains(theta0))
        throw UsageError("refine_pipeline: theta0 outside the global bounds");

    const PreparedDataset prep_val(data.validation, term_cfg);
    const PreparedDataset prep_orig(data.original, term_cfg);

    const FitnessReport fit0 = score(expr, theta0, prep_val, prep_orig, logistic);

    const ParameterBounds active = expanded_bounds(theta0, global_bounds, cfg);
    const std::vector<double> lo(active.lo.begin(), active.lo.end());
    const std::vector<double> hi(active.hi.begin(), active.hi.end());

    auto objective = [&](const std::vector<double>& v) -> double {
        for (size_t i = 0; i < v.size(); ++i)
            if (v[i] < lo[i] || v[i] > hi[i])
                throw UsageError("refine_pipeline: DE escaped the active bounds");
        return 1.0 - score(expr, theta_from_vec(v), prep_val, prep_orig, logistic).comprehensive;
    };

    DeConfig de = de_cfg;
    de.seed = substream_seed(cfg.seed, 0xDE, 0);
    const DeResult de_res = de_optimize(objective, lo, hi, de);
    const ModelParameters theta_de = theta_from_vec(de_res.best);
    const FitnessReport fit_de = score(expr, theta_de, prep_val, prep_orig, logistic);

    RefineConfig local_cfg = cfg;
    const RefineResult local = local_refine(expr, theta_de, active, data, local_cfg, logistic, term_cfg);

    RefineResult out;
    out.theta = theta0;
    out.fitness = fit0;
    if (fit_de.comprehensive >= out.fitness.comprehensive) {
        out.theta = theta_de;
        out.fitness = fit_de;
    }
    if (local.fitness.comprehensive >= out.fitness.comprehensive) {
        out.theta = local.theta;
        out.fitness = local.fitness;
    }
    // each entry records the best comprehensive fitness seen so far
    out.stages.push_back({"init", 0, fit0.comprehensive});
    out.stages.push_back(
        {"de", de_res.evaluations, std::max(fit0.comprehensive, fit_de.comprehensive)});
    out.stages.push_back({"local", local.stages.front().evaluations, out.fitness.comprehensive});
    return out;
}

}  // namespace weldcrack
