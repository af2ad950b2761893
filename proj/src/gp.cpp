#include "weldcrack/gp.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace weldcrack {

namespace {

using Node = Expression::Node;

struct NodeRef {
    std::unique_ptr<Node>* slot;
    int depth;  // 1-based, root = 1
};

void collect_refs(std::unique_ptr<Node>& slot, int depth, std::vector<NodeRef>& out) {
    if (!slot) return;
    out.push_back({&slot, depth});
    collect_refs(slot->left, depth + 1, out);
    collect_refs(slot->right, depth + 1, out);
}

std::vector<NodeRef> refs(Expression& e) {
    std::vector<NodeRef> out;
    collect_refs(e.root_slot(), 1, out);
    return out;
}

std::unique_ptr<Node> random_node(Rng& rng, int depth_budget, double const_prob) {
    auto n = std::make_unique<Node>();
    const bool make_leaf = depth_budget <= 1 || rng.uniform() < 0.3;
    if (make_leaf) {
        if (rng.uniform() < const_prob) {
            n->kind = NodeKind::constant;
            // log-uniform in [0.1, 10]
            n->value = std::exp(rng.uniform(std::log(0.1), std::log(10.0)));
        } else {
            n->kind = NodeKind::term;
            n->term_index = static_cast<int>(rng.below(6));
        }
        return n;
    }
    const NodeKind ops[6] = {NodeKind::add, NodeKind::sub, NodeKind::mul,
                             NodeKind::div, NodeKind::log, NodeKind::exp};
    n->kind = ops[rng.below(6)];
    n->left = random_node(rng, depth_budget - 1, const_prob);
    if (is_binary(n->kind)) n->right = random_node(rng, depth_budget - 1, const_prob);
    return n;
}

struct Individual {
    Expression expr;
    ModelParameters theta{};
    FitnessReport fit{};
    double k = 2.0;
    long evaluations = 0;
};

bool better(const FitnessReport& a, const FitnessReport& b) {
    return a.comprehensive > b.comprehensive;
}

}  // namespace

Expression random_expression(Rng& rng, int max_depth, double constant_leaf_prob) {
    return Expression(random_node(rng, max_depth, constant_leaf_prob));
}

GpResult gp_search(const Dataset& validation, const Dataset& original,
                   const ParameterBounds& theta_bounds, const GpConfig& gp_cfg,
                   const DeConfig& de_cfg, const LogisticConfig& logistic,
                   const TermConfig& term_cfg) {
    if (validation.empty() || original.empty())
        throw UsageError("gp_search: validation and original sets must be non-empty");
    if (gp_cfg.population < 2) throw UsageError("gp_search: population must be >= 2");
    if (gp_cfg.tournament_size < 1) throw UsageError("gp_search: tournament size must be >= 1");
    if (gp_cfg.generations < 0) throw UsageError("gp_search: generations must be >= 0");
    if (gp_cfg.elitism < 0 || gp_cfg.elitism >= gp_cfg.population)
        throw UsageError("gp_search: elitism must lie in [0, population)");
    if (gp_cfg.max_depth < 1 || gp_cfg.max_nodes < 1)
        throw UsageError("gp_search: depth and node limits must be positive");
    if (gp_cfg.threads < 1) throw UsageError("gp_search: threads must be >= 1");

    const PreparedDataset prep_val(validation, term_cfg);
    const PreparedDataset prep_orig(original, term_cfg);

    std::vector<double> lo(theta_bounds.lo.begin(), theta_bounds.lo.end());
    std::vector<double> hi(theta_bounds.hi.begin(), theta_bounds.hi.end());
    if (gp_cfg.co_optimize_k) {
        lo.push_back(1.0);
        hi.push_back(5.0);
    }

    // Fits theta (and optionally k) for one candidate; substream-seeded so
    // results do not depend on evaluation order or thread count.
    auto fit_candidate = [&](Individual& ind, int round, int index) {
        DeConfig de = de_cfg;
        de.seed = substream_seed(gp_cfg.seed, 0x100000000ULL + static_cast<std::uint64_t>(round),
                                 static_cast<std::uint64_t>(index));
        const Expression& expr = ind.expr;
        auto objective = [&](const std::vector<double>& v) -> double {
            for (size_t j = 0; j < lo.size(); ++j)
                if (v[j] < lo[j] || v[j] > hi[j])
                    throw UsageError("gp_search: DE proposed an out-of-bounds vector");
            std::array<double, ModelParameters::kDim> a{};
            std::copy_n(v.begin(), ModelParameters::kDim, a.begin());
            const ModelParameters theta = ModelParameters::from_array(a);
            LogisticConfig lg = logistic;
            if (gp_cfg.co_optimize_k) lg.k = v[ModelParameters::kDim];
            try {
                const FitnessReport r = comprehensive_fitness(expr, theta, prep_val, prep_orig, lg);
                return 1.0 - r.comprehensive;
            } catch (const DomainError&) {
                return 1.0;
            }
        };
        const DeResult res = de_optimize(objective, lo, hi, de);
        std::array<double, ModelParameters::kDim> a{};
        std::copy_n(res.best.begin(), ModelParameters::kDim, a.begin());
        ind.theta = ModelParameters::from_array(a);
        ind.k = gp_cfg.co_optimize_k ? res.best[ModelParameters::kDim] : logistic.k;
        LogisticConfig lg = logistic;
        lg.k = ind.k;
        try {
            ind.fit = comprehensive_fitness(ind.expr, ind.theta, prep_val, prep_orig, lg);
        } catch (const DomainError&) {
            ind.fit = FitnessReport{};
            ind.fit.degenerate = true;
        }
        ind.evaluations = res.evaluations;
    };

    // ramped initial population
    std::vector<Individual> pop(gp_cfg.population);
    {
        Rng init_rng(substream_seed(gp_cfg.seed, 0xA11, 0));
        for (int i = 0; i < gp_cfg.population; ++i) {
            const int depth = 2 + i % std::max(1, gp_cfg.max_depth - 1);
            pop[i].expr = random_expression(init_rng, depth, gp_cfg.constant_leaf_prob);
        }
        if (gp_cfg.seed_canonical) pop[0].expr = Expression::canonical();
    }

    GpResult result;
    bool have_best = false;

    const int rounds = std::max(1, gp_cfg.generations);
    Rng evo_rng(substream_seed(gp_cfg.seed, 0xE70, 0));

    auto tournament = [&](const std::vector<Individual>& p) -> const Individual& {
        int best = static_cast<int>(evo_rng.below(p.size()));
        for (int t = 1; t < gp_cfg.tournament_size; ++t) {
            const int c = static_cast<int>(evo_rng.below(p.size()));
            if (better(p[c].fit, p[best].fit)) best = c;
        }
        return p[best];
    };

    auto within_limits = [&](Expression& e) {
        return e.depth() <= gp_cfg.max_depth && e.node_count() <= gp_cfg.max_nodes;
    };

    for (int round = 0; round < rounds; ++round) {
        const int n = static_cast<int>(pop.size());
        const int threads = std::max(1, gp_cfg.threads);
        if (threads == 1) {
            for (int i = 0; i < n; ++i) fit_candidate(pop[i], round, i);
        } else {
            std::vector<std::thread> workers;
            for (int t = 0; t < threads; ++t) {
                workers.emplace_back([&, t]() {
                    for (int i = t; i < n; i += threads) fit_candidate(pop[i], round, i);
                });
            }
            for (auto& w : workers) w.join();
        }

        bool any_viable = false;
        for (int i = 0; i < n; ++i) {
            result.inner_evaluations += pop[i].evaluations;
            if (!pop[i].fit.degenerate) any_viable = true;
            if (!have_best || better(pop[i].fit, result.best_fitness)) {
                result.best_expr = pop[i].expr;
                result.best_theta = pop[i].theta;
                result.best_fitness = pop[i].fit;
                result.best_k = pop[i].k;
                have_best = true;
            }
        }
        if (!any_viable)
            throw UsageError(
                "gp_search: every candidate expression was degenerate; review parameter bounds "
                "and the operator set");
        result.fitness_trace.push_back(result.best_fitness.comprehensive);

        if (round + 1 == rounds) break;

        std::vector<Individual> next;
        next.reserve(pop.size());
        // elites: top-k by fitness, lowest index on ties
        std::vector<int> order(pop.size());
        for (size_t i = 0; i < pop.size(); ++i) order[i] = static_cast<int>(i);
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return better(pop[a].fit, pop[b].fit); });
        for (int e = 0; e < std::min<int>(gp_cfg.elitism, n); ++e) {
            Individual elite;
            elite.expr = pop[order[e]].expr;
            next.push_back(std::move(elite));
        }
        while (static_cast<int>(next.size()) < n) {
            Expression child = tournament(pop).expr;
            if (evo_rng.uniform() < gp_cfg.crossover_prob) {
                Expression donor = tournament(pop).expr;
                auto child_refs = refs(child);
                auto donor_refs = refs(donor);
                auto& dst = child_refs[evo_rng.below(child_refs.size())];
                auto& src = donor_refs[evo_rng.below(donor_refs.size())];
                std::unique_ptr<Node> grafted = std::move(*src.slot);
                *dst.slot = std::move(grafted);
                if (child.empty() || !within_limits(child)) child = tournament(pop).expr;
            }
            if (evo_rng.uniform() < gp_cfg.mutation_prob) {
                auto child_refs = refs(child);
                auto& at = child_refs[evo_rng.below(child_refs.size())];
                const int budget = std::max(1, gp_cfg.max_depth - at.depth + 1);
                *at.slot = random_node(evo_rng, budget, gp_cfg.constant_leaf_prob);
                if (!within_limits(child)) child = tournament(pop).expr;
            }
            Individual ind;
            ind.expr = std::move(child);
            next.push_back(std::move(ind));
        }
        pop = std::move(next);
    }

    return result;
}

}  // namespace weldcrack
