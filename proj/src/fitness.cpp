#include "weldcrack/fitness.hpp"

#include <cmath>
#include <numbers>

namespace weldcrack {

double FittedModel::predict(const WeldParameters& p, bool* hit_sentinel) const {
    const TermValues t = compute_terms(p, theta, term_cfg);
    bool sentinel = false;
    const double cpi = theta.K * expr.evaluate(t, &sentinel);
    if (hit_sentinel) *hit_sentinel = sentinel;
    return crack_probability(cpi, logistic);
}

PreparedDataset::PreparedDataset(const Dataset& data, const TermConfig& cfg)
    : t5_form_(cfg.t5_form) {
    const auto& c = cfg.constants;
    const double pi = std::numbers::pi;
    rows_.reserve(data.size());
    for (const auto& s : data) {
        const auto& p = s.params;
        Row r;
        r.base1 = 4.0 * p.I * c.U * std::sqrt(p.A_w) * p.d_w / (pi * p.d * p.d * wire_feed_speed(p.d));
        r.base2 = p.d_w / p.t_b;
        r.T_i = p.T_i;
        r.T_p = p.T_p;
        const double t_b_cm = p.t_b / 10.0;
        const double r_cm = c.r / 10.0;
        r.delta_T = p.I * c.U * p.tau / (t_b_cm * c.rho * c.c * pi * r_cm * r_cm);
        r.inv_d = 1.0 / p.d;
        r.t_500 = p.t_500;
        r.label = s.label;
        rows_.push_back(r);
    }
}

TermValues PreparedDataset::terms(size_t i, const ModelParameters& theta) const {
    const Row& r = rows_[i];
    TermValues t;
    t.t1 = std::pow(r.base1, theta.alpha);
    t.t2 = std::pow(r.base2, theta.beta);
    const double base3 = theta.theta1 * (theta.delta - r.T_i) + theta.theta2 * (theta.delta - r.T_p);
    if (base3 < 0.0)
        throw DomainError("T3 base negative: delta below the interpass/preheat temperatures");
    t.t3 = std::pow(base3, theta.gamma);
    t.t4 = std::pow(r.T_i + r.delta_T, theta.epsilon);
    if (theta.delta <= 500.0) throw DomainError("T5 requires delta > 500 degC");
    if (t5_form_ == CoolingRateForm::ratio_power)
        t.t5 = std::pow((theta.delta - 500.0) / r.t_500, theta.zeta);
    else
        t.t5 = std::pow(theta.delta - 500.0, theta.zeta) / r.t_500;
    t.t6 = std::pow(r.inv_d, theta.eta);
    return t;
}

double accuracy(const Expression& expr, const ModelParameters& theta, const PreparedDataset& data,
                const LogisticConfig& logistic, long* sentinel_rows) {
    if (data.empty()) throw UsageError("accuracy: empty dataset");
    long correct = 0;
    long sentinels = 0;
    for (size_t i = 0; i < data.size(); ++i) {
        bool sentinel = false;
        const double cpi = theta.K * expr.evaluate(data.terms(i, theta), &sentinel);
        if (sentinel) ++sentinels;
        const Label pred = classify(crack_probability(cpi, logistic));
        if (pred == data.label(i)) ++correct;
    }
    if (sentinel_rows) *sentinel_rows = sentinels;
    return static_cast<double>(correct) / static_cast<double>(data.size());
}

FitnessReport comprehensive_fitness(const Expression& expr, const ModelParameters& theta,
                                    const PreparedDataset& validation,
                                    const PreparedDataset& original,
                                    const LogisticConfig& logistic) {
    if (validation.empty() || original.empty())
        throw UsageError("comprehensive_fitness: both datasets must be non-empty");
    long sent_val = 0, sent_orig = 0;
    const double acc_val = accuracy(expr, theta, validation, logistic, &sent_val);
    const double acc_orig = accuracy(expr, theta, original, logistic, &sent_orig);
    const long total = static_cast<long>(validation.size() + original.size());
    FitnessReport r;
    if (2 * (sent_val + sent_orig) > total) {
        r.degenerate = true;
        return r;  // all zeros; the report invariant 0 == 0.5*0 + 0.5*0 holds
    }
    r.acc_validation = acc_val;
    r.acc_original = acc_orig;
    r.comprehensive = 0.5 * acc_val + 0.5 * acc_orig;
    return r;
}

FitnessReport comprehensive_fitness(const Expression& expr, const ModelParameters& theta,
                                    const Dataset& validation, const Dataset& original,
                                    const LogisticConfig& logistic, const TermConfig& term_cfg) {
    return comprehensive_fitness(expr, theta, PreparedDataset(validation, term_cfg),
                                 PreparedDataset(original, term_cfg), logistic);
}

double smooth_loss(const Expression& expr, const ModelParameters& theta,
                   const PreparedDataset& data, const LogisticConfig& logistic) {
    if (data.empty()) throw UsageError("smooth_loss: empty dataset");
    constexpr double kClamp = 1e-12;
    double total = 0.0;
    for (size_t i = 0; i < data.size(); ++i) {
        bool sentinel = false;
        const double cpi = theta.K * expr.evaluate(data.terms(i, theta), &sentinel);
        double p = crack_probability(cpi, logistic);
        if (p < kClamp) p = kClamp;
        if (p > 1.0 - kClamp) p = 1.0 - kClamp;
        const double y = data.label(i) == Label::cracked ? 1.0 : 0.0;
        total += -(y * std::log(p) + (1.0 - y) * std::log(1.0 - p));
    }
    return total / static_cast<double>(data.size());
}

}  // namespace weldcrack
