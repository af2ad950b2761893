#include "weldcrack/model.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace weldcrack {

bool is_validated(const WeldParameters& p, const AdmissibleRanges& r) {
    const auto a = p.as_array();
    for (int i = 0; i < WeldParameters::kDim; ++i)
        if (!(a[i] >= r.lo[i] && a[i] <= r.hi[i])) return false;
    return p.d_w <= p.t_b;
}

void require_validated(const WeldParameters& p, const AdmissibleRanges& r) {
    const auto a = p.as_array();
    for (int i = 0; i < WeldParameters::kDim; ++i) {
        if (!(a[i] >= r.lo[i] && a[i] <= r.hi[i])) {
            std::ostringstream os;
            os << "parameter " << kParameterNames[i] << " = " << a[i] << " outside admissible range ["
               << r.lo[i] << ", " << r.hi[i] << "]";
            throw DomainError(os.str());
        }
    }
    if (p.d_w > p.t_b) throw DomainError("weld depth d_w exceeds base thickness t_b");
}

std::string to_string(Source s) {
    switch (s) {
        case Source::original: return "original";
        case Source::augmented: return "augmented";
        case Source::virtual_: return "virtual";
    }
    return "unknown";
}

Source source_from_string(const std::string& s) {
    if (s == "original") return Source::original;
    if (s == "augmented") return Source::augmented;
    if (s == "virtual") return Source::virtual_;
    throw UsageError("unknown sample source '" + s + "'");
}

ModelParameters default_refined_params() {
    ModelParameters m;
    m.K = 5.229864e-2;
    m.alpha = 0.000426;  // Fig.-style rendering gives 0.000126; prose list wins
    m.beta = 2.233428;
    m.gamma = 4.329339;
    m.delta = 1437.709817;
    m.epsilon = 0.362319;
    m.zeta = 0.383383;
    m.eta = 1.898158;
    m.theta1 = 3.055194e-9;
    m.theta2 = 2.306818e-9;
    return m;
}

ModelParameters default_preliminary_params() {
    ModelParameters m;
    m.K = 6.292400e-2;
    m.alpha = 0.000152;
    m.beta = 3.463110;
    m.gamma = 5.521969;
    m.delta = 1380.534054;
    m.epsilon = 0.332720;
    m.zeta = 0.792024;
    m.eta = 0.215927;
    m.theta1 = 1.562374e-9;
    m.theta2 = 1.014778e-9;
    return m;
}

double wire_feed_speed(double d) {
    if (!(d > 0.0)) throw DomainError("wire diameter must be positive");
    if (d > 2.5) return 2.0;
    if (d >= 1.8) return 3.0;
    return 4.0;
}

TermValues compute_terms(const WeldParameters& p, const ModelParameters& theta,
                         const TermConfig& cfg) {
    const auto& c = cfg.constants;
    const double pi = std::numbers::pi;

    const double v_f = wire_feed_speed(p.d);

    const double base1 = 4.0 * p.I * c.U * std::sqrt(p.A_w) * p.d_w / (pi * p.d * p.d * v_f);
    const double base2 = p.d_w / p.t_b;

    const double base3 = theta.theta1 * (theta.delta - p.T_i) + theta.theta2 * (theta.delta - p.T_p);
    if (base3 < 0.0)
        throw DomainError("T3 base negative: delta below the interpass/preheat temperatures");

    // t_b and r enter in cm so that rho [g/cm^3] and c [J/(g K)] yield a
    // temperature rise in degC.
    const double t_b_cm = p.t_b / 10.0;
    const double r_cm = c.r / 10.0;
    const double delta_T = p.I * c.U * p.tau / (t_b_cm * c.rho * c.c * pi * r_cm * r_cm);
    const double base4 = p.T_i + delta_T;

    if (theta.delta <= 500.0) throw DomainError("T5 requires delta > 500 degC");

    TermValues t;
    t.t1 = std::pow(base1, theta.alpha);
    t.t2 = std::pow(base2, theta.beta);
    t.t3 = std::pow(base3, theta.gamma);
    t.t4 = std::pow(base4, theta.epsilon);
    if (cfg.t5_form == CoolingRateForm::ratio_power)
        t.t5 = std::pow((theta.delta - 500.0) / p.t_500, theta.zeta);
    else
        t.t5 = std::pow(theta.delta - 500.0, theta.zeta) / p.t_500;
    t.t6 = std::pow(1.0 / p.d, theta.eta);

    for (int i = 0; i < 6; ++i)
        if (!std::isfinite(t[i]))
            throw DomainError(std::string("non-finite physical term T") + std::to_string(i + 1));
    return t;
}

double cpi_canonical(const WeldParameters& p, const ModelParameters& theta, const TermConfig& cfg) {
    const TermValues t = compute_terms(p, theta, cfg);
    return theta.K * ((t.t1 * t.t4 + t.t2 * t.t6) + t.t3 * t.t5);
}

double crack_probability(double cpi, const LogisticConfig& cfg) {
    if (!(cfg.k > 0.0)) throw UsageError("logistic steepness k must be positive");
    return 1.0 / (1.0 + std::exp(-cfg.k * (cpi - cfg.cpi_crit)));
}

Label classify(double p_crack) {
    return p_crack > 0.5 ? Label::cracked : Label::not_cracked;
}

MechanismBreakdown explain(const WeldParameters& p, const ModelParameters& theta,
                           const LogisticConfig& logistic, const TermConfig& cfg) {
    const TermValues t = compute_terms(p, theta, cfg);
    MechanismBreakdown b;
    b.m1 = t.t1 * t.t4;
    b.m2 = t.t2 * t.t6;
    b.m3 = t.t3 * t.t5;
    b.cpi = theta.K * ((b.m1 + b.m2) + b.m3);
    b.p_crack = crack_probability(b.cpi, logistic);
    return b;
}

}  // namespace weldcrack
