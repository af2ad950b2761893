#pragma once

#include "weldcrack/types.hpp"

namespace weldcrack {

/// Which algebraic form the cooling-rate term T5 takes.
enum class CoolingRateForm {
    ratio_power,        ///< ((delta - 500) / t_500)^zeta  (default)
    power_over_time,    ///< (delta - 500)^zeta / t_500
};

struct TermConfig {
    PhysicalConstants constants{};
    CoolingRateForm t5_form = CoolingRateForm::ratio_power;
};

/// Wire feed speed as a three-branch function of wire diameter (mm/s).
double wire_feed_speed(double d);

/// Evaluates the six engineered physical terms for one weld.
/// Throws DomainError if delta makes the T3 base negative or delta <= 500.
TermValues compute_terms(const WeldParameters& p, const ModelParameters& theta,
                         const TermConfig& cfg = {});

/// Cracking Probability Index of the canonical three-mechanism model,
/// K * ((T1*T4 + T2*T6) + T3*T5) in exactly that floating-point order.
double cpi_canonical(const WeldParameters& p, const ModelParameters& theta,
                     const TermConfig& cfg = {});

/// Logistic conversion of a CPI into a crack probability.
double crack_probability(double cpi, const LogisticConfig& cfg = {});

/// Binary decision at the strict 0.5 threshold.
Label classify(double p_crack);

/// Per-mechanism decomposition; cpi agrees with cpi_canonical.
MechanismBreakdown explain(const WeldParameters& p, const ModelParameters& theta,
                           const LogisticConfig& logistic = {}, const TermConfig& cfg = {});

}  // namespace weldcrack
