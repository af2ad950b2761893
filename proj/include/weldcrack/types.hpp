#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace weldcrack {

/// Raised when an input violates a physical/domain precondition.
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

/// Raised on misuse of an interface (bad arguments, empty inputs, bad files).
struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// The nine process inputs of a single weld.
struct WeldParameters {
    double I = 0.0;      ///< welding current, A
    double tau = 0.0;    ///< single-pass duration, s
    double t_b = 0.0;    ///< base metal thickness, mm
    double d_w = 0.0;    ///< weld depth, mm
    double A_w = 0.0;    ///< weld area, mm^2
    double T_i = 0.0;    ///< interpass temperature, degC
    double T_p = 0.0;    ///< preheat temperature, degC
    double t_500 = 0.0;  ///< cooling time to 500 degC, s
    double d = 0.0;      ///< wire diameter, mm

    static constexpr int kDim = 9;

    std::array<double, kDim> as_array() const { return {I, tau, t_b, d_w, A_w, T_i, T_p, t_500, d}; }
    static WeldParameters from_array(const std::array<double, kDim>& a) {
        return {a[0], a[1], a[2], a[3], a[4], a[5], a[6], a[7], a[8]};
    }

    bool operator==(const WeldParameters&) const = default;
};

/// Field names in canonical (CSV / array) order.
inline constexpr std::array<const char*, WeldParameters::kDim> kParameterNames = {
    "I", "tau", "t_b", "d_w", "A_w", "T_i", "T_p", "t_500", "d"};

/// Physically admissible operating ranges for each of the nine parameters,
/// in canonical order.
struct AdmissibleRanges {
    std::array<double, WeldParameters::kDim> lo = {50.0, 5.0, 1.5, 0.5, 10.0, 20.0, 20.0, 3.0, 0.8};
    std::array<double, WeldParameters::kDim> hi = {100.0, 90.0, 20.0, 20.0, 1000.0, 800.0, 600.0, 15.0, 3.2};
};

/// True iff every field lies in its admissible range and d_w <= t_b.
bool is_validated(const WeldParameters& p, const AdmissibleRanges& r = {});

/// Throws DomainError naming the offending field if not validated.
void require_validated(const WeldParameters& p, const AdmissibleRanges& r = {});

/// Fixed material/process constants of the case study.
struct PhysicalConstants {
    double U = 12.0;    ///< welding voltage, V
    double rho = 8.16;  ///< density, g/cm^3
    double c = 0.75;    ///< specific heat, J/(g*K)
    double r = 50.0;    ///< arc heat-affect radius, mm
};

/// The ten fitted constants of the constitutive model.
struct ModelParameters {
    double K = 0.0;       ///< overall scale
    double alpha = 0.0;   ///< heat-input exponent
    double beta = 0.0;    ///< geometric-constraint exponent
    double gamma = 0.0;   ///< thermal-stress exponent
    double delta = 0.0;   ///< maximum weld-point temperature, degC
    double epsilon = 0.0; ///< heat-accumulation exponent
    double zeta = 0.0;    ///< cooling-rate exponent
    double eta = 0.0;     ///< wire-diameter exponent
    double theta1 = 0.0;  ///< thermal-stress coefficient (interpass)
    double theta2 = 0.0;  ///< thermal-stress coefficient (preheat)

    static constexpr int kDim = 10;

    std::array<double, kDim> as_array() const {
        return {K, alpha, beta, gamma, delta, epsilon, zeta, eta, theta1, theta2};
    }
    static ModelParameters from_array(const std::array<double, kDim>& a) {
        return {a[0], a[1], a[2], a[3], a[4], a[5], a[6], a[7], a[8], a[9]};
    }

    bool operator==(const ModelParameters&) const = default;
};

inline constexpr std::array<const char*, ModelParameters::kDim> kModelParameterNames = {
    "K", "alpha", "beta", "gamma", "delta", "epsilon", "zeta", "eta", "theta1", "theta2"};

/// Box bounds over ModelParameters, in the same canonical order.
struct ParameterBounds {
    std::array<double, ModelParameters::kDim> lo = {1e-10, 0.1, 0.1, 0.1, 1000.0,
                                                    0.1,   0.1, 0.1, 1e-10, 1e-10};
    std::array<double, ModelParameters::kDim> hi = {1e-1, 3.0, 3.0, 3.0, 2000.0,
                                                    3.0,  3.0, 3.0, 1e-1, 1e-1};

    bool contains(const ModelParameters& m) const {
        const auto a = m.as_array();
        for (int i = 0; i < ModelParameters::kDim; ++i)
            if (a[i] < lo[i] || a[i] > hi[i]) return false;
        return true;
    }
};

/// Refined constants reported for the final model; the shipped default.
ModelParameters default_refined_params();

/// Preliminary constants from the discovery stage; kept for comparison runs.
ModelParameters default_preliminary_params();

/// Logistic CPI -> probability conversion settings.
struct LogisticConfig {
    double k = 2.0;
    double cpi_crit = 0.6;
};

/// Values of the six engineered physical terms.
struct TermValues {
    double t1 = 0.0, t2 = 0.0, t3 = 0.0, t4 = 0.0, t5 = 0.0, t6 = 0.0;
    double operator[](int i) const {
        const double v[6] = {t1, t2, t3, t4, t5, t6};
        return v[i];
    }
};

enum class Label : int { not_cracked = 0, cracked = 1 };

enum class Source : int { original = 0, augmented = 1, virtual_ = 2 };

std::string to_string(Source s);
Source source_from_string(const std::string& s);

/// One labeled observation with its provenance and training weight.
struct LabeledSample {
    WeldParameters params;
    Label label = Label::not_cracked;
    Source source = Source::original;
    double weight = 1.0;
};

/// Per-mechanism decomposition of a CPI prediction.
struct MechanismBreakdown {
    double m1 = 0.0;  ///< heat input x accumulation (T1*T4)
    double m2 = 0.0;  ///< geometric constraint x wire diameter (T2*T6)
    double m3 = 0.0;  ///< thermal stress x cooling rate (T3*T5)
    double cpi = 0.0;
    double p_crack = 0.0;
};

}  // namespace weldcrack
