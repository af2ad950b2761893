#pragma once

#include <vector>

#include "weldcrack/dataset.hpp"
#include "weldcrack/expression.hpp"
#include "weldcrack/model.hpp"
#include "weldcrack/types.hpp"

namespace weldcrack {

/// Discovery fitness: equal-weight blend of validation and original accuracy.
struct FitnessReport {
    double comprehensive = 0.0;
    double acc_validation = 0.0;
    double acc_original = 0.0;
    bool degenerate = false;  ///< sentinel fired on more than half the samples
};

/// An expression plus its fitted constants; the deployable model.
struct FittedModel {
    Expression expr = Expression::canonical();
    ModelParameters theta = default_refined_params();
    LogisticConfig logistic{};
    TermConfig term_cfg{};

    /// Crack probability for one weld. `hit_sentinel`, when non-null, is set
    /// if guarded evaluation fired.
    double predict(const WeldParameters& p, bool* hit_sentinel = nullptr) const;
};

/// Dataset pre-reduced to the theta-independent pieces of the six terms, so
/// repeated fitness evaluations only pay for the exponentiations.
class PreparedDataset {
  public:
    PreparedDataset() = default;
    PreparedDataset(const Dataset& data, const TermConfig& cfg = {});

    size_t size() const { return rows_.size(); }
    bool empty() const { return rows_.empty(); }

    /// Term values of row i under theta; identical to compute_terms on the
    /// original sample (covered by an equivalence test).
    TermValues terms(size_t i, const ModelParameters& theta) const;

    Label label(size_t i) const { return rows_[i].label; }

  private:
    struct Row {
        double base1 = 0.0;       // heat-input base
        double base2 = 0.0;       // d_w / t_b
        double T_i = 0.0, T_p = 0.0;
        double delta_T = 0.0;     // arc-heat temperature rise
        double inv_d = 0.0;
        double t_500 = 0.0;
        Label label = Label::not_cracked;
    };
    std::vector<Row> rows_;
    CoolingRateForm t5_form_ = CoolingRateForm::ratio_power;
};

/// Fraction of correctly classified rows.
double accuracy(const Expression& expr, const ModelParameters& theta, const PreparedDataset& data,
                const LogisticConfig& logistic, long* sentinel_rows = nullptr);

/// 0.5 * validation accuracy + 0.5 * original-set accuracy. Reports a
/// degenerate (all-zero) fitness when guarded evaluation fired on more than
/// half of all rows.
FitnessReport comprehensive_fitness(const Expression& expr, const ModelParameters& theta,
                                    const PreparedDataset& validation,
                                    const PreparedDataset& original,
                                    const LogisticConfig& logistic = {});

FitnessReport comprehensive_fitness(const Expression& expr, const ModelParameters& theta,
                                    const Dataset& validation, const Dataset& original,
                                    const LogisticConfig& logistic = {},
                                    const TermConfig& term_cfg = {});

/// Mean weighted binary cross-entropy of predicted crack probabilities;
/// sentinel-valued rows contribute a finite saturated penalty.
double smooth_loss(const Expression& expr, const ModelParameters& theta,
                   const PreparedDataset& data, const LogisticConfig& logistic = {});

}  // namespace weldcrack
