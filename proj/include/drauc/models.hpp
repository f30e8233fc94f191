#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <utility>

#include <json.hpp>

#include "drauc/dataset.hpp"
#include "drauc/metrics.hpp"
#include "drauc/pairing.hpp"
#include "drauc/subgradient.hpp"

namespace drauc {

enum class ModelKind { svm, d_auc, dr_auc_f, dr_auc_v };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);
bool is_robust(ModelKind kind);

/// c weighs the loss term against the 0.5 |w|^2 regularizer; epsilon is
/// the transport-budget radius of the ambiguity ball (ground-distance
/// units) and must be 0 for the non-robust kinds.
struct HyperParams {
    double c = 1.0;
    double epsilon = 0.0;

    void validate(ModelKind kind) const;
};

struct TrainingMeta {
    int iterations = 0;
    double final_objective = 0.0;
    double relative_tolerance = 0.0;
    int max_iterations = 0;
    double initial_step = 0.0;
    int patience = 0;
    bool stopped_early = false;
    std::optional<double> lambda;             // dr_auc_f price of transport
    std::optional<double> certificate_value;  // dr_auc_f worst-case loss bound
};

/// Trained linear scorer. The intercept is only ever nonzero for the svm
/// kind; pairwise scores w.(x_plus - x_minus) cancel any intercept, so
/// the other kinds fix it at zero. When a standardizer is attached the
/// model expects raw inputs and applies it before scoring via
/// model_scores; score() itself is the raw w.x + b.
struct LinearModel {
    ModelKind kind = ModelKind::svm;
    Eigen::VectorXd weights;
    double intercept = 0.0;
    HyperParams hyper;
    std::optional<Scaler> standardizer;
    TrainingMeta training_meta;
};

double score(const LinearModel& model, const Eigen::VectorXd& x);

/// Scores for every row, applying the bundled standardizer when present.
Eigen::VectorXd model_scores(const LinearModel& model, const LabeledDataset& ds);

/// Feasible dual pair for the fixed-support worst-case problem; the
/// value (1/m) sum(t) + lambda * epsilon upper-bounds the worst-case
/// expected hinge loss at the weights it was computed for.
struct DualCertificate {
    double lambda = 0.0;
    Eigen::VectorXd t;

    double value(double epsilon) const {
        return t.mean() + lambda * epsilon;
    }
};

/// Mass-transport witness of the worst case: k(i, j) is mass moved from
/// reference atom i to atom j, and p are the resulting atom
/// probabilities (column sums).
struct TransportPlan {
    Eigen::MatrixXd k;
    Eigen::VectorXd p;
};

/// Soft-margin SVM: min over (w, b) of
///   0.5 |w|^2 + (c / n) sum_j max(0, 1 - y_j (w.x_j + b)).
LinearModel train_svm(const LabeledDataset& ds, const HyperParams& hyper,
                      const SubgradientConfig& config);

/// Pairwise ranking objective: min over w of
///   0.5 |w|^2 + (c / m) sum over pairs of max(0, 1 - w.(x_plus - x_minus)).
LinearModel train_d_auc(const LabeledDataset& ds, const HyperParams& hyper,
                        const SubgradientConfig& config);

/// Fixed-support robust objective, jointly minimized over w and the
/// transport price lambda >= 0 after eliminating the epigraph variables:
///   t_i(w, lambda) = max_j max(h_j(w) - lambda d(i, j), 0).
LinearModel train_dr_auc_f(const LabeledDataset& ds, const HyperParams& hyper,
                           const SubgradientConfig& config);

/// Variable-support robust objective, with the transport price eliminated
/// at its optimum lambda = |w|_inf:
///   0.5 |w|^2 + c epsilon |w|_inf + (c / m) sum of pair hinge losses.
LinearModel train_dr_auc_v(const LabeledDataset& ds, const HyperParams& hyper,
                           const SubgradientConfig& config);

/// Fixed-support robust objective at a specific (w, lambda), evaluated
/// directly against the dense distance matrix. Returns the objective
/// value and the eliminated epigraph variables as a dual certificate.
std::pair<double, DualCertificate>
dr_auc_f_objective(const Eigen::VectorXd& w, double lambda, const AtomSet& atoms,
                   const DistanceMatrix& dist, const HyperParams& hyper);

/// Atom count accepted by the exact worst-case transport solve; the LP
/// has m^2 variables, so this analysis path is deliberately small-scale.
inline constexpr Eigen::Index kWorstCaseAtomCap = 200;

/// Exact worst-case distribution over the fixed atoms within transport
/// budget epsilon: solves the inner maximization as a linear program and
/// returns the plan together with the worst-case expected hinge loss.
std::pair<TransportPlan, double>
worst_case_distribution(const Eigen::VectorXd& w, const AtomSet& atoms,
                        const DistanceMatrix& dist, double epsilon);

nlohmann::json model_to_json(const LinearModel& model);
LinearModel model_from_json(const nlohmann::json& j);
void save_model(const LinearModel& model, const std::string& path);
LinearModel load_model(const std::string& path);

} // namespace drauc
