#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "drauc/pairing.hpp"

namespace drauc {

/// How a tied pair (equal positive and negative scores) is credited.
/// count_as_success credits the full pair, matching a >= comparison of
/// scores; half_credit is the usual Wilcoxon-Mann-Whitney convention and
/// is what the trapezoidal ROC area reproduces.
enum class TiePolicy { count_as_success, half_credit };

std::string to_string(TiePolicy policy);
TiePolicy tie_policy_from_string(const std::string& name);

/// Pairwise-comparison AUC: (successes + tie credit) / (n_pos * n_neg).
/// Computed by sorting rather than pair enumeration; equals the
/// brute-force double sum exactly.
double auc_wmw(const Eigen::VectorXd& pos_scores,
               const Eigen::VectorXd& neg_scores,
               TiePolicy policy);

/// (false positive rate, true positive rate) pairs, one per distinct
/// score threshold, from (0,0) to (1,1). Tied scores collapse into a
/// single step.
struct RocCurve {
    std::vector<std::pair<double, double>> points;
};

RocCurve roc_curve(const Eigen::VectorXd& scores, const Eigen::VectorXi& labels);

/// Area under the curve by the trapezoid rule. Matches auc_wmw with
/// half_credit.
double trapezoid_area(const RocCurve& curve);

/// Two-column CSV with header "fpr,tpr".
std::string roc_to_csv(const RocCurve& curve);

/// max(0, 1 - (w . x_plus - w . x_minus)).
double hinge_pair_loss(const Eigen::VectorXd& w, const Atom& atom);

/// Mean pairwise hinge loss over all atoms.
double empirical_pair_risk(const Eigen::VectorXd& w, const AtomSet& atoms);

} // namespace drauc
