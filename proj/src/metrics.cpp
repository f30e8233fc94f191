#include "drauc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "drauc/errors.hpp"

namespace drauc {

std::string to_string(TiePolicy policy) {
    return policy == TiePolicy::count_as_success ? "count_as_success" : "half_credit";
}

TiePolicy tie_policy_from_string(const std::string& name) {
    if (name == "count_as_success") return TiePolicy::count_as_success;
    if (name == "half_credit") return TiePolicy::half_credit;
    throw ConfigError("unknown tie policy \"" + name +
                      "\" (expected count_as_success or half_credit)");
}

double auc_wmw(const Eigen::VectorXd& pos_scores,
               const Eigen::VectorXd& neg_scores,
               TiePolicy policy) {
    if (pos_scores.size() == 0 || neg_scores.size() == 0)
        throw DataError("AUC requires scores from both classes");
    if (!pos_scores.allFinite() || !neg_scores.allFinite())
        throw DataError("AUC requires finite scores");

    std::vector<double> neg(neg_scores.data(), neg_scores.data() + neg_scores.size());
    std::sort(neg.begin(), neg.end());

    long long below = 0;
    long long ties = 0;
    for (Eigen::Index i = 0; i < pos_scores.size(); ++i) {
        const double p = pos_scores[i];
        const auto lb = std::lower_bound(neg.begin(), neg.end(), p);
        const auto ub = std::upper_bound(lb, neg.end(), p);
        below += lb - neg.begin();
        ties += ub - lb;
    }
    const double tie_credit = policy == TiePolicy::count_as_success ? 1.0 : 0.5;
    const double pairs =
        static_cast<double>(pos_scores.size()) * static_cast<double>(neg_scores.size());
    return (static_cast<double>(below) + tie_credit * static_cast<double>(ties)) / pairs;
}

RocCurve roc_curve(const Eigen::VectorXd& scores, const Eigen::VectorXi& labels) {
    if (scores.size() != labels.size())
        throw DataError("scores and labels must have equal length");
    if (!scores.allFinite()) throw DataError("ROC requires finite scores");
    const auto n_pos = static_cast<double>((labels.array() == 1).count());
    const auto n_neg = static_cast<double>((labels.array() == -1).count());
    if (n_pos == 0 || n_neg == 0)
        throw DataError("ROC requires both classes");

    std::vector<Eigen::Index> order(static_cast<std::size_t>(scores.size()));
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<Eigen::Index>(i);
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        return scores[a] > scores[b];
    });

    RocCurve curve;
    curve.points.emplace_back(0.0, 0.0);
    long tp = 0;
    long fp = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        const double threshold = scores[order[i]];
        // All points with this exact score form one step.
        while (i < order.size() && scores[order[i]] == threshold) {
            if (labels[order[i]] == 1) ++tp; else ++fp;
            ++i;
        }
        curve.points.emplace_back(static_cast<double>(fp) / n_neg,
                                  static_cast<double>(tp) / n_pos);
    }
    return curve;
}

double trapezoid_area(const RocCurve& curve) {
    double area = 0.0;
    for (std::size_t k = 1; k < curve.points.size(); ++k) {
        const auto& [x0, y0] = curve.points[k - 1];
        const auto& [x1, y1] = curve.points[k];
        area += (x1 - x0) * (y1 + y0) / 2.0;
    }
    return area;
}

std::string roc_to_csv(const RocCurve& curve) {
    std::ostringstream out;
    out.precision(17);
    out << "fpr,tpr\n";
    for (const auto& [fpr, tpr] : curve.points) out << fpr << "," << tpr << "\n";
    return out.str();
}

double hinge_pair_loss(const Eigen::VectorXd& w, const Atom& atom) {
    if (w.size() != atom.x_plus.size() || w.size() != atom.x_minus.size())
        throw DataError("weight dimension does not match atom dimension");
    const double margin = w.dot(atom.x_plus) - w.dot(atom.x_minus);
    return std::max(0.0, 1.0 - margin);
}

double empirical_pair_risk(const Eigen::VectorXd& w, const AtomSet& atoms) {
    if (atoms.m < 1) throw DataError("empty atom set");
    double sum = 0.0;
    for (const Atom& a : atoms.atoms) sum += hinge_pair_loss(w, a);
    return sum / static_cast<double>(atoms.m);
}

} // namespace drauc
