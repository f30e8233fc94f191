#include "drauc/models.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <vector>

#include "drauc/errors.hpp"
#include "drauc/file_io.hpp"
#include "drauc/lp.hpp"

namespace drauc {

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::svm: return "svm";
        case ModelKind::d_auc: return "d-auc";
        case ModelKind::dr_auc_f: return "dr-auc-f";
        case ModelKind::dr_auc_v: return "dr-auc-v";
    }
    return "unknown";
}

ModelKind model_kind_from_string(const std::string& name) {
    if (name == "svm") return ModelKind::svm;
    if (name == "d-auc") return ModelKind::d_auc;
    if (name == "dr-auc-f") return ModelKind::dr_auc_f;
    if (name == "dr-auc-v") return ModelKind::dr_auc_v;
    throw ConfigError("unknown model kind \"" + name +
                      "\" (expected one of: svm, d-auc, dr-auc-f, dr-auc-v)");
}

bool is_robust(ModelKind kind) {
    return kind == ModelKind::dr_auc_f || kind == ModelKind::dr_auc_v;
}

void HyperParams::validate(ModelKind kind) const {
    if (!(c > 0)) throw ConfigError("hyperparameter c must be positive");
    if (epsilon < 0) throw ConfigError("epsilon must be nonnegative");
    if (!is_robust(kind) && epsilon != 0.0)
        throw ConfigError("epsilon has no meaning for model kind " + to_string(kind) +
                          " and must be 0");
}

double score(const LinearModel& model, const Eigen::VectorXd& x) {
    if (x.size() != model.weights.size())
        throw DataError("input dimension " + std::to_string(x.size()) +
                        " does not match model dimension " +
                        std::to_string(model.weights.size()));
    return model.weights.dot(x) + model.intercept;
}

Eigen::VectorXd model_scores(const LinearModel& model, const LabeledDataset& ds) {
    const LabeledDataset* input = &ds;
    LabeledDataset transformed;
    if (model.standardizer) {
        transformed = model.standardizer->transform(ds);
        input = &transformed;
    }
    if (input->cols() != model.weights.size())
        throw DataError("dataset dimension does not match model dimension");
    return (input->features * model.weights).array() + model.intercept;
}

namespace {

struct ClassSplit {
    Eigen::MatrixXd pos;  // n_pos x d
    Eigen::MatrixXd neg;  // n_neg x d
};

ClassSplit split_classes(const LabeledDataset& ds) {
    ds.validate();
    const auto pos_idx = ds.positive_indices();
    const auto neg_idx = ds.negative_indices();
    if (pos_idx.empty() || neg_idx.empty())
        throw DataError("training requires at least one point of each class");
    ClassSplit split;
    split.pos.resize(static_cast<Eigen::Index>(pos_idx.size()), ds.cols());
    split.neg.resize(static_cast<Eigen::Index>(neg_idx.size()), ds.cols());
    for (std::size_t i = 0; i < pos_idx.size(); ++i)
        split.pos.row(static_cast<Eigen::Index>(i)) = ds.features.row(pos_idx[i]);
    for (std::size_t j = 0; j < neg_idx.size(); ++j)
        split.neg.row(static_cast<Eigen::Index>(j)) = ds.features.row(neg_idx[j]);
    return split;
}

/// Sum of max(0, 1 - sp_i + sn_j) over all (i, j) pairs, plus its
/// subgradient with respect to w, both computed from sorted score vectors
/// instead of the m-term pair loop. A pair is active when sn_j > sp_i - 1
/// strictly; both count passes share that exact comparison so the loss
/// and subgradient see the same active set.
class PairHingeEngine {
public:
    PairHingeEngine(Eigen::MatrixXd pos, Eigen::MatrixXd neg)
        : pos_(std::move(pos)), neg_(std::move(neg)) {}

    Eigen::Index pairs() const { return pos_.rows() * neg_.rows(); }

    double loss_sum(const Eigen::VectorXd& w, Eigen::VectorXd* grad_term) {
        const Eigen::VectorXd sp = pos_ * w;
        const Eigen::VectorXd sn = neg_ * w;
        const Eigen::Index np = sp.size();
        const Eigen::Index nn = sn.size();

        tau_.resize(static_cast<std::size_t>(np));
        for (Eigen::Index i = 0; i < np; ++i) tau_[static_cast<std::size_t>(i)] = sp[i] - 1.0;
        sorted_sn_.assign(sn.data(), sn.data() + nn);
        std::sort(sorted_sn_.begin(), sorted_sn_.end());
        sorted_tau_ = tau_;
        std::sort(sorted_tau_.begin(), sorted_tau_.end());

        Eigen::VectorXd cnt(np);
        for (Eigen::Index i = 0; i < np; ++i) {
            const auto it = std::upper_bound(sorted_sn_.begin(), sorted_sn_.end(),
                                             tau_[static_cast<std::size_t>(i)]);
            cnt[i] = static_cast<double>(sorted_sn_.end() - it);
        }
        Eigen::VectorXd rcnt(nn);
        for (Eigen::Index j = 0; j < nn; ++j) {
            const auto it = std::lower_bound(sorted_tau_.begin(), sorted_tau_.end(), sn[j]);
            rcnt[j] = static_cast<double>(it - sorted_tau_.begin());
        }

        const double sum = cnt.sum() - cnt.dot(sp) + rcnt.dot(sn);
        if (grad_term) {
            grad_term->noalias() = neg_.transpose() * rcnt;
            grad_term->noalias() -= pos_.transpose() * cnt;
        }
        return sum;
    }

private:
    Eigen::MatrixXd pos_;
    Eigen::MatrixXd neg_;
    std::vector<double> tau_, sorted_sn_, sorted_tau_;
};

Eigen::MatrixXd l1_distance_matrix(const Eigen::MatrixXd& rows) {
    const Eigen::Index n = rows.rows();
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double v = (rows.row(i) - rows.row(j)).lpNorm<1>();
            d(i, j) = v;
            d(j, i) = v;
        }
    }
    return d;
}

/// Answers out[a] = max_j (v_j - lambda * d(a, j)) with its argmax, where
/// d is the L1 distance within one class. Each row's candidates are kept
/// sorted by distance, so the scan stops as soon as lambda * d alone puts
/// the remaining candidates below the best value found; the result is the
/// exact maximum either way.
class MaxPlusOracle {
public:
    explicit MaxPlusOracle(const Eigen::MatrixXd& points) : n_(points.rows()) {
        const Eigen::MatrixXd dist = l1_distance_matrix(points);
        d_sorted_.resize(static_cast<std::size_t>(n_ * n_));
        order_.resize(static_cast<std::size_t>(n_ * n_));
        std::vector<std::pair<double, int>> column(static_cast<std::size_t>(n_));
        for (Eigen::Index a = 0; a < n_; ++a) {
            for (Eigen::Index j = 0; j < n_; ++j)
                column[static_cast<std::size_t>(j)] = {dist(j, a), static_cast<int>(j)};
            std::sort(column.begin(), column.end());
            double* ds = &d_sorted_[static_cast<std::size_t>(a * n_)];
            int* ord = &order_[static_cast<std::size_t>(a * n_)];
            for (Eigen::Index t = 0; t < n_; ++t) {
                ds[t] = column[static_cast<std::size_t>(t)].first;
                ord[t] = column[static_cast<std::size_t>(t)].second;
            }
        }
    }

    /// best/arg/arg_distance must have size n.
    void query(const Eigen::VectorXd& v, double lambda, double* best, int* arg,
               double* arg_distance) const {
        const double ceiling = v.maxCoeff();
        for (Eigen::Index a = 0; a < n_; ++a) {
            const double* ds = &d_sorted_[static_cast<std::size_t>(a * n_)];
            const int* ord = &order_[static_cast<std::size_t>(a * n_)];
            double top = -std::numeric_limits<double>::infinity();
            int top_arg = ord[0];
            double top_d = ds[0];
            for (Eigen::Index t = 0; t < n_; ++t) {
                const double shift = lambda * ds[t];
                if (shift >= ceiling - top) break;  // nothing further can win
                const double value = v[ord[t]] - shift;
                if (value > top) {
                    top = value;
                    top_arg = ord[t];
                    top_d = ds[t];
                }
            }
            best[a] = top;
            arg[a] = top_arg;
            arg_distance[a] = top_d;
        }
    }

    Eigen::Index size() const { return n_; }

private:
    Eigen::Index n_;
    std::vector<double> d_sorted_;
    std::vector<int> order_;
};

/// Fixed-support robust objective with the epigraph variables eliminated.
/// The pair structure factors the per-atom maxima: for atom (a, b),
///   t_ab = max(0, 1 + ap_a + an_b)
/// with ap_a = max_j (-sp_j - lambda Dp(a, j)) and an_b analogous, so one
/// evaluation costs O(n_pos^2 + n_neg^2) at worst instead of O(m^2).
class FixedSupportEngine {
public:
    FixedSupportEngine(Eigen::MatrixXd pos, Eigen::MatrixXd neg)
        : pos_(std::move(pos)),
          neg_(std::move(neg)),
          oracle_p_(pos_),
          oracle_n_(neg_) {}

    Eigen::Index pairs() const { return pos_.rows() * neg_.rows(); }

    /// Returns the full objective 0.5|w|^2 + c ((1/m) sum t + lambda eps)
    /// and, when grad_w/grad_lambda are given, a subgradient. The
    /// certificate part (1/m) sum t + lambda eps is stored in
    /// last_certificate_value().
    double evaluate(const Eigen::VectorXd& w, double lambda, double c, double epsilon,
                    Eigen::VectorXd* grad_w, double* grad_lambda) {
        const Eigen::Index np = pos_.rows();
        const Eigen::Index nn = neg_.rows();
        const double m = static_cast<double>(pairs());
        const Eigen::VectorXd sp = pos_ * w;
        const Eigen::VectorXd sn = neg_ * w;

        ap_.resize(static_cast<std::size_t>(np));
        arg_p_.resize(static_cast<std::size_t>(np));
        dist_p_.resize(static_cast<std::size_t>(np));
        oracle_p_.query(-sp, lambda, ap_.data(), arg_p_.data(), dist_p_.data());
        an_.resize(static_cast<std::size_t>(nn));
        arg_n_.resize(static_cast<std::size_t>(nn));
        dist_n_.resize(static_cast<std::size_t>(nn));
        oracle_n_.query(sn, lambda, an_.data(), arg_n_.data(), dist_n_.data());

        // Pair (a, b) contributes when 1 + ap_a + an_b > 0, i.e. when
        // an_b > tau_a with tau_a = -1 - ap_a; both counting passes use
        // that same comparison.
        tau_.resize(static_cast<std::size_t>(np));
        for (Eigen::Index a = 0; a < np; ++a)
            tau_[static_cast<std::size_t>(a)] = -1.0 - ap_[static_cast<std::size_t>(a)];
        sorted_an_ = an_;
        std::sort(sorted_an_.begin(), sorted_an_.end());
        sorted_tau_ = tau_;
        std::sort(sorted_tau_.begin(), sorted_tau_.end());

        double sum_t = 0.0;
        cnt_p_.assign(static_cast<std::size_t>(np), 0.0);
        for (Eigen::Index a = 0; a < np; ++a) {
            const auto it = std::upper_bound(sorted_an_.begin(), sorted_an_.end(),
                                             tau_[static_cast<std::size_t>(a)]);
            const double cnt = static_cast<double>(sorted_an_.end() - it);
            cnt_p_[static_cast<std::size_t>(a)] = cnt;
            sum_t += cnt * (1.0 + ap_[static_cast<std::size_t>(a)]);
        }
        cnt_n_.assign(static_cast<std::size_t>(nn), 0.0);
        for (Eigen::Index b = 0; b < nn; ++b) {
            const auto it = std::lower_bound(sorted_tau_.begin(), sorted_tau_.end(),
                                             an_[static_cast<std::size_t>(b)]);
            const double cnt = static_cast<double>(it - sorted_tau_.begin());
            cnt_n_[static_cast<std::size_t>(b)] = cnt;
            sum_t += cnt * an_[static_cast<std::size_t>(b)];
        }

        last_certificate_value_ = sum_t / m + lambda * epsilon;
        const double value = 0.5 * w.squaredNorm() + c * last_certificate_value_;

        if (grad_w != nullptr && grad_lambda != nullptr) {
            Eigen::VectorXd weight_p = Eigen::VectorXd::Zero(np);
            Eigen::VectorXd weight_n = Eigen::VectorXd::Zero(nn);
            double distance_mass = 0.0;
            for (Eigen::Index a = 0; a < np; ++a) {
                const double cnt = cnt_p_[static_cast<std::size_t>(a)];
                if (cnt > 0) {
                    weight_p[arg_p_[static_cast<std::size_t>(a)]] += cnt;
                    distance_mass += cnt * dist_p_[static_cast<std::size_t>(a)];
                }
            }
            for (Eigen::Index b = 0; b < nn; ++b) {
                const double cnt = cnt_n_[static_cast<std::size_t>(b)];
                if (cnt > 0) {
                    weight_n[arg_n_[static_cast<std::size_t>(b)]] += cnt;
                    distance_mass += cnt * dist_n_[static_cast<std::size_t>(b)];
                }
            }
            grad_w->noalias() = w;
            grad_w->noalias() -= (c / m) * (pos_.transpose() * weight_p);
            grad_w->noalias() += (c / m) * (neg_.transpose() * weight_n);
            *grad_lambda = c * (epsilon - distance_mass / m);
        }
        return value;
    }

    double last_certificate_value() const { return last_certificate_value_; }

private:
    Eigen::MatrixXd pos_, neg_;
    MaxPlusOracle oracle_p_, oracle_n_;
    std::vector<double> ap_, an_, tau_, sorted_an_, sorted_tau_, cnt_p_, cnt_n_;
    std::vector<double> dist_p_, dist_n_;
    std::vector<int> arg_p_, arg_n_;
    double last_certificate_value_ = 0.0;
};

TrainingMeta make_meta(const SubgradientResult& result, const SubgradientConfig& config) {
    TrainingMeta meta;
    meta.iterations = result.iterations;
    meta.final_objective = result.value;
    meta.relative_tolerance = config.relative_tolerance;
    meta.max_iterations = config.max_iterations;
    meta.initial_step = config.initial_step;
    meta.patience = config.patience;
    meta.stopped_early = result.stopped_early;
    return meta;
}

} // namespace

LinearModel train_svm(const LabeledDataset& ds, const HyperParams& hyper,
                      const SubgradientConfig& config) {
    hyper.validate(ModelKind::svm);
    ds.validate();
    if (ds.positive_count() == 0 || ds.negative_count() == 0)
        throw DataError("training requires at least one point of each class");
    const Eigen::Index n = ds.rows();
    const Eigen::Index d = ds.cols();
    const Eigen::MatrixXd& x = ds.features;
    const Eigen::VectorXd y = ds.labels.cast<double>();
    const double c_over_n = hyper.c / static_cast<double>(n);

    const ObjectiveFn objective = [&](const Eigen::VectorXd& v, Eigen::VectorXd& g) {
        const Eigen::VectorXd w = v.head(d);
        const double b = v[d];
        const Eigen::VectorXd margins = y.array() * ((x * w).array() + b);
        double loss = 0.0;
        Eigen::VectorXd active = Eigen::VectorXd::Zero(n);
        for (Eigen::Index j = 0; j < n; ++j) {
            const double gap = 1.0 - margins[j];
            if (gap > 0) {
                loss += gap;
                active[j] = y[j];
            }
        }
        g.resize(d + 1);
        g.head(d) = w - c_over_n * (x.transpose() * active);
        g[d] = -c_over_n * active.sum();
        return 0.5 * w.squaredNorm() + c_over_n * loss;
    };

    const SubgradientResult result =
        minimize_subgradient(objective, Eigen::VectorXd::Zero(d + 1), nullptr, config);

    LinearModel model;
    model.kind = ModelKind::svm;
    model.weights = result.x.head(d);
    model.intercept = result.x[d];
    model.hyper = hyper;
    model.training_meta = make_meta(result, config);
    return model;
}

LinearModel train_d_auc(const LabeledDataset& ds, const HyperParams& hyper,
                        const SubgradientConfig& config) {
    hyper.validate(ModelKind::d_auc);
    ClassSplit split = split_classes(ds);
    const Eigen::Index d = ds.cols();
    PairHingeEngine engine(std::move(split.pos), std::move(split.neg));
    const double c_over_m = hyper.c / static_cast<double>(engine.pairs());

    Eigen::VectorXd pair_grad(d);
    const ObjectiveFn objective = [&](const Eigen::VectorXd& w, Eigen::VectorXd& g) {
        const double loss = engine.loss_sum(w, &pair_grad);
        g = w + c_over_m * pair_grad;
        return 0.5 * w.squaredNorm() + c_over_m * loss;
    };

    const SubgradientResult result =
        minimize_subgradient(objective, Eigen::VectorXd::Zero(d), nullptr, config);

    LinearModel model;
    model.kind = ModelKind::d_auc;
    model.weights = result.x;
    model.intercept = 0.0;
    model.hyper = hyper;
    model.training_meta = make_meta(result, config);
    return model;
}

LinearModel train_dr_auc_v(const LabeledDataset& ds, const HyperParams& hyper,
                           const SubgradientConfig& config) {
    hyper.validate(ModelKind::dr_auc_v);
    ClassSplit split = split_classes(ds);
    const Eigen::Index d = ds.cols();
    PairHingeEngine engine(std::move(split.pos), std::move(split.neg));
    const double c_over_m = hyper.c / static_cast<double>(engine.pairs());
    const double norm_weight = hyper.c * hyper.epsilon;

    Eigen::VectorXd pair_grad(d);
    const ObjectiveFn objective = [&](const Eigen::VectorXd& w, Eigen::VectorXd& g) {
        const double loss = engine.loss_sum(w, &pair_grad);
        // sup-norm subgradient: first coordinate attaining the max.
        Eigen::Index arg = 0;
        double norm_inf = 0.0;
        for (Eigen::Index k = 0; k < d; ++k) {
            const double a = std::abs(w[k]);
            if (a > norm_inf) { norm_inf = a; arg = k; }
        }
        g = w + c_over_m * pair_grad;
        if (norm_inf > 0.0)
            g[arg] += norm_weight * (w[arg] > 0 ? 1.0 : -1.0);
        return 0.5 * w.squaredNorm() + norm_weight * norm_inf + c_over_m * loss;
    };

    const SubgradientResult result =
        minimize_subgradient(objective, Eigen::VectorXd::Zero(d), nullptr, config);

    LinearModel model;
    model.kind = ModelKind::dr_auc_v;
    model.weights = result.x;
    model.intercept = 0.0;
    model.hyper = hyper;
    model.training_meta = make_meta(result, config);
    return model;
}

LinearModel train_dr_auc_f(const LabeledDataset& ds, const HyperParams& hyper,
                           const SubgradientConfig& config) {
    hyper.validate(ModelKind::dr_auc_f);
    ClassSplit split = split_classes(ds);
    const Eigen::Index d = ds.cols();
    FixedSupportEngine engine(std::move(split.pos), std::move(split.neg));

    Eigen::VectorXd grad_w(d);
    double grad_lambda = 0.0;
    const ObjectiveFn objective = [&](const Eigen::VectorXd& v, Eigen::VectorXd& g) {
        const double value =
            engine.evaluate(v.head(d), v[d], hyper.c, hyper.epsilon, &grad_w, &grad_lambda);
        g.resize(d + 1);
        g.head(d) = grad_w;
        g[d] = grad_lambda;
        return value;
    };
    const ProjectionFn project_lambda = [d](Eigen::VectorXd& v) {
        if (v[d] < 0) v[d] = 0;
    };

    Eigen::VectorXd x0 = Eigen::VectorXd::Zero(d + 1);
    x0[d] = 1.0;  // |w0|_inf + 1 at w0 = 0
    const SubgradientResult result =
        minimize_subgradient(objective, x0, project_lambda, config);

    LinearModel model;
    model.kind = ModelKind::dr_auc_f;
    model.weights = result.x.head(d);
    model.intercept = 0.0;
    model.hyper = hyper;
    model.training_meta = make_meta(result, config);
    engine.evaluate(model.weights, result.x[d], hyper.c, hyper.epsilon, nullptr, nullptr);
    model.training_meta.lambda = result.x[d];
    model.training_meta.certificate_value = engine.last_certificate_value();
    return model;
}

std::pair<double, DualCertificate>
dr_auc_f_objective(const Eigen::VectorXd& w, double lambda, const AtomSet& atoms,
                   const DistanceMatrix& dist, const HyperParams& hyper) {
    if (lambda < 0) throw DataError("lambda must be nonnegative");
    if (atoms.m < 1) throw DataError("empty atom set");
    if (dist.entries.rows() != atoms.m || dist.entries.cols() != atoms.m)
        throw DataError("distance matrix does not match atom count");

    Eigen::VectorXd hinge(atoms.m);
    for (Eigen::Index j = 0; j < atoms.m; ++j)
        hinge[j] = hinge_pair_loss(w, atoms.atom(j));

    DualCertificate cert;
    cert.lambda = lambda;
    cert.t.resize(atoms.m);
    for (Eigen::Index i = 0; i < atoms.m; ++i) {
        double best = 0.0;  // the max(., 0) clamp of every term
        for (Eigen::Index j = 0; j < atoms.m; ++j) {
            const double v = hinge[j] - lambda * dist.entries(i, j);
            if (v > best) best = v;
        }
        cert.t[i] = best;
    }
    const double value = 0.5 * w.squaredNorm() + hyper.c * cert.value(hyper.epsilon);
    return {value, std::move(cert)};
}

std::pair<TransportPlan, double>
worst_case_distribution(const Eigen::VectorXd& w, const AtomSet& atoms,
                        const DistanceMatrix& dist, double epsilon) {
    if (epsilon < 0) throw DataError("epsilon must be nonnegative");
    const Eigen::Index m = atoms.m;
    if (m < 1) throw DataError("empty atom set");
    if (m > kWorstCaseAtomCap)
        throw DataError("worst-case analysis supports at most " +
                        std::to_string(kWorstCaseAtomCap) + " atoms, got " +
                        std::to_string(m));
    if (dist.entries.rows() != m || dist.entries.cols() != m)
        throw DataError("distance matrix does not match atom count");

    Eigen::VectorXd hinge(m);
    for (Eigen::Index j = 0; j < m; ++j) hinge[j] = hinge_pair_loss(w, atoms.atom(j));

    // Transport variables k(i, j) flattened row-major; rows: one mass
    // constraint per source atom, then the budget row.
    LpProblem lp;
    lp.maximize = true;
    lp.objective.resize(m * m);
    for (Eigen::Index i = 0; i < m; ++i)
        lp.objective.segment(i * m, m) = hinge;
    lp.constraints = Eigen::MatrixXd::Zero(m + 1, m * m);
    lp.rhs.resize(m + 1);
    for (Eigen::Index i = 0; i < m; ++i) {
        lp.constraints.row(i).segment(i * m, m).setOnes();
        lp.constraints.row(m).segment(i * m, m) = dist.entries.row(i);
        lp.rhs[i] = 1.0 / static_cast<double>(m);
    }
    lp.rhs[m] = epsilon;
    lp.senses.assign(static_cast<std::size_t>(m), RowSense::equal);
    lp.senses.push_back(RowSense::less_equal);

    const LpSolution sol = solve_lp(lp);
    if (sol.status != LpStatus::optimal)
        throw SolverError("worst-case transport solve failed (status " +
                          std::to_string(static_cast<int>(sol.status)) + ")");

    TransportPlan plan;
    plan.k.resize(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
        plan.k.row(i) = sol.primal.segment(i * m, m).transpose();
    plan.p = plan.k.colwise().sum().transpose();
    return {std::move(plan), sol.objective};
}

namespace {

std::vector<double> to_vector(const Eigen::VectorXd& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

Eigen::VectorXd to_eigen(const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

} // namespace

nlohmann::json model_to_json(const LinearModel& model) {
    nlohmann::json meta{
        {"iterations", model.training_meta.iterations},
        {"final_objective", model.training_meta.final_objective},
        {"relative_tolerance", model.training_meta.relative_tolerance},
        {"max_iterations", model.training_meta.max_iterations},
        {"initial_step", model.training_meta.initial_step},
        {"patience", model.training_meta.patience},
        {"stopped_early", model.training_meta.stopped_early},
    };
    if (model.training_meta.lambda) meta["lambda"] = *model.training_meta.lambda;
    if (model.training_meta.certificate_value)
        meta["certificate_value"] = *model.training_meta.certificate_value;

    nlohmann::json j{
        {"schema_version", 1},
        {"kind", to_string(model.kind)},
        {"weights", to_vector(model.weights)},
        {"intercept", model.intercept},
        {"hyper", {{"c", model.hyper.c}, {"epsilon", model.hyper.epsilon}}},
        {"training_meta", meta},
    };
    if (model.standardizer) {
        j["standardizer"] = {{"shift", to_vector(model.standardizer->shift)},
                             {"scale", to_vector(model.standardizer->scale)}};
    } else {
        j["standardizer"] = nullptr;
    }
    return j;
}

LinearModel model_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw DataError("model document must be a JSON object");
    if (!j.contains("schema_version") || j.at("schema_version").get<int>() != 1)
        throw DataError("unsupported model schema version");
    LinearModel model;
    model.kind = model_kind_from_string(j.at("kind").get<std::string>());
    model.weights = to_eigen(j.at("weights").get<std::vector<double>>());
    model.intercept = j.at("intercept").get<double>();
    model.hyper.c = j.at("hyper").at("c").get<double>();
    model.hyper.epsilon = j.at("hyper").at("epsilon").get<double>();
    const auto& meta = j.at("training_meta");
    model.training_meta.iterations = meta.at("iterations").get<int>();
    model.training_meta.final_objective = meta.at("final_objective").get<double>();
    model.training_meta.relative_tolerance = meta.at("relative_tolerance").get<double>();
    model.training_meta.max_iterations = meta.at("max_iterations").get<int>();
    model.training_meta.initial_step = meta.at("initial_step").get<double>();
    model.training_meta.patience = meta.at("patience").get<int>();
    model.training_meta.stopped_early = meta.at("stopped_early").get<bool>();
    if (meta.contains("lambda")) model.training_meta.lambda = meta.at("lambda").get<double>();
    if (meta.contains("certificate_value"))
        model.training_meta.certificate_value = meta.at("certificate_value").get<double>();
    if (j.contains("standardizer") && !j.at("standardizer").is_null()) {
        Scaler s;
        s.shift = to_eigen(j.at("standardizer").at("shift").get<std::vector<double>>());
        s.scale = to_eigen(j.at("standardizer").at("scale").get<std::vector<double>>());
        if (s.shift.size() != model.weights.size() || s.scale.size() != model.weights.size())
            throw DataError("standardizer dimension does not match weights");
        model.standardizer = std::move(s);
    }
    if (!model.weights.allFinite()) throw DataError("model weights must be finite");
    return model;
}

void save_model(const LinearModel& model, const std::string& path) {
    write_file_atomic(path, model_to_json(model).dump(2) + "\n");
}

LinearModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open model file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("cannot parse model file " + path + ": " + e.what());
    }
    return model_from_json(j);
}

} // namespace drauc
