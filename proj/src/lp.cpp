#include "drauc/lp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "drauc/errors.hpp"

namespace drauc {

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kOptTol = 1e-9;
constexpr double kFeasTol = 1e-7;

struct Tableau {
    Eigen::MatrixXd body;        // m rows of B^{-1}[A | I], last column is rhs
    Eigen::RowVectorXd zrow;     // z_j - c_j for the active objective
    std::vector<Eigen::Index> basis;
    Eigen::Index cols = 0;       // structural + slack + artificial columns
};

void pivot(Tableau& t, Eigen::Index row, Eigen::Index col) {
    t.body.row(row) /= t.body(row, col);
    for (Eigen::Index r = 0; r < t.body.rows(); ++r) {
        if (r == row) continue;
        const double f = t.body(r, col);
        if (f != 0.0) t.body.row(r) -= f * t.body.row(row);
    }
    const double fz = t.zrow[col];
    if (fz != 0.0)
        t.zrow -= fz * t.body.row(row).head(t.zrow.size());
    t.basis[static_cast<std::size_t>(row)] = col;
}

void rebuild_zrow(Tableau& t, const Eigen::VectorXd& costs) {
    t.zrow = -costs.transpose();
    for (Eigen::Index r = 0; r < t.body.rows(); ++r) {
        const double cb = costs[t.basis[static_cast<std::size_t>(r)]];
        if (cb != 0.0) t.zrow += cb * t.body.row(r).head(t.cols);
    }
}

enum class IterationOutcome { optimal, unbounded, iteration_limit };

/// Maximization steps on the tableau until no column prices favourably.
IterationOutcome run_simplex(Tableau& t, const std::vector<bool>& allowed, long max_pivots) {
    const Eigen::Index m = t.body.rows();
    long degenerate_streak = 0;
    const long bland_threshold = 4 * (m + t.cols);
    for (long it = 0; it < max_pivots; ++it) {
        const bool bland = degenerate_streak > bland_threshold;
        Eigen::Index enter = -1;
        double best = -kOptTol;
        for (Eigen::Index j = 0; j < t.cols; ++j) {
            if (!allowed[static_cast<std::size_t>(j)]) continue;
            const double rc = t.zrow[j];
            if (rc < -kOptTol) {
                if (bland) { enter = j; break; }
                if (rc < best) { best = rc; enter = j; }
            }
        }
        if (enter < 0) return IterationOutcome::optimal;

        Eigen::Index leave = -1;
        double best_ratio = 0.0;
        for (Eigen::Index r = 0; r < m; ++r) {
            const double a = t.body(r, enter);
            if (a > kPivotTol) {
                const double ratio = t.body(r, t.cols) / a;
                if (leave < 0 || ratio < best_ratio - 1e-12 ||
                    (ratio < best_ratio + 1e-12 &&
                     t.basis[static_cast<std::size_t>(r)] <
                         t.basis[static_cast<std::size_t>(leave)])) {
                    leave = r;
                    best_ratio = ratio;
                }
            }
        }
        if (leave < 0) return IterationOutcome::unbounded;
        degenerate_streak = best_ratio <= 1e-12 ? degenerate_streak + 1 : 0;
        pivot(t, leave, enter);
    }
    return IterationOutcome::iteration_limit;
}

} // namespace

LpSolution solve_lp(const LpProblem& problem) {
    const Eigen::Index n = problem.objective.size();
    const Eigen::Index m = problem.constraints.rows();
    if (problem.constraints.cols() != n && m > 0)
        throw DataError("LP constraint matrix has " + std::to_string(problem.constraints.cols()) +
                        " columns, expected " + std::to_string(n));
    if (problem.rhs.size() != m || static_cast<Eigen::Index>(problem.senses.size()) != m)
        throw DataError("LP rhs/sense size does not match row count");
    if (n < 1) throw DataError("LP needs at least one variable");
    Eigen::VectorXd lb = problem.lower_bounds;
    if (lb.size() == 0) lb = Eigen::VectorXd::Zero(n);
    if (lb.size() != n) throw DataError("LP lower-bound size does not match variable count");
    if (!problem.objective.allFinite() || (m > 0 && !problem.constraints.allFinite()) ||
        (m > 0 && !problem.rhs.allFinite()))
        throw DataError("LP data must be finite");

    const Eigen::VectorXd c_max = problem.maximize ? problem.objective : -problem.objective;
    const double inf = std::numeric_limits<double>::infinity();

    // Variables are mapped to a nonnegative internal space: finite lower
    // bounds shift, free variables split into a difference of two columns.
    std::vector<Eigen::Index> first_col(static_cast<std::size_t>(n));
    std::vector<bool> is_free(static_cast<std::size_t>(n));
    Eigen::Index n_internal = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
        first_col[static_cast<std::size_t>(j)] = n_internal;
        is_free[static_cast<std::size_t>(j)] = lb[j] == -inf;
        n_internal += is_free[static_cast<std::size_t>(j)] ? 2 : 1;
    }

    Eigen::VectorXd shift = Eigen::VectorXd::Zero(n);
    for (Eigen::Index j = 0; j < n; ++j)
        if (!is_free[static_cast<std::size_t>(j)]) shift[j] = lb[j];

    Eigen::MatrixXd a_int(m, n_internal);
    Eigen::VectorXd c_int = Eigen::VectorXd::Zero(n_internal);
    for (Eigen::Index j = 0; j < n; ++j) {
        const Eigen::Index col = first_col[static_cast<std::size_t>(j)];
        if (m > 0) a_int.col(col) = problem.constraints.col(j);
        c_int[col] = c_max[j];
        if (is_free[static_cast<std::size_t>(j)]) {
            if (m > 0) a_int.col(col + 1) = -problem.constraints.col(j);
            c_int[col + 1] = -c_max[j];
        }
    }
    Eigen::VectorXd b_int = problem.rhs;
    if (m > 0) b_int -= problem.constraints * shift;
    const double objective_shift = c_max.dot(shift);

    // Row normal form: nonnegative rhs, slack for <=, surplus+artificial
    // for >=, artificial for =.
    std::vector<double> row_sign(static_cast<std::size_t>(m), 1.0);
    Eigen::Index n_slack = 0;
    Eigen::Index n_art = 0;
    for (Eigen::Index i = 0; i < m; ++i) {
        if (b_int[i] < 0) {
            row_sign[static_cast<std::size_t>(i)] = -1.0;
            b_int[i] = -b_int[i];
            a_int.row(i) = -a_int.row(i);
        }
        const bool flipped = row_sign[static_cast<std::size_t>(i)] < 0;
        if (problem.senses[static_cast<std::size_t>(i)] == RowSense::less_equal) {
            ++n_slack;               // slack if kept <=, surplus if flipped to >=
            if (flipped) ++n_art;
        } else {
            ++n_art;
        }
    }

    Tableau t;
    t.cols = n_internal + n_slack + n_art;
    t.body = Eigen::MatrixXd::Zero(m, t.cols + 1);
    t.body.leftCols(n_internal) = a_int;
    t.body.col(t.cols) = b_int;
    t.basis.assign(static_cast<std::size_t>(m), -1);

    std::vector<Eigen::Index> row_id_col(static_cast<std::size_t>(m), -1);
    std::vector<bool> is_artificial(static_cast<std::size_t>(t.cols), false);
    Eigen::Index next_slack = n_internal;
    Eigen::Index next_art = n_internal + n_slack;
    for (Eigen::Index i = 0; i < m; ++i) {
        const bool flipped = row_sign[static_cast<std::size_t>(i)] < 0;
        const bool is_le = problem.senses[static_cast<std::size_t>(i)] == RowSense::less_equal;
        if (is_le && !flipped) {
            t.body(i, next_slack) = 1.0;
            t.basis[static_cast<std::size_t>(i)] = next_slack;
            row_id_col[static_cast<std::size_t>(i)] = next_slack;
            ++next_slack;
        } else {
            if (is_le) t.body(i, next_slack++) = -1.0;  // surplus of the flipped row
            t.body(i, next_art) = 1.0;
            t.basis[static_cast<std::size_t>(i)] = next_art;
            row_id_col[static_cast<std::size_t>(i)] = next_art;
            is_artificial[static_cast<std::size_t>(next_art)] = true;
            ++next_art;
        }
    }

    LpSolution out;
    const long max_pivots = 10000 + 50L * m + t.cols;

    // Phase 1: maximize minus the sum of artificials.
    if (n_art > 0) {
        Eigen::VectorXd phase1_costs = Eigen::VectorXd::Zero(t.cols);
        for (Eigen::Index j = 0; j < t.cols; ++j)
            if (is_artificial[static_cast<std::size_t>(j)]) phase1_costs[j] = -1.0;
        rebuild_zrow(t, phase1_costs);
        std::vector<bool> all_allowed(static_cast<std::size_t>(t.cols), true);
        const auto outcome = run_simplex(t, all_allowed, max_pivots);
        if (outcome == IterationOutcome::iteration_limit) return out;
        double infeasibility = 0.0;
        for (Eigen::Index r = 0; r < m; ++r)
            if (is_artificial[static_cast<std::size_t>(t.basis[static_cast<std::size_t>(r)])])
                infeasibility += t.body(r, t.cols);
        if (infeasibility > kFeasTol * (1.0 + b_int.lpNorm<Eigen::Infinity>())) {
            out.status = LpStatus::infeasible;
            return out;
        }
        // Pivot leftover zero-value artificials out of the basis where a
        // structural entry exists; rows that offer none are redundant and
        // are left as harmless zero rows with the artificial locked basic.
        for (Eigen::Index r = 0; r < m; ++r) {
            if (!is_artificial[static_cast<std::size_t>(t.basis[static_cast<std::size_t>(r)])])
                continue;
            for (Eigen::Index j = 0; j < n_internal + n_slack; ++j) {
                if (std::abs(t.body(r, j)) > kPivotTol) {
                    pivot(t, r, j);
                    break;
                }
            }
        }
    }

    // Phase 2: the real objective; artificial columns may not re-enter.
    Eigen::VectorXd phase2_costs = Eigen::VectorXd::Zero(t.cols);
    phase2_costs.head(n_internal) = c_int;
    rebuild_zrow(t, phase2_costs);
    std::vector<bool> allowed(static_cast<std::size_t>(t.cols), true);
    for (Eigen::Index j = 0; j < t.cols; ++j)
        if (is_artificial[static_cast<std::size_t>(j)]) allowed[static_cast<std::size_t>(j)] = false;
    const auto outcome = run_simplex(t, allowed, max_pivots);
    if (outcome == IterationOutcome::iteration_limit) return out;
    if (outcome == IterationOutcome::unbounded) {
        out.status = LpStatus::unbounded;
        return out;
    }

    Eigen::VectorXd x_int = Eigen::VectorXd::Zero(t.cols);
    for (Eigen::Index r = 0; r < m; ++r)
        x_int[t.basis[static_cast<std::size_t>(r)]] = t.body(r, t.cols);

    out.primal.resize(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const Eigen::Index col = first_col[static_cast<std::size_t>(j)];
        out.primal[j] = is_free[static_cast<std::size_t>(j)]
                            ? x_int[col] - x_int[col + 1]
                            : x_int[col] + shift[j];
    }

    const double value_max = c_int.dot(x_int.head(n_internal)) + objective_shift;
    out.objective = problem.maximize ? value_max : -value_max;

    // Duals read off the z-row at each row's original identity column.
    Eigen::VectorXd y_max(m);
    for (Eigen::Index i = 0; i < m; ++i)
        y_max[i] = row_sign[static_cast<std::size_t>(i)] *
                   t.zrow[row_id_col[static_cast<std::size_t>(i)]];
    out.dual = problem.maximize ? y_max : Eigen::VectorXd(-y_max);

    // KKT residuals for the maximization orientation of the given data.
    double primal_res = 0.0;
    double dual_res = 0.0;
    double comp = 0.0;
    Eigen::VectorXd rc = c_max;
    if (m > 0) {
        const Eigen::VectorXd ax = problem.constraints * out.primal;
        for (Eigen::Index i = 0; i < m; ++i) {
            const double gap = ax[i] - problem.rhs[i];
            if (problem.senses[static_cast<std::size_t>(i)] == RowSense::equal) {
                primal_res = std::max(primal_res, std::abs(gap));
            } else {
                primal_res = std::max(primal_res, gap);
                dual_res = std::max(dual_res, -y_max[i]);
                comp = std::max(comp, std::abs(y_max[i] * gap));
            }
        }
        rc -= problem.constraints.transpose() * y_max;
    }
    for (Eigen::Index j = 0; j < n; ++j) {
        if (is_free[static_cast<std::size_t>(j)]) {
            dual_res = std::max(dual_res, std::abs(rc[j]));
        } else {
            primal_res = std::max(primal_res, lb[j] - out.primal[j]);
            dual_res = std::max(dual_res, rc[j]);
            comp = std::max(comp, std::abs(rc[j] * (out.primal[j] - lb[j])));
        }
    }
    out.primal_residual = std::max(primal_res, 0.0);
    out.dual_residual = std::max(dual_res, 0.0);
    out.complementarity = comp;
    out.status = LpStatus::optimal;
    return out;
}

} // namespace drauc
