#include "drauc/qp.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>

#include "drauc/errors.hpp"
#include "drauc/lp.hpp"

namespace drauc {

namespace {

constexpr double kConvergenceTol = 1e-9;
constexpr int kMaxIterations = 120;
constexpr double kStepFraction = 0.995;

double max_step(const Eigen::VectorXd& v, const Eigen::VectorXd& dv) {
    double alpha = 1.0;
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (dv[i] < 0) alpha = std::min(alpha, -v[i] / dv[i]);
    return alpha;
}

bool is_feasible_by_lp(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
    LpProblem feas;
    const Eigen::Index n = A.cols();
    feas.objective = Eigen::VectorXd::Zero(n);
    feas.constraints = A;
    feas.rhs = b;
    feas.senses.assign(static_cast<std::size_t>(A.rows()), RowSense::less_equal);
    feas.lower_bounds =
        Eigen::VectorXd::Constant(n, -std::numeric_limits<double>::infinity());
    feas.maximize = true;
    return solve_lp(feas).status != LpStatus::infeasible;
}

} // namespace

QpSolution solve_qp(const Eigen::MatrixXd& Q,
                    const Eigen::VectorXd& c,
                    const Eigen::MatrixXd& A,
                    const Eigen::VectorXd& b) {
    const Eigen::Index n = c.size();
    const Eigen::Index m = A.rows();
    if (Q.rows() != n || Q.cols() != n)
        throw DataError("QP matrix dimension does not match the objective vector");
    if (m > 0 && (A.cols() != n || b.size() != m))
        throw DataError("QP constraint dimensions are inconsistent");

    QpSolution out;
    const double q_scale = std::max(1.0, Q.lpNorm<Eigen::Infinity>());
    if ((Q - Q.transpose()).lpNorm<Eigen::Infinity>() > 1e-8 * q_scale) {
        out.status = QpStatus::not_positive_semidefinite;
        return out;
    }
    {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Q, Eigen::EigenvaluesOnly);
        if (eig.eigenvalues().minCoeff() < -1e-9 * q_scale) {
            out.status = QpStatus::not_positive_semidefinite;
            return out;
        }
    }

    const auto finish = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& z) {
        out.x = x;
        out.duals = z;
        out.value = 0.5 * x.dot(Q * x) + c.dot(x);
        Eigen::VectorXd grad = Q * x + c;
        if (m > 0) grad += A.transpose() * z;
        out.stationarity_residual = grad.lpNorm<Eigen::Infinity>();
        if (m > 0) {
            const Eigen::VectorXd slack = b - A * x;
            out.feasibility_residual = std::max(0.0, -slack.minCoeff());
            out.complementarity_residual = z.cwiseProduct(slack).lpNorm<Eigen::Infinity>();
        } else {
            out.feasibility_residual = 0.0;
            out.complementarity_residual = 0.0;
        }
        out.status = QpStatus::optimal;
    };

    if (m == 0) {
        Eigen::LDLT<Eigen::MatrixXd> ldlt(Q + 1e-13 * q_scale *
                                                  Eigen::MatrixXd::Identity(n, n));
        const Eigen::VectorXd x = ldlt.solve(-c);
        if (!x.allFinite() || (Q * x + c).lpNorm<Eigen::Infinity>() > 1e-6 * (1.0 + c.lpNorm<Eigen::Infinity>())) {
            out.status = QpStatus::numerical_failure;
            return out;
        }
        finish(x, Eigen::VectorXd());
        return out;
    }

    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd s = (b.array().max(1.0)).matrix();
    Eigen::VectorXd z = Eigen::VectorXd::Ones(m);

    const double b_scale = 1.0 + b.lpNorm<Eigen::Infinity>();
    const double c_scale = 1.0 + c.lpNorm<Eigen::Infinity>();

    // Rounding can floor the dual residual just above the target
    // tolerance, so the best iterate is kept and accepted afterwards as
    // long as it meets the 1e-6 residual contract.
    double best_merit = std::numeric_limits<double>::infinity();
    Eigen::VectorXd best_x = x, best_z = z;

    for (int iter = 0; iter < kMaxIterations; ++iter) {
        const Eigen::VectorXd r_d = Q * x + c + A.transpose() * z;
        const Eigen::VectorXd r_p = A * x + s - b;
        const double mu = s.dot(z) / static_cast<double>(m);

        const double objective_scale = 1.0 + std::abs(0.5 * x.dot(Q * x) + c.dot(x));
        const double merit =
            std::max({r_p.lpNorm<Eigen::Infinity>() / b_scale,
                      r_d.lpNorm<Eigen::Infinity>() / (c_scale + q_scale),
                      mu / objective_scale});
        if (merit < best_merit) {
            best_merit = merit;
            best_x = x;
            best_z = z;
        }
        if (merit <= kConvergenceTol) {
            finish(x, z);
            return out;
        }

        const Eigen::VectorXd w = z.cwiseQuotient(s);  // diag weights z/s
        Eigen::MatrixXd kkt = Q + A.transpose() * w.asDiagonal() * A;
        kkt.diagonal().array() += 1e-12 * (1.0 + kkt.lpNorm<Eigen::Infinity>());
        Eigen::LDLT<Eigen::MatrixXd> ldlt(kkt);
        if (ldlt.info() != Eigen::Success) break;

        // rhs_c is the centering target of the complementarity equation:
        // Z ds + S dz = rhs_c.
        const auto solve_direction = [&](const Eigen::VectorXd& rhs_c, Eigen::VectorXd& dx,
                                         Eigen::VectorXd& ds, Eigen::VectorXd& dz) {
            const Eigen::VectorXd tail = rhs_c.cwiseQuotient(s) + w.cwiseProduct(r_p);
            dx = ldlt.solve(-r_d - A.transpose() * tail);
            ds = -r_p - A * dx;
            dz = rhs_c.cwiseQuotient(s) - w.cwiseProduct(ds);
        };

        Eigen::VectorXd dx_aff, ds_aff, dz_aff;
        solve_direction(-s.cwiseProduct(z), dx_aff, ds_aff, dz_aff);
        if (!dx_aff.allFinite() || !ds_aff.allFinite() || !dz_aff.allFinite()) break;

        const double alpha_aff =
            std::min(max_step(s, ds_aff), max_step(z, dz_aff));
        const double mu_aff =
            (s + alpha_aff * ds_aff).dot(z + alpha_aff * dz_aff) / static_cast<double>(m);
        const double sigma = std::pow(mu_aff / mu, 3);

        const Eigen::VectorXd rhs_c = -s.cwiseProduct(z) -
                                      ds_aff.cwiseProduct(dz_aff) +
                                      Eigen::VectorXd::Constant(m, sigma * mu);
        Eigen::VectorXd dx, ds, dz;
        solve_direction(rhs_c, dx, ds, dz);
        if (!dx.allFinite() || !ds.allFinite() || !dz.allFinite()) break;

        const double alpha_p = std::min(1.0, kStepFraction * max_step(s, ds));
        const double alpha_d = std::min(1.0, kStepFraction * max_step(z, dz));
        x += alpha_p * dx;
        s += alpha_p * ds;
        z += alpha_d * dz;

        if (x.lpNorm<Eigen::Infinity>() > 1e12 || z.lpNorm<Eigen::Infinity>() > 1e12) break;
    }

    if (best_merit <= 1e-6) {
        finish(best_x, best_z);
        return out;
    }
    // No convergence: decide between infeasibility and numerical failure
    // with the exact simplex feasibility test.
    out.status = is_feasible_by_lp(A, b) ? QpStatus::numerical_failure
                                         : QpStatus::infeasible;
    return out;
}

} // namespace drauc
