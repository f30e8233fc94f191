#pragma once

#include <Eigen/Dense>
#include <limits>

namespace drauc {

enum class QpStatus { optimal, infeasible, not_positive_semidefinite, numerical_failure };

/// Result of min 0.5 x'Qx + c'x  s.t.  Ax <= b (variables otherwise free).
/// `duals` are the nonnegative multipliers of the inequality rows; the
/// residual fields report worst-case KKT violations at the returned point.
struct QpSolution {
    QpStatus status = QpStatus::numerical_failure;
    Eigen::VectorXd x;
    double value = std::numeric_limits<double>::quiet_NaN();
    Eigen::VectorXd duals;
    double stationarity_residual = std::numeric_limits<double>::quiet_NaN();
    double feasibility_residual = std::numeric_limits<double>::quiet_NaN();
    double complementarity_residual = std::numeric_limits<double>::quiet_NaN();
};

/// Dense convex QP solver for reference use at test scale (hundreds of
/// variables). Q must be symmetric positive semidefinite (checked with an
/// eigenvalue tolerance). A primal-dual interior-point iteration with a
/// predictor-corrector step solves the KKT system; when it fails to
/// converge, an exact simplex feasibility check decides between the
/// infeasible and numerical_failure statuses.
QpSolution solve_qp(const Eigen::MatrixXd& Q,
                    const Eigen::VectorXd& c,
                    const Eigen::MatrixXd& A,
                    const Eigen::VectorXd& b);

} // namespace drauc
