#pragma once

#include <Eigen/Dense>
#include <limits>
#include <vector>

namespace drauc {

enum class RowSense { less_equal, equal };

enum class LpStatus { optimal, infeasible, unbounded, numerical_failure };

/// Dense linear program
///     max (or min) objective . x
///     s.t. constraints * x  {<=, =}  rhs,   x >= lower_bounds
/// Lower bounds default to zero when the vector is empty; an entry of
/// -infinity makes that variable free.
struct LpProblem {
    Eigen::VectorXd objective;
    Eigen::MatrixXd constraints;
    Eigen::VectorXd rhs;
    std::vector<RowSense> senses;
    Eigen::VectorXd lower_bounds;
    bool maximize = true;
};

/// On status optimal, `dual` satisfies objective = rhs . dual +
/// reduced_costs . lower_bounds (so with zero lower bounds the dual
/// objective equals the primal one), and the three residual fields report
/// worst-case KKT violations measured on the problem as given.
struct LpSolution {
    LpStatus status = LpStatus::numerical_failure;
    Eigen::VectorXd primal;
    Eigen::VectorXd dual;
    double objective = std::numeric_limits<double>::quiet_NaN();
    double primal_residual = std::numeric_limits<double>::quiet_NaN();
    double dual_residual = std::numeric_limits<double>::quiet_NaN();
    double complementarity = std::numeric_limits<double>::quiet_NaN();
};

/// Two-phase dense simplex. Pivoting uses the largest-improvement rule
/// and falls back to Bland's rule after a streak of degenerate pivots, so
/// it cannot cycle; iteration counts are additionally capped, with the
/// cap reported as numerical_failure rather than a wrong answer.
LpSolution solve_lp(const LpProblem& problem);

} // namespace drauc
