#pragma once

#include <Eigen/Dense>
#include <functional>

namespace drauc {

enum class StepRule { inverse_sqrt };

struct SubgradientConfig {
    int max_iterations = 20000;
    double initial_step = 0.5;
    StepRule step_rule = StepRule::inverse_sqrt;
    double relative_tolerance = 1e-6;
    /// Iterations without a best-value improvement of at least
    /// relative_tolerance * (1 + |best|) before stopping early.
    int patience = 200;

    void validate() const;
};

/// Evaluates the objective at x and writes a subgradient into the second
/// argument (resized by the callee).
using ObjectiveFn = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>;

/// In-place projection onto the feasible set; must be idempotent.
using ProjectionFn = std::function<void(Eigen::VectorXd&)>;

struct SubgradientResult {
    Eigen::VectorXd x;      // best iterate encountered
    double value = 0.0;     // objective at that iterate
    int iterations = 0;     // iterations performed
    bool stopped_early = false;
};

/// Projected subgradient descent x <- P(x - eta_k g), eta_k =
/// initial_step / sqrt(k), tracking the best iterate. Deterministic given
/// its inputs. Throws SolverError if the callable produces a non-finite
/// value or subgradient.
SubgradientResult minimize_subgradient(const ObjectiveFn& objective,
                                       const Eigen::VectorXd& x0,
                                       const ProjectionFn& projection,
                                       const SubgradientConfig& config);

} // namespace drauc
