#include "drauc/subgradient.hpp"

#include <cmath>

#include "drauc/errors.hpp"

namespace drauc {

void SubgradientConfig::validate() const {
    if (max_iterations < 1) throw ConfigError("max_iterations must be positive");
    if (!(initial_step > 0)) throw ConfigError("initial_step must be positive");
    if (!(relative_tolerance > 0)) throw ConfigError("relative_tolerance must be positive");
    if (patience < 1) throw ConfigError("patience must be positive");
}

SubgradientResult minimize_subgradient(const ObjectiveFn& objective,
                                       const Eigen::VectorXd& x0,
                                       const ProjectionFn& projection,
                                       const SubgradientConfig& config) {
    config.validate();

    Eigen::VectorXd x = x0;
    if (projection) projection(x);

    Eigen::VectorXd subgrad(x.size());
    SubgradientResult best;
    best.x = x;
    best.value = std::numeric_limits<double>::infinity();

    int stall = 0;
    for (int k = 1; k <= config.max_iterations; ++k) {
        const double value = objective(x, subgrad);
        if (!std::isfinite(value) || !subgrad.allFinite())
            throw SolverError("objective returned a non-finite value or subgradient");

        if (value < best.value - config.relative_tolerance * (1.0 + std::abs(best.value))) {
            best.value = value;
            best.x = x;
            stall = 0;
        } else {
            if (value < best.value) {  // keep small gains, they just don't reset patience
                best.value = value;
                best.x = x;
            }
            if (++stall >= config.patience) {
                best.iterations = k;
                best.stopped_early = true;
                return best;
            }
        }

        const double step = config.initial_step / std::sqrt(static_cast<double>(k));
        x.noalias() -= step * subgrad;
        if (projection) projection(x);
        best.iterations = k;
    }
    return best;
}

} // namespace drauc
