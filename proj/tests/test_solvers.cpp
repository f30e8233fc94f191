#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "drauc/errors.hpp"
#include "drauc/lp.hpp"
#include "drauc/pairing.hpp"
#include "drauc/qp.hpp"
#include "drauc/subgradient.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using drauc::LpProblem;
using drauc::LpSolution;
using drauc::LpStatus;
using drauc::QpStatus;
using drauc::RowSense;
using drauc::SubgradientConfig;

TEST_CASE("minimize_subgradient on |x|") {
    const drauc::ObjectiveFn f = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
        g.resize(1);
        g[0] = x[0] > 0 ? 1.0 : (x[0] < 0 ? -1.0 : 0.0);
        return std::abs(x[0]);
    };
    Eigen::VectorXd x0(1);
    x0[0] = 5.0;
    SubgradientConfig config;
    config.max_iterations = 50000;
    const auto result = drauc::minimize_subgradient(f, x0, nullptr, config);
    CHECK(std::abs(result.x[0]) < 1e-3);
}

TEST_CASE("minimize_subgradient on a quadratic") {
    const drauc::ObjectiveFn f = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
        g = x;
        return 0.5 * x.squaredNorm();
    };
    std::mt19937_64 gen(3);
    const Eigen::VectorXd x0 = testutil::random_vector(gen, 4, 2.0);
    SubgradientConfig config;
    config.max_iterations = 60000;
    const auto result = drauc::minimize_subgradient(f, x0, nullptr, config);
    CHECK(result.x.lpNorm<Eigen::Infinity>() < 1e-4);
    CHECK(result.value < 1e-8);
}

TEST_CASE("minimize_subgradient on the one-pair composite") {
    // f(w) = w^2/2 + max(0, 1 - w); minimum at w = 1 with value 1/2.
    const drauc::ObjectiveFn f = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
        const double w = x[0];
        g.resize(1);
        g[0] = w + (1.0 - w > 0 ? -1.0 : 0.0);
        return 0.5 * w * w + std::max(0.0, 1.0 - w);
    };
    SubgradientConfig config;
    config.max_iterations = 50000;
    const auto result =
        drauc::minimize_subgradient(f, Eigen::VectorXd::Zero(1), nullptr, config);
    CHECK(result.x[0] == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(result.value == doctest::Approx(0.5).epsilon(1e-4));
}

TEST_CASE("minimize_subgradient respects projections") {
    const drauc::ObjectiveFn f = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
        g = x - Eigen::VectorXd::Constant(1, -3.0);
        return 0.5 * (x[0] + 3.0) * (x[0] + 3.0);
    };
    const drauc::ProjectionFn clamp = [](Eigen::VectorXd& x) {
        if (x[0] < 0) x[0] = 0;
    };
    const auto result =
        drauc::minimize_subgradient(f, Eigen::VectorXd::Ones(1), clamp, SubgradientConfig{});
    CHECK(result.x[0] == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("minimize_subgradient rejects non-finite objectives") {
    const drauc::ObjectiveFn f = [](const Eigen::VectorXd&, Eigen::VectorXd& g) {
        g.resize(1);
        g[0] = 0.0;
        return std::numeric_limits<double>::quiet_NaN();
    };
    CHECK_THROWS_AS(
        drauc::minimize_subgradient(f, Eigen::VectorXd::Zero(1), nullptr, SubgradientConfig{}),
        drauc::SolverError);
}

TEST_CASE("best value sequence is non-increasing") {
    std::mt19937_64 gen(11);
    const Eigen::VectorXd target = testutil::random_vector(gen, 3);
    std::vector<double> values;
    const drauc::ObjectiveFn f = [&](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
        g.resize(3);
        for (Eigen::Index i = 0; i < 3; ++i) g[i] = x[i] - target[i] > 0 ? 1.0 : -1.0;
        const double v = (x - target).lpNorm<1>();
        values.push_back(v);
        return v;
    };
    SubgradientConfig config;
    config.max_iterations = 500;
    drauc::minimize_subgradient(f, Eigen::VectorXd::Zero(3), nullptr, config);
    double best = std::numeric_limits<double>::infinity();
    std::vector<double> bests;
    for (double v : values) {
        best = std::min(best, v);
        bests.push_back(best);
    }
    CHECK(std::is_sorted(bests.rbegin(), bests.rend()));
}

TEST_CASE("subgradients agree with finite differences away from kinks") {
    // max-affine plus quadratic: kinks where two affine pieces tie.
    std::mt19937_64 gen(21);
    const int pieces = 6, dim = 3;
    std::vector<Eigen::VectorXd> slopes;
    std::vector<double> offsets;
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int p = 0; p < pieces; ++p) {
        slopes.push_back(testutil::random_vector(gen, dim));
        offsets.push_back(normal(gen));
    }
    const drauc::ObjectiveFn f = [&](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
        int arg = 0;
        double best = slopes[0].dot(x) + offsets[0];
        for (int p = 1; p < pieces; ++p) {
            const double v = slopes[static_cast<std::size_t>(p)].dot(x) +
                             offsets[static_cast<std::size_t>(p)];
            if (v > best) { best = v; arg = p; }
        }
        g = slopes[static_cast<std::size_t>(arg)] + x;
        return best + 0.5 * x.squaredNorm();
    };

    const double h = 1e-6;
    int checked = 0;
    for (int trial = 0; trial < 200 && checked < 20; ++trial) {
        const Eigen::VectorXd x = testutil::random_vector(gen, dim, 2.0);
        Eigen::VectorXd u = testutil::random_vector(gen, dim);
        u.normalize();
        Eigen::VectorXd g, dummy;
        const double fx = f(x, g);
        const double fp = f(x + h * u, dummy);
        const double fm = f(x - h * u, dummy);
        // Reject kink-adjacent points: one-sided slopes must agree.
        if (std::abs((fp - fx) - (fx - fm)) > 1e-9 * (1 + std::abs(fx))) continue;
        ++checked;
        const double directional = (fp - fm) / (2 * h);
        CHECK(std::abs(directional - g.dot(u)) <= 1e-4 * (1 + std::abs(fx)));
    }
    CHECK(checked == 20);
}

TEST_CASE("solve_lp basics") {
    SUBCASE("max x subject to x <= 1") {
        LpProblem lp;
        lp.objective = Eigen::VectorXd::Ones(1);
        lp.constraints = Eigen::MatrixXd::Ones(1, 1);
        lp.rhs = Eigen::VectorXd::Ones(1);
        lp.senses = {RowSense::less_equal};
        lp.maximize = true;
        const LpSolution sol = drauc::solve_lp(lp);
        REQUIRE(sol.status == LpStatus::optimal);
        CHECK(sol.primal[0] == doctest::Approx(1.0));
        CHECK(sol.objective == doctest::Approx(1.0));
        CHECK(sol.primal_residual <= 1e-8);
        CHECK(sol.dual_residual <= 1e-8);
        CHECK(sol.complementarity <= 1e-8);
    }
    SUBCASE("unbounded") {
        LpProblem lp;
        lp.objective = Eigen::VectorXd::Ones(1);
        lp.constraints = Eigen::MatrixXd(0, 1);
        lp.rhs = Eigen::VectorXd(0);
        lp.maximize = true;
        CHECK(drauc::solve_lp(lp).status == LpStatus::unbounded);
    }
    SUBCASE("infeasible") {
        LpProblem lp;
        lp.objective = Eigen::VectorXd::Ones(1);
        lp.constraints = Eigen::MatrixXd::Ones(1, 1);
        lp.rhs = -Eigen::VectorXd::Ones(1);  // x <= -1 with x >= 0
        lp.senses = {RowSense::less_equal};
        lp.maximize = true;
        CHECK(drauc::solve_lp(lp).status == LpStatus::infeasible);
    }
    SUBCASE("equality rows and free variables") {
        // max x + y s.t. x + y = 3, x <= 1, y free.
        LpProblem lp;
        lp.objective = Eigen::VectorXd::Ones(2);
        lp.constraints = Eigen::MatrixXd::Zero(2, 2);
        lp.constraints.row(0) << 1, 1;
        lp.constraints.row(1) << 1, 0;
        lp.rhs = Eigen::VectorXd(2);
        lp.rhs << 3, 1;
        lp.senses = {RowSense::equal, RowSense::less_equal};
        lp.lower_bounds = Eigen::VectorXd(2);
        lp.lower_bounds << 0, -std::numeric_limits<double>::infinity();
        lp.maximize = true;
        const LpSolution sol = drauc::solve_lp(lp);
        REQUIRE(sol.status == LpStatus::optimal);
        CHECK(sol.objective == doctest::Approx(3.0));
        CHECK(sol.primal[0] + sol.primal[1] == doctest::Approx(3.0));
    }
    SUBCASE("minimization") {
        // min 2x + y s.t. x + y >= 2 (as -x - y <= -2), x, y >= 0.
        LpProblem lp;
        lp.objective = Eigen::VectorXd(2);
        lp.objective << 2, 1;
        lp.constraints = Eigen::MatrixXd(1, 2);
        lp.constraints << -1, -1;
        lp.rhs = -2 * Eigen::VectorXd::Ones(1);
        lp.senses = {RowSense::less_equal};
        lp.maximize = false;
        const LpSolution sol = drauc::solve_lp(lp);
        REQUIRE(sol.status == LpStatus::optimal);
        CHECK(sol.objective == doctest::Approx(2.0));
        CHECK(sol.primal[1] == doctest::Approx(2.0));
    }
}

TEST_CASE("solve_lp matches exhaustive vertex enumeration on transport instances") {
    std::mt19937_64 gen(42);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 12; ++trial) {
        const auto ds = testutil::gaussian_blobs(3, 1, 2, 1.0, 100 + trial);
        const auto atoms = drauc::build_atoms(ds);
        const auto dist = drauc::distance_matrix(atoms);
        Eigen::VectorXd hinge(3);
        for (int j = 0; j < 3; ++j) hinge[j] = unit(gen);
        const double epsilon = 2.0 * unit(gen) * dist.entries.maxCoeff();
        const LpProblem lp = oracles::transport_lp(hinge, dist, epsilon);
        const LpSolution sol = drauc::solve_lp(lp);
        REQUIRE(sol.status == LpStatus::optimal);
        const double brute = oracles::enumerate_vertices_max(lp);
        CHECK(sol.objective == doctest::Approx(brute).epsilon(1e-9));
    }
}

TEST_CASE("weak duality holds on random feasible maximization LPs") {
    std::mt19937_64 gen(9);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 2 + static_cast<int>(unit(gen) * 4);
        const int m = 1 + static_cast<int>(unit(gen) * 4);
        LpProblem lp;
        lp.objective = testutil::random_vector(gen, n);
        lp.constraints.resize(m, n);
        for (int i = 0; i < m; ++i)
            lp.constraints.row(i) = testutil::random_vector(gen, n).transpose().array() + 1.5;
        lp.rhs = Eigen::VectorXd::Constant(m, 5.0);  // x = 0 feasible, bounded above
        lp.senses.assign(static_cast<std::size_t>(m), RowSense::less_equal);
        lp.maximize = true;
        const LpSolution sol = drauc::solve_lp(lp);
        if (sol.status != LpStatus::optimal) continue;
        CHECK(sol.objective <= lp.rhs.dot(sol.dual) + 1e-8);
        CHECK(sol.primal_residual <= 1e-8);
        CHECK(sol.dual_residual <= 1e-8);
        CHECK(sol.complementarity <= 1e-8);
    }
}

TEST_CASE("solve_qp basics") {
    SUBCASE("unconstrained quadratic") {
        const auto sol = drauc::solve_qp(Eigen::MatrixXd::Identity(1, 1),
                                         -Eigen::VectorXd::Ones(1), Eigen::MatrixXd(0, 1),
                                         Eigen::VectorXd(0));
        REQUIRE(sol.status == QpStatus::optimal);
        CHECK(sol.x[0] == doctest::Approx(1.0));
        CHECK(sol.value == doctest::Approx(-0.5));
    }
    SUBCASE("active constraint") {
        // min x^2/2 s.t. x >= 2.
        Eigen::MatrixXd a(1, 1);
        a << -1;
        const auto sol = drauc::solve_qp(Eigen::MatrixXd::Identity(1, 1),
                                         Eigen::VectorXd::Zero(1), a,
                                         -2 * Eigen::VectorXd::Ones(1));
        REQUIRE(sol.status == QpStatus::optimal);
        CHECK(sol.x[0] == doctest::Approx(2.0));
        CHECK(sol.value == doctest::Approx(2.0));
        CHECK(sol.stationarity_residual <= 1e-6);
        CHECK(sol.feasibility_residual <= 1e-6);
        CHECK(sol.complementarity_residual <= 1e-6);
    }
    SUBCASE("infeasible") {
        Eigen::MatrixXd a(2, 1);
        a << 1, -1;  // x <= -1 and x >= 0
        Eigen::VectorXd b(2);
        b << -1, 0;
        const auto sol = drauc::solve_qp(Eigen::MatrixXd::Identity(1, 1),
                                         Eigen::VectorXd::Zero(1), a, b);
        CHECK(sol.status == QpStatus::infeasible);
    }
    SUBCASE("indefinite matrix rejected") {
        const auto sol = drauc::solve_qp(-Eigen::MatrixXd::Identity(1, 1),
                                         Eigen::VectorXd::Zero(1), Eigen::MatrixXd(0, 1),
                                         Eigen::VectorXd(0));
        CHECK(sol.status == QpStatus::not_positive_semidefinite);
    }
}

TEST_CASE("solve_qp agrees with the subgradient method on random instances") {
    std::mt19937_64 gen(33);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
        const int n = 5;
        const int m = 4;
        const Eigen::MatrixXd root =
            Eigen::MatrixXd::NullaryExpr(n, n, [&] { return unit(gen) - 0.5; });
        const Eigen::MatrixXd q =
            root * root.transpose() + Eigen::MatrixXd::Identity(n, n);
        const Eigen::VectorXd c = testutil::random_vector(gen, n);
        const Eigen::MatrixXd a =
            Eigen::MatrixXd::NullaryExpr(m, n, [&] { return unit(gen) - 0.5; });
        const Eigen::VectorXd b = Eigen::VectorXd::Constant(m, 1.0);  // x = 0 feasible

        const auto qp = drauc::solve_qp(q, c, a, b);
        REQUIRE(qp.status == QpStatus::optimal);

        // Penalized unconstrained reformulation for the subgradient path.
        // Any penalty above the largest dual multiplier is exact; staying
        // close to that bound keeps the subgradients small.
        const double penalty = 2.0 * qp.duals.lpNorm<Eigen::Infinity>() + 1.0;
        const drauc::ObjectiveFn f = [&](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
            g = q * x + c;
            double value = 0.5 * x.dot(q * x) + c.dot(x);
            const Eigen::VectorXd slack = a * x - b;
            for (int i = 0; i < m; ++i) {
                if (slack[i] > 0) {
                    value += penalty * slack[i];
                    g += penalty * a.row(i).transpose();
                }
            }
            return value;
        };
        SubgradientConfig config;
        config.max_iterations = 600000;
        config.initial_step = 0.1 / penalty;
        const Eigen::VectorXd start = q.ldlt().solve(-c);  // unconstrained optimum
        const auto sub = drauc::minimize_subgradient(f, start, nullptr, config);
        CHECK(sub.value == doctest::Approx(qp.value).epsilon(1e-3));
    }
}
