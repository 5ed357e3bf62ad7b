#include <doctest.h>

#include "mdred/lbfgs.hpp"
#include "mdred/rng.hpp"
#include "test_support.hpp"

using namespace mdred;

TEST_CASE("lbfgs solves a strongly convex quadratic") {
    Rng rng(21);
    const Index n = 12;
    Matrix a = test_support::random_gaussian(n, n, rng);
    a = (a * a.transpose()).eval();
    a += 0.5 * Matrix::Identity(n, n);
    const Vector b = test_support::random_gaussian(n, 1, rng).col(0);

    const auto objective = [&](const Vector& x, Vector& grad) {
        grad = a * x - b;
        return 0.5 * x.dot(a * x) - b.dot(x);
    };
    const auto res = lbfgs::minimize(objective, Vector::Zero(n));
    CHECK(res.converged);
    const Vector exact = Eigen::MatrixXd(a).ldlt().solve(b);
    CHECK((res.x - exact).lpNorm<Eigen::Infinity>() < 1e-6);
}

TEST_CASE("lbfgs solves Rosenbrock") {
    const auto rosenbrock = [](const Vector& x, Vector& grad) {
        const double a = 1.0 - x(0);
        const double b = x(1) - x(0) * x(0);
        grad.resize(2);
        grad(0) = -2.0 * a - 400.0 * x(0) * b;
        grad(1) = 200.0 * b;
        return a * a + 100.0 * b * b;
    };
    Vector x0(2);
    x0 << -1.2, 1.0;
    const auto res = lbfgs::minimize(rosenbrock, x0);
    CHECK(res.converged);
    CHECK(std::fabs(res.x(0) - 1.0) < 1e-6);
    CHECK(std::fabs(res.x(1) - 1.0) < 1e-6);
}

TEST_CASE("objective is nonincreasing across iteration budgets") {
    Rng rng(22);
    const Index n = 6;
    Matrix a = test_support::random_gaussian(n, n, rng);
    a = (a * a.transpose()).eval() + 0.1 * Matrix::Identity(n, n);
    const auto objective = [&](const Vector& x, Vector& grad) {
        grad = a * x;
        return 0.5 * x.dot(a * x);
    };
    const Vector x0 = test_support::random_gaussian(n, 1, rng).col(0);
    double prev = std::numeric_limits<double>::infinity();
    for (int budget = 1; budget <= 10; ++budget) {
        lbfgs::Options opts;
        opts.max_iterations = budget;
        const auto res = lbfgs::minimize(objective, x0, opts);
        CHECK(res.f <= prev + 1e-12);
        prev = res.f;
    }
}

TEST_CASE("starting at the optimum converges immediately") {
    const auto objective = [](const Vector& x, Vector& grad) {
        grad = 2.0 * x;
        return x.squaredNorm();
    };
    const auto res = lbfgs::minimize(objective, Vector::Zero(3));
    CHECK(res.converged);
    CHECK(res.iterations == 0);
}
