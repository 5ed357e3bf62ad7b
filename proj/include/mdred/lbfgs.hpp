#pragma once

#include <functional>

#include "mdred/matrix.hpp"

namespace mdred::lbfgs {

// Evaluates f(x) and writes the gradient into `grad` (same size as x).
using Objective = std::function<double(const Vector& x, Vector& grad)>;

struct Options {
    int max_iterations = 400;
    int memory = 10;
    double c1 = 1e-4;  // Armijo (sufficient decrease)
    double c2 = 0.9;   // curvature
    double grad_tol = 1e-8;  // stop when the gradient inf-norm drops below this
    int max_bisections = 20;  // zoom budget before the line search gives up
};

struct Result {
    Vector x;
    double f = 0.0;
    Vector grad;
    int iterations = 0;
    bool converged = false;            // gradient tolerance reached
    bool line_search_failure = false;  // stopped early, best iterate returned
};

// Limited-memory BFGS with a strong-Wolfe line search (bracket + bisection
// zoom). f is nonincreasing across accepted iterations.
Result minimize(const Objective& objective, Vector x0, const Options& opts = {});

}  // namespace mdred::lbfgs
