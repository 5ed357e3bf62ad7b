#include "mdred/lbfgs.hpp"

#include <cmath>
#include <deque>

namespace mdred::lbfgs {

namespace {

struct Pair {
    Vector s, y;
    double rho;
};

// Strong Wolfe line search, Nocedal & Wright style: expand a bracket, then
// bisect inside it. Returns the accepted step in alpha; false means the zoom
// budget ran out without a Wolfe point (best Armijo point is kept if any).
struct LineSearchResult {
    double alpha = 0.0;
    double f = 0.0;
    Vector x, grad;
    bool ok = false;
};

LineSearchResult line_search(const Objective& obj, const Vector& x0, double f0,
                             const Vector& g0, const Vector& dir, double alpha_init,
                             const Options& opts) {
    LineSearchResult best;
    const double dg0 = g0.dot(dir);

    Vector g(x0.size());
    const auto eval = [&](double a, double& f, Vector& x_out) {
        x_out = x0 + a * dir;
        f = obj(x_out, g);
    };

    const auto wolfe_ok = [&](double f, double a, double dg) {
        return f <= f0 + opts.c1 * a * dg0 && std::fabs(dg) <= opts.c2 * std::fabs(dg0);
    };

    const auto remember_if_armijo = [&](double a, double f, const Vector& x) {
        if (f <= f0 + opts.c1 * a * dg0 && (!best.ok || f < best.f)) {
            best.alpha = a;
            best.f = f;
            best.x = x;
            best.grad = g;
            best.ok = true;
        }
    };

    double alo = 0.0, flo = f0, dglo = dg0;
    double ahi = 0.0;
    double a = alpha_init;
    double aprev = 0.0, fprev = f0;
    bool bracketed = false;

    Vector x(x0.size());
    double f = 0.0;

    // Bracketing phase.
    for (int iter = 0; iter < 40 && !bracketed; ++iter) {
        eval(a, f, x);
        const double dg = g.dot(dir);
        if (f > f0 + opts.c1 * a * dg0 || (iter > 0 && f >= fprev)) {
            alo = aprev; flo = fprev; dglo = (iter == 0) ? dg0 : dglo;
            ahi = a;
            bracketed = true;
            break;
        }
        remember_if_armijo(a, f, x);
        if (std::fabs(dg) <= opts.c2 * std::fabs(dg0)) {
            LineSearchResult r;
            r.alpha = a; r.f = f; r.x = x; r.grad = g; r.ok = true;
            return r;
        }
        if (dg >= 0) {
            alo = a; flo = f; dglo = dg;
            ahi = aprev;
            bracketed = true;
            break;
        }
        aprev = a; fprev = f; dglo = dg;
        a *= 2.0;
        if (a > 1e12) break;
    }

    if (!bracketed) return best;  // whatever Armijo point was found (possibly none)

    // Zoom phase: bisection, bounded by max_bisections.
    for (int b = 0; b < opts.max_bisections; ++b) {
        a = 0.5 * (alo + ahi);
        eval(a, f, x);
        const double dg = g.dot(dir);
        if (f > f0 + opts.c1 * a * dg0 || f >= flo) {
            ahi = a;
        } else {
            remember_if_armijo(a, f, x);
            if (wolfe_ok(f, a, dg)) {
                LineSearchResult r;
                r.alpha = a; r.f = f; r.x = x; r.grad = g; r.ok = true;
                return r;
            }
            if (dg * (ahi - alo) >= 0) ahi = alo;
            alo = a; flo = f; dglo = dg;
        }
    }

    // Zoom budget exhausted: fall back to the best sufficient-decrease point.
    return best;
}

}  // namespace

Result minimize(const Objective& objective, Vector x0, const Options& opts) {
    Result res;
    res.x = std::move(x0);
    res.grad.resize(res.x.size());
    res.f = objective(res.x, res.grad);

    std::deque<Pair> history;

    for (int iter = 0; iter < opts.max_iterations; ++iter) {
        if (res.grad.lpNorm<Eigen::Infinity>() < opts.grad_tol) {
            res.converged = true;
            break;
        }

        // Two-loop recursion.
        Vector q = res.grad;
        std::vector<double> alphas(history.size());
        for (std::size_t i = history.size(); i-- > 0;) {
            alphas[i] = history[i].rho * history[i].s.dot(q);
            q -= alphas[i] * history[i].y;
        }
        if (!history.empty()) {
            const auto& last = history.back();
            q *= last.s.dot(last.y) / last.y.squaredNorm();
        }
        for (std::size_t i = 0; i < history.size(); ++i) {
            const double beta = history[i].rho * history[i].y.dot(q);
            q += (alphas[i] - beta) * history[i].s;
        }
        Vector dir = -q;
        if (res.grad.dot(dir) >= 0) {
            // Not a descent direction; restart from steepest descent.
            history.clear();
            dir = -res.grad;
        }

        const double alpha0 =
            (iter == 0 && history.empty()) ? 1.0 / std::max(1.0, res.grad.norm()) : 1.0;
        const auto ls = line_search(objective, res.x, res.f, res.grad, dir, alpha0, opts);
        if (!ls.ok) {
            res.line_search_failure = true;
            break;
        }

        Vector s = ls.x - res.x;
        Vector y = ls.grad - res.grad;
        const double sy = s.dot(y);
        if (sy > 1e-12 * s.norm() * y.norm()) {
            history.push_back({std::move(s), std::move(y), 1.0 / sy});
            if (static_cast<int>(history.size()) > opts.memory) history.pop_front();
        }

        res.x = ls.x;
        res.f = ls.f;
        res.grad = ls.grad;
        res.iterations = iter + 1;
    }

    if (!res.converged && res.grad.lpNorm<Eigen::Infinity>() < opts.grad_tol)
        res.converged = true;
    return res;
}

}  // namespace mdred::lbfgs
