#include "mdred/msm.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

namespace mdred {

Matrix count_matrix(const DiscreteTrajectorySet& dtrajs, int lag, int n_states) {
    if (lag < 1) throw DataError("lag must be >= 1");
    if (n_states < 1) throw DataError("n_states must be >= 1");
    Matrix counts = Matrix::Zero(n_states, n_states);
    for (const auto& traj : dtrajs.trajectories) {
        for (std::size_t t = 0; t + static_cast<std::size_t>(lag) < traj.size(); ++t) {
            const int a = traj[t];
            const int b = traj[t + static_cast<std::size_t>(lag)];
            if (a < 0 || a >= n_states || b < 0 || b >= n_states)
                throw DataError("state index out of range in discrete trajectory");
            counts(a, b) += 1.0;
        }
    }
    return counts;
}

std::vector<int> largest_connected_set(const Matrix& counts) {
    if (counts.rows() != counts.cols()) throw DataError("count matrix must be square");
    const Index n = counts.rows();
    std::vector<int> parent(static_cast<std::size_t>(n));
    std::iota(parent.begin(), parent.end(), 0);
    const auto find = [&](int a) {
        while (parent[static_cast<std::size_t>(a)] != a) {
            parent[static_cast<std::size_t>(a)] =
                parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(a)])];
            a = parent[static_cast<std::size_t>(a)];
        }
        return a;
    };
    for (Index i = 0; i < n; ++i)
        for (Index j = i + 1; j < n; ++j)
            if (counts(i, j) + counts(j, i) > 0) {
                const int ri = find(static_cast<int>(i));
                const int rj = find(static_cast<int>(j));
                if (ri != rj) parent[static_cast<std::size_t>(std::max(ri, rj))] = std::min(ri, rj);
            }

    std::map<int, std::vector<int>> components;
    for (Index i = 0; i < n; ++i) components[find(static_cast<int>(i))].push_back(static_cast<int>(i));

    std::vector<int> best;
    for (const auto& [root, members] : components)
        if (members.size() > best.size()) best = members;  // map order breaks ties by lowest root
    return best;
}

double transition_log_likelihood(const Matrix& counts, const Matrix& T) {
    double ll = 0.0;
    for (Index i = 0; i < counts.rows(); ++i)
        for (Index j = 0; j < counts.cols(); ++j)
            if (counts(i, j) > 0) {
                if (T(i, j) <= 0) return -std::numeric_limits<double>::infinity();
                ll += counts(i, j) * std::log(T(i, j));
            }
    return ll;
}

TransitionModel reversible_mle(const Matrix& counts, double tol, long max_iter) {
    if (counts.rows() != counts.cols()) throw DataError("count matrix must be square");
    if (tol <= 0) throw DataError("tol must be positive");
    const Index n = counts.rows();
    if (counts.sum() <= 0) throw DataError("count matrix is all zero");

    const Vector row_counts = counts.rowwise().sum();

    // Symmetrized pair list; x stays symmetric through every update, so the
    // iterate satisfies detailed balance at all times.
    struct Pair {
        Index i, j;
        double csym;
    };
    std::vector<Pair> pairs;
    for (Index i = 0; i < n; ++i)
        for (Index j = i; j < n; ++j) {
            const double csym = counts(i, j) + counts(j, i);
            if (csym > 0) pairs.push_back({i, j, csym});
        }

    Matrix x = counts + counts.transpose();
    Vector x_rows = x.rowwise().sum();
    for (Index i = 0; i < n; ++i)
        if (x_rows(i) <= 0)
            throw DataError("state " + std::to_string(i) +
                            " has no transitions; restrict counts to a connected set first");

    TransitionModel model;
    const auto normalize = [&](const Matrix& xm, const Vector& xr) {
        Matrix T(n, n);
        for (Index i = 0; i < n; ++i) T.row(i) = xm.row(i) / xr(i);
        return T;
    };

    double ll_prev = transition_log_likelihood(counts, normalize(x, x_rows));
    long it = 0;
    bool converged = false;
    for (; it < max_iter; ++it) {
        // In-place update: the new x_ij depends only on the old row sums, and
        // entries outside the pair list are zero forever.
        for (const auto& p : pairs) {
            const double denom = row_counts(p.i) / x_rows(p.i) + row_counts(p.j) / x_rows(p.j);
            const double v = p.csym / denom;
            x(p.i, p.j) = v;
            x(p.j, p.i) = v;
        }
        x_rows = x.rowwise().sum();

        const double ll = transition_log_likelihood(counts, normalize(x, x_rows));
        const double denom = std::max(1.0, std::fabs(ll));
        if (std::fabs(ll - ll_prev) / denom < tol) {
            ll_prev = ll;
            converged = true;
            ++it;
            break;
        }
        ll_prev = ll;
    }

    model.T = normalize(x, x_rows);
    model.pi = x_rows / x_rows.sum();
    model.counts = counts;
    model.converged = converged;
    model.iterations = static_cast<int>(it);
    model.log_likelihood = ll_prev;
    model.active_states.resize(static_cast<std::size_t>(n));
    std::iota(model.active_states.begin(), model.active_states.end(), 0);

    // Post-estimation invariants, checked on every estimate.
    for (Index i = 0; i < n; ++i)
        if (std::fabs(model.T.row(i).sum() - 1.0) > 1e-12)
            throw NumericalError("estimated T is not row-stochastic");
    if (model.pi.minCoeff() <= 0) throw NumericalError("stationary distribution not positive");
    for (Index i = 0; i < n; ++i)
        for (Index j = i + 1; j < n; ++j)
            if (std::fabs(model.pi(i) * model.T(i, j) - model.pi(j) * model.T(j, i)) > 1e-10)
                throw NumericalError("estimated T violates detailed balance");
    return model;
}

TransitionModel estimate_msm(const DiscreteTrajectorySet& dtrajs, int lag, double tol,
                             long max_iter) {
    const Matrix counts = count_matrix(dtrajs, lag, dtrajs.n_states);
    if (counts.sum() <= 0)
        throw DataError("no transitions at lag " + std::to_string(lag) +
                        " (lag not below every trajectory length)");
    const std::vector<int> active = largest_connected_set(counts);

    Matrix sub(static_cast<Index>(active.size()), static_cast<Index>(active.size()));
    for (std::size_t a = 0; a < active.size(); ++a)
        for (std::size_t b = 0; b < active.size(); ++b)
            sub(static_cast<Index>(a), static_cast<Index>(b)) = counts(active[a], active[b]);

    TransitionModel model = reversible_mle(sub, tol, max_iter);
    model.lag = lag;
    model.active_states = active;
    return model;
}

Vector transition_spectrum(const TransitionModel& model) {
    const Index n = model.T.rows();
    Eigen::MatrixXd sym(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j)
            sym(i, j) = std::sqrt(model.pi(i) / model.pi(j)) * model.T(i, j);
    sym = 0.5 * (sym + sym.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
    if (solver.info() != Eigen::Success) throw NumericalError("spectrum computation failed");
    Vector values = solver.eigenvalues();
    std::sort(values.data(), values.data() + values.size(),
              [](double a, double b) { return std::fabs(a) > std::fabs(b); });
    return values;
}

std::vector<ImpliedTimescale> implied_timescales(const TransitionModel& model, int k) {
    const Index n = model.T.rows();
    if (k < 1) throw DataError("need k >= 1 timescales");
    if (static_cast<Index>(k) >= n)
        throw DataError("k=" + std::to_string(k) + " timescales require more than " +
                        std::to_string(n) + " active states");

    const Vector spectrum = transition_spectrum(model);
    std::vector<ImpliedTimescale> out;
    for (int i = 1; i <= k; ++i) {
        const double lam = spectrum(i);
        ImpliedTimescale ts;
        if (std::fabs(lam - 1.0) < 1e-12) {
            ts.finite = false;  // a second invariant component: disconnected dynamics
        } else if (lam <= 0.0) {
            ts.defined = false;  // oscillatory artifact, no relaxation timescale
        } else {
            ts.value = -static_cast<double>(model.lag) / std::log(lam);
        }
        out.push_back(ts);
    }
    return out;
}

TimescaleTable its_scan(const DiscreteTrajectorySet& dtrajs, const std::vector<int>& lags,
                        int k, double frame_interval, double tol) {
    if (lags.empty()) throw DataError("empty lag list");
    TimescaleTable table;
    table.frame_interval = frame_interval;

    for (const int lag : lags) {
        const double lag_physical = lag * frame_interval;
        try {
            const TransitionModel model = estimate_msm(dtrajs, lag, tol);
            if (!model.converged) throw NumericalError("estimator did not converge");
            const auto timescales =
                implied_timescales(model, std::min<int>(k, static_cast<int>(model.T.rows()) - 1));
            for (std::size_t i = 0; i < timescales.size(); ++i) {
                TimescaleEntry e;
                e.lag = lag;
                e.lag_physical = lag_physical;
                e.replicate = 0;
                e.n_active_states = static_cast<int>(model.T.rows());
                e.n_states = dtrajs.n_states;
                e.timescale_index = static_cast<int>(i) + 2;
                if (timescales[i].defined && timescales[i].finite) {
                    e.value_physical = timescales[i].value * frame_interval;
                    e.converged = true;
                } else {
                    e.value_physical = std::numeric_limits<double>::quiet_NaN();
                    e.converged = false;
                    e.note = timescales[i].finite ? "eigenvalue <= 0" : "disconnected (eigenvalue 1)";
                }
                table.entries.push_back(e);
            }
        } catch (const std::exception& ex) {
            TimescaleEntry e;
            e.lag = lag;
            e.lag_physical = lag_physical;
            e.replicate = 0;
            e.n_states = dtrajs.n_states;
            e.timescale_index = 2;
            e.value_physical = std::numeric_limits<double>::quiet_NaN();
            e.converged = false;
            e.note = ex.what();
            table.entries.push_back(e);
        }
    }
    summarize_timescales(table);
    return table;
}

void summarize_timescales(TimescaleTable& table) {
    table.summary.clear();
    std::vector<int> lags;
    for (const auto& e : table.entries)
        if (std::find(lags.begin(), lags.end(), e.lag) == lags.end()) lags.push_back(e.lag);

    for (const int lag : lags) {
        TimescaleSummary s;
        s.lag = lag;
        s.lag_physical = lag * table.frame_interval;
        std::vector<double> values;
        for (const auto& e : table.entries)
            if (e.lag == lag && e.timescale_index == 2 && e.converged)
                values.push_back(e.value_physical);
        s.n_success = static_cast<int>(values.size());
        if (values.empty()) {
            s.t2_mean_physical = std::numeric_limits<double>::quiet_NaN();
            s.t2_std_physical = std::numeric_limits<double>::quiet_NaN();
        } else {
            const double mean =
                std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
            s.t2_mean_physical = mean;
            if (values.size() < 2) {
                s.t2_std_physical = std::numeric_limits<double>::quiet_NaN();
            } else {
                double acc = 0;
                for (const double v : values) acc += (v - mean) * (v - mean);
                s.t2_std_physical = std::sqrt(acc / static_cast<double>(values.size() - 1));
            }
        }
        table.summary.push_back(s);
    }
}

}  // namespace mdred
