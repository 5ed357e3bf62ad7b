#pragma once

#include <string>
#include <vector>

#include "mdred/kmeans.hpp"
#include "mdred/matrix.hpp"

namespace mdred {

// Sliding-window transition counts at the given lag. Trajectories are never
// concatenated: no transition crosses a trajectory boundary.
Matrix count_matrix(const DiscreteTrajectorySet& dtrajs, int lag, int n_states);

// Largest connected component of the graph with an edge wherever
// c_ij + c_ji > 0 (the symmetrized count graph). Ties on size resolve to the
// component containing the lowest state index. Returns sorted state labels.
std::vector<int> largest_connected_set(const Matrix& counts);

struct TransitionModel {
    int lag = 1;
    Matrix counts;  // restricted to the active set
    Matrix T;       // reversible row-stochastic transition matrix
    Vector pi;      // stationary distribution of T
    std::vector<int> active_states;  // model index -> original state label
    bool converged = false;
    int iterations = 0;
    double log_likelihood = 0.0;
};

// Reversible maximum-likelihood transition matrix via the self-consistent
// update x_ij <- (c_ij + c_ji) / (c_i/x_i + c_j/x_j), started from the
// symmetrized counts. `counts` must already be restricted to a connected set.
TransitionModel reversible_mle(const Matrix& counts, double tol = 1e-10,
                               long max_iter = 100000);

// count -> trim to largest connected set -> reversible_mle, with
// active_states and lag filled in.
TransitionModel estimate_msm(const DiscreteTrajectorySet& dtrajs, int lag,
                             double tol = 1e-10, long max_iter = 100000);

// log L = sum c_ij ln T_ij over observed transitions.
double transition_log_likelihood(const Matrix& counts, const Matrix& T);

struct ImpliedTimescale {
    double value = 0.0;        // frames; meaningful only when defined && finite
    bool defined = true;       // false when the eigenvalue is <= 0
    bool finite = true;        // false when the eigenvalue is 1 (disconnected)
};

// Timescales t_i = -lag / ln(lambda_{i+1}) from the leading nontrivial
// eigenvalues of T, sorted by magnitude. Requires k < number of active states.
std::vector<ImpliedTimescale> implied_timescales(const TransitionModel& model, int k);

// Real spectrum of a reversible T via the symmetric conjugation
// diag(sqrt(pi)) T diag(1/sqrt(pi)); descending by magnitude.
Vector transition_spectrum(const TransitionModel& model);

struct TimescaleEntry {
    int lag = 0;
    double lag_physical = 0.0;
    int replicate = 0;
    int timescale_index = 2;  // 2 = slowest (from the second eigenvalue)
    double value_physical = 0.0;
    bool converged = false;
    int n_active_states = 0;  // size of the largest connected set used
    int n_states = 0;         // total states before trimming
    std::string note;         // failure reason when not converged
};

struct TimescaleSummary {
    int lag = 0;
    double lag_physical = 0.0;
    int n_success = 0;
    double t2_mean_physical = 0.0;  // nan when no successes
    double t2_std_physical = 0.0;   // sample std (ddof 1); nan when n < 2
};

struct TimescaleTable {
    std::vector<TimescaleEntry> entries;
    std::vector<TimescaleSummary> summary;
    double frame_interval = 1.0;
};

// Estimates k timescales at every lag in lag_list. Per-lag failures are
// recorded in the table instead of aborting the scan.
TimescaleTable its_scan(const DiscreteTrajectorySet& dtrajs, const std::vector<int>& lags,
                        int k, double frame_interval, double tol = 1e-10);

// Recomputes per-lag mean/std of the slowest timescale over the converged
// replicates in `entries`.
void summarize_timescales(TimescaleTable& table);

}  // namespace mdred
