#pragma once

#include <cstdint>

#include "mdred/matrix.hpp"

namespace mdred {

// --- k-means (triangle) ---------------------------------------------------
// Projects each frame onto max{0, mu(z) - z_i} where z_i is the distance to
// the i-th of K cluster centers and mu(z) their mean.

struct KTriModel {
    Matrix centers;  // K x n_features
};

KTriModel ktri_fit(const Matrix& data, int k, std::uint64_t seed);
Matrix ktri_transform(const KTriModel& model, const Matrix& data);

// --- PCA --------------------------------------------------------------------

struct PcaModel {
    Vector mean;
    Matrix components;   // n_features x n_features, orthonormal columns, descending variance
    Vector eigenvalues;  // descending, clamped at 0
};

PcaModel pca_fit(const Matrix& data);
Matrix pca_transform(const PcaModel& model, const Matrix& data, Index dims);
Matrix pca_inverse_transform(const PcaModel& model, const Matrix& projected);

// --- tICA -------------------------------------------------------------------
// Symmetrized time-lagged covariance, solved as a generalized symmetric
// eigenproblem on the subspace where the instantaneous covariance has
// relative eigenvalue above 1e-10.

struct TicaModel {
    Vector mean;
    Index lag = 1;
    Matrix components;   // n_features x r, C0-orthonormal columns
    Vector eigenvalues;  // descending, clipped to [-1, 1]
    bool conditioning_warning = false;  // pre-clip eigenvalue beyond +-1.05
};

TicaModel tica_fit(const TrajectorySet& trajs, Index lag);
Matrix tica_transform(const TicaModel& model, const Matrix& data, Index dims);

// --- dimensionality heuristic ------------------------------------------------
// Cumulative fraction of total spectrum weight; for tICA the weight of a
// component is the magnitude of its eigenvalue.

Vector cumulative_variance(const PcaModel& model);
Vector cumulative_variance(const TicaModel& model);
Vector cumulative_fractions(const Vector& spectrum_weights);

// Smallest N such that fractions(N-1) >= q.
Index dims_for_threshold(const Vector& fractions, double q);

}  // namespace mdred
