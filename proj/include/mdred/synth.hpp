#pragma once

#include <cstdint>
#include <utility>

#include "mdred/kmeans.hpp"
#include "mdred/matrix.hpp"

namespace mdred::synth {

// Hidden Markov chain with Bernoulli contact emissions. The chain's spectrum
// is known analytically, which makes the generated data an oracle for the
// whole estimation pipeline.
struct HmmSpec {
    Matrix transition;  // M x M row-stochastic, irreducible
    Matrix templates;   // M x n_features contact probabilities in [0, 1]
    int n_traj = 1;
    long traj_len = 2;
    std::uint64_t seed = 0;
};

// Rotated diagonal AR(1): x_t = Q diag(coeffs) Q^T x_{t-1} + noise_scale * xi.
// The lag-1 autocorrelation along Q e_i equals coeffs[i], the oracle for tICA.
struct Ar1Spec {
    Vector coeffs;    // entries in (-1, 1)
    Matrix rotation;  // orthogonal n x n
    double noise_scale = 1.0;
    long n_frames = 1;
    std::uint64_t seed = 0;
};

// Hidden chains start in the stationary distribution; trajectory i draws from
// the stream with seed spec.seed xor i, so any thread count yields the same
// output.
std::pair<DiscreteTrajectorySet, TrajectorySet> gen_hmm(const HmmSpec& spec, int n_threads = 1);

// Starts at zero and discards the first 1000 frames as burn-in.
TrajectorySet gen_ar1(const Ar1Spec& spec);

// Stationary distribution of an irreducible row-stochastic matrix.
Vector stationary_distribution(const Matrix& transition);

}  // namespace mdred::synth
