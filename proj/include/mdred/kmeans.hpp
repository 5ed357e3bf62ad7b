#pragma once

#include <cstdint>
#include <vector>

#include "mdred/matrix.hpp"

namespace mdred {

struct ClusterModel {
    Matrix centers;                        // K x d
    std::vector<long> counts_per_center;   // cumulative mini-batch assignment tallies
};

// Per-trajectory sequences of microstate indices.
struct DiscreteTrajectorySet {
    std::vector<std::vector<int>> trajectories;
    int n_states = 0;
};

// k-means++ seeding followed by mini-batch refinement with per-center
// learning rate 1/count. A batch_size >= n_frames degenerates to full-batch
// passes in data order. Centers left empty by a batch are reseeded to the
// farthest batch points. Deterministic given the seed.
ClusterModel minibatch_kmeans(const Matrix& data, int k, int batch_size, int iterations,
                              std::uint64_t seed);

// Default iteration count when the caller does not specify one.
int default_kmeans_iterations(int k, int batch_size);

// Nearest-center labels; ties go to the lowest center index.
std::vector<int> assign_frames(const ClusterModel& model, const Matrix& data,
                               int n_threads = 1);
DiscreteTrajectorySet assign(const ClusterModel& model, const TrajectorySet& trajs,
                             int n_threads = 1);

// Sum of squared distances to the nearest center.
double inertia(const ClusterModel& model, const Matrix& data);

}  // namespace mdred
