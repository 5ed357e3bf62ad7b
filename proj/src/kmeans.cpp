#include "mdred/kmeans.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "mdred/parallel.hpp"
#include "mdred/rng.hpp"

namespace mdred {

namespace {

Index nearest_center(const Matrix& centers, const Eigen::RowVectorXd& x) {
    Index best = 0;
    double best_d = (centers.row(0) - x).squaredNorm();
    for (Index c = 1; c < centers.rows(); ++c) {
        const double d = (centers.row(c) - x).squaredNorm();
        if (d < best_d) {  // strict: ties keep the lowest index
            best_d = d;
            best = c;
        }
    }
    return best;
}

Matrix kmeanspp_init(const Matrix& data, int k, Rng& rng) {
    const Index n = data.rows();
    Matrix centers(k, data.cols());
    centers.row(0) = data.row(static_cast<Index>(rng.uniform_below(static_cast<std::uint64_t>(n))));

    Vector d2 = (data.rowwise() - centers.row(0)).rowwise().squaredNorm();
    for (int c = 1; c < k; ++c) {
        const double total = d2.sum();
        Index pick;
        if (total <= 0.0) {
            // All remaining mass sits on existing centers (duplicated data);
            // fall back to a uniform draw.
            pick = static_cast<Index>(rng.uniform_below(static_cast<std::uint64_t>(n)));
        } else {
            const double u = rng.uniform() * total;
            double acc = 0.0;
            pick = n - 1;
            for (Index i = 0; i < n; ++i) {
                acc += d2(i);
                if (u < acc) {
                    pick = i;
                    break;
                }
            }
        }
        centers.row(c) = data.row(pick);
        d2 = d2.cwiseMin((data.rowwise() - centers.row(c)).rowwise().squaredNorm());
    }
    return centers;
}

}  // namespace

int default_kmeans_iterations(int k, int batch_size) {
    return std::max(1, (100 * k) / std::max(1, batch_size));
}

ClusterModel minibatch_kmeans(const Matrix& data, int k, int batch_size, int iterations,
                              std::uint64_t seed) {
    const Index n = data.rows();
    if (n == 0) throw DataError("cannot cluster empty data");
    if (k < 1) throw DataError("k must be >= 1");
    if (static_cast<Index>(k) > n)
        throw DataError("k=" + std::to_string(k) + " exceeds " + std::to_string(n) + " frames");
    if (batch_size < 1) throw DataError("batch_size must be >= 1");

    Rng rng(seed);
    ClusterModel model;
    model.centers = kmeanspp_init(data, k, rng);
    model.counts_per_center.assign(k, 0);

    const bool full_batch = static_cast<Index>(batch_size) >= n;
    std::vector<Index> batch(full_batch ? static_cast<std::size_t>(n)
                                        : static_cast<std::size_t>(batch_size));
    std::vector<Index> labels(batch.size());

    for (int it = 0; it < iterations; ++it) {
        if (full_batch)
            std::iota(batch.begin(), batch.end(), Index{0});
        else
            for (auto& b : batch) b = static_cast<Index>(rng.uniform_below(static_cast<std::uint64_t>(n)));

        std::vector<bool> touched(k, false);
        for (std::size_t s = 0; s < batch.size(); ++s) {
            labels[s] = nearest_center(model.centers, data.row(batch[s]));
            touched[static_cast<std::size_t>(labels[s])] = true;
        }
        for (std::size_t s = 0; s < batch.size(); ++s) {
            const Index c = labels[s];
            auto& count = model.counts_per_center[static_cast<std::size_t>(c)];
            ++count;
            const double lr = 1.0 / static_cast<double>(count);
            model.centers.row(c) += lr * (data.row(batch[s]) - model.centers.row(c));
        }

        // Reseed centers this batch never saw and that have no history:
        // move each to the batch point farthest from its current center.
        std::vector<Index> empties;
        for (int c = 0; c < k; ++c)
            if (!touched[static_cast<std::size_t>(c)] &&
                model.counts_per_center[static_cast<std::size_t>(c)] == 0)
                empties.push_back(c);
        if (!empties.empty()) {
            std::vector<std::pair<double, Index>> far;
            far.reserve(batch.size());
            for (std::size_t s = 0; s < batch.size(); ++s) {
                const double d =
                    (model.centers.row(labels[s]) - data.row(batch[s])).squaredNorm();
                far.emplace_back(d, batch[s]);
            }
            std::sort(far.begin(), far.end(), [](const auto& a, const auto& b) {
                if (a.first != b.first) return a.first > b.first;
                return a.second < b.second;
            });
            for (std::size_t e = 0; e < empties.size() && e < far.size(); ++e) {
                model.centers.row(empties[e]) = data.row(far[e].second);
                model.counts_per_center[static_cast<std::size_t>(empties[e])] = 1;
            }
        }
    }

    if (!model.centers.allFinite()) throw NumericalError("k-means produced non-finite centers");
    return model;
}

std::vector<int> assign_frames(const ClusterModel& model, const Matrix& data, int n_threads) {
    if (data.cols() != model.centers.cols())
        throw DataError("data width " + std::to_string(data.cols()) +
                        " does not match center width " + std::to_string(model.centers.cols()));
    std::vector<int> labels(static_cast<std::size_t>(data.rows()));
    parallel_for(labels.size(), n_threads, [&](std::size_t i) {
        labels[i] = static_cast<int>(nearest_center(model.centers, data.row(static_cast<Index>(i))));
    });
    return labels;
}

DiscreteTrajectorySet assign(const ClusterModel& model, const TrajectorySet& trajs, int n_threads) {
    validate(trajs);
    DiscreteTrajectorySet out;
    out.n_states = static_cast<int>(model.centers.rows());
    for (const auto& t : trajs.trajectories) out.trajectories.push_back(assign_frames(model, t, n_threads));
    return out;
}

double inertia(const ClusterModel& model, const Matrix& data) {
    double total = 0.0;
    for (Index i = 0; i < data.rows(); ++i) {
        const Index c = nearest_center(model.centers, data.row(i));
        total += (model.centers.row(c) - data.row(i)).squaredNorm();
    }
    return total;
}

}  // namespace mdred
