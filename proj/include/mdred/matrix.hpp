#pragma once

#include <Eigen/Dense>
#include <vector>

#include "mdred/errors.hpp"

namespace mdred {

// Row-major so in-memory layout matches the on-disk payload order.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// An ordered set of trajectories. Trajectory boundaries matter: time-lagged
// estimators and transition counting never cross them, and the bootstrap
// resamples whole trajectories by index.
struct TrajectorySet {
    std::vector<Matrix> trajectories;
    double frame_interval = 1.0;  // physical time per frame

    Index n_cols() const { return trajectories.empty() ? 0 : trajectories.front().cols(); }

    Index total_frames() const {
        Index n = 0;
        for (const auto& t : trajectories) n += t.rows();
        return n;
    }

    // All frames stacked in trajectory order.
    Matrix stacked() const {
        Matrix out(total_frames(), n_cols());
        Index row = 0;
        for (const auto& t : trajectories) {
            out.middleRows(row, t.rows()) = t;
            row += t.rows();
        }
        return out;
    }
};

// Throws DataError unless every trajectory is nonempty with a common width.
inline void validate(const TrajectorySet& ts) {
    if (ts.trajectories.empty()) throw DataError("trajectory set is empty");
    const Index cols = ts.trajectories.front().cols();
    for (std::size_t i = 0; i < ts.trajectories.size(); ++i) {
        const auto& t = ts.trajectories[i];
        if (t.rows() < 1)
            throw DataError("trajectory " + std::to_string(i) + " has no frames");
        if (t.cols() != cols)
            throw DataError("trajectory " + std::to_string(i) + " has " +
                            std::to_string(t.cols()) + " columns, expected " +
                            std::to_string(cols));
    }
}

inline bool all_finite(const Matrix& m) { return m.allFinite(); }

}  // namespace mdred
