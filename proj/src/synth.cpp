#include "mdred/synth.hpp"

#include <cmath>

#include "mdred/msm.hpp"
#include "mdred/parallel.hpp"
#include "mdred/rng.hpp"

namespace mdred::synth {

namespace {

constexpr long kAr1Burnin = 1000;

void validate_stochastic(const Matrix& t) {
    if (t.rows() != t.cols() || t.rows() < 1) throw DataError("transition matrix must be square");
    if ((t.array() < 0).any()) throw DataError("transition matrix has negative entries");
    for (Index i = 0; i < t.rows(); ++i)
        if (std::fabs(t.row(i).sum() - 1.0) > 1e-12)
            throw DataError("transition matrix row " + std::to_string(i) + " sums to " +
                            std::to_string(t.row(i).sum()));
    if (static_cast<Index>(largest_connected_set(t).size()) != t.rows())
        throw DataError("transition matrix is reducible");
}

int sample_categorical(const Vector& probs, Rng& rng) {
    const double u = rng.uniform();
    double acc = 0.0;
    for (Index i = 0; i < probs.size(); ++i) {
        acc += probs(i);
        if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(probs.size() - 1);
}

}  // namespace

Vector stationary_distribution(const Matrix& transition) {
    validate_stochastic(transition);
    const Index n = transition.rows();
    // (T^t - I) pi = 0 with the normalization sum(pi) = 1 replacing one row.
    Eigen::MatrixXd a = transition.transpose() - Eigen::MatrixXd::Identity(n, n);
    a.row(n - 1).setOnes();
    Vector b = Vector::Zero(n);
    b(n - 1) = 1.0;
    Vector pi = a.fullPivLu().solve(b);
    if ((pi.array() <= 0).any())
        throw NumericalError("stationary distribution has non-positive entries");
    return pi / pi.sum();
}

std::pair<DiscreteTrajectorySet, TrajectorySet> gen_hmm(const HmmSpec& spec, int n_threads) {
    validate_stochastic(spec.transition);
    if (spec.templates.rows() != spec.transition.rows())
        throw DataError("templates must have one row per hidden state");
    if ((spec.templates.array() < 0).any() || (spec.templates.array() > 1).any())
        throw DataError("template entries must lie in [0, 1]");
    if (spec.n_traj < 1 || spec.traj_len < 1) throw DataError("need n_traj >= 1 and traj_len >= 1");

    const Vector pi = stationary_distribution(spec.transition);
    const Index n_features = spec.templates.cols();

    DiscreteTrajectorySet hidden;
    hidden.n_states = static_cast<int>(spec.transition.rows());
    hidden.trajectories.resize(static_cast<std::size_t>(spec.n_traj));
    TrajectorySet features;
    features.trajectories.resize(static_cast<std::size_t>(spec.n_traj));

    parallel_for(static_cast<std::size_t>(spec.n_traj), n_threads, [&](std::size_t i) {
        Rng rng(derive_seed(spec.seed, static_cast<std::uint64_t>(i)));
        std::vector<int> chain(static_cast<std::size_t>(spec.traj_len));
        chain[0] = sample_categorical(pi, rng);
        for (long t = 1; t < spec.traj_len; ++t)
            chain[static_cast<std::size_t>(t)] = sample_categorical(
                spec.transition.row(chain[static_cast<std::size_t>(t - 1)]).transpose(), rng);

        Matrix emitted(spec.traj_len, n_features);
        for (long t = 0; t < spec.traj_len; ++t) {
            const int s = chain[static_cast<std::size_t>(t)];
            for (Index f = 0; f < n_features; ++f)
                emitted(t, f) = (rng.uniform() < spec.templates(s, f)) ? 1.0 : 0.0;
        }
        hidden.trajectories[i] = std::move(chain);
        features.trajectories[i] = std::move(emitted);
    });

    return {std::move(hidden), std::move(features)};
}

TrajectorySet gen_ar1(const Ar1Spec& spec) {
    const Index n = spec.coeffs.size();
    if (n < 1) throw DataError("ar1 needs at least one mode");
    if ((spec.coeffs.array().abs() >= 1).any())
        throw DataError("ar1 coefficients must satisfy |a| < 1");
    if (spec.rotation.rows() != n || spec.rotation.cols() != n)
        throw DataError("rotation must be n x n");
    const Eigen::MatrixXd qtq = spec.rotation.transpose() * spec.rotation;
    if ((qtq - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() > 1e-10)
        throw DataError("rotation is not orthogonal");
    if (spec.n_frames < 1) throw DataError("need n_frames >= 1");

    const Eigen::MatrixXd propagator =
        spec.rotation * spec.coeffs.asDiagonal() * spec.rotation.transpose();

    Rng rng(derive_seed(spec.seed, 0));
    Vector x = Vector::Zero(n);
    Matrix out(spec.n_frames, n);
    for (long t = 0; t < kAr1Burnin + spec.n_frames; ++t) {
        Vector noise(n);
        for (Index i = 0; i < n; ++i) noise(i) = rng.normal();
        x = propagator * x + spec.noise_scale * noise;
        if (t >= kAr1Burnin) out.row(t - kAr1Burnin) = x.transpose();
    }

    TrajectorySet ts;
    ts.trajectories.push_back(std::move(out));
    return ts;
}

}  // namespace mdred::synth
