#include <doctest.h>

#include <cmath>

#include "mdred/msm.hpp"
#include "mdred/rng.hpp"
#include "mdred/synth.hpp"
#include "test_support.hpp"

using namespace mdred;

TEST_CASE("stationary distribution") {
    Matrix t(2, 2);
    t << 0.9, 0.1, 0.2, 0.8;
    const Vector pi = synth::stationary_distribution(t);
    // Detailed balance for a 2-state chain: pi0 * 0.1 = pi1 * 0.2.
    CHECK(pi(0) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(pi(1) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK((pi.transpose() * t - pi.transpose()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("gen_hmm input validation") {
    synth::HmmSpec spec;
    spec.transition = Matrix::Identity(2, 2);  // reducible
    spec.templates = Matrix::Constant(2, 3, 0.5);
    spec.n_traj = 1;
    spec.traj_len = 10;
    CHECK_THROWS_AS(synth::gen_hmm(spec), DataError);

    spec.transition.resize(2, 2);
    spec.transition << 0.9, 0.2, 0.1, 0.9;  // rows do not sum to 1
    CHECK_THROWS_AS(synth::gen_hmm(spec), DataError);

    spec.transition << 0.9, 0.1, 0.1, 0.9;
    spec.templates(0, 0) = 1.5;  // out of [0,1]
    CHECK_THROWS_AS(synth::gen_hmm(spec), DataError);
}

TEST_CASE("gen_hmm with binary templates emits exact fingerprints") {
    synth::HmmSpec spec;
    spec.transition = test_support::path_chain(0.1);
    spec.templates = Matrix::Identity(3, 3);
    spec.n_traj = 2;
    spec.traj_len = 200;
    spec.seed = 9;
    const auto [hidden, features] = synth::gen_hmm(spec);
    for (std::size_t tr = 0; tr < 2; ++tr)
        for (Index f = 0; f < 200; ++f) {
            const int state = hidden.trajectories[tr][static_cast<std::size_t>(f)];
            CHECK(features.trajectories[tr].row(f) == spec.templates.row(state));
        }
}

TEST_CASE("gen_hmm chain statistics converge to the generator parameters") {
    synth::HmmSpec spec;
    spec.transition.resize(2, 2);
    spec.transition << 0.95, 0.05, 0.10, 0.90;
    spec.templates = Matrix::Identity(2, 2);
    spec.n_traj = 10;
    spec.traj_len = 100000;
    spec.seed = 123;
    const auto [hidden, features] = synth::gen_hmm(spec);

    // Empirical lag-1 transition frequencies.
    Matrix counts = count_matrix(hidden, 1, 2);
    Matrix freq(2, 2);
    for (Index i = 0; i < 2; ++i) freq.row(i) = counts.row(i) / counts.row(i).sum();
    CHECK((freq - spec.transition).cwiseAbs().maxCoeff() < 0.01);

    // Empirical stationary distribution vs the analytic one.
    const Vector pi = synth::stationary_distribution(spec.transition);
    Vector occupancy = Vector::Zero(2);
    double total = 0;
    for (const auto& tr : hidden.trajectories)
        for (const int s : tr) {
            occupancy(s) += 1.0;
            total += 1.0;
        }
    occupancy /= total;
    CHECK((occupancy - pi).cwiseAbs().maxCoeff() < 0.01);
}

TEST_CASE("gen_hmm analytic slowest timescale of a 2-state chain") {
    // lambda2 = trace - 1 = 0.98 -> t2 = -1/ln(0.98).
    Matrix t(2, 2);
    t << 0.99, 0.01, 0.01, 0.99;
    const double lambda2 = t(0, 0) + t(1, 1) - 1.0;
    CHECK(lambda2 == doctest::Approx(0.98).epsilon(1e-15));
    const double t2 = -1.0 / std::log(lambda2);
    CHECK(t2 == doctest::Approx(49.4983164525).epsilon(1e-9));

    synth::HmmSpec spec;
    spec.transition = t;
    spec.templates = Matrix::Identity(2, 2);
    spec.n_traj = 20;
    spec.traj_len = 20000;
    spec.seed = 6;
    const auto [hidden, features] = synth::gen_hmm(spec);
    const TransitionModel model = estimate_msm(hidden, 1);
    const auto ts = implied_timescales(model, 1);
    REQUIRE(ts[0].defined);
    CHECK(std::fabs(ts[0].value - t2) / t2 < 0.15);
}

TEST_CASE("gen_hmm determinism and stream splitting") {
    synth::HmmSpec spec;
    spec.transition = test_support::path_chain(0.1);
    spec.templates = test_support::block_templates(3, 4, 0.9, 0.1);
    spec.n_traj = 4;
    spec.traj_len = 50;
    spec.seed = 77;

    const auto [h1, f1] = synth::gen_hmm(spec);
    const auto [h2, f2] = synth::gen_hmm(spec);
    CHECK(h1.trajectories == h2.trajectories);
    for (std::size_t i = 0; i < 4; ++i) CHECK(f1.trajectories[i] == f2.trajectories[i]);

    // Thread count must not change the streams.
    const auto [h4, f4] = synth::gen_hmm(spec, 4);
    CHECK(h1.trajectories == h4.trajectories);
    for (std::size_t i = 0; i < 4; ++i) CHECK(f1.trajectories[i] == f4.trajectories[i]);
}

TEST_CASE("gen_ar1 white noise has negligible autocorrelation") {
    synth::Ar1Spec spec;
    spec.coeffs = Vector::Zero(2);
    spec.rotation = Matrix::Identity(2, 2);
    spec.noise_scale = 1.0;
    spec.n_frames = 100000;
    spec.seed = 3;
    const TrajectorySet ts = synth::gen_ar1(spec);
    const Matrix& x = ts.trajectories[0];
    REQUIRE(x.rows() == 100000);

    for (Index j = 0; j < 2; ++j) {
        const Vector col = x.col(j);
        const double mean = col.mean();
        double num = 0, den = 0;
        for (Index i = 0; i + 1 < col.size(); ++i)
            num += (col(i) - mean) * (col(i + 1) - mean);
        for (Index i = 0; i < col.size(); ++i) den += (col(i) - mean) * (col(i) - mean);
        CHECK(std::fabs(num / den) < 0.05);
    }
}

TEST_CASE("gen_ar1 mode autocorrelation matches its coefficient") {
    Rng rng(81);
    synth::Ar1Spec spec;
    spec.coeffs.resize(3);
    spec.coeffs << 0.8, 0.3, 0.0;
    spec.rotation = test_support::random_orthogonal(3, rng);
    spec.noise_scale = 1.0;
    spec.n_frames = 100000;
    spec.seed = 5;
    const TrajectorySet ts = synth::gen_ar1(spec);

    const Vector mode = ts.trajectories[0] * spec.rotation.col(0);
    const double mean = mode.mean();
    double num = 0, den = 0;
    for (Index i = 0; i + 1 < mode.size(); ++i) num += (mode(i) - mean) * (mode(i + 1) - mean);
    for (Index i = 0; i < mode.size(); ++i) den += (mode(i) - mean) * (mode(i) - mean);
    CHECK(std::fabs(num / den - 0.8) < 0.02);
}

TEST_CASE("gen_ar1 edge cases") {
    synth::Ar1Spec spec;
    spec.coeffs = Vector::Constant(2, 0.5);
    spec.rotation = Matrix::Identity(2, 2);
    spec.noise_scale = 0.0;
    spec.n_frames = 100;
    const TrajectorySet ts = synth::gen_ar1(spec);
    CHECK(ts.trajectories[0].cwiseAbs().maxCoeff() == 0.0);  // zero noise, zero start

    spec.coeffs(0) = 1.0;  // not stationary
    CHECK_THROWS_AS(synth::gen_ar1(spec), DataError);

    spec.coeffs(0) = 0.5;
    spec.rotation(0, 0) = 2.0;  // not orthogonal
    CHECK_THROWS_AS(synth::gen_ar1(spec), DataError);
}

TEST_CASE("gen_ar1 determinism") {
    Rng rng(82);
    synth::Ar1Spec spec;
    spec.coeffs = Vector::Constant(2, 0.4);
    spec.rotation = test_support::random_orthogonal(2, rng);
    spec.noise_scale = 0.7;
    spec.n_frames = 500;
    spec.seed = 99;
    CHECK(synth::gen_ar1(spec).trajectories[0] == synth::gen_ar1(spec).trajectories[0]);
}
