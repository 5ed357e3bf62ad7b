#pragma once

#include <Eigen/QR>
#include <filesystem>
#include <random>
#include <string>

#include "mdred/matrix.hpp"
#include "mdred/rng.hpp"

namespace test_support {

using mdred::Index;
using mdred::Matrix;
using mdred::Vector;

inline Matrix random_matrix(Index rows, Index cols, mdred::Rng& rng, double scale = 1.0) {
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) m(i, j) = scale * (2.0 * rng.uniform() - 1.0);
    return m;
}

inline Matrix random_gaussian(Index rows, Index cols, mdred::Rng& rng, double scale = 1.0) {
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) m(i, j) = scale * rng.normal();
    return m;
}

// Haar-ish orthogonal matrix from the QR of a Gaussian matrix.
inline Matrix random_orthogonal(Index n, mdred::Rng& rng) {
    const Matrix g = random_gaussian(n, n, rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ();
    // Fix the sign convention so the factorization is unique.
    const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Index i = 0; i < n; ++i)
        if (r(i, i) < 0) q.col(i) = -q.col(i);
    return q;
}

// Scratch directory unique to a test, cleaned up on destruction.
struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& tag) {
        path = std::filesystem::temp_directory_path() /
               ("mdred_test_" + tag + "_" + std::to_string(::getpid()));
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
};

// Three-state block emission templates: each state lights its own block of
// features with probability p_on, everything else at p_off, plus optional
// uniform-noise columns appended.
inline Matrix block_templates(Index n_states, Index block, double p_on, double p_off,
                              Index noise_cols = 0) {
    Matrix t = Matrix::Constant(n_states, n_states * block + noise_cols, p_off);
    for (Index s = 0; s < n_states; ++s)
        for (Index f = 0; f < block; ++f) t(s, s * block + f) = p_on;
    for (Index s = 0; s < n_states; ++s)
        for (Index f = n_states * block; f < t.cols(); ++f) t(s, f) = 0.5;
    return t;
}

// Symmetric three-state chain I - a*L for the path graph; spectrum
// {1, 1-a, 1-3a} is known in closed form.
inline Matrix path_chain(double a) {
    Matrix t(3, 3);
    t << 1 - a, a, 0,
         a, 1 - 2 * a, a,
         0, a, 1 - a;
    return t;
}

}  // namespace test_support
