#pragma once

#include <cstdint>
#include <utility>

#include "mdred/matrix.hpp"

namespace mdred {

// Shallow autoencoder: visible -> hidden -> visible, sigmoid units. The
// hidden activations are the learned projection.
struct AeParams {
    Matrix w1;  // n_hidden x n_visible (encoder)
    Vector b1;  // n_hidden
    Matrix w2;  // n_visible x n_hidden (decoder)
    Vector b2;  // n_visible

    Index n_visible() const { return w1.cols(); }
    Index n_hidden() const { return w1.rows(); }
};

struct AeHyper {
    double lambda = 0.003;  // weight decay
    double rho = 0.0;       // target mean activation of each hidden unit
    double beta = 3.0;      // sparsity penalty weight
    int epochs = 400;       // full-batch L-BFGS iterations
    std::uint64_t seed = 0;

    // Test facilities, not exposed on the CLI: identity activation instead of
    // the sigmoid, and a decoder tied to the encoder transpose.
    bool linear_activation = false;
    bool tied_weights = false;
};

// Uniform weights on [-r, r] with r = sqrt(6 / (n_visible + n_hidden)),
// zero biases.
AeParams ae_init(Index n_visible, Index n_hidden, std::uint64_t seed);

// (hidden, reconstruction) activations for a batch of frames.
std::pair<Matrix, Matrix> ae_forward(const AeParams& p, const Matrix& batch,
                                     bool linear_activation = false);

// KL(p || p_hat) for Bernoulli sparsity targets; p_hat is clamped to
// [1e-8, 1 - 1e-8] and 0*ln 0 is taken as 0.
double kl_bernoulli(double p, double p_hat);

// Packed parameter vector layout: [W1 row-major, b1, W2 row-major, b2];
// tied mode drops the W2 block.
Vector ae_pack(const AeParams& p, bool tied);
AeParams ae_unpack(const Vector& flat, Index n_visible, Index n_hidden, bool tied);

// Cost J and its gradient in packed layout. J = mean squared reconstruction
// + weight decay on W1/W2 (biases excluded) + beta * sum_j KL(rho || rho_hat_j).
double ae_cost_grad(const AeParams& p, const Matrix& data, const AeHyper& h, Vector* grad);

struct AeTrainResult {
    AeParams params;
    double initial_cost = 0.0;
    double final_cost = 0.0;
    int iterations = 0;
    bool converged = false;
    bool line_search_failure = false;
};

AeTrainResult ae_train(const Matrix& data, Index n_hidden, const AeHyper& h);

// The hidden-layer activations (the projection).
Matrix ae_encode(const AeParams& p, const Matrix& data, bool linear_activation = false);

}  // namespace mdred
