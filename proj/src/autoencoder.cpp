#include "mdred/autoencoder.hpp"

#include <cmath>

#include "mdred/lbfgs.hpp"
#include "mdred/rng.hpp"

namespace mdred {

namespace {

constexpr double kRhoClamp = 1e-8;

Matrix sigmoid(const Matrix& z) {
    return 1.0 / (1.0 + (-z.array()).exp());
}

}  // namespace

AeParams ae_init(Index n_visible, Index n_hidden, std::uint64_t seed) {
    if (n_visible < 1 || n_hidden < 1) throw DataError("autoencoder sizes must be >= 1");
    const double r = std::sqrt(6.0 / static_cast<double>(n_visible + n_hidden));
    Rng rng(seed);
    AeParams p;
    p.w1.resize(n_hidden, n_visible);
    p.w2.resize(n_visible, n_hidden);
    for (Index i = 0; i < p.w1.rows(); ++i)
        for (Index j = 0; j < p.w1.cols(); ++j) p.w1(i, j) = (2.0 * rng.uniform() - 1.0) * r;
    for (Index i = 0; i < p.w2.rows(); ++i)
        for (Index j = 0; j < p.w2.cols(); ++j) p.w2(i, j) = (2.0 * rng.uniform() - 1.0) * r;
    p.b1 = Vector::Zero(n_hidden);
    p.b2 = Vector::Zero(n_visible);
    return p;
}

std::pair<Matrix, Matrix> ae_forward(const AeParams& p, const Matrix& batch,
                                     bool linear_activation) {
    if (batch.cols() != p.n_visible())
        throw DataError("batch width " + std::to_string(batch.cols()) +
                        " does not match n_visible=" + std::to_string(p.n_visible()));
    Matrix z1 = (batch * p.w1.transpose()).rowwise() + p.b1.transpose();
    Matrix hidden = linear_activation ? z1 : sigmoid(z1);
    Matrix z2 = (hidden * p.w2.transpose()).rowwise() + p.b2.transpose();
    Matrix recon = linear_activation ? z2 : sigmoid(z2);
    return {std::move(hidden), std::move(recon)};
}

double kl_bernoulli(double p, double p_hat) {
    p_hat = std::min(1.0 - kRhoClamp, std::max(kRhoClamp, p_hat));
    double kl = 0.0;
    if (p > 0.0) kl += p * std::log(p / p_hat);
    if (p < 1.0) kl += (1.0 - p) * std::log((1.0 - p) / (1.0 - p_hat));
    return kl;
}

Vector ae_pack(const AeParams& p, bool tied) {
    const Index nw1 = p.w1.size(), nb1 = p.b1.size(), nw2 = p.w2.size(), nb2 = p.b2.size();
    Vector flat(tied ? nw1 + nb1 + nb2 : nw1 + nb1 + nw2 + nb2);
    Index off = 0;
    flat.segment(off, nw1) = Eigen::Map<const Vector>(p.w1.data(), nw1);
    off += nw1;
    flat.segment(off, nb1) = p.b1;
    off += nb1;
    if (!tied) {
        flat.segment(off, nw2) = Eigen::Map<const Vector>(p.w2.data(), nw2);
        off += nw2;
    }
    flat.segment(off, nb2) = p.b2;
    return flat;
}

AeParams ae_unpack(const Vector& flat, Index n_visible, Index n_hidden, bool tied) {
    AeParams p;
    p.w1.resize(n_hidden, n_visible);
    p.w2.resize(n_visible, n_hidden);
    p.b1.resize(n_hidden);
    p.b2.resize(n_visible);
    Index off = 0;
    Eigen::Map<Vector>(p.w1.data(), p.w1.size()) = flat.segment(off, p.w1.size());
    off += p.w1.size();
    p.b1 = flat.segment(off, n_hidden);
    off += n_hidden;
    if (tied) {
        p.w2 = p.w1.transpose();
    } else {
        Eigen::Map<Vector>(p.w2.data(), p.w2.size()) = flat.segment(off, p.w2.size());
        off += p.w2.size();
    }
    p.b2 = flat.segment(off, n_visible);
    return p;
}

double ae_cost_grad(const AeParams& p, const Matrix& data, const AeHyper& h, Vector* grad) {
    const Index m = data.rows();
    if (m == 0) throw DataError("autoencoder cost on empty data");
    const double inv_m = 1.0 / static_cast<double>(m);
    const bool linear = h.linear_activation;

    const auto [hidden, recon] = ae_forward(p, data, linear);
    const Matrix diff = recon - data;

    double cost = 0.5 * inv_m * diff.squaredNorm();
    cost += 0.5 * h.lambda * (p.w1.squaredNorm() + p.w2.squaredNorm());

    Vector rho_hat = hidden.colwise().mean().transpose();
    Vector rho_clamped = rho_hat.cwiseMax(kRhoClamp).cwiseMin(1.0 - kRhoClamp);
    for (Index j = 0; j < rho_hat.size(); ++j) cost += h.beta * kl_bernoulli(h.rho, rho_hat(j));

    if (grad == nullptr) return cost;

    // delta2 = dJ/dZ2, delta1 = dJ/dZ1; the sparsity penalty feeds the hidden
    // deltas through d(rho_hat)/dH = 1/m.
    Matrix delta2 = inv_m * diff;
    if (!linear) delta2.array() *= recon.array() * (1.0 - recon.array());

    Vector sparse_grad(rho_hat.size());
    for (Index j = 0; j < rho_hat.size(); ++j) {
        const double rh = rho_clamped(j);
        sparse_grad(j) = h.beta * (-h.rho / rh + (1.0 - h.rho) / (1.0 - rh));
    }

    Matrix dj_dhidden = delta2 * p.w2;
    dj_dhidden.rowwise() += (inv_m * sparse_grad).transpose();
    Matrix delta1 = dj_dhidden;
    if (!linear) delta1.array() *= hidden.array() * (1.0 - hidden.array());

    Matrix gw1 = delta1.transpose() * data + h.lambda * p.w1;
    Vector gb1 = delta1.colwise().sum().transpose();
    Matrix gw2 = delta2.transpose() * hidden + h.lambda * p.w2;
    Vector gb2 = delta2.colwise().sum().transpose();

    AeParams g;
    if (h.tied_weights) {
        g.w1 = gw1 + gw2.transpose();
        g.w2 = Matrix::Zero(p.w2.rows(), p.w2.cols());
    } else {
        g.w1 = std::move(gw1);
        g.w2 = std::move(gw2);
    }
    g.b1 = std::move(gb1);
    g.b2 = std::move(gb2);
    *grad = ae_pack(g, h.tied_weights);
    return cost;
}

AeTrainResult ae_train(const Matrix& data, Index n_hidden, const AeHyper& h) {
    if (data.rows() < 1) throw DataError("autoencoder training needs at least 1 frame");
    if (h.lambda < 0 || h.beta < 0 || h.rho < 0 || h.rho >= 1 || h.epochs < 1)
        throw DataError("invalid autoencoder hyperparameters");

    const Index n_visible = data.cols();
    AeParams init = ae_init(n_visible, n_hidden, h.seed);
    if (h.tied_weights) init.w2 = init.w1.transpose();

    const auto objective = [&](const Vector& x, Vector& grad) {
        const AeParams p = ae_unpack(x, n_visible, n_hidden, h.tied_weights);
        return ae_cost_grad(p, data, h, &grad);
    };

    lbfgs::Options opts;
    opts.max_iterations = h.epochs;
    opts.memory = 10;
    opts.c1 = 1e-4;
    opts.c2 = 0.9;
    opts.grad_tol = 1e-8;
    opts.max_bisections = 20;

    AeTrainResult result;
    result.initial_cost = ae_cost_grad(init, data, h, nullptr);

    const auto sol = lbfgs::minimize(objective, ae_pack(init, h.tied_weights), opts);
    result.params = ae_unpack(sol.x, n_visible, n_hidden, h.tied_weights);
    result.final_cost = sol.f;
    result.iterations = sol.iterations;
    result.converged = sol.converged;
    result.line_search_failure = sol.line_search_failure;
    return result;
}

Matrix ae_encode(const AeParams& p, const Matrix& data, bool linear_activation) {
    return ae_forward(p, data, linear_activation).first;
}

}  // namespace mdred
