#include "mdred/projectors.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "mdred/kmeans.hpp"

namespace mdred {

namespace {

// Largest-magnitude entry of each column made positive, for reproducible
// fixtures. Ties resolve to the first occurrence.
void fix_column_signs(Matrix& m) {
    for (Index j = 0; j < m.cols(); ++j) {
        Index arg = 0;
        double best = -1.0;
        for (Index i = 0; i < m.rows(); ++i) {
            const double a = std::fabs(m(i, j));
            if (a > best) {
                best = a;
                arg = i;
            }
        }
        if (m(arg, j) < 0) m.col(j) = -m.col(j);
    }
}

// Eigen returns ascending eigenvalues; reorder a (values, vectors) pair to
// descending by the given key.
template <typename Key>
void sort_descending(Vector& values, Matrix& vectors, Key key) {
    std::vector<Index> order(static_cast<std::size_t>(values.size()));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Index a, Index b) { return key(values(a)) > key(values(b)); });
    Vector v2(values.size());
    Matrix m2(vectors.rows(), vectors.cols());
    for (std::size_t i = 0; i < order.size(); ++i) {
        v2(static_cast<Index>(i)) = values(order[i]);
        m2.col(static_cast<Index>(i)) = vectors.col(order[i]);
    }
    values = v2;
    vectors = m2;
}

}  // namespace

KTriModel ktri_fit(const Matrix& data, int k, std::uint64_t seed) {
    if (k < 1) throw DataError("ktri needs k >= 1");
    if (data.rows() == 0) throw DataError("ktri_fit on empty data");
    const int batch = 1000;
    const auto model = minibatch_kmeans(data, k, batch, default_kmeans_iterations(k, batch), seed);
    return KTriModel{model.centers};
}

Matrix ktri_transform(const KTriModel& model, const Matrix& data) {
    if (data.cols() != model.centers.cols())
        throw DataError("ktri dimension mismatch: data has " + std::to_string(data.cols()) +
                        " features, centers have " + std::to_string(model.centers.cols()));
    const Index k = model.centers.rows();
    Matrix out(data.rows(), k);
    Vector z(k);
    for (Index f = 0; f < data.rows(); ++f) {
        for (Index c = 0; c < k; ++c) z(c) = (data.row(f) - model.centers.row(c)).norm();
        const double mu = z.mean();
        for (Index c = 0; c < k; ++c) out(f, c) = std::max(0.0, mu - z(c));
    }
    return out;
}

PcaModel pca_fit(const Matrix& data) {
    const Index m = data.rows();
    if (m < 2) throw DataError("PCA needs at least 2 frames");

    PcaModel model;
    model.mean = data.colwise().mean();
    const Matrix centered = data.rowwise() - model.mean.transpose();
    const Eigen::MatrixXd cov =
        (centered.transpose() * centered) / static_cast<double>(m - 1);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success) throw NumericalError("PCA eigendecomposition failed");

    Vector values = solver.eigenvalues();
    Matrix vectors = solver.eigenvectors();
    sort_descending(values, vectors, [](double v) { return v; });
    values = values.cwiseMax(0.0);
    fix_column_signs(vectors);

    model.components = std::move(vectors);
    model.eigenvalues = std::move(values);
    return model;
}

Matrix pca_transform(const PcaModel& model, const Matrix& data, Index dims) {
    if (dims < 1 || dims > model.components.cols())
        throw DataError("pca dims out of range: " + std::to_string(dims));
    if (data.cols() != model.components.rows())
        throw DataError("pca dimension mismatch");
    return (data.rowwise() - model.mean.transpose()) * model.components.leftCols(dims);
}

Matrix pca_inverse_transform(const PcaModel& model, const Matrix& projected) {
    if (projected.cols() > model.components.cols()) throw DataError("projection too wide");
    return (projected * model.components.leftCols(projected.cols()).transpose()).rowwise() +
           model.mean.transpose();
}

TicaModel tica_fit(const TrajectorySet& trajs, Index lag) {
    validate(trajs);
    if (lag < 1) throw DataError("tica lag must be >= 1");
    for (std::size_t i = 0; i < trajs.trajectories.size(); ++i)
        if (trajs.trajectories[i].rows() <= lag)
            throw DataError("trajectory " + std::to_string(i) + " has " +
                            std::to_string(trajs.trajectories[i].rows()) +
                            " frames, needs more than lag=" + std::to_string(lag));

    const Index d = trajs.n_cols();
    TicaModel model;
    model.lag = lag;

    Vector sum = Vector::Zero(d);
    for (const auto& t : trajs.trajectories) sum += t.colwise().sum().transpose();
    model.mean = sum / static_cast<double>(trajs.total_frames());

    Eigen::MatrixXd c0 = Eigen::MatrixXd::Zero(d, d);
    Eigen::MatrixXd ct = Eigen::MatrixXd::Zero(d, d);
    double n_pairs = 0;
    for (const auto& t : trajs.trajectories) {
        const Matrix centered = t.rowwise() - model.mean.transpose();
        c0.noalias() += centered.transpose() * centered;
        const Index head = t.rows() - lag;
        ct.noalias() += centered.topRows(head).transpose() * centered.bottomRows(head);
        n_pairs += static_cast<double>(head);
    }
    if (n_pairs <= 0) throw DataError("no time-lagged pairs at lag " + std::to_string(lag));
    ct = 0.5 * (ct + ct.transpose()).eval();
    c0 /= n_pairs;
    ct /= n_pairs;

    // Whiten on the numerically nonzero subspace of C0, then diagonalize the
    // projected lagged covariance there.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> c0_solver(c0);
    if (c0_solver.info() != Eigen::Success) throw NumericalError("tICA C0 decomposition failed");
    const Vector c0_vals = c0_solver.eigenvalues();
    const double threshold = 1e-10 * c0_vals.maxCoeff();
    if (!(threshold > 0)) throw NumericalError("tICA covariance has rank 0");

    std::vector<Index> keep;
    for (Index i = 0; i < d; ++i)
        if (c0_vals(i) > threshold) keep.push_back(i);
    const Index r = static_cast<Index>(keep.size());

    Eigen::MatrixXd whiten(d, r);
    for (Index j = 0; j < r; ++j)
        whiten.col(j) = c0_solver.eigenvectors().col(keep[static_cast<std::size_t>(j)]) /
                        std::sqrt(c0_vals(keep[static_cast<std::size_t>(j)]));

    const Eigen::MatrixXd projected = whiten.transpose() * ct * whiten;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
        0.5 * (projected + projected.transpose()));
    if (solver.info() != Eigen::Success) throw NumericalError("tICA eigendecomposition failed");

    Vector values = solver.eigenvalues();
    Matrix vectors = whiten * solver.eigenvectors();
    sort_descending(values, vectors, [](double v) { return v; });
    fix_column_signs(vectors);

    if ((values.array().abs() > 1.05).any()) model.conditioning_warning = true;
    model.eigenvalues = values.cwiseMax(-1.0).cwiseMin(1.0);
    model.components = std::move(vectors);
    return model;
}

Matrix tica_transform(const TicaModel& model, const Matrix& data, Index dims) {
    if (dims < 1 || dims > model.components.cols())
        throw DataError("tica dims out of range: " + std::to_string(dims) + " of rank " +
                        std::to_string(model.components.cols()));
    if (data.cols() != model.components.rows())
        throw DataError("tica dimension mismatch");
    return (data.rowwise() - model.mean.transpose()) * model.components.leftCols(dims);
}

Vector cumulative_fractions(const Vector& spectrum_weights) {
    if (spectrum_weights.size() == 0) throw DataError("empty spectrum");
    const double total = spectrum_weights.sum();
    if (total <= 0) throw DataError("all-zero spectrum");
    Vector fractions(spectrum_weights.size());
    double acc = 0;
    for (Index i = 0; i < spectrum_weights.size(); ++i) {
        acc += spectrum_weights(i);
        fractions(i) = acc / total;
    }
    return fractions;
}

Vector cumulative_variance(const PcaModel& model) {
    return cumulative_fractions(model.eigenvalues);
}

Vector cumulative_variance(const TicaModel& model) {
    return cumulative_fractions(model.eigenvalues.cwiseAbs());
}

Index dims_for_threshold(const Vector& fractions, double q) {
    for (Index i = 0; i < fractions.size(); ++i)
        if (fractions(i) >= q) return i + 1;
    return fractions.size();
}

}  // namespace mdred
