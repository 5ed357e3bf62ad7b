#include "mdred/featurize.hpp"

#include <cmath>
#include <fstream>

namespace mdred {

Index FrameCoordinates::n_protein() const {
    Index n = 0;
    for (auto r : roles) n += (r == PointRole::Protein);
    return n;
}

Index FrameCoordinates::n_ligand() const {
    return static_cast<Index>(roles.size()) - n_protein();
}

namespace {

Matrix select_points(const FrameCoordinates& frame, PointRole role) {
    Matrix out((role == PointRole::Protein) ? frame.n_protein() : frame.n_ligand(), 3);
    Index k = 0;
    for (Index i = 0; i < frame.positions.rows(); ++i)
        if (frame.roles[static_cast<std::size_t>(i)] == role) out.row(k++) = frame.positions.row(i);
    return out;
}

}  // namespace

Matrix pairwise_distances(const FrameCoordinates& frame) {
    if (!frame.positions.allFinite()) throw DataError("non-finite coordinates");
    if (frame.positions.rows() != static_cast<Index>(frame.roles.size()))
        throw DataError("coordinate/role count mismatch");
    const Matrix pts = select_points(frame, PointRole::Protein);
    const Index n = pts.rows();
    if (n < 2) throw DataError("pairwise distances need at least 2 protein points");

    Matrix d = Matrix::Zero(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = i + 1; j < n; ++j) {
            const double dist = (pts.row(i) - pts.row(j)).norm();
            d(i, j) = dist;
            d(j, i) = dist;
        }
    return d;
}

Vector contact_vector(const Matrix& distances, const ContactConfig& cfg) {
    if (distances.rows() != distances.cols()) throw DataError("distance matrix must be square");
    const Index n = distances.rows();
    Vector v(n * (n - 1) / 2);
    Index k = 0;
    for (Index i = 0; i < n; ++i)
        for (Index j = i + 1; j < n; ++j)
            v(k++) = (distances(i, j) < cfg.cutoff) ? 1.0 : 0.0;
    return v;
}

Vector ligand_contact_vector(const FrameCoordinates& frame, const ContactConfig& cfg) {
    if (!frame.positions.allFinite()) throw DataError("non-finite coordinates");
    const Matrix lig = select_points(frame, PointRole::Ligand);
    const Matrix prot = select_points(frame, PointRole::Protein);
    if (lig.rows() < 1) throw DataError("ligand mode requires at least one ligand point");
    if (prot.rows() < 1) throw DataError("ligand mode requires at least one protein point");

    Vector v(lig.rows() * prot.rows());
    for (Index a = 0; a < lig.rows(); ++a)
        for (Index r = 0; r < prot.rows(); ++r)
            v(a * prot.rows() + r) = ((lig.row(a) - prot.row(r)).norm() < cfg.cutoff) ? 1.0 : 0.0;
    return v;
}

FrameCoordinates unpack_frame(const Matrix& traj, Index frame, const std::vector<PointRole>& roles) {
    const Index n_points = static_cast<Index>(roles.size());
    if (traj.cols() != 3 * n_points)
        throw DataError("coordinate matrix has " + std::to_string(traj.cols()) +
                        " columns, expected 3*" + std::to_string(n_points));
    FrameCoordinates fc;
    fc.positions.resize(n_points, 3);
    for (Index p = 0; p < n_points; ++p)
        for (Index c = 0; c < 3; ++c) fc.positions(p, c) = traj(frame, 3 * p + c);
    fc.roles = roles;
    return fc;
}

TrajectorySet featurize_trajectory_set(const TrajectorySet& raw,
                                       const std::vector<PointRole>& roles,
                                       const ContactConfig& cfg) {
    validate(raw);
    if (raw.n_cols() != 3 * static_cast<Index>(roles.size()))
        throw DataError("inconsistent frame shape: " + std::to_string(raw.n_cols()) +
                        " columns for " + std::to_string(roles.size()) + " labeled points");

    TrajectorySet out;
    out.frame_interval = raw.frame_interval;
    for (const auto& traj : raw.trajectories) {
        Matrix feats;
        for (Index f = 0; f < traj.rows(); ++f) {
            const FrameCoordinates fc = unpack_frame(traj, f, roles);
            Vector v;
            if (cfg.mode == ContactMode::ProteinProtein)
                v = contact_vector(pairwise_distances(fc), cfg);
            else
                v = ligand_contact_vector(fc, cfg);
            if (feats.size() == 0) feats.resize(traj.rows(), v.size());
            feats.row(f) = v.transpose();
        }
        out.trajectories.push_back(std::move(feats));
    }
    return out;
}

Vector flatten_upper_triangle(const Matrix& sym) {
    if (sym.rows() != sym.cols()) throw DataError("matrix must be square to flatten");
    const Index n = sym.rows();
    Vector v(n * (n - 1) / 2);
    Index k = 0;
    for (Index i = 0; i < n; ++i)
        for (Index j = i + 1; j < n; ++j) v(k++) = sym(i, j);
    return v;
}

Matrix fold_upper_triangle(const Vector& vec, Index n_res) {
    if (vec.size() != n_res * (n_res - 1) / 2)
        throw DataError("vector length " + std::to_string(vec.size()) +
                        " does not match n_res=" + std::to_string(n_res) + " (expected " +
                        std::to_string(n_res * (n_res - 1) / 2) + ")");
    Matrix m = Matrix::Zero(n_res, n_res);
    Index k = 0;
    for (Index i = 0; i < n_res; ++i)
        for (Index j = i + 1; j < n_res; ++j) {
            m(i, j) = vec(k);
            m(j, i) = vec(k);
            ++k;
        }
    return m;
}

std::vector<PointRole> read_roles(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open roles file " + path.string());
    std::vector<PointRole> roles;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line == "P")
            roles.push_back(PointRole::Protein);
        else if (line == "L")
            roles.push_back(PointRole::Ligand);
        else
            throw DataError(path.string() + ": role must be 'P' or 'L', got '" + line + "'");
    }
    if (roles.empty()) throw DataError(path.string() + ": no roles listed");
    return roles;
}

void write_roles(const std::vector<PointRole>& roles, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open " + path.string() + " for writing");
    for (auto r : roles) out << (r == PointRole::Protein ? "P" : "L") << '\n';
}

}  // namespace mdred
