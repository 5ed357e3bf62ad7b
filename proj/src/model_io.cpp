#include "mdred/model_io.hpp"

#include "mdred/io.hpp"

namespace mdred {

namespace fs = std::filesystem;

Method parse_method(const std::string& name) {
    if (name == "none") return Method::None;
    if (name == "ktri") return Method::KTri;
    if (name == "pca") return Method::Pca;
    if (name == "tica") return Method::Tica;
    if (name == "ae") return Method::Ae;
    throw DataError("unknown method '" + name + "' (expected ktri|pca|tica|ae|none)");
}

std::string method_name(Method m) {
    switch (m) {
        case Method::None: return "none";
        case Method::KTri: return "ktri";
        case Method::Pca: return "pca";
        case Method::Tica: return "tica";
        case Method::Ae: return "ae";
    }
    return "?";
}

Index ProjectorModel::natural_dims() const {
    switch (method) {
        case Method::None: return 0;
        case Method::KTri: return ktri.centers.rows();
        case Method::Pca: return pca.components.cols();
        case Method::Tica: return tica.components.cols();
        case Method::Ae: return ae.n_hidden();
    }
    return 0;
}

Matrix ProjectorModel::transform(const Matrix& data, Index dims) const {
    switch (method) {
        case Method::None:
            return data;
        case Method::KTri: {
            Matrix full = ktri_transform(ktri, data);
            if (dims < 1 || dims > full.cols()) throw DataError("dims out of range for ktri model");
            return full.leftCols(dims);
        }
        case Method::Pca:
            return pca_transform(pca, data, dims);
        case Method::Tica:
            return tica_transform(tica, data, dims);
        case Method::Ae: {
            Matrix hidden = ae_encode(ae, data);
            if (dims < 1 || dims > hidden.cols()) throw DataError("dims out of range for ae model");
            return hidden.leftCols(dims);
        }
    }
    throw DataError("cannot transform with an unfitted model");
}

Matrix ProjectorModel::component_vectors() const {
    switch (method) {
        case Method::KTri: return ktri.centers.transpose();
        case Method::Pca: return pca.components;
        case Method::Tica: return tica.components;
        case Method::Ae: return ae.w1.transpose();
        case Method::None: break;
    }
    throw DataError("model has no component vectors");
}

namespace {

Matrix as_column(const Vector& v) {
    Matrix m(v.size(), 1);
    m.col(0) = v;
    return m;
}

Vector as_vector(const Matrix& m) {
    if (m.cols() != 1) throw DataError("expected a single-column matrix part");
    return m.col(0);
}

}  // namespace

void save_projector(const ProjectorModel& model, const fs::path& dir) {
    fs::create_directories(dir);
    io::KeyValues kv;
    kv.emplace_back("method", method_name(model.method));
    const auto part = [&](const std::string& name, const Matrix& m) {
        const std::string file = name + ".mdrx";
        io::write_matrix(m, dir / file, io::Dtype::F64);
        kv.emplace_back(name, file);
    };
    switch (model.method) {
        case Method::KTri:
            part("centers", model.ktri.centers);
            break;
        case Method::Pca:
            part("mean", as_column(model.pca.mean));
            part("components", model.pca.components);
            part("eigenvalues", as_column(model.pca.eigenvalues));
            break;
        case Method::Tica:
            kv.emplace_back("lag", std::to_string(model.tica.lag));
            part("mean", as_column(model.tica.mean));
            part("components", model.tica.components);
            part("eigenvalues", as_column(model.tica.eigenvalues));
            break;
        case Method::Ae:
            part("w1", model.ae.w1);
            part("b1", as_column(model.ae.b1));
            part("w2", model.ae.w2);
            part("b2", as_column(model.ae.b2));
            break;
        case Method::None:
            throw DataError("method 'none' has no model to save");
    }
    io::write_key_values(kv, dir / "model.txt");
}

ProjectorModel load_projector(const fs::path& dir) {
    const fs::path manifest = dir / "model.txt";
    const io::KeyValues kv = io::read_key_values(manifest);
    ProjectorModel model;
    model.method = parse_method(io::require_key(kv, "method", manifest));
    const auto part = [&](const std::string& name) {
        return io::read_matrix(dir / io::require_key(kv, name, manifest));
    };
    switch (model.method) {
        case Method::KTri:
            model.ktri.centers = part("centers");
            break;
        case Method::Pca:
            model.pca.mean = as_vector(part("mean"));
            model.pca.components = part("components");
            model.pca.eigenvalues = as_vector(part("eigenvalues"));
            break;
        case Method::Tica:
            model.tica.lag = std::stol(io::require_key(kv, "lag", manifest));
            model.tica.mean = as_vector(part("mean"));
            model.tica.components = part("components");
            model.tica.eigenvalues = as_vector(part("eigenvalues"));
            break;
        case Method::Ae:
            model.ae.w1 = part("w1");
            model.ae.b1 = as_vector(part("b1"));
            model.ae.w2 = part("w2");
            model.ae.b2 = as_vector(part("b2"));
            break;
        case Method::None:
            throw DataError(manifest.string() + ": method 'none' is not a stored model");
    }
    return model;
}

void save_cluster_model(const ClusterModel& model, const fs::path& dir) {
    fs::create_directories(dir);
    io::KeyValues kv;
    kv.emplace_back("method", "cluster");
    io::write_matrix(model.centers, dir / "centers.mdrx", io::Dtype::F64);
    kv.emplace_back("centers", "centers.mdrx");
    Matrix counts(static_cast<Index>(model.counts_per_center.size()), 1);
    for (Index i = 0; i < counts.rows(); ++i)
        counts(i, 0) = static_cast<double>(model.counts_per_center[static_cast<std::size_t>(i)]);
    io::write_matrix(counts, dir / "counts.mdrx", io::Dtype::F64);
    kv.emplace_back("counts", "counts.mdrx");
    io::write_key_values(kv, dir / "model.txt");
}

ClusterModel load_cluster_model(const fs::path& dir) {
    const fs::path manifest = dir / "model.txt";
    const io::KeyValues kv = io::read_key_values(manifest);
    if (io::require_key(kv, "method", manifest) != "cluster")
        throw DataError(manifest.string() + ": not a cluster model");
    ClusterModel model;
    model.centers = io::read_matrix(dir / io::require_key(kv, "centers", manifest));
    const Matrix counts = io::read_matrix(dir / io::require_key(kv, "counts", manifest));
    model.counts_per_center.resize(static_cast<std::size_t>(counts.rows()));
    for (Index i = 0; i < counts.rows(); ++i)
        model.counts_per_center[static_cast<std::size_t>(i)] = static_cast<long>(counts(i, 0));
    return model;
}

}  // namespace mdred
