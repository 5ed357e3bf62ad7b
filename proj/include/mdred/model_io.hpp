#pragma once

#include <filesystem>
#include <string>

#include "mdred/autoencoder.hpp"
#include "mdred/kmeans.hpp"
#include "mdred/projectors.hpp"

namespace mdred {

enum class Method { None, KTri, Pca, Tica, Ae };

Method parse_method(const std::string& name);
std::string method_name(Method m);

// One fitted reduction method behind a single transform interface.
struct ProjectorModel {
    Method method = Method::None;
    KTriModel ktri;
    PcaModel pca;
    TicaModel tica;
    AeParams ae;

    // Width of the full projection (K, n_features, retained rank, n_hidden).
    Index natural_dims() const;

    // First `dims` coordinates of the method's projection.
    Matrix transform(const Matrix& data, Index dims) const;

    // Feature-space vectors to visualize, one per column: cluster centers,
    // principal components, independent components, or encoder weights.
    Matrix component_vectors() const;
};

// On disk a model is a directory of MDRX parts plus model.txt naming them
// (mean=..., components=..., eigenvalues=..., centers=...) along with scalar
// keys such as method and lag.
void save_projector(const ProjectorModel& model, const std::filesystem::path& dir);
ProjectorModel load_projector(const std::filesystem::path& dir);

void save_cluster_model(const ClusterModel& model, const std::filesystem::path& dir);
ClusterModel load_cluster_model(const std::filesystem::path& dir);

}  // namespace mdred
