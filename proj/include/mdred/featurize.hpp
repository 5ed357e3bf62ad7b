#pragma once

#include <filesystem>
#include <vector>

#include "mdred/matrix.hpp"

namespace mdred {

enum class PointRole { Protein, Ligand };

// Reference points of one frame: Cartesian coordinates in Angstrom, one row
// per point, with a role per point (Calpha of a residue, or a ligand atom).
struct FrameCoordinates {
    Matrix positions;  // n_points x 3
    std::vector<PointRole> roles;

    Index n_protein() const;
    Index n_ligand() const;
};

enum class ContactMode { ProteinProtein, ProteinLigand };

struct ContactConfig {
    double cutoff = 8.0;  // Angstrom; a pair is in contact when distance < cutoff
    ContactMode mode = ContactMode::ProteinProtein;
};

// Symmetric n_res x n_res Euclidean distance matrix over the protein points.
Matrix pairwise_distances(const FrameCoordinates& frame);

// Upper triangle of a thresholded distance matrix, row-major (0,1), (0,2),
// ..., (0,n-1), (1,2), ...; entry 1 iff distance < cutoff. Length n(n-1)/2.
Vector contact_vector(const Matrix& distances, const ContactConfig& cfg);

// Ligand-protein contacts: entry a*n_res + r is 1 iff ligand point a is
// within cutoff of residue r. Length n_lig * n_res.
Vector ligand_contact_vector(const FrameCoordinates& frame, const ContactConfig& cfg);

// Featurizes every frame of every trajectory. Rows of `raw` are frames with
// 3*n_points interleaved columns (x0,y0,z0,x1,...); `roles` labels the points.
TrajectorySet featurize_trajectory_set(const TrajectorySet& raw,
                                       const std::vector<PointRole>& roles,
                                       const ContactConfig& cfg);

FrameCoordinates unpack_frame(const Matrix& traj, Index frame,
                              const std::vector<PointRole>& roles);

// Row-major upper-triangle flattening and its inverse (zero diagonal,
// mirrored). The same ordering is used everywhere a contact vector is folded
// back into an n_res x n_res map.
Vector flatten_upper_triangle(const Matrix& sym);
Matrix fold_upper_triangle(const Vector& vec, Index n_res);

// Reads/writes the point-role sidecar: one 'P' or 'L' per line.
std::vector<PointRole> read_roles(const std::filesystem::path& path);
void write_roles(const std::vector<PointRole>& roles, const std::filesystem::path& path);

}  // namespace mdred
