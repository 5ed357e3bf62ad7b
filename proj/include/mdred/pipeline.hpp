#pragma once

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "mdred/autoencoder.hpp"
#include "mdred/matrix.hpp"
#include "mdred/model_io.hpp"
#include "mdred/msm.hpp"

namespace mdred {

// Everything one bootstrapped timescale run needs. Seeds for replicate i are
// split off `seed` with the documented xor rule; `threads` only schedules
// independent replicates and never changes any output byte.
struct RunConfig {
    Method method = Method::Pca;
    int dims = 2;
    std::vector<int> lags;
    int n_clusters = 1000;
    double bootstrap_fraction = 1.0;
    int n_bootstrap = 20;
    std::uint64_t seed = 0;
    int n_timescales = 1;
    double frame_interval = 1.0;
    int threads = 1;

    Index tica_lag = 1;
    AeHyper ae;
    int kmeans_batch = 1000;
    int kmeans_iterations = 0;  // 0 = default_kmeans_iterations rule
};

void validate(const RunConfig& cfg);

// Canonical key=value rendering of the run parameters (threads excluded) and
// its FNV-1a hash; every output row carries the hash.
std::string canonical_config(const RunConfig& cfg);
std::string config_hash(const RunConfig& cfg);

// Draws ceil(fraction * n_traj) whole trajectories with replacement. The
// trajectory is the resampling unit so within-trajectory time correlation
// survives.
TrajectorySet bootstrap_sample(const TrajectorySet& trajs, double fraction, std::uint64_t seed);

// Fits the configured method on `data`; seed feeds ktri/ae. A non-fatal
// diagnostic (tICA conditioning, autoencoder line-search stop) is appended to
// *warning when provided.
ProjectorModel fit_projector(const TrajectorySet& data, const RunConfig& cfg, std::uint64_t seed,
                             std::string* warning = nullptr);

// Per-trajectory transform (method none passes data through).
TrajectorySet project_set(const ProjectorModel& model, const TrajectorySet& data, Index dims);

struct ReplicateOutcome {
    int replicate = 0;
    std::uint64_t seed = 0;
    bool ok = false;
    std::string error;
};

struct BootstrapRun {
    TimescaleTable table;  // entries keyed by (lag, replicate)
    std::vector<ReplicateOutcome> outcomes;
    std::string hash;
};

// The full protocol: per replicate, bootstrap -> fit projector on the sample
// -> project -> fresh mini-batch k-means -> MSM per lag -> record timescales.
// Replicate failures are recorded, not fatal.
BootstrapRun run_its_bootstrap(const TrajectorySet& features, const RunConfig& cfg);

// run_its_bootstrap for each dims value; cells are independent and keyed.
std::vector<std::pair<int, BootstrapRun>> dimension_scan(const TrajectorySet& features,
                                                         const RunConfig& base,
                                                         const std::vector<int>& dims_list);

// A contact-space component folded back to a symmetric n_res x n_res map.
struct ComponentImage {
    Index n_res = 0;
    Matrix matrix;  // symmetric, zero diagonal
};

ComponentImage fold_component(const Vector& vec, Index n_res);

// Plain-text P3 pixmap with a diverging scale anchored at max |entry|:
// +max -> red (255,0,0), 0 -> white, -max -> blue (0,0,255); round half up.
// The raw matrix is written next to it with the extension replaced by .csv.
void export_component_image(const ComponentImage& img, const std::filesystem::path& path);

struct FrameRef {
    int traj = 0;
    long frame = 0;
};

// Global argmax/argmin of projection column `dim`; ties resolve to the lowest
// (trajectory, frame) pair.
std::pair<FrameRef, FrameRef> extreme_frames(const TrajectorySet& projected, Index dim);

// CSV writers; all floats use 17 significant digits so identical runs are
// byte-identical.
void write_replicates_csv(const BootstrapRun& run, std::ostream& out, int dims = -1);
void write_summary_csv(const BootstrapRun& run, std::ostream& out, int dims = -1);
void write_its_csv(const TimescaleTable& table, std::ostream& out);

}  // namespace mdred
