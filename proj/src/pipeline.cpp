#include "mdred/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "mdred/featurize.hpp"
#include "mdred/io.hpp"
#include "mdred/parallel.hpp"
#include "mdred/projectors.hpp"
#include "mdred/rng.hpp"

namespace mdred {

namespace {

// Sub-stream tags inside one replicate.
enum Stage : std::uint64_t { kStageBootstrap = 0, kStageFit = 1, kStageCluster = 2 };

}  // namespace

void validate(const RunConfig& cfg) {
    if (cfg.method != Method::None && cfg.dims < 1) throw DataError("dims must be >= 1");
    if (cfg.lags.empty()) throw DataError("lag list is empty");
    for (const int lag : cfg.lags)
        if (lag < 1) throw DataError("lags must be >= 1");
    if (cfg.n_clusters < 1) throw DataError("n_clusters must be >= 1");
    if (!(cfg.bootstrap_fraction > 0.0) || cfg.bootstrap_fraction > 1.0)
        throw DataError("bootstrap fraction must lie in (0, 1]");
    if (cfg.n_bootstrap < 1) throw DataError("n_bootstrap must be >= 1");
    if (cfg.n_timescales < 1) throw DataError("n_timescales must be >= 1");
    if (!(cfg.frame_interval > 0)) throw DataError("frame_interval must be positive");
    if (cfg.method == Method::Tica && cfg.tica_lag < 1) throw DataError("tica lag must be >= 1");
    if (cfg.kmeans_batch < 1) throw DataError("kmeans batch size must be >= 1");
    if (cfg.kmeans_iterations < 0) throw DataError("kmeans iterations must be >= 0");
}

std::string canonical_config(const RunConfig& cfg) {
    std::string s;
    const auto add = [&](const std::string& k, const std::string& v) { s += k + "=" + v + "\n"; };
    add("method", method_name(cfg.method));
    add("dims", std::to_string(cfg.dims));
    std::string lags;
    for (std::size_t i = 0; i < cfg.lags.size(); ++i)
        lags += (i ? "," : "") + std::to_string(cfg.lags[i]);
    add("lags", lags);
    add("n_clusters", std::to_string(cfg.n_clusters));
    add("bootstrap_fraction", io::format_full(cfg.bootstrap_fraction));
    add("n_bootstrap", std::to_string(cfg.n_bootstrap));
    add("seed", std::to_string(cfg.seed));
    add("n_timescales", std::to_string(cfg.n_timescales));
    add("frame_interval", io::format_full(cfg.frame_interval));
    add("tica_lag", std::to_string(cfg.tica_lag));
    add("ae_lambda", io::format_full(cfg.ae.lambda));
    add("ae_rho", io::format_full(cfg.ae.rho));
    add("ae_beta", io::format_full(cfg.ae.beta));
    add("ae_epochs", std::to_string(cfg.ae.epochs));
    add("kmeans_batch", std::to_string(cfg.kmeans_batch));
    add("kmeans_iterations", std::to_string(cfg.kmeans_iterations));
    return s;
}

std::string config_hash(const RunConfig& cfg) {
    // FNV-1a, 64 bit.
    std::uint64_t h = 14695981039346656037ULL;
    for (const unsigned char c : canonical_config(cfg)) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

TrajectorySet bootstrap_sample(const TrajectorySet& trajs, double fraction, std::uint64_t seed) {
    validate(trajs);
    if (!(fraction > 0.0) || fraction > 1.0) throw DataError("fraction must lie in (0, 1]");
    const std::size_t n = trajs.trajectories.size();
    const auto draw_count =
        static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n)));
    Rng rng(seed);
    TrajectorySet out;
    out.frame_interval = trajs.frame_interval;
    out.trajectories.reserve(draw_count);
    for (std::size_t i = 0; i < draw_count; ++i)
        out.trajectories.push_back(trajs.trajectories[rng.uniform_below(n)]);
    return out;
}

ProjectorModel fit_projector(const TrajectorySet& data, const RunConfig& cfg, std::uint64_t seed,
                             std::string* warning) {
    ProjectorModel model;
    model.method = cfg.method;
    switch (cfg.method) {
        case Method::None:
            break;
        case Method::KTri:
            model.ktri = ktri_fit(data.stacked(), cfg.dims, seed);
            break;
        case Method::Pca:
            model.pca = pca_fit(data.stacked());
            break;
        case Method::Tica:
            model.tica = tica_fit(data, cfg.tica_lag);
            if (model.tica.conditioning_warning && warning)
                *warning += "tICA eigenvalues exceeded +-1.05 before clipping "
                            "(ill-conditioned covariance)\n";
            break;
        case Method::Ae: {
            AeHyper h = cfg.ae;
            h.seed = seed;
            const AeTrainResult result = ae_train(data.stacked(), cfg.dims, h);
            model.ae = result.params;
            if (result.line_search_failure && warning)
                *warning += "autoencoder line search stalled; returned the best iterate after " +
                            std::to_string(result.iterations) + " iterations\n";
            break;
        }
    }
    return model;
}

TrajectorySet project_set(const ProjectorModel& model, const TrajectorySet& data, Index dims) {
    if (model.method == Method::None) return data;
    TrajectorySet out;
    out.frame_interval = data.frame_interval;
    for (const auto& t : data.trajectories) out.trajectories.push_back(model.transform(t, dims));
    return out;
}

namespace {

TimescaleTable replicate_timescales(const TrajectorySet& features, const RunConfig& cfg,
                                    int replicate, std::uint64_t rep_seed) {
    const TrajectorySet sample = bootstrap_sample(features, cfg.bootstrap_fraction,
                                                  derive_stage_seed(rep_seed, kStageBootstrap));
    const ProjectorModel projector =
        fit_projector(sample, cfg, derive_stage_seed(rep_seed, kStageFit));
    const TrajectorySet projected = project_set(projector, sample, cfg.dims);

    const int iterations = cfg.kmeans_iterations > 0
                               ? cfg.kmeans_iterations
                               : default_kmeans_iterations(cfg.n_clusters, cfg.kmeans_batch);
    const ClusterModel clusters =
        minibatch_kmeans(projected.stacked(), cfg.n_clusters, cfg.kmeans_batch, iterations,
                         derive_stage_seed(rep_seed, kStageCluster));
    const DiscreteTrajectorySet dtrajs = assign(clusters, projected);

    TimescaleTable table = its_scan(dtrajs, cfg.lags, cfg.n_timescales, cfg.frame_interval);
    for (auto& e : table.entries) e.replicate = replicate;
    return table;
}

}  // namespace

BootstrapRun run_its_bootstrap(const TrajectorySet& features, const RunConfig& cfg) {
    validate(cfg);
    validate(features);

    BootstrapRun run;
    run.hash = config_hash(cfg);
    run.table.frame_interval = cfg.frame_interval;
    run.outcomes.resize(static_cast<std::size_t>(cfg.n_bootstrap));

    std::vector<TimescaleTable> tables(static_cast<std::size_t>(cfg.n_bootstrap));
    parallel_for(static_cast<std::size_t>(cfg.n_bootstrap), cfg.threads, [&](std::size_t r) {
        const std::uint64_t rep_seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(r));
        auto& outcome = run.outcomes[r];
        outcome.replicate = static_cast<int>(r);
        outcome.seed = rep_seed;
        try {
            tables[r] = replicate_timescales(features, cfg, static_cast<int>(r), rep_seed);
            outcome.ok = true;
        } catch (const std::exception& ex) {
            outcome.ok = false;
            outcome.error = ex.what();
        }
    });

    for (std::size_t r = 0; r < tables.size(); ++r)
        for (const auto& e : tables[r].entries) run.table.entries.push_back(e);
    summarize_timescales(run.table);
    return run;
}

std::vector<std::pair<int, BootstrapRun>> dimension_scan(const TrajectorySet& features,
                                                         const RunConfig& base,
                                                         const std::vector<int>& dims_list) {
    if (dims_list.empty()) throw DataError("empty dims list");
    std::vector<std::pair<int, BootstrapRun>> cells;
    for (const int dims : dims_list) {
        RunConfig cfg = base;
        cfg.dims = dims;
        cells.emplace_back(dims, run_its_bootstrap(features, cfg));
    }
    return cells;
}

ComponentImage fold_component(const Vector& vec, Index n_res) {
    return ComponentImage{n_res, fold_upper_triangle(vec, n_res)};
}

void export_component_image(const ComponentImage& img, const std::filesystem::path& path) {
    if (!img.matrix.allFinite()) throw DataError("component image has non-finite entries");
    const double scale = img.matrix.cwiseAbs().maxCoeff();
    const auto channel = [](double x) {  // round half up
        return static_cast<int>(std::floor(x + 0.5));
    };

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open " + path.string() + " for writing");
    out << "P3\n" << img.matrix.cols() << ' ' << img.matrix.rows() << "\n255\n";
    for (Index i = 0; i < img.matrix.rows(); ++i) {
        for (Index j = 0; j < img.matrix.cols(); ++j) {
            int r = 255, g = 255, b = 255;
            if (scale > 0) {
                const double t = img.matrix(i, j) / scale;
                if (t >= 0) {
                    g = b = channel(255.0 * (1.0 - t));
                } else {
                    r = g = channel(255.0 * (1.0 + t));
                }
            }
            out << r << ' ' << g << ' ' << b << (j + 1 < img.matrix.cols() ? ' ' : '\n');
        }
    }
    if (!out) throw DataError("write failed for " + path.string());

    std::filesystem::path csv = path;
    csv.replace_extension(".csv");
    io::write_csv_matrix(img.matrix, csv);
}

std::pair<FrameRef, FrameRef> extreme_frames(const TrajectorySet& projected, Index dim) {
    validate(projected);
    if (dim < 0 || dim >= projected.n_cols())
        throw DataError("dimension " + std::to_string(dim) + " out of range");

    FrameRef max_ref, min_ref;
    double max_v = -std::numeric_limits<double>::infinity();
    double min_v = std::numeric_limits<double>::infinity();
    for (std::size_t ti = 0; ti < projected.trajectories.size(); ++ti) {
        const auto& t = projected.trajectories[ti];
        for (Index f = 0; f < t.rows(); ++f) {
            const double v = t(f, dim);
            if (v > max_v) {
                max_v = v;
                max_ref = {static_cast<int>(ti), static_cast<long>(f)};
            }
            if (v < min_v) {
                min_v = v;
                min_ref = {static_cast<int>(ti), static_cast<long>(f)};
            }
        }
    }
    return {max_ref, min_ref};
}

namespace {

std::uint64_t replicate_seed_of(const BootstrapRun& run, int replicate) {
    for (const auto& o : run.outcomes)
        if (o.replicate == replicate) return o.seed;
    return 0;
}

std::string flag_to_string(bool converged) { return converged ? "1" : "0"; }

std::string value_or_nan(double v) {
    return std::isnan(v) ? "nan" : io::format_full(v);
}

}  // namespace

void write_replicates_csv(const BootstrapRun& run, std::ostream& out, int dims) {
    out << "# slowest implied timescales per (lag, bootstrap replicate)\n";
    if (dims >= 0) out << "dims,";
    out << "lag_frames,lag_physical,replicate,timescale_index,timescale_physical,"
           "converged_flag,replicate_seed,config_hash\n";
    for (const auto& e : run.table.entries) {
        if (dims >= 0) out << dims << ',';
        out << e.lag << ',' << io::format_full(e.lag_physical) << ',' << e.replicate << ','
            << e.timescale_index << ',' << value_or_nan(e.value_physical) << ','
            << flag_to_string(e.converged) << ',' << replicate_seed_of(run, e.replicate) << ','
            << run.hash << '\n';
    }
}

void write_summary_csv(const BootstrapRun& run, std::ostream& out, int dims) {
    out << "# per-lag mean and sample standard deviation (ddof=1) of the slowest "
           "timescale over bootstrap replicates\n";
    if (dims >= 0) out << "dims,";
    out << "lag_frames,lag_physical,n_success,t2_mean_physical,t2_std_physical,config_hash\n";
    for (const auto& s : run.table.summary) {
        if (dims >= 0) out << dims << ',';
        out << s.lag << ',' << io::format_full(s.lag_physical) << ',' << s.n_success << ','
            << value_or_nan(s.t2_mean_physical) << ',' << value_or_nan(s.t2_std_physical) << ','
            << run.hash << '\n';
    }
}

void write_its_csv(const TimescaleTable& table, std::ostream& out) {
    out << "lag_frames,lag_physical,replicate,timescale_index,timescale_physical,converged_flag\n";
    for (const auto& e : table.entries) {
        out << e.lag << ',' << io::format_full(e.lag_physical) << ',' << e.replicate << ','
            << e.timescale_index << ',' << value_or_nan(e.value_physical) << ','
            << flag_to_string(e.converged) << '\n';
    }
}

}  // namespace mdred
