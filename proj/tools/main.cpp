// mdred: contact-map featurization, dimensionality reduction, and Markov
// state model timescale analysis for trajectory data.

#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "mdred/featurize.hpp"
#include "mdred/io.hpp"
#include "mdred/model_io.hpp"
#include "mdred/msm.hpp"
#include "mdred/pipeline.hpp"
#include "mdred/projectors.hpp"
#include "mdred/synth.hpp"

namespace fs = std::filesystem;
using namespace mdred;

namespace {

int infer_n_res(Index vec_len) {
    // L = n(n-1)/2  ->  n = (1 + sqrt(1 + 8L)) / 2
    const double n = (1.0 + std::sqrt(1.0 + 8.0 * static_cast<double>(vec_len))) / 2.0;
    const auto rounded = static_cast<Index>(n + 0.5);
    if (rounded * (rounded - 1) / 2 != vec_len)
        throw DataError("component length " + std::to_string(vec_len) +
                        " is not n*(n-1)/2 for any n; pass --n-res explicitly");
    return static_cast<int>(rounded);
}

struct GlobalOpts {
    std::uint64_t seed = 0;
    int threads = 1;
};

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open " + path.string() + " for writing");
    out << text;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Trajectory dimensionality reduction and MSM timescale analysis"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "Key=value config file; command-line flags take precedence");

    GlobalOpts global;
    app.add_option("--seed", global.seed, "Base RNG seed");
    app.add_option("--threads", global.threads, "Worker threads for independent tasks");

    // featurize
    auto* cmd_feat = app.add_subcommand("featurize", "Coordinates to binary contact vectors");
    std::string feat_mode = "protein";
    ContactConfig feat_cfg;
    std::string feat_in, feat_out;
    cmd_feat->add_option("--mode", feat_mode, "protein or ligand")
        ->check(CLI::IsMember({"protein", "ligand"}));
    cmd_feat->add_option("--cutoff", feat_cfg.cutoff, "Contact cutoff in Angstrom")
        ->check(CLI::PositiveNumber);
    cmd_feat->add_option("--in", feat_in, "Coordinate trajectory directory")->required();
    cmd_feat->add_option("--out", feat_out, "Output feature directory")->required();

    // synth
    auto* cmd_synth = app.add_subcommand("synth", "Generate synthetic benchmark data");
    auto* cmd_synth_hmm = cmd_synth->add_subcommand("hmm", "Hidden Markov chain with Bernoulli emissions");
    auto* cmd_synth_ar1 = cmd_synth->add_subcommand("ar1", "Rotated diagonal AR(1) process");
    cmd_synth->require_subcommand(1);
    std::string synth_spec, synth_out, synth_hidden_out;
    for (auto* c : {cmd_synth_hmm, cmd_synth_ar1}) {
        c->add_option("--spec", synth_spec, "Spec file (key=value plus MDRX parts)")->required();
        c->add_option("--out", synth_out, "Output trajectory directory")->required();
    }
    cmd_synth_hmm->add_option("--hidden-out", synth_hidden_out,
                              "Optional directory for the hidden state sequences");

    // fit
    auto* cmd_fit = app.add_subcommand("fit", "Fit a projection model");
    std::string fit_method, fit_in, fit_model;
    int fit_dims = 2;
    long fit_lag = 1;
    AeHyper fit_ae;
    cmd_fit->add_option("--method", fit_method, "ktri|pca|tica|ae")->required();
    cmd_fit->add_option("--dims", fit_dims, "Projection width (ktri K, ae hidden units)");
    cmd_fit->add_option("--lag", fit_lag, "tICA lag in frames (required for tica)");
    cmd_fit->add_option("--epochs", fit_ae.epochs, "ae: L-BFGS iterations");
    cmd_fit->add_option("--lambda", fit_ae.lambda, "ae: weight decay");
    cmd_fit->add_option("--beta", fit_ae.beta, "ae: sparsity penalty weight");
    cmd_fit->add_option("--rho", fit_ae.rho, "ae: target sparsity");
    cmd_fit->add_option("--in", fit_in, "Feature trajectory directory")->required();
    cmd_fit->add_option("--model", fit_model, "Output model directory")->required();

    // project
    auto* cmd_proj = app.add_subcommand("project", "Apply a fitted model");
    std::string proj_model, proj_in, proj_out;
    int proj_dims = 0;
    cmd_proj->add_option("--model", proj_model, "Model directory")->required();
    cmd_proj->add_option("--dims", proj_dims, "Projection width (default: model width)");
    cmd_proj->add_option("--in", proj_in, "Feature trajectory directory")->required();
    cmd_proj->add_option("--out", proj_out, "Output projected directory")->required();

    // cluster
    auto* cmd_cluster = app.add_subcommand("cluster", "Mini-batch k-means microstates");
    std::string cluster_in, cluster_model, cluster_out;
    int cluster_k = 1000, cluster_batch = 1000, cluster_iters = 0;
    cmd_cluster->add_option("--k", cluster_k, "Number of microstates");
    cmd_cluster->add_option("--batch", cluster_batch, "Mini-batch size");
    cmd_cluster->add_option("--iterations", cluster_iters, "Mini-batch iterations (0 = default)");
    cmd_cluster->add_option("--in", cluster_in, "Projected trajectory directory")->required();
    cmd_cluster->add_option("--model", cluster_model, "Output cluster model directory")->required();
    cmd_cluster->add_option("--out", cluster_out, "Output discrete trajectory directory")->required();

    // msm
    auto* cmd_msm = app.add_subcommand("msm", "Implied timescales from discrete trajectories");
    std::vector<int> msm_lags = {1};
    std::string msm_in, msm_out;
    int msm_k = 1;
    double msm_tol = 1e-10, msm_interval = 1.0;
    cmd_msm->add_option("--lags", msm_lags, "Comma-separated lag times in frames")
        ->delimiter(',');
    cmd_msm->add_option("--k", msm_k, "Number of timescales per lag");
    cmd_msm->add_option("--tol", msm_tol, "Reversible estimator tolerance");
    cmd_msm->add_option("--frame-interval", msm_interval, "Physical time per frame");
    cmd_msm->add_option("--in", msm_in, "Discrete trajectory directory")->required();
    cmd_msm->add_option("--out", msm_out, "Output CSV path")->required();

    // bootstrap-its / dim-scan share most options
    RunConfig run_cfg;
    std::string run_method = "pca", run_in, run_out;
    std::vector<int> run_lags = {1}, run_dims_list = {2};
    auto add_run_options = [&](CLI::App* c, bool with_dims) {
        c->add_option("--method", run_method, "ktri|pca|tica|ae|none");
        if (with_dims) c->add_option("--dims", run_cfg.dims, "Projection width");
        c->add_option("--lags", run_lags, "Comma-separated lag times in frames")->delimiter(',');
        c->add_option("--clusters", run_cfg.n_clusters, "Microstate count");
        c->add_option("--fraction", run_cfg.bootstrap_fraction, "Bootstrap fraction of trajectories");
        c->add_option("--replicates", run_cfg.n_bootstrap, "Bootstrap replicates");
        c->add_option("--timescales", run_cfg.n_timescales, "Timescales recorded per lag");
        c->add_option("--frame-interval", run_cfg.frame_interval, "Physical time per frame");
        c->add_option("--tica-lag", run_cfg.tica_lag, "tICA fitting lag in frames");
        c->add_option("--epochs", run_cfg.ae.epochs, "ae: L-BFGS iterations");
        c->add_option("--lambda", run_cfg.ae.lambda, "ae: weight decay");
        c->add_option("--beta", run_cfg.ae.beta, "ae: sparsity penalty weight");
        c->add_option("--rho", run_cfg.ae.rho, "ae: target sparsity");
        c->add_option("--kmeans-batch", run_cfg.kmeans_batch, "Mini-batch size");
        c->add_option("--kmeans-iterations", run_cfg.kmeans_iterations,
                      "Mini-batch iterations (0 = default)");
        c->add_option("--in", run_in, "Feature trajectory directory")->required();
        c->add_option("--out", run_out, "Output directory")->required();
    };
    auto* cmd_boot = app.add_subcommand("bootstrap-its", "Bootstrapped implied-timescale analysis");
    add_run_options(cmd_boot, true);
    auto* cmd_dscan = app.add_subcommand("dim-scan", "bootstrap-its over a grid of dimensions");
    add_run_options(cmd_dscan, false);
    cmd_dscan->add_option("--dims-list", run_dims_list, "Comma-separated projection widths")
        ->delimiter(',');

    // viz-components
    auto* cmd_viz = app.add_subcommand("viz-components", "Fold model components into contact-map images");
    std::string viz_model, viz_out;
    int viz_nres = 0, viz_count = 0;
    cmd_viz->add_option("--model", viz_model, "Model directory")->required();
    cmd_viz->add_option("--n-res", viz_nres, "Residue count (0 = infer from length)");
    cmd_viz->add_option("--count", viz_count, "How many components to render (0 = all)");
    cmd_viz->add_option("--out", viz_out, "Output directory")->required();

    // extreme-frames
    auto* cmd_ext = app.add_subcommand("extreme-frames", "Frames at the extremes of one projection dimension");
    std::string ext_in, ext_out;
    int ext_dim = 0;
    cmd_ext->add_option("--in", ext_in, "Projected trajectory directory")->required();
    cmd_ext->add_option("--dim", ext_dim, "Projection dimension (0-based)");
    cmd_ext->add_option("--out", ext_out, "Optional output CSV (default: stdout)");

    // variance
    auto* cmd_var = app.add_subcommand("variance", "Cumulative-variance dimensionality heuristic");
    std::string var_model, var_out;
    double var_threshold = 0.95;
    cmd_var->add_option("--model", var_model, "pca or tica model directory")->required();
    cmd_var->add_option("--threshold", var_threshold, "Variance fraction to reach");
    cmd_var->add_option("--out", var_out, "Optional CSV of cumulative fractions");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (cmd_feat->parsed()) {
            const TrajectorySet raw = io::read_trajectory_set(feat_in);
            std::vector<PointRole> roles;
            const fs::path labels = fs::path(feat_in) / "labels.txt";
            if (fs::exists(labels)) {
                roles = read_roles(labels);
            } else if (feat_mode == "protein") {
                roles.assign(static_cast<std::size_t>(raw.n_cols() / 3), PointRole::Protein);
            } else {
                throw DataError("ligand mode requires " + labels.string());
            }
            feat_cfg.mode = (feat_mode == "protein") ? ContactMode::ProteinProtein
                                                     : ContactMode::ProteinLigand;
            const TrajectorySet features = featurize_trajectory_set(raw, roles, feat_cfg);
            io::write_trajectory_set(features, feat_out, io::Dtype::U8);
            std::cout << "featurized " << features.trajectories.size() << " trajectories, "
                      << features.n_cols() << " contacts per frame\n";
        } else if (cmd_synth_hmm->parsed()) {
            const fs::path spec_path(synth_spec);
            const auto kv = io::read_key_values(spec_path);
            const fs::path base = spec_path.parent_path();
            synth::HmmSpec spec;
            spec.n_traj = std::stoi(io::require_key(kv, "n_traj", spec_path));
            spec.traj_len = std::stol(io::require_key(kv, "traj_len", spec_path));
            spec.seed = std::stoull(io::require_key(kv, "seed", spec_path));
            spec.transition = io::read_matrix(base / io::require_key(kv, "transition", spec_path));
            spec.templates = io::read_matrix(base / io::require_key(kv, "templates", spec_path));
            auto [hidden, features] = synth::gen_hmm(spec, global.threads);
            io::write_trajectory_set(features, synth_out, io::Dtype::U8);
            if (!synth_hidden_out.empty())
                io::write_discrete_trajectories(hidden.trajectories, synth_hidden_out);
            std::cout << "generated " << spec.n_traj << " trajectories of " << spec.traj_len
                      << " frames\n";
        } else if (cmd_synth_ar1->parsed()) {
            const fs::path spec_path(synth_spec);
            const auto kv = io::read_key_values(spec_path);
            const fs::path base = spec_path.parent_path();
            synth::Ar1Spec spec;
            spec.n_frames = std::stol(io::require_key(kv, "n_frames", spec_path));
            spec.noise_scale = std::stod(io::require_key(kv, "noise_scale", spec_path));
            spec.seed = std::stoull(io::require_key(kv, "seed", spec_path));
            const Matrix coeffs = io::read_matrix(base / io::require_key(kv, "coeffs", spec_path));
            spec.coeffs = (coeffs.cols() == 1) ? Vector(coeffs.col(0)) : Vector(coeffs.row(0));
            spec.rotation = io::read_matrix(base / io::require_key(kv, "rotation", spec_path));
            io::write_trajectory_set(synth::gen_ar1(spec), synth_out, io::Dtype::F64);
            std::cout << "generated 1 trajectory of " << spec.n_frames << " frames\n";
        } else if (cmd_fit->parsed()) {
            const TrajectorySet data = io::read_trajectory_set(fit_in);
            RunConfig cfg;
            cfg.method = parse_method(fit_method);
            if (cfg.method == Method::None) throw DataError("method 'none' needs no fitting");
            if (cfg.method == Method::Tica && cmd_fit->count("--lag") == 0)
                throw DataError("tica has no default lag; pass --lag explicitly");
            cfg.dims = fit_dims;
            cfg.tica_lag = fit_lag;
            cfg.ae = fit_ae;
            std::string warning;
            const ProjectorModel model = fit_projector(data, cfg, global.seed, &warning);
            save_projector(model, fit_model);
            if (!warning.empty()) std::cerr << "warning: " << warning;
            std::cout << "fitted " << fit_method << " model, width " << model.natural_dims()
                      << "\n";
        } else if (cmd_proj->parsed()) {
            const ProjectorModel model = load_projector(proj_model);
            const TrajectorySet data = io::read_trajectory_set(proj_in);
            const Index dims = proj_dims > 0 ? proj_dims : model.natural_dims();
            io::write_trajectory_set(project_set(model, data, dims), proj_out, io::Dtype::F64);
            std::cout << "projected onto " << dims << " dimensions\n";
        } else if (cmd_cluster->parsed()) {
            const TrajectorySet data = io::read_trajectory_set(cluster_in);
            const int iters = cluster_iters > 0
                                  ? cluster_iters
                                  : default_kmeans_iterations(cluster_k, cluster_batch);
            const ClusterModel model = minibatch_kmeans(data.stacked(), cluster_k, cluster_batch,
                                                        iters, global.seed);
            save_cluster_model(model, cluster_model);
            const DiscreteTrajectorySet dtrajs = assign(model, data, global.threads);
            io::write_discrete_trajectories(dtrajs.trajectories, cluster_out);
            std::cout << "assigned " << data.total_frames() << " frames to " << cluster_k
                      << " states\n";
        } else if (cmd_msm->parsed()) {
            DiscreteTrajectorySet dtrajs;
            dtrajs.trajectories = io::read_discrete_trajectories(msm_in);
            int max_state = 0;
            for (const auto& t : dtrajs.trajectories)
                for (const int s : t) max_state = std::max(max_state, s);
            dtrajs.n_states = max_state + 1;
            const TimescaleTable table =
                its_scan(dtrajs, msm_lags, msm_k, msm_interval, msm_tol);
            std::ofstream out(msm_out, std::ios::binary | std::ios::trunc);
            if (!out) throw DataError("cannot open " + msm_out);
            write_its_csv(table, out);
            for (const auto& e : table.entries)
                if (e.timescale_index == 2 && e.n_active_states > 0 &&
                    e.n_active_states < e.n_states)
                    std::cerr << "note: lag " << e.lag << ": " << e.n_active_states << "/"
                              << e.n_states << " states in the largest connected set\n";
            std::cout << "wrote " << table.entries.size() << " timescale rows to " << msm_out
                      << "\n";
        } else if (cmd_boot->parsed() || cmd_dscan->parsed()) {
            CLI::App* active = cmd_boot->parsed() ? cmd_boot : cmd_dscan;
            run_cfg.method = parse_method(run_method);
            run_cfg.lags = run_lags;
            run_cfg.seed = global.seed;
            run_cfg.threads = global.threads;
            if (run_cfg.method == Method::Tica && active->count("--tica-lag") == 0)
                run_cfg.tica_lag = *std::min_element(run_cfg.lags.begin(), run_cfg.lags.end());
            const TrajectorySet features = io::read_trajectory_set(run_in);
            fs::create_directories(run_out);
            if (cmd_boot->parsed()) {
                const BootstrapRun run = run_its_bootstrap(features, run_cfg);
                std::ostringstream reps, summary;
                write_replicates_csv(run, reps);
                write_summary_csv(run, summary);
                write_text(fs::path(run_out) / "replicates.csv", reps.str());
                write_text(fs::path(run_out) / "summary.csv", summary.str());
                write_text(fs::path(run_out) / "config.txt",
                           canonical_config(run_cfg) + "config_hash=" + run.hash + "\n");
                int failures = 0;
                for (const auto& o : run.outcomes) {
                    if (!o.ok) {
                        ++failures;
                        std::cerr << "replicate " << o.replicate << " failed: " << o.error
                                  << "\n";
                    }
                }
                std::cout << "bootstrap-its: " << run_cfg.n_bootstrap - failures << "/"
                          << run_cfg.n_bootstrap << " replicates succeeded\n";
            } else {
                const auto cells =
                    dimension_scan(features, run_cfg, run_dims_list);
                std::ostringstream reps, summary;
                bool first = true;
                for (const auto& [dims, run] : cells) {
                    std::ostringstream r, s;
                    write_replicates_csv(run, r, dims);
                    write_summary_csv(run, s, dims);
                    std::string rs = r.str(), ss = s.str();
                    if (!first) {  // keep a single header block
                        rs = rs.substr(rs.find('\n', rs.find('\n') + 1) + 1);
                        ss = ss.substr(ss.find('\n', ss.find('\n') + 1) + 1);
                    }
                    reps << rs;
                    summary << ss;
                    first = false;
                }
                write_text(fs::path(run_out) / "replicates.csv", reps.str());
                write_text(fs::path(run_out) / "summary.csv", summary.str());
                std::cout << "dim-scan: " << cells.size() << " cells written\n";
            }
        } else if (cmd_viz->parsed()) {
            const ProjectorModel model = load_projector(viz_model);
            const Matrix comps = model.component_vectors();
            const Index n_res = viz_nres > 0 ? viz_nres : infer_n_res(comps.rows());
            const Index count = viz_count > 0 ? std::min<Index>(viz_count, comps.cols())
                                              : comps.cols();
            fs::create_directories(viz_out);
            for (Index c = 0; c < count; ++c) {
                char name[48];
                std::snprintf(name, sizeof(name), "component_%03lld.ppm",
                              static_cast<long long>(c));
                export_component_image(fold_component(comps.col(c), n_res),
                                       fs::path(viz_out) / name);
            }
            std::cout << "rendered " << count << " components at " << n_res << " residues\n";
        } else if (cmd_ext->parsed()) {
            const TrajectorySet projected = io::read_trajectory_set(ext_in);
            const auto [max_ref, min_ref] = extreme_frames(projected, ext_dim);
            std::ostringstream line;
            line << "dim,max_traj,max_frame,min_traj,min_frame\n"
                 << ext_dim << ',' << max_ref.traj << ',' << max_ref.frame << ',' << min_ref.traj
                 << ',' << min_ref.frame << '\n';
            if (ext_out.empty())
                std::cout << line.str();
            else
                write_text(ext_out, line.str());
        } else if (cmd_var->parsed()) {
            const ProjectorModel model = load_projector(var_model);
            Vector fractions;
            if (model.method == Method::Pca)
                fractions = cumulative_variance(model.pca);
            else if (model.method == Method::Tica)
                fractions = cumulative_variance(model.tica);
            else
                throw DataError("variance requires a pca or tica model");
            const Index n = dims_for_threshold(fractions, var_threshold);
            if (!var_out.empty()) {
                Matrix m(fractions.size(), 1);
                m.col(0) = fractions;
                io::write_csv_matrix(m, var_out);
            }
            std::cout << "dimensions for threshold " << var_threshold << ": " << n << "\n";
        }
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
