// Python bindings for the mdred core: featurization, the four projection
// methods, mini-batch k-means, MSM estimation, and the synthetic generators.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mdred/autoencoder.hpp"
#include "mdred/featurize.hpp"
#include "mdred/kmeans.hpp"
#include "mdred/msm.hpp"
#include "mdred/pipeline.hpp"
#include "mdred/projectors.hpp"
#include "mdred/synth.hpp"

namespace py = pybind11;
using namespace mdred;

namespace {

TrajectorySet to_trajectory_set(const std::vector<Matrix>& trajs, double frame_interval) {
    TrajectorySet ts;
    ts.trajectories = trajs;
    ts.frame_interval = frame_interval;
    validate(ts);
    return ts;
}

std::vector<Matrix> from_trajectory_set(const TrajectorySet& ts) { return ts.trajectories; }

DiscreteTrajectorySet to_dtrajs(const std::vector<std::vector<int>>& trajs, int n_states) {
    DiscreteTrajectorySet d;
    d.trajectories = trajs;
    if (n_states <= 0) {
        for (const auto& t : trajs)
            for (const int s : t) n_states = std::max(n_states, s + 1);
    }
    d.n_states = n_states;
    return d;
}

py::dict table_to_dict(const TimescaleTable& table) {
    py::list rows;
    for (const auto& e : table.entries) {
        py::dict row;
        row["lag"] = e.lag;
        row["lag_physical"] = e.lag_physical;
        row["replicate"] = e.replicate;
        row["timescale_index"] = e.timescale_index;
        row["timescale_physical"] = e.value_physical;
        row["converged"] = e.converged;
        row["note"] = e.note;
        rows.append(row);
    }
    py::list summary;
    for (const auto& s : table.summary) {
        py::dict row;
        row["lag"] = s.lag;
        row["lag_physical"] = s.lag_physical;
        row["n_success"] = s.n_success;
        row["t2_mean"] = s.t2_mean_physical;
        row["t2_std"] = s.t2_std_physical;
        summary.append(row);
    }
    py::dict out;
    out["entries"] = rows;
    out["summary"] = summary;
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Contact-map featurization, dimensionality reduction, and MSM timescales";

    py::register_exception<DataError>(m, "DataError");
    py::register_exception<NumericalError>(m, "NumericalError");

    // featurize
    m.def(
        "pairwise_distances",
        [](const Matrix& positions) {
            FrameCoordinates fc;
            fc.positions = positions;
            fc.roles.assign(static_cast<std::size_t>(positions.rows()), PointRole::Protein);
            return pairwise_distances(fc);
        },
        py::arg("positions"), "Symmetric Euclidean distance matrix of n x 3 coordinates");
    m.def(
        "contact_vector",
        [](const Matrix& distances, double cutoff) {
            return contact_vector(distances, ContactConfig{cutoff, ContactMode::ProteinProtein});
        },
        py::arg("distances"), py::arg("cutoff") = 8.0);
    m.def(
        "ligand_contact_vector",
        [](const Matrix& ligand, const Matrix& protein, double cutoff) {
            FrameCoordinates fc;
            fc.positions.resize(ligand.rows() + protein.rows(), 3);
            fc.positions.topRows(ligand.rows()) = ligand;
            fc.positions.bottomRows(protein.rows()) = protein;
            fc.roles.assign(static_cast<std::size_t>(ligand.rows()), PointRole::Ligand);
            fc.roles.insert(fc.roles.end(), static_cast<std::size_t>(protein.rows()),
                            PointRole::Protein);
            return ligand_contact_vector(fc, ContactConfig{cutoff, ContactMode::ProteinLigand});
        },
        py::arg("ligand"), py::arg("protein"), py::arg("cutoff") = 8.0);
    m.def("flatten_upper_triangle", &flatten_upper_triangle, py::arg("matrix"));
    m.def("fold_upper_triangle", &fold_upper_triangle, py::arg("vector"), py::arg("n_res"));

    // projectors
    py::class_<KTriModel>(m, "KTriModel").def_readonly("centers", &KTriModel::centers);
    py::class_<PcaModel>(m, "PcaModel")
        .def_readonly("mean", &PcaModel::mean)
        .def_readonly("components", &PcaModel::components)
        .def_readonly("eigenvalues", &PcaModel::eigenvalues);
    py::class_<TicaModel>(m, "TicaModel")
        .def_readonly("mean", &TicaModel::mean)
        .def_readonly("lag", &TicaModel::lag)
        .def_readonly("components", &TicaModel::components)
        .def_readonly("eigenvalues", &TicaModel::eigenvalues)
        .def_readonly("conditioning_warning", &TicaModel::conditioning_warning);

    m.def("ktri_fit", &ktri_fit, py::arg("data"), py::arg("k"), py::arg("seed") = 0);
    m.def("ktri_transform", &ktri_transform, py::arg("model"), py::arg("data"));
    m.def("pca_fit", &pca_fit, py::arg("data"));
    m.def("pca_transform", &pca_transform, py::arg("model"), py::arg("data"), py::arg("dims"));
    m.def("pca_inverse_transform", &pca_inverse_transform, py::arg("model"), py::arg("projected"));
    m.def(
        "tica_fit",
        [](const std::vector<Matrix>& trajs, Index lag) {
            return tica_fit(to_trajectory_set(trajs, 1.0), lag);
        },
        py::arg("trajectories"), py::arg("lag"));
    m.def("tica_transform", &tica_transform, py::arg("model"), py::arg("data"), py::arg("dims"));
    m.def("cumulative_fractions", &cumulative_fractions, py::arg("spectrum_weights"));
    m.def("dims_for_threshold", &dims_for_threshold, py::arg("fractions"), py::arg("q"));

    // autoencoder
    py::class_<AeParams>(m, "AeParams")
        .def_readonly("w1", &AeParams::w1)
        .def_readonly("b1", &AeParams::b1)
        .def_readonly("w2", &AeParams::w2)
        .def_readonly("b2", &AeParams::b2);
    m.def(
        "ae_train",
        [](const Matrix& data, Index n_hidden, double lam, double rho, double beta, int epochs,
           std::uint64_t seed) {
            AeHyper h;
            h.lambda = lam;
            h.rho = rho;
            h.beta = beta;
            h.epochs = epochs;
            h.seed = seed;
            auto result = ae_train(data, n_hidden, h);
            py::dict info;
            info["initial_cost"] = result.initial_cost;
            info["final_cost"] = result.final_cost;
            info["iterations"] = result.iterations;
            info["converged"] = result.converged;
            info["line_search_failure"] = result.line_search_failure;
            return py::make_tuple(result.params, info);
        },
        py::arg("data"), py::arg("n_hidden"), py::arg("lambda_") = 0.003, py::arg("rho") = 0.0,
        py::arg("beta") = 3.0, py::arg("epochs") = 400, py::arg("seed") = 0);
    m.def(
        "ae_encode", [](const AeParams& p, const Matrix& data) { return ae_encode(p, data); },
        py::arg("params"), py::arg("data"));
    m.def("kl_bernoulli", &kl_bernoulli, py::arg("p"), py::arg("p_hat"));

    // clustering
    py::class_<ClusterModel>(m, "ClusterModel")
        .def_readonly("centers", &ClusterModel::centers)
        .def_readonly("counts_per_center", &ClusterModel::counts_per_center);
    m.def("minibatch_kmeans", &minibatch_kmeans, py::arg("data"), py::arg("k"),
          py::arg("batch_size") = 1000, py::arg("iterations") = 100, py::arg("seed") = 0);
    m.def(
        "assign",
        [](const ClusterModel& model, const std::vector<Matrix>& trajs) {
            return assign(model, to_trajectory_set(trajs, 1.0)).trajectories;
        },
        py::arg("model"), py::arg("trajectories"));

    // msm
    m.def(
        "count_matrix",
        [](const std::vector<std::vector<int>>& dtrajs, int lag, int n_states) {
            const DiscreteTrajectorySet d = to_dtrajs(dtrajs, n_states);
            return count_matrix(d, lag, d.n_states);
        },
        py::arg("dtrajs"), py::arg("lag"), py::arg("n_states") = 0);
    m.def("largest_connected_set", &largest_connected_set, py::arg("counts"));
    py::class_<TransitionModel>(m, "TransitionModel")
        .def_readonly("lag", &TransitionModel::lag)
        .def_readonly("counts", &TransitionModel::counts)
        .def_readonly("T", &TransitionModel::T)
        .def_readonly("pi", &TransitionModel::pi)
        .def_readonly("active_states", &TransitionModel::active_states)
        .def_readonly("converged", &TransitionModel::converged)
        .def_readonly("iterations", &TransitionModel::iterations)
        .def_readonly("log_likelihood", &TransitionModel::log_likelihood);
    m.def("reversible_mle", &reversible_mle, py::arg("counts"), py::arg("tol") = 1e-10,
          py::arg("max_iter") = 100000);
    m.def(
        "estimate_msm",
        [](const std::vector<std::vector<int>>& dtrajs, int lag) {
            return estimate_msm(to_dtrajs(dtrajs, 0), lag);
        },
        py::arg("dtrajs"), py::arg("lag"));
    m.def(
        "implied_timescales",
        [](const TransitionModel& model, int k) {
            py::list out;
            for (const auto& t : implied_timescales(model, k)) {
                py::dict d;
                d["value"] = t.value;
                d["defined"] = t.defined;
                d["finite"] = t.finite;
                out.append(d);
            }
            return out;
        },
        py::arg("model"), py::arg("k"));
    m.def(
        "its_scan",
        [](const std::vector<std::vector<int>>& dtrajs, const std::vector<int>& lags, int k,
           double frame_interval) {
            return table_to_dict(its_scan(to_dtrajs(dtrajs, 0), lags, k, frame_interval));
        },
        py::arg("dtrajs"), py::arg("lags"), py::arg("k") = 1, py::arg("frame_interval") = 1.0);

    // synth
    m.def(
        "gen_hmm",
        [](const Matrix& transition, const Matrix& templates, int n_traj, long traj_len,
           std::uint64_t seed) {
            synth::HmmSpec spec{transition, templates, n_traj, traj_len, seed};
            auto [hidden, features] = synth::gen_hmm(spec);
            return py::make_tuple(hidden.trajectories, from_trajectory_set(features));
        },
        py::arg("transition"), py::arg("templates"), py::arg("n_traj"), py::arg("traj_len"),
        py::arg("seed") = 0);
    m.def(
        "gen_ar1",
        [](const Vector& coeffs, const Matrix& rotation, double noise_scale, long n_frames,
           std::uint64_t seed) {
            synth::Ar1Spec spec{coeffs, rotation, noise_scale, n_frames, seed};
            return from_trajectory_set(synth::gen_ar1(spec))[0];
        },
        py::arg("coeffs"), py::arg("rotation"), py::arg("noise_scale") = 1.0,
        py::arg("n_frames") = 10000, py::arg("seed") = 0);
    m.def("stationary_distribution", &synth::stationary_distribution, py::arg("transition"));

    // pipeline
    m.def(
        "bootstrap_sample",
        [](const std::vector<Matrix>& trajs, double fraction, std::uint64_t seed) {
            return from_trajectory_set(
                bootstrap_sample(to_trajectory_set(trajs, 1.0), fraction, seed));
        },
        py::arg("trajectories"), py::arg("fraction"), py::arg("seed") = 0);
    m.def(
        "run_its_bootstrap",
        [](const std::vector<Matrix>& trajs, const std::string& method, int dims,
           const std::vector<int>& lags, int n_clusters, double fraction, int n_bootstrap,
           std::uint64_t seed, Index tica_lag, double frame_interval, int threads) {
            RunConfig cfg;
            cfg.method = parse_method(method);
            cfg.dims = dims;
            cfg.lags = lags;
            cfg.n_clusters = n_clusters;
            cfg.bootstrap_fraction = fraction;
            cfg.n_bootstrap = n_bootstrap;
            cfg.seed = seed;
            cfg.tica_lag = tica_lag;
            cfg.frame_interval = frame_interval;
            cfg.threads = threads;
            const BootstrapRun run = run_its_bootstrap(to_trajectory_set(trajs, frame_interval), cfg);
            py::dict out = table_to_dict(run.table);
            out["config_hash"] = run.hash;
            return out;
        },
        py::arg("trajectories"), py::arg("method"), py::arg("dims"), py::arg("lags"),
        py::arg("n_clusters") = 1000, py::arg("fraction") = 1.0, py::arg("n_bootstrap") = 20,
        py::arg("seed") = 0, py::arg("tica_lag") = 1, py::arg("frame_interval") = 1.0,
        py::arg("threads") = 1);
    m.def(
        "extreme_frames",
        [](const std::vector<Matrix>& trajs, Index dim) {
            const auto [mx, mn] = extreme_frames(to_trajectory_set(trajs, 1.0), dim);
            return py::make_tuple(py::make_tuple(mx.traj, mx.frame),
                                  py::make_tuple(mn.traj, mn.frame));
        },
        py::arg("trajectories"), py::arg("dim"));
}
