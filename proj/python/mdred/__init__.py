"""Contact-map featurization, dimensionality reduction, and MSM timescales.

Thin Python layer over the C++ core. All heavy operations live in
``mdred._core``; this package re-exports them.
"""

from mdred._core import (  # noqa: F401
    AeParams,
    ClusterModel,
    DataError,
    KTriModel,
    NumericalError,
    PcaModel,
    TicaModel,
    TransitionModel,
    ae_encode,
    ae_train,
    assign,
    bootstrap_sample,
    contact_vector,
    count_matrix,
    cumulative_fractions,
    dims_for_threshold,
    estimate_msm,
    extreme_frames,
    flatten_upper_triangle,
    fold_upper_triangle,
    gen_ar1,
    gen_hmm,
    implied_timescales,
    its_scan,
    kl_bernoulli,
    ktri_fit,
    ktri_transform,
    largest_connected_set,
    ligand_contact_vector,
    minibatch_kmeans,
    pairwise_distances,
    pca_fit,
    pca_inverse_transform,
    pca_transform,
    reversible_mle,
    run_its_bootstrap,
    stationary_distribution,
    tica_fit,
    tica_transform,
)

__all__ = [name for name in dir() if not name.startswith("_")]
