//! kNN-ordering and Vietoris-Rips persistent homology, plus tools for
//! measuring how PageRank iterates converge in rank order.

pub mod bottleneck;
pub mod convergence;
pub mod error;
pub mod filtration;
pub mod geometry;
pub mod knn;
pub mod pagerank;
pub mod persistence;
pub mod union_find;

pub use bottleneck::{bottleneck, bottleneck_finite, feasible_at, MatchingProblem};
pub use convergence::{
    embed_1d, homological_curve, knn_convergence_time, norm_error_curve, rank_diff_curve, restrict, ConvergenceReport,
    ConvergenceSummary, Family, KnnConvergence, KnnScope, Norm, ReportConfig,
};
pub use error::{Error, Result};
pub use filtration::{
    flag_expand, knn_filtered_complex, skeleton, vr_filtered_complex, ComplexKind, FilteredComplex, FilteredSimplex,
    Simplex,
};
pub use geometry::{argsort_row, linf_cloud_distance, pairwise_distances, DistanceMatrix, PointCloud, TieRule};
pub use knn::{
    is_knn_preserving, knn_equivalent, neighborhood, ordering_function, symmetrize, Neighborhood, OrderMatrix,
    PreserveScope, SymMethod, SymOrderMatrix,
};
pub use pagerank::{
    load_edge_list, power_iterate, rank_convergence_time, rank_convergence_times, rank_order, stationary,
    transition_row, Graph, InitialVector, IterationTrace, PageRankConfig,
};
pub use persistence::{
    betti_numbers, compute_persistence, compute_persistence_with, PersistenceDiagram, PersistencePoint, Reduction,
};
