//! Trees of spheres: probe balls, preimage components, clusters, rescaling
//! limits and their assembly.

mod assemble;
mod cluster;
mod components;
mod order;
mod pipeline;
mod probe;
mod rescale;

pub use assemble::{verify_tree, BubbleTree, Parent, Sphere, TreeChecks, TOL_NODE};
pub use cluster::{build_tracks, cluster, Cluster, Clustering, Representative, Track, DRIFT_BAND, K_CLU};
pub use components::{
    check_one_to_one, point_in_polygon, polyline_distance, preimage_components, trace_boundary, PreimageComponent,
    BOUNDARY_POINTS, ONE_TO_ONE_SAMPLES,
};
pub use order::{descendant_order, DescendantOrder};
pub use pipeline::{build_tree, build_tree_from, Branch, Route, TreeOptions, TreeRun};
pub use probe::{choose_probe_ball, Obstacles, ProbeBall, DELTA_MIN, W_MAX};
pub use rescale::{affine_distance, canonical_form, canonical_gauge, rescale_fit, sample_grid, TOL_FIT};
