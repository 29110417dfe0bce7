//! Periodic orbits and exact quantum spectra for the seven integrable
//! billiard domains (plus the cube), with unfolding-based orbit construction,
//! an independent ray-tracing oracle, and a finite-element Helmholtz solver
//! for numerical cross-checks.
//!
//! The central object is the correspondence between classical periodic orbits
//! and quantum eigenvalues: each orbit family is labelled by small integers,
//! its squared half-length is an integer bilinear form of the label, and the
//! same bilinear generates the Dirichlet/Neumann spectrum of the domain.

pub mod domains;
pub mod error;
pub mod exact;
pub mod helmholtz;
pub mod orbits;
pub mod raytrace;
pub mod render;
pub mod spectra;

pub use domains::{catalog, genus, is_integrable, DomainId, DomainSpec, RationalAngle};
pub use error::{Error, Result};
pub use helmholtz::{
    base_mesh, compare, discretize, eigenvalues, ComparisonRow, DiscreteOperator, Mesh,
};
pub use orbits::{
    amplitude_squared, collision_count, default_start, enumerate_orbits, fold_trajectory,
    orbit_vector, shooting_angles, DegeneracyGroup, OrbitVec, Trajectory,
};
pub use raytrace::{trace, trace_domain, verify_label, Classification, TraceReport};
pub use render::{
    degenerate_pair_scene, export_3d, folded_unfolded_scene, orbit_scene_3d, overlay_scene,
    render_2d, scene_with_bounding_box, Scene2, Scene3,
};
pub use spectra::{
    correspondence_check, energy, flat_values, reciprocal_isospectrality, spectrum,
    spectrum_with_options, subset_reduction_check, table5_column, values_up_to,
    BoundaryCondition, CheckReport, SpectrumEntry,
};
