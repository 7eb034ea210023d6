//! Symmetry-adapted Fourier bases for the 17 wallpaper groups and the 230
//! space groups.
//!
//! Symmetry operations act on fractional coordinates with exact rational
//! translations. The induced action on integer frequencies turns the
//! invariance condition into a graph whose connected components are the
//! orbits; each phase-consistent orbit yields one invariant basis function.
//!
//! ```
//! use crystal_basis::{expand_group, load_group, BasisSet, Normalization};
//!
//! let group = expand_group(&load_group(2, "pg")?)?;
//! let basis = BasisSet::build(&group, 2)?;
//! let encoding = basis.encoder(Normalization::None).evaluate(&[0.2, 0.7])?;
//! assert_eq!(encoding.len(), basis.len());
//! # Ok::<(), crystal_basis::Error>(())
//! ```

pub mod basis;
pub mod density;
mod error;
pub mod export;
pub mod graph;
pub mod groups;
pub mod lattice;
pub mod metric;
pub mod mtx;
pub mod rational;
pub mod symop;

pub use basis::{evaluate_encoding, evaluate_modes, laplace_eigenvalue, BasisSet, Encoder, Normalization, RoutingEntry, RoutingMatrix};
pub use density::{gaussian_orbit_coefficients, OrbitDensity};
pub use error::{Error, Result};
pub use export::{graph_to_dot, BasisDocument, SCHEMA_VERSION};
pub use graph::{
    build_graph, build_graph_with_budget, default_radius, enumerate_lattice, find_orbits, prune_inconsistent, ConstraintGraph, Edge, Orbit,
    OrbitMember, RemovalReason, DEFAULT_NODE_BUDGET,
};
pub use groups::{expand_group, load_group, validate_group, CosetGroup, GroupDatabase, GroupKey, GroupSpec};
pub use lattice::{BravaisClass, Centering, LatticeCell, LatticeSystem};
pub use metric::{canonical_representative, orbit_distance, MetricWarning, OrbitMetric, DEFAULT_SHELL};
pub use mtx::{read_mtx, write_mtx};
pub use rational::Rational;
pub use symop::{format_symop, parse_symop, Freq, SymOp};
