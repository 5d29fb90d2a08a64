//! Weighted (drifted) Laplace–Beltrami spectra on self-shrinker hypersurfaces.
//!
//! The crate discretizes `Δ_f = Δ − ⟨∇f, ∇·⟩` with `f = |x|²/4` on polylines and
//! triangle meshes sampled from exact model shrinkers (round spheres, generalized
//! cylinders, hyperplanes, and products inside the round-cylinder Ricci soliton
//! `R^p × S^k`), computes the low spectrum of the weighted Dirichlet form, checks
//! the weighted-integral identities satisfied by coordinate functions, and runs
//! containment / intersection obstruction scans.
//!
//! Module map:
//!
//! - [`geometry`]: ambient solitons and the catalog of exact shapes.
//! - [`mesh`]: discrete hypersurfaces, sampling, curvature, I/O.
//! - [`operator`]: weighted stiffness / mass assembly and the gauge potential.
//! - [`spectral`]: shift-invert block Lanczos, closed-form and tensor spectra.
//! - [`identities`]: numerical identity checks with discretization-aware tolerances.
//! - [`obstruction`]: sphere-collection scans and containment verdicts.
//! - [`cli`]: reproducible batch commands behind the `shrinker-spectra` binary.

pub mod cli;
pub mod error;
pub mod geometry;
pub mod identities;
pub mod linalg;
pub mod mesh;
pub mod obstruction;
pub mod operator;
pub mod report;
pub mod sparse;
pub mod spectral;

pub use error::{Error, Result};
pub use geometry::{AmbientSoliton, CatalogShape, ShapeFamily, SphereFamilyMember};
pub use mesh::{Mesh, Resolution, TruncationInfo, VertexField};
pub use operator::WeightedForms;
pub use spectral::Spectrum;

/// Default truncation radius for noncompact shapes.
pub const DEFAULT_TRUNCATION: f64 = 12.0;

/// Default seed for every randomized step (Lanczos start blocks, sampling).
pub const DEFAULT_SEED: u64 = 0x5EED;
