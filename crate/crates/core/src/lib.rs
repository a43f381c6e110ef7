//! Moments of inertia of planar and N-dimensional bodies, the isoperimetric
//! inequalities they satisfy, Steklov eigenvalue bounds obtained from
//! Rayleigh–Ritz trial spaces, and a Fourier-coefficient shape optimizer for
//! the boundary-moment product `I_1 * I_2`.
//!
//! The crate is organised by subsystem:
//!
//! - [`geometry`]: exact shape types ([`Polygon`], [`SimplicialBody`],
//!   [`Ellipsoid`]), the [`MomentSummary`] of a body, canonical placement and
//!   diagonal affinities.
//! - [`fourier`]: truncated Fourier boundaries, their quadrature moments,
//!   Parseval identities, constant-speed reparametrization and the
//!   stationarity formulas of the boundary-moment problem.
//! - [`parallel`]: exact parallel bodies of convex polygons, polynomial fits
//!   of `J_k(Ω_h)` and concavity scans.
//! - [`inequality`]: the seven isoperimetric inequalities as margin reports.
//! - [`stekloff`]: Rayleigh–Ritz upper bounds for Steklov eigenvalues.
//! - [`optimizer`]: augmented-Lagrangian minimisation of `I_1 * I_2` at fixed
//!   area.
//! - [`random`]: seeded generators for test bodies.

pub mod error;
pub mod fourier;
pub mod geometry;
pub mod inequality;
pub mod linalg;
pub mod optimizer;
pub mod parallel;
pub mod quadrature;
pub mod random;
pub mod special;
pub mod stekloff;

pub use error::{Error, Result};
pub use fourier::FourierBoundary;
pub use geometry::{
    Centering, Ellipsoid, Integrals, MomentSummary, Placement, PlacementMode, Polygon, Shape, SimplicialBody,
};
