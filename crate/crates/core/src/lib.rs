//! First nontrivial Neumann eigenpairs of the p-Laplacian and their limit as
//! `p -> infinity`.
//!
//! The crate is `no_std` (it needs `alloc`) and is organised bottom-up:
//!
//! - [`geometry`]: exact domains, intrinsic (geodesic) diameter, inradius,
//!   the limiting eigenvalues `2 / diam` and `1 / R`, and mesh generation.
//! - [`discretize`]: P1 calculus on a [`Mesh`](geometry::Mesh): measure
//!   normalised p-norms, gradients, the signed-power orthogonality constraint
//!   and the Rayleigh quotient.
//! - [`eigensolver`]: constrained Rayleigh quotient minimisation, warm-started
//!   p-sweeps, extrapolation of the limit and the two classical bounds
//!   (a test-function upper bound and the Payne-Weinberger lower bound).
//! - [`analysis`]: pointwise checks of the limiting infinity-Laplacian
//!   problem and qualitative properties of the computed eigenfunctions.
//!
//! Everything is deterministic: identical inputs and seeds give bit-identical
//! outputs.
#![cfg_attr(not(test), no_std)]
#![deny(rust_2018_idioms)]
// `!(x > 0.0)` deliberately rejects NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

pub mod analysis;
pub mod discretize;
pub mod eigensolver;
mod error;
pub mod geometry;
mod linalg;

pub use error::{Error, Result};
pub use geometry::{Domain, GeometryReport, Mesh, Point, Shape};
pub use discretize::{GradientField, ScalarField};
pub use eigensolver::{EigenResult, SolverOptions, SweepReport};
