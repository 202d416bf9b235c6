//! Numerics for timelike surfaces with parallel normalized mean curvature
//! vector field in Minkowski 4-space.
//!
//! The crate is `no_std` (it needs `alloc`). It covers:
//!
//! - [`minkowski`]: the (3,1) inner product and pseudo-orthonormal frames;
//! - [`fields`]: sampled scalar functions on a rectangular grid with
//!   second-order finite differences and optional exact evaluators;
//! - [`natural`]: residuals of the natural PDE systems, case classification,
//!   and fixture generators (Goursat marching, Taylor jets);
//! - [`frame`]: the moving-frame reconstruction of a surface from a triple;
//! - [`analysis`]: frame functions and invariants of a sampled immersion;
//! - [`canonical`]: conversion of isotropic parameters to canonical ones.

#![no_std]

extern crate alloc;

pub mod analysis;
pub mod analytic;
pub mod canonical;
pub mod error;
pub mod fields;
pub mod frame;
pub mod minkowski;
pub mod natural;
pub mod quadrature;

pub use error::{Error, Result};
pub use fields::{GridSpec, ScalarField};
pub use minkowski::{gram_residual, lorentz_inner, standard_frame, FrameState, MinkVec};
pub use natural::{CanonicalTriple, Case};
