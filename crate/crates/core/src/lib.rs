//! Busemann-Hausdorff area in Finsler spaces.
//!
//! The crate evaluates the Cartan area integrand of a Finsler metric on
//! `R^3` by great-circle quadrature, checks the Finsler, convexity and
//! ellipticity properties that the existence and regularity theory for
//! Finsler-minimal surfaces relies on, implements the extended spherical
//! Radon transform, and solves a discrete Plateau problem for Finsler area
//! over triangulated disks.
//!
//! Modules:
//! - [`metric`]: metric families, y-derivatives, symmetrizations, Finsler checks.
//! - [`cartan`]: the area integrand, growth bounds, convexity scans, seminorms.
//! - [`radon`]: the spherical Radon transform on (-m)-homogeneous functions.
//! - [`gacheck`]: the symmetrization assumption, its sufficient condition and
//!   critical drift thresholds.
//! - [`plateau`]: disk meshes, boundary curves and the area minimizer.
//! - [`cli`]: the command implementations behind the `finsler-plateau` binary.

pub mod cartan;
pub mod cli;
pub mod error;
pub mod gacheck;
pub mod metric;
pub mod plateau;
pub mod quadrature;
pub mod radon;
pub mod sampling;

pub use error::{Error, Result};
