//! Computational toolkit for the L_p-Brunn-Minkowski theory.
//!
//! The crate provides discrete models of the unit sphere and even measures on it
//! ([`spherical`]), exact polytope geometry in dimensions 2 and 3 ([`body`]),
//! the L_p-cosine transform and the body-valued operators built from it
//! ([`transform`]), a variational solver for the discrete volume-normalized even
//! L_p-Minkowski problem ([`minkowski`]), the Blaschke-level algebra of sums,
//! curvature images and normalization conversions ([`blaschke`]), and property
//! suites that check the identities these operators satisfy ([`verify`]).
//!
//! Every operator works at "desk scale": dimension 2 with a few hundred grid
//! directions, dimension 3 with an icosahedral subdivision grid of a few
//! thousand vertices. See the crate examples for runnable entry points to each
//! capability; the `lpbm` binary exposes the same operations as subcommands.

pub mod blaschke;
pub mod body;
pub mod error;
pub mod io;
pub mod minkowski;
pub mod spherical;
pub mod transform;
pub mod verify;

pub use error::LpbmError;

/// Volume of the unit ball in dimension `dim` (2 or 3).
pub fn unit_ball_volume(dim: usize) -> f64 {
    match dim {
        2 => std::f64::consts::PI,
        3 => 4.0 * std::f64::consts::PI / 3.0,
        _ => panic!("unsupported dimension {dim}"),
    }
}

/// Surface area of the unit sphere in dimension `dim` (2 or 3).
pub fn sphere_measure(dim: usize) -> f64 {
    match dim {
        2 => 2.0 * std::f64::consts::PI,
        3 => 4.0 * std::f64::consts::PI,
        _ => panic!("unsupported dimension {dim}"),
    }
}
