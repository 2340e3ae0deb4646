//! Topological complexity of neural-network loss landscapes.
//!
//! The crate has three layers:
//!
//! - [`pfaffian`] computes the Pfaffian format `(alpha, beta, ell)` of the
//!   MSE/BCE loss of a feedforward network with Pfaffian activations
//!   (hyperbolic tangent, logistic sigmoid, arctangent), together with the
//!   transforms for l2 regularization and residual connections.
//! - [`bound`] turns a format into an explicit upper bound on the sum of
//!   Betti numbers of a loss sublevel set `S = { theta : L(theta) <= c }`,
//!   exactly (arbitrary precision) and in log2 space, and reports the
//!   asymptotic regime of the bound in the sample count, width, and depth.
//! - [`net`], [`landscape`], and [`homology`] measure the other side of the
//!   inequality: they evaluate tiny networks exactly, sample the loss over
//!   2- or 3-parameter slices, build the thresholded cubical complex, and
//!   compute its Betti numbers over GF(2).
//!
//! [`harness`] wires the layers into config-driven verification runs that
//! check `measured <= bound` and the invariance claims, emitting
//! machine-readable reports. The `losstopo` CLI is a thin front end over it.
//!
//! Numeric evaluation (forward passes, losses, field sampling) is generic
//! over the scalar type via [`Real`]; the format calculus, the bound
//! arithmetic, and the homology are exact integer computations and take no
//! scalar parameter. [`Scalar`] is the concrete type used by the CLI and the
//! file formats.

pub mod bound;
pub mod error;
pub mod harness;
pub mod homology;
pub mod landscape;
pub mod net;
pub mod pfaffian;

pub use error::{Error, Result};

use num_traits::Float;

/// Scalar abstraction for the numeric evaluation paths.
///
/// Blanket-implemented for every floating-point type with the required
/// bounds, in particular `f32` and `f64`.
pub trait Real:
    Float + Send + Sync + std::fmt::Debug + std::fmt::Display + 'static
{
}

impl<T> Real for T where
    T: Float + Send + Sync + std::fmt::Debug + std::fmt::Display + 'static
{
}

/// Default scalar: all CLI entry points and file formats use 64-bit floats.
pub type Scalar = f64;
