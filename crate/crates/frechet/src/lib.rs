//! Exact and constant-factor approximate Fréchet distance computation for
//! polygonal curves, in both the continuous and the discrete setting.
//!
//! The crate is organized around a small set of building blocks:
//!
//! - [`geometry`]: points, curves, located points, per-edge interval arrays
//!   and the segment/ball clip primitive;
//! - [`wavefront`]: reachability propagation with arbitrary boundary sources
//!   and the exact decision/value procedures built on it;
//! - [`matching`]: explicit monotone matchings realizing a distance bound,
//!   queryable at any point;
//! - [`simplify`]: vertex-restricted curve simplification with certified
//!   error, used as the surrogate machinery of the fast decision procedures;
//! - [`approx`]: the block-partitioned, strongly subquadratic approximate
//!   decision and computation pipeline for the continuous distance;
//! - [`discrete`] / [`discrete_approx`]: the discrete counterparts.

pub mod counters;
pub mod csvio;
pub mod discrete;
pub mod discrete_approx;
pub mod error;
pub mod geometry;
pub mod matching;
pub mod params;
pub mod simplify;
pub mod synthetic;
pub mod wavefront;

pub mod approx;

pub use counters::WorkCounters;
pub use error::{FrechetError, Result};
pub use geometry::{clip_segment_to_ball, dist, Curve, CurvePoint, IntervalArray, Span, Tol};
pub use wavefront::{compute_exact, decide_exact, wavefront, WaveFrontOutput};
