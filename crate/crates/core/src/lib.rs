//! Exact computations in the quadratic Wasserstein space of the real line.
//!
//! * [`measures`]: atomic and piecewise-uniform measures, quantile functions.
//! * [`transport1d`]: distances, displacement geodesics, maximal extension intervals.
//! * [`isometry1d`]: the isometry group in normal form, including the exotic flow.
//! * [`rn`]: exact discrete transport in ℝⁿ and certificates about couplings.
//! * [`curvature`]: comparison-triangle defects and a branching witness in ℝ².
//! * [`rank_embed`]: isometric embeddings of the sorted cone of ℝᵏ.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod crosscheck;
pub mod curvature;
pub mod error;
pub mod isometry1d;
pub mod measures;
pub mod rank_embed;
pub mod registry;
pub mod rn;
pub mod sampling;
pub mod suite;
pub mod transport1d;

pub use error::{Error, Result};
pub use isometry1d::{
    apply_isometry, compose, delta2_distance, delta2_params, exotic_flow, measure_from_params,
    reflect_about_barycenter, weak_convergence_profile, Delta2Params, IsometryElement, Sign,
};
pub use measures::{Atom, Measure1D, QuantilePieces, Segment, UniformPiece};
pub use rn::{discrete_ot, Coupling, MeasureRn};
pub use transport1d::{
    extension_interval, geodesic, geodesic_eval, wasserstein2, Geodesic1D, Interval,
};
