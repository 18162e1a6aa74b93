//! Dyadic covers, projection transversality and L² projection estimates for
//! digit-defined plane fractals.
//!
//! The crate follows one pipeline end to end:
//!
//! 1. [`fractal`] generates the depth-`n` dyadic discretization of a
//!    digit-restricted self-similar set `K ⊂ [0,1)²`.
//! 2. [`cover`] turns it into a *good* dyadic cover, one whose mass inside any
//!    dyadic square `Q` is bounded by a constant times `diam(Q)^s`.
//! 3. [`projection`] projects the cover onto the line `L_θ` and builds the
//!    weighted indicator sum `f_θ^C` as an exact [`StepFunction`].
//! 4. [`estimates`] integrates `‖f_θ^C‖²` over directions and compares it to
//!    the pair-sum and transversality bounds, shell by shell.
//! 5. [`density`] looks at the push-forward of the cover mass and its
//!    window-averaged density.
//!
//! Every implicit constant is computed and returned, never assumed.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod cover;
pub mod density;
pub mod dyadic;
pub mod error;
pub mod estimates;
pub mod fractal;
pub mod io;
pub mod projection;
pub mod step;
pub mod sum;
pub mod svg;

pub use cover::{
    build_good_cover, build_good_cover_scoped, goodness_bound, DyadicCover, MergeScope,
};
pub use dyadic::{cover_four, validate_disjoint, BoundingBox, DyadicSquare, MAX_LEVEL};
pub use error::{Error, Result};
pub use fractal::{hausdorff_sum, regularity_scan, DiscretizedSet, FractalSpec};
pub use projection::{
    f_theta, integral_f, integral_f2, project_square, theta_overlap_measure, transversality_bound,
    Angle,
};
pub use step::{union_measure, Interval, StepFunction};
