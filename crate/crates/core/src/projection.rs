//! Orthogonal projections of dyadic squares onto lines through the origin.
//!
//! The line `L_theta` is spanned by `v = (cos theta, sin theta)` and is
//! coordinatized by `t = <p, v>`. A square of side `l` centred at `c`
//! projects onto the interval centred at `<c, v>` with half-width
//! `(l/2)(|cos theta| + |sin theta|)`.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::cover::DyadicCover;
use crate::dyadic::{diam_pow, DyadicSquare};
use crate::error::{Error, Result};
use crate::step::{union_measure, Interval, StepFunction};
use crate::sum::Neumaier;

/// A direction `theta` in `[-pi/2, pi/2]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Angle(f64);

impl Angle {
    pub fn new(theta: f64) -> Result<Self> {
        if !(-FRAC_PI_2..=FRAC_PI_2).contains(&theta) {
            return Err(Error::InvalidAngle(theta));
        }
        Ok(Angle(theta))
    }

    pub const ZERO: Angle = Angle(0.0);

    #[inline]
    pub fn radians(&self) -> f64 {
        self.0
    }

    /// `|cos theta| + |sin theta|`: projected length of a unit-side square.
    #[inline]
    pub fn width_factor(&self) -> f64 {
        let (s, c) = self.0.sin_cos();
        c.abs() + s.abs()
    }
}

/// Per-angle constants shared by every square of a cover.
#[derive(Debug, Clone, Copy)]
struct Projector {
    cos: f64,
    sin: f64,
    width: f64,
}

impl Projector {
    fn new(theta: Angle) -> Self {
        let (sin, cos) = theta.0.sin_cos();
        Projector {
            cos,
            sin,
            width: cos.abs() + sin.abs(),
        }
    }

    #[inline]
    fn project(&self, q: &DyadicSquare) -> Interval {
        let (cx, cy) = q.center();
        let mid = cx * self.cos + cy * self.sin;
        let half = 0.5 * q.side() * self.width;
        Interval::new(mid - half, mid + half)
    }
}

pub fn project_square(q: &DyadicSquare, theta: Angle) -> Interval {
    Projector::new(theta).project(q)
}

pub fn project_cover(cover: &DyadicCover, theta: Angle) -> Vec<Interval> {
    let p = Projector::new(theta);
    cover.squares.iter().map(|q| p.project(q)).collect()
}

/// `m(proj_theta(C))`.
pub fn projected_measure(cover: &DyadicCover, theta: Angle) -> f64 {
    union_measure(&project_cover(cover, theta))
}

/// `f_theta^C = sum_Q diam(Q)^(s-1) * indicator(proj_theta(Q))`.
pub fn f_theta(cover: &DyadicCover, theta: Angle) -> StepFunction {
    let p = Projector::new(theta);
    let s = cover.s;
    StepFunction::from_weighted_intervals(
        cover
            .squares
            .iter()
            .map(|q| (p.project(q), diam_pow(q.level, s - 1.0))),
    )
}

/// `sum_Q diam(Q)^(s-1) * m(proj_theta(Q))`, the closed form of `integral of f_theta^C`.
pub fn integral_f(cover: &DyadicCover, theta: Angle) -> f64 {
    let p = Projector::new(theta);
    let mut acc = Neumaier::new();
    for q in &cover.squares {
        acc.add(diam_pow(q.level, cover.s - 1.0) * p.project(q).len());
    }
    acc.value()
}

/// `integral of (f_theta^C)^2`, from the swept step function.
pub fn integral_f2(cover: &DyadicCover, theta: Angle) -> f64 {
    f_theta(cover, theta).integral_sq()
}

/// Measure of `{theta in [-pi/2, pi/2] : proj_theta(a) meets proj_theta(b)}`.
///
/// With `d = c_a - c_b` and `h = (l_a + l_b)/2`, the projections meet iff
/// `|d1 cos + d2 sin| <= h (|cos| + |sin|)`. On each half `theta >= 0` and
/// `theta <= 0`, dividing by `cos theta` turns this into two linear
/// constraints in `u = |tan theta|`, whose solution is a single interval.
pub fn theta_overlap_measure(a: &DyadicSquare, b: &DyadicSquare) -> f64 {
    let (ax, ay) = a.center();
    let (bx, by) = b.center();
    overlap_measure_raw(ax - bx, ay - by, 0.5 * (a.side() + b.side()))
}

/// [`theta_overlap_measure`] from the centre offset and mean side.
#[inline]
pub(crate) fn overlap_measure_raw(d1: f64, d2: f64, h: f64) -> f64 {
    half_range_measure(d1, d2, h) + half_range_measure(d1, -d2, h)
}

/// Measure of `{atan(u) : u >= 0, |d1 + d2 u| <= h (1 + u)}`.
#[inline]
fn half_range_measure(d1: f64, d2: f64, h: f64) -> f64 {
    let mut lo = 0.0f64;
    let mut hi = f64::INFINITY;
    // (d2 - h) u <= h - d1  and  (-d2 - h) u <= h + d1
    for (coef, rhs) in [(d2 - h, h - d1), (-d2 - h, h + d1)] {
        if coef > 0.0 {
            hi = hi.min(rhs / coef);
        } else if coef < 0.0 {
            lo = lo.max(rhs / coef);
        } else if rhs < 0.0 {
            return 0.0;
        }
    }
    if lo >= hi {
        return 0.0;
    }
    let top = if hi.is_infinite() {
        FRAC_PI_2
    } else {
        hi.atan()
    };
    top - lo.atan()
}

/// `2 pi max(|Q|, |Q'|) / |x - x'|`, the transversality bound on
/// [`theta_overlap_measure`]. Not defined when the centres coincide.
pub fn transversality_bound(a: &DyadicSquare, b: &DyadicSquare) -> Result<f64> {
    let dist = center_distance(a, b);
    if dist == 0.0 {
        return Err(Error::CoincidentCenters);
    }
    Ok(2.0 * PI * a.diam().max(b.diam()) / dist)
}

/// `min(pi, transversality_bound)`, with `pi` for coincident centres.
pub fn effective_transversality_bound(a: &DyadicSquare, b: &DyadicSquare) -> f64 {
    transversality_bound(a, b).map_or(PI, |v| v.min(PI))
}

#[inline]
pub fn center_distance(a: &DyadicSquare, b: &DyadicSquare) -> f64 {
    let (ax, ay) = a.center();
    let (bx, by) = b.center();
    (ax - bx).hypot(ay - by)
}
