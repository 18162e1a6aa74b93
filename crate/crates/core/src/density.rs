//! Push-forward of the cover mass onto `L_θ` and its window averages.
//!
//! Each square `Q` carries mass `diam(Q)^s`, spread uniformly over
//! `proj_θ(Q)`. Its density `diam^s / length` is at most
//! `√2 · diam^(s-1)`, so the push-forward density is dominated pointwise by
//! `√2 · f_θ^C`.

use serde::Serialize;

use crate::cover::DyadicCover;
use crate::dyadic::diam_pow;
use crate::error::{Error, Result};
use crate::projection::{f_theta, project_square, Angle};
use crate::step::StepFunction;
use crate::sum::Neumaier;

#[derive(Debug, Clone, PartialEq)]
pub struct PushforwardDensity {
    pub density: StepFunction,
    /// Total mass, `∫ density`.
    pub mass: f64,
}

pub fn pushforward_density(cover: &DyadicCover, theta: Angle) -> PushforwardDensity {
    let s = cover.s;
    let density = StepFunction::from_weighted_intervals(cover.squares.iter().map(|q| {
        let iv = project_square(q, theta);
        (iv, diam_pow(q.level, s) / iv.len())
    }));
    let mass = density.integral();
    PushforwardDensity { density, mass }
}

/// `(1/2ε) μ_θ([x - ε, x + ε])`.
pub fn mollified_density(d: &PushforwardDensity, eps: f64, x: f64) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "eps must be positive, got {eps}"
        )));
    }
    Ok(d.density.window_average(eps, x))
}

pub fn l2_norm(f: &StepFunction) -> f64 {
    f.l2_norm()
}

/// How `‖f_{θ,ε}‖²` is integrated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Quadrature {
    /// Closed form on the piecewise-linear window average.
    Exact,
    /// Midpoint rule with step `ε / divisor` over the support widened by `2ε`.
    Grid { divisor: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Domination {
    pub theta: f64,
    pub eps: f64,
    /// `‖f_{θ,ε}‖²`.
    pub mollified_sq: f64,
    /// `‖f_θ^C‖²`.
    pub f_sq: f64,
    pub ratio: f64,
}

/// `‖f_{θ,ε}‖² / ‖f_θ^C‖²`, where `f_{θ,ε}` is the window average of the
/// push-forward density. Requires `ε` at least the cover diameter.
pub fn domination_check(
    cover: &DyadicCover,
    theta: Angle,
    eps: f64,
    quadrature: Quadrature,
) -> Result<Domination> {
    let diameter = cover.diameter();
    if !(eps >= diameter) || !(eps > 0.0) {
        return Err(Error::EpsBelowDiameter { eps, diameter });
    }
    let d = pushforward_density(cover, theta);
    let mollified_sq = match quadrature {
        Quadrature::Exact => d.density.window_average_sq_integral(eps),
        Quadrature::Grid { divisor } => grid_window_sq(&d.density, eps, divisor)?,
    };
    let f_sq = f_theta(cover, theta).integral_sq();
    let ratio = if f_sq > 0.0 { mollified_sq / f_sq } else { 0.0 };
    Ok(Domination {
        theta: theta.radians(),
        eps,
        mollified_sq,
        f_sq,
        ratio,
    })
}

fn grid_window_sq(f: &StepFunction, eps: f64, divisor: u32) -> Result<f64> {
    if divisor == 0 {
        return Err(Error::InvalidParameter(
            "grid divisor must be positive".into(),
        ));
    }
    let Some(support) = f.support() else {
        return Ok(0.0);
    };
    let lo = support.lo - 2.0 * eps;
    let hi = support.hi + 2.0 * eps;
    let step = eps / divisor as f64;
    let n = ((hi - lo) / step).ceil() as usize;
    let mut acc = Neumaier::new();
    for k in 0..n {
        let g = f.window_average(eps, lo + (k as f64 + 0.5) * step);
        acc.add(g * g);
    }
    Ok(acc.value() * step)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::DyadicSquare;
    use std::f64::consts::SQRT_2;

    fn cover(squares: Vec<DyadicSquare>, s: f64) -> DyadicCover {
        DyadicCover::from_squares(squares, s, 1.0).unwrap()
    }

    #[test]
    fn single_square_density() {
        let c = cover(vec![DyadicSquare::ROOT], 1.5);
        let d = pushforward_density(&c, Angle::ZERO);
        assert!((d.density.eval(0.3) - 1.681792830507429).abs() < 1e-12);
        assert!((d.mass - 2f64.powf(0.75)).abs() < 1e-12);
    }

    #[test]
    fn two_square_density() {
        let c = cover(
            vec![
                DyadicSquare::new(1, 0, 0).unwrap(),
                DyadicSquare::new(1, 1, 1).unwrap(),
            ],
            1.5,
        );
        let d = pushforward_density(&c, Angle::ZERO);
        for x in [0.1, 0.7] {
            assert!((d.density.eval(x) - 1.189207115002721).abs() < 1e-12);
        }
    }

    #[test]
    fn mollifier_cases() {
        let c = cover(vec![DyadicSquare::ROOT], 1.5);
        let d = pushforward_density(&c, Angle::ZERO);
        let v = d.density.eval(0.5);
        assert!((mollified_density(&d, 0.2, 0.5).unwrap() - v).abs() < 1e-14);
        assert_eq!(mollified_density(&d, 0.2, 3.0).unwrap(), 0.0);
        assert!((mollified_density(&d, 0.2, 0.0).unwrap() - v / 2.0).abs() < 1e-14);
        assert!(mollified_density(&d, 0.0, 0.0).is_err());
    }

    #[test]
    fn l2_norm_of_single_square_f() {
        let c = cover(vec![DyadicSquare::ROOT], 1.5);
        assert!((l2_norm(&f_theta(&c, Angle::ZERO)) - 2f64.powf(0.25)).abs() < 1e-14);
    }

    #[test]
    fn single_square_domination() {
        let c = cover(vec![DyadicSquare::ROOT], 1.5);
        let dom = domination_check(&c, Angle::ZERO, 2.0, Quadrature::Exact).unwrap();
        assert!(dom.ratio <= 4.0);
        // Density 2^0.75 on [0,1] averaged over windows of width 4: a
        // trapezoid of height c/4 on [-2, 3], flat on [-1, 2], ramps of width 1.
        let c2 = 2f64.powf(1.5) / 16.0;
        let expected = c2 * 3.0 + 2.0 * c2 / 3.0;
        assert!((dom.mollified_sq - expected).abs() < 1e-13);
        assert!((dom.f_sq - SQRT_2).abs() < 1e-13);
    }

    #[test]
    fn eps_precondition() {
        let c = cover(vec![DyadicSquare::new(2, 0, 0).unwrap()], 1.5);
        let err = domination_check(&c, Angle::ZERO, 0.1, Quadrature::Exact).unwrap_err();
        assert!(matches!(err, Error::EpsBelowDiameter { .. }));
    }

    #[test]
    fn grid_quadrature_converges_to_exact() {
        let c = cover(
            vec![
                DyadicSquare::new(2, 0, 0).unwrap(),
                DyadicSquare::new(3, 5, 2).unwrap(),
            ],
            1.3,
        );
        let t = Angle::new(0.4).unwrap();
        let exact = domination_check(&c, t, 0.5, Quadrature::Exact).unwrap();
        let fine = domination_check(&c, t, 0.5, Quadrature::Grid { divisor: 4096 }).unwrap();
        assert!((exact.mollified_sq - fine.mollified_sq).abs() <= 1e-6 * exact.mollified_sq);
    }
}
