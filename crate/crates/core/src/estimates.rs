//! Direction-integrated L² estimates and the bounds that control them.
//!
//! For a cover `C` the quantity of interest is
//! `I = ∫ dθ ∫ (f_θ^C)² dm`. It is computed three ways:
//!
//! * [`i_numeric`]: midpoint quadrature over a [`ThetaGrid`] of the exact
//!   `∫ (f_θ^C)²`.
//! * [`i_pair_bound`]: the pair sum
//!   `Σ diam^(s-1) diam'^(s-1) min(diam, diam') m(Θ_{Q,Q'})` with the exact
//!   overlap-angle measure.
//! * [`i_transversal_bound`]: the same sum with `m(Θ)` replaced by the
//!   transversality bound capped at `π`, plus the uncapped
//!   `Σ |x - x'|^-1 diam^s diam'^s` over distinct centres.
//!
//! By construction `i_numeric <= i_pair_bound <= capped transversal bound`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::cover::DyadicCover;
use crate::dyadic::{diam_pow, DyadicSquare};
use crate::error::{Error, Result};
use crate::projection::{f_theta, integral_f, overlap_measure_raw, project_cover, Angle};
use crate::step::union_measure;
use crate::sum::{neumaier_sum, Neumaier};

/// Default ceiling on the number of squares fed to an O(N²) pair sum.
pub const DEFAULT_PAIR_CAP: usize = 10_000;

/// Smallest accepted grid.
pub const MIN_GRID: usize = 16;

/// Midpoint nodes `θ_j = -π/2 + (j + 1/2) π / M`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaGrid {
    nodes: Vec<Angle>,
}

impl ThetaGrid {
    pub fn new(count: usize) -> Result<Self> {
        if count < MIN_GRID {
            return Err(Error::InvalidGrid {
                count,
                min: MIN_GRID,
            });
        }
        let step = PI / count as f64;
        let nodes = (0..count)
            .map(|j| Angle::new(-PI / 2.0 + (j as f64 + 0.5) * step))
            .collect::<Result<_>>()?;
        Ok(ThetaGrid { nodes })
    }

    pub fn count(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[Angle] {
        &self.nodes
    }

    /// Quadrature weight `π / M`.
    pub fn weight(&self) -> f64 {
        PI / self.nodes.len() as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub theta: f64,
    /// `m(proj_θ(C))`.
    pub m_proj: f64,
    pub int_f: f64,
    pub int_f2: f64,
    /// `(∫f)² / ∫f²`, a lower bound for `m_proj` by Cauchy–Schwarz.
    pub cs_lower: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub weight: f64,
    pub rows: Vec<SweepRow>,
}

impl SweepReport {
    /// `π/M · Σ ∫(f_θ^C)²`.
    pub fn i_numeric(&self) -> f64 {
        self.weight * neumaier_sum(self.rows.iter().map(|r| r.int_f2))
    }

    /// Fraction of nodes with `cs_lower >= threshold`.
    pub fn fraction_cs_at_least(&self, threshold: f64) -> f64 {
        if self.rows.is_empty() {
            return 0.0;
        }
        self.rows.iter().filter(|r| r.cs_lower >= threshold).count() as f64 / self.rows.len() as f64
    }
}

/// All projection quantities of `cover` at one direction.
pub fn evaluate_angle(cover: &DyadicCover, theta: Angle) -> SweepRow {
    let m_proj = union_measure(&project_cover(cover, theta));
    let int_f = integral_f(cover, theta);
    let int_f2 = f_theta(cover, theta).integral_sq();
    let cs_lower = if int_f2 > 0.0 {
        int_f * int_f / int_f2
    } else {
        0.0
    };
    SweepRow {
        theta: theta.radians(),
        m_proj,
        int_f,
        int_f2,
        cs_lower,
    }
}

pub fn sweep(cover: &DyadicCover, grid: &ThetaGrid) -> SweepReport {
    let rows = grid
        .nodes()
        .par_iter()
        .map(|&t| evaluate_angle(cover, t))
        .collect();
    SweepReport {
        weight: grid.weight(),
        rows,
    }
}

pub fn i_numeric(cover: &DyadicCover, grid: &ThetaGrid) -> f64 {
    sweep(cover, grid).i_numeric()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairSums {
    /// Pair sum with the exact overlap-angle measure.
    pub pair_bound: f64,
    /// Pair sum with `min(π, 2π max(diam)/dist)`, and `π` on the diagonal.
    pub transversal_capped: f64,
    /// `Σ diam^s diam'^s / dist` over ordered pairs with distinct centres.
    pub transversal_literal: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransversalBound {
    pub capped: f64,
    pub literal: f64,
}

pub fn i_pair_bound(cover: &DyadicCover, cap: usize) -> Result<f64> {
    pair_sums(cover, cap).map(|p| p.pair_bound)
}

pub fn i_transversal_bound(cover: &DyadicCover, cap: usize) -> Result<TransversalBound> {
    pair_sums(cover, cap).map(|p| TransversalBound {
        capped: p.transversal_capped,
        literal: p.transversal_literal,
    })
}

#[derive(Clone, Copy)]
struct PairItem {
    x: f64,
    y: f64,
    side: f64,
    diam: f64,
    weight: f64,
    mass: f64,
}

/// The three pair sums in one O(N²) pass over unordered pairs.
///
/// Rows are reduced independently and then combined in row order, so the
/// result does not depend on the thread schedule.
pub fn pair_sums(cover: &DyadicCover, cap: usize) -> Result<PairSums> {
    let n = cover.len();
    if n > cap {
        return Err(Error::PairCapExceeded { count: n, cap });
    }
    let s = cover.s;
    let items: Vec<PairItem> = cover
        .squares
        .iter()
        .map(|q| {
            let (x, y) = q.center();
            PairItem {
                x,
                y,
                side: q.side(),
                diam: q.diam(),
                weight: diam_pow(q.level, s - 1.0),
                mass: diam_pow(q.level, s),
            }
        })
        .collect();

    let rows: Vec<[f64; 3]> = (0..n)
        .into_par_iter()
        .map(|i| {
            let a = items[i];
            let (mut pair, mut capped, mut literal) =
                (Neumaier::new(), Neumaier::new(), Neumaier::new());
            let self_term = a.weight * a.weight * a.diam * PI;
            pair.add(self_term);
            capped.add(self_term);
            for b in &items[i + 1..] {
                let (d1, d2) = (a.x - b.x, a.y - b.y);
                let base = 2.0 * a.weight * b.weight * a.diam.min(b.diam);
                let theta = overlap_measure_raw(d1, d2, 0.5 * (a.side + b.side));
                pair.add(base * theta);
                let dist = d1.hypot(d2);
                if dist == 0.0 {
                    capped.add(base * PI);
                } else {
                    capped.add(base * (2.0 * PI * a.diam.max(b.diam) / dist).min(PI));
                    literal.add(2.0 * a.mass * b.mass / dist);
                }
            }
            [pair.value(), capped.value(), literal.value()]
        })
        .collect();

    Ok(PairSums {
        pair_bound: neumaier_sum(rows.iter().map(|r| r[0])),
        transversal_capped: neumaier_sum(rows.iter().map(|r| r[1])),
        transversal_literal: neumaier_sum(rows.iter().map(|r| r[2])),
    })
}

/// Index `j >= 0` with `2^(-j-1) < d <= 2^-j`, where `d = sqrt(d2)`;
/// every `d > 1/2` lands in shell 0.
///
/// Read off the binary exponent of `d2`, so shell boundaries are exact.
#[inline]
pub fn shell_index(d2: f64) -> u32 {
    debug_assert!(d2 > 0.0 && d2.is_finite());
    let bits = d2.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i64 - 1023;
    let exact_power = bits & ((1u64 << 52) - 1) == 0;
    // largest j with d2 <= 4^-j
    let j = if exact_power {
        (-exp).div_euclid(2)
    } else {
        (-exp - 1).div_euclid(2)
    };
    j.max(0) as u32
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Shell {
    pub j: u32,
    /// `Σ diam(Q')^s` over cover squares with centre distance in the shell.
    pub mass: f64,
    /// `mass / (2^-j)^s`.
    pub normalized: f64,
}

/// Cover mass around `q` grouped into dyadic distance shells.
///
/// Shells `0..=j_max` are all listed, empty ones with zero mass; `q` itself
/// (distance zero) is excluded.
pub fn shell_masses(cover: &DyadicCover, q: &DyadicSquare) -> Vec<Shell> {
    let (qx, qy) = q.center();
    let mut masses: Vec<Neumaier> = Vec::new();
    for other in &cover.squares {
        let (x, y) = other.center();
        let d2 = (x - qx).powi(2) + (y - qy).powi(2);
        if d2 == 0.0 {
            continue;
        }
        let j = shell_index(d2) as usize;
        if masses.len() <= j {
            masses.resize(j + 1, Neumaier::new());
        }
        masses[j].add(other.diam_pow(cover.s));
    }
    masses
        .iter()
        .enumerate()
        .map(|(j, m)| Shell {
            j: j as u32,
            mass: m.value(),
            normalized: m.value() / 2f64.powf(-(j as f64) * cover.s),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShellSummary {
    /// `max` over cover squares `Q` and shells `j` of `mass_j / (2^-j)^s`.
    pub max_normalized: f64,
    pub at_square: Option<DyadicSquare>,
    pub at_j: u32,
    /// For each `j`, the max over `Q` of the normalized shell mass.
    pub per_j: Vec<f64>,
}

/// Shell statistics over every square of the cover. O(N²).
pub fn shell_summary(cover: &DyadicCover, cap: usize) -> Result<ShellSummary> {
    let n = cover.len();
    if n > cap {
        return Err(Error::PairCapExceeded { count: n, cap });
    }
    let s = cover.s;
    let pts: Vec<(f64, f64, f64)> = cover
        .squares
        .iter()
        .map(|q| {
            let (x, y) = q.center();
            (x, y, q.diam_pow(s))
        })
        .collect();
    let scale: Vec<f64> = (0..64).map(|j| 2f64.powf(j as f64 * s)).collect();

    let rows: Vec<Vec<f64>> = pts
        .par_iter()
        .map(|&(qx, qy, _)| {
            let mut masses = [0.0f64; 64];
            for &(x, y, m) in &pts {
                let d2 = (x - qx) * (x - qx) + (y - qy) * (y - qy);
                if d2 > 0.0 {
                    masses[(shell_index(d2) as usize).min(63)] += m;
                }
            }
            let last = masses.iter().rposition(|&m| m > 0.0).map_or(0, |k| k + 1);
            (0..last).map(|j| masses[j] * scale[j]).collect()
        })
        .collect();

    let mut summary = ShellSummary {
        max_normalized: 0.0,
        at_square: None,
        at_j: 0,
        per_j: Vec::new(),
    };
    for (q, row) in cover.squares.iter().zip(&rows) {
        if summary.per_j.len() < row.len() {
            summary.per_j.resize(row.len(), 0.0);
        }
        for (j, &v) in row.iter().enumerate() {
            summary.per_j[j] = summary.per_j[j].max(v);
            if v > summary.max_normalized {
                summary.max_normalized = v;
                summary.at_square = Some(*q);
                summary.at_j = j as u32;
            }
        }
    }
    Ok(summary)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GoodAngleSets {
    /// `masks[i][k]`: node `k` satisfies `∫(f_θ^{C_i})² < 1/eps`.
    pub masks: Vec<Vec<bool>>,
    /// Nodes lying, for every `i`, in some mask with index `>= i`.
    pub limit: Vec<bool>,
}

impl GoodAngleSets {
    pub fn fraction(mask: &[bool]) -> f64 {
        if mask.is_empty() {
            return 0.0;
        }
        mask.iter().filter(|&&b| b).count() as f64 / mask.len() as f64
    }
}

/// Sets of directions where `∫(f_θ^{C_i})²` stays below `1/eps`, one per
/// cover, and their lim sup over the supplied (finite) sequence of covers.
pub fn good_angle_sets(reports: &[SweepReport], eps: f64) -> Result<GoodAngleSets> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "eps must be positive, got {eps}"
        )));
    }
    let Some(first) = reports.first() else {
        return Ok(GoodAngleSets {
            masks: Vec::new(),
            limit: Vec::new(),
        });
    };
    let m = first.rows.len();
    if reports.iter().any(|r| r.rows.len() != m) {
        return Err(Error::InvalidParameter(
            "sweep reports use different grids".into(),
        ));
    }
    let level = 1.0 / eps;
    let masks: Vec<Vec<bool>> = reports
        .iter()
        .map(|r| r.rows.iter().map(|row| row.int_f2 < level).collect())
        .collect();

    // tail[i][k] = node k in some mask j >= i
    let mut tail = vec![false; m];
    let mut limit = vec![true; m];
    for mask in masks.iter().rev() {
        for k in 0..m {
            tail[k] |= mask[k];
            limit[k] &= tail[k];
        }
    }
    Ok(GoodAngleSets { masks, limit })
}
