//! Digit-restricted self-similar subsets of `[0,1)^2`.
//!
//! A [`FractalSpec`] with base `b = 2^k` and digit pairs `D` describes the set
//! of points whose base-`b` expansions use only pairs from `D`. Its depth-`n`
//! discretization is the family of `|D|^n` dyadic squares of level `k n`.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dyadic::{diam_pow, DyadicSquare, MAX_LEVEL};
use crate::error::{Error, Result};
use crate::sum::neumaier_sum;

/// Generation refuses to materialize more squares than this.
pub const MAX_SQUARES: usize = 1 << 22;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec", into = "RawSpec")]
pub struct FractalSpec {
    name: String,
    base: u32,
    digits: Vec<(u32, u32)>,
}

#[derive(Serialize, Deserialize)]
struct RawSpec {
    name: String,
    base: u32,
    digits: Vec<[u32; 2]>,
}

impl TryFrom<RawSpec> for FractalSpec {
    type Error = Error;

    fn try_from(raw: RawSpec) -> Result<Self> {
        FractalSpec::new(
            raw.name,
            raw.base,
            raw.digits.into_iter().map(|[x, y]| (x, y)).collect(),
        )
    }
}

impl From<FractalSpec> for RawSpec {
    fn from(spec: FractalSpec) -> Self {
        RawSpec {
            name: spec.name,
            base: spec.base,
            digits: spec.digits.into_iter().map(|(x, y)| [x, y]).collect(),
        }
    }
}

impl FractalSpec {
    pub fn new(name: impl Into<String>, base: u32, digits: Vec<(u32, u32)>) -> Result<Self> {
        if base < 2 || !base.is_power_of_two() {
            return Err(Error::InvalidSpec("base must be a power of two".into()));
        }
        if digits.is_empty() {
            return Err(Error::InvalidSpec("digit set must not be empty".into()));
        }
        if let Some(&(dx, dy)) = digits.iter().find(|&&(dx, dy)| dx >= base || dy >= base) {
            return Err(Error::InvalidSpec(format!(
                "digit ({dx}, {dy}) not below base {base}"
            )));
        }
        let distinct: BTreeSet<_> = digits.iter().collect();
        if distinct.len() != digits.len() {
            return Err(Error::InvalidSpec("digit pairs must be distinct".into()));
        }
        Ok(FractalSpec {
            name: name.into(),
            base,
            digits,
        })
    }

    /// Every digit pair of base `b`: the whole unit square, dimension 2.
    pub fn full(base: u32) -> Result<Self> {
        let digits = (0..base)
            .flat_map(|y| (0..base).map(move |x| (x, y)))
            .collect();
        Self::new(format!("full-{base}"), base, digits)
    }

    /// Base 4 with digits `{0,2,3} x {0,2,3}`, dimension `log 9 / log 4`.
    pub fn carpet() -> Self {
        let d = [0u32, 2, 3];
        let digits = d
            .iter()
            .flat_map(|&y| d.iter().map(move |&x| (x, y)))
            .collect();
        Self::new("carpet-4-023", 4, digits).expect("valid built-in spec")
    }

    /// Base 4 with digits `{(0,0),(1,1),(2,2)}`, dimension `log 3 / log 4 < 1`.
    pub fn diagonal() -> Self {
        Self::new("diagonal-4", 4, vec![(0, 0), (1, 1), (2, 2)]).expect("valid built-in spec")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn digits(&self) -> &[(u32, u32)] {
        &self.digits
    }

    /// `k` with `base = 2^k`.
    pub fn bits(&self) -> u32 {
        self.base.trailing_zeros()
    }

    /// `log |D| / log b`.
    pub fn similarity_dimension(&self) -> f64 {
        (self.digits.len() as f64).ln() / (self.base as f64).ln()
    }

    pub fn level_at_depth(&self, depth: u32) -> u32 {
        self.bits() * depth
    }

    /// The depth-`n` discretization.
    pub fn squares_at_depth(&self, depth: u32) -> Result<DiscretizedSet> {
        if depth == 0 {
            return Err(Error::InvalidParameter("depth must be at least 1".into()));
        }
        let level = self.bits().saturating_mul(depth);
        if level > MAX_LEVEL {
            return Err(Error::DepthOverflow {
                depth,
                level,
                max: MAX_LEVEL,
            });
        }
        let count = (self.digits.len() as u128).pow(depth);
        if count > MAX_SQUARES as u128 {
            return Err(Error::TooManySquares {
                count,
                cap: MAX_SQUARES,
            });
        }

        let base = self.base as u64;
        let mut cells: Vec<(u64, u64)> = vec![(0, 0)];
        for _ in 0..depth {
            cells = cells
                .iter()
                .flat_map(|&(x, y)| {
                    self.digits
                        .iter()
                        .map(move |&(dx, dy)| (x * base + dx as u64, y * base + dy as u64))
                })
                .collect();
        }
        let squares = cells
            .into_iter()
            .map(|(ix, iy)| DyadicSquare { level, ix, iy })
            .collect();
        Ok(DiscretizedSet {
            spec: self.clone(),
            depth,
            squares,
            s: self.similarity_dimension(),
        })
    }
}

#[derive(Debug, Clone)]
pub struct DiscretizedSet {
    pub spec: FractalSpec,
    pub depth: u32,
    pub squares: Vec<DyadicSquare>,
    /// Similarity dimension of `spec`.
    pub s: f64,
}

impl DiscretizedSet {
    pub fn level(&self) -> u32 {
        self.spec.level_at_depth(self.depth)
    }

    pub fn hausdorff_sum(&self, s: f64) -> f64 {
        hausdorff_sum(&self.squares, s)
    }
}

/// `sum diam(Q)^s` over a family of squares.
pub fn hausdorff_sum(squares: &[DyadicSquare], s: f64) -> f64 {
    neumaier_sum(squares.iter().map(|q| q.diam_pow(s)))
}

/// Outcome of [`regularity_scan`]: the largest observed
/// `(mass(B_r(x)) / total mass) / r^s`, and where it was attained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Regularity {
    pub constant: f64,
    pub center: (f64, f64),
    pub radius: f64,
}

/// Empirical upper-regularity constant of the discretized measure that gives
/// each square mass `diam(Q)^s`.
///
/// Ball centers are `samples` square centers drawn with a seeded RNG; a square
/// counts toward `B_r(x)` only when it lies inside the open ball.
pub fn regularity_scan(
    ds: &DiscretizedSet,
    s: f64,
    radii: &[f64],
    samples: usize,
    seed: u64,
) -> Result<Regularity> {
    if radii.iter().any(|&r| !(r > 0.0)) {
        return Err(Error::InvalidParameter("radii must be positive".into()));
    }
    let total = ds.hausdorff_sum(s);
    let mut best = Regularity {
        constant: 0.0,
        center: (0.0, 0.0),
        radius: 0.0,
    };
    if ds.squares.is_empty() || radii.is_empty() || samples == 0 {
        return Ok(best);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let center = ds.squares[rng.gen_range(0..ds.squares.len())].center();
        for &r in radii {
            let mass = neumaier_sum(
                ds.squares
                    .iter()
                    .filter(|q| inside_open_ball(q, center, r))
                    .map(|q| diam_pow(q.level, s)),
            );
            let ratio = mass / total / r.powf(s);
            if ratio > best.constant {
                best = Regularity {
                    constant: ratio,
                    center,
                    radius: r,
                };
            }
        }
    }
    Ok(best)
}

fn inside_open_ball(q: &DyadicSquare, (cx, cy): (f64, f64), r: f64) -> bool {
    let ((x0, y0), (x1, y1)) = q.bounds();
    let dx = (cx - x0).abs().max((cx - x1).abs());
    let dy = (cy - y0).abs().max((cy - y1).abs());
    dx.hypot(dy) < r
}
