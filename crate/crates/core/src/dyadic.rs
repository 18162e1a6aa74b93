//! Dyadic squares of the unit square `[0,1)^2`.
//!
//! A square at level `i` has side `2^-i` and integer lattice indices
//! `0 <= ix, iy < 2^i`. Containment and disjointness are decided on the
//! indices alone, so no floating point enters the combinatorics.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Deepest level a square may live at.
pub const MAX_LEVEL: u32 = 30;

/// `2^-level` as an exact power of two.
#[inline]
pub fn side_at(level: u32) -> f64 {
    f64::powi(2.0, -(level as i32))
}

/// `diam^s` for a square at `level`, computed as `2^(s(1/2 - level))`.
///
/// Writing the weight as a single power of two keeps integer-exponent cases
/// exact (`s = 2` gives `2^(1-2 level)`), so sums of children weights tie
/// with their parent weight when they should.
#[inline]
pub fn diam_pow(level: u32, s: f64) -> f64 {
    f64::powf(2.0, s * (0.5 - level as f64))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DyadicSquare {
    pub level: u32,
    pub ix: u64,
    pub iy: u64,
}

impl DyadicSquare {
    pub const ROOT: DyadicSquare = DyadicSquare {
        level: 0,
        ix: 0,
        iy: 0,
    };

    pub fn new(level: u32, ix: u64, iy: u64) -> Result<Self> {
        if level > MAX_LEVEL {
            return Err(Error::LevelTooDeep {
                level,
                max: MAX_LEVEL,
            });
        }
        let n = 1u64 << level;
        if ix >= n || iy >= n {
            return Err(Error::IndexOutOfRange { level, ix, iy });
        }
        Ok(DyadicSquare { level, ix, iy })
    }

    /// The unique square of `level` containing `(x, y)`.
    pub fn locate(x: f64, y: f64, level: u32) -> Result<Self> {
        if !(0.0..1.0).contains(&x) || !(0.0..1.0).contains(&y) {
            return Err(Error::PointOutside { x, y });
        }
        if level > MAX_LEVEL {
            return Err(Error::LevelTooDeep {
                level,
                max: MAX_LEVEL,
            });
        }
        // Scaling by a power of two is exact, so the floor is the true index.
        let scale = (1u64 << level) as f64;
        Ok(DyadicSquare {
            level,
            ix: (x * scale).floor() as u64,
            iy: (y * scale).floor() as u64,
        })
    }

    #[inline]
    pub fn side(&self) -> f64 {
        side_at(self.level)
    }

    /// Diameter `|Q| = sqrt(2) * side`.
    #[inline]
    pub fn diam(&self) -> f64 {
        std::f64::consts::SQRT_2 * self.side()
    }

    #[inline]
    pub fn diam_pow(&self, s: f64) -> f64 {
        diam_pow(self.level, s)
    }

    #[inline]
    pub fn center(&self) -> (f64, f64) {
        let side = self.side();
        ((self.ix as f64 + 0.5) * side, (self.iy as f64 + 0.5) * side)
    }

    /// Lower-left and upper-right corners of the half-open square.
    pub fn bounds(&self) -> ((f64, f64), (f64, f64)) {
        let side = self.side();
        (
            (self.ix as f64 * side, self.iy as f64 * side),
            ((self.ix + 1) as f64 * side, (self.iy + 1) as f64 * side),
        )
    }

    pub fn contains_point(&self, x: f64, y: f64) -> bool {
        let ((x0, y0), (x1, y1)) = self.bounds();
        x0 <= x && x < x1 && y0 <= y && y < y1
    }

    pub fn parent(&self) -> Result<Self> {
        if self.level == 0 {
            return Err(Error::NoParent);
        }
        Ok(DyadicSquare {
            level: self.level - 1,
            ix: self.ix >> 1,
            iy: self.iy >> 1,
        })
    }

    /// The level-`level` square containing this one. `level` must not exceed
    /// `self.level`.
    pub fn ancestor_at(&self, level: u32) -> Self {
        debug_assert!(level <= self.level);
        let shift = self.level - level;
        DyadicSquare {
            level,
            ix: self.ix >> shift,
            iy: self.iy >> shift,
        }
    }

    /// Children in the order (0,0), (1,0), (0,1), (1,1).
    pub fn children(&self) -> Result<[Self; 4]> {
        if self.level >= MAX_LEVEL {
            return Err(Error::LevelTooDeep {
                level: self.level + 1,
                max: MAX_LEVEL,
            });
        }
        let (l, x, y) = (self.level + 1, self.ix << 1, self.iy << 1);
        Ok([
            DyadicSquare {
                level: l,
                ix: x,
                iy: y,
            },
            DyadicSquare {
                level: l,
                ix: x + 1,
                iy: y,
            },
            DyadicSquare {
                level: l,
                ix: x,
                iy: y + 1,
            },
            DyadicSquare {
                level: l,
                ix: x + 1,
                iy: y + 1,
            },
        ])
    }

    /// `other ⊆ self`, decided on lattice indices.
    #[inline]
    pub fn contains(&self, other: &DyadicSquare) -> bool {
        self.level <= other.level && other.ancestor_at(self.level) == *self
    }
}

impl fmt::Display for DyadicSquare {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(level {}, ix {}, iy {})", self.level, self.ix, self.iy)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub xmin: f64,
    pub ymin: f64,
    pub xmax: f64,
    pub ymax: f64,
}

impl BoundingBox {
    pub fn new(xmin: f64, ymin: f64, xmax: f64, ymax: f64) -> Result<Self> {
        let in_unit = |v: f64| (0.0..=1.0).contains(&v);
        if !(in_unit(xmin) && in_unit(ymin) && in_unit(xmax) && in_unit(ymax)) {
            return Err(Error::InvalidBox("coordinates must lie in [0,1]".into()));
        }
        if xmin > xmax || ymin > ymax {
            return Err(Error::InvalidBox("min corner exceeds max corner".into()));
        }
        Ok(BoundingBox {
            xmin,
            ymin,
            xmax,
            ymax,
        })
    }

    /// `|U|`, the length of the diagonal.
    pub fn diam(&self) -> f64 {
        (self.xmax - self.xmin).hypot(self.ymax - self.ymin)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FourCover {
    pub squares: Vec<DyadicSquare>,
    /// The box was too small to satisfy the side bound at any level up to
    /// `MAX_LEVEL`; `squares` holds the single deepest square at its corner.
    pub degenerate: bool,
}

/// Cover `U` by at most four dyadic squares of one level `i`, where
/// `2^(-i-1) <= |U| < 2^-i` (clamped to `i >= 0`), each of side at most `2|U|`.
///
/// The anchor square is the one containing the lower-left corner of `U`; its
/// right, upper and diagonal neighbours are added only when `U` reaches them.
pub fn cover_four(u: &BoundingBox, deepest: u32) -> Result<FourCover> {
    if deepest > MAX_LEVEL {
        return Err(Error::LevelTooDeep {
            level: deepest,
            max: MAX_LEVEL,
        });
    }
    if u.xmin >= 1.0 || u.ymin >= 1.0 {
        return Err(Error::PointOutside {
            x: u.xmin,
            y: u.ymin,
        });
    }
    let d = u.diam();
    let level = if d > 0.0 { level_for_diam(d) } else { None };
    let level = match level {
        Some(l) if l <= deepest => l,
        _ => {
            return Ok(FourCover {
                squares: vec![DyadicSquare::locate(u.xmin, u.ymin, deepest)?],
                degenerate: true,
            })
        }
    };

    let anchor = DyadicSquare::locate(u.xmin, u.ymin, level)?;
    let side = anchor.side();
    let n = 1u64 << level;
    let reach_x = u.xmax >= (anchor.ix + 1) as f64 * side && anchor.ix + 1 < n;
    let reach_y = u.ymax >= (anchor.iy + 1) as f64 * side && anchor.iy + 1 < n;

    let mut squares = vec![anchor];
    if reach_x {
        squares.push(DyadicSquare {
            ix: anchor.ix + 1,
            ..anchor
        });
    }
    if reach_y {
        squares.push(DyadicSquare {
            iy: anchor.iy + 1,
            ..anchor
        });
    }
    if reach_x && reach_y {
        squares.push(DyadicSquare {
            ix: anchor.ix + 1,
            iy: anchor.iy + 1,
            ..anchor
        });
    }
    Ok(FourCover {
        squares,
        degenerate: false,
    })
}

/// Level `i >= 0` with `2^(-i-1) <= d < 2^-i`, or 0 when `d >= 1/2`.
/// `None` when the level would exceed `MAX_LEVEL`.
fn level_for_diam(d: f64) -> Option<u32> {
    let mut level = 0u32;
    while d < side_at(level + 1) {
        level += 1;
        if level > MAX_LEVEL {
            return None;
        }
    }
    Some(level)
}

/// `None` when the squares are pairwise disjoint; otherwise the first
/// offending `(container, contained)` pair in input order.
pub fn validate_disjoint(squares: &[DyadicSquare]) -> Option<(DyadicSquare, DyadicSquare)> {
    let mut seen: HashSet<DyadicSquare> = HashSet::with_capacity(squares.len());
    for q in squares {
        if !seen.insert(*q) {
            return Some((*q, *q));
        }
    }
    for q in squares {
        for level in (0..q.level).rev() {
            let a = q.ancestor_at(level);
            if seen.contains(&a) {
                return Some((a, *q));
            }
        }
    }
    None
}
