//! Good dyadic covers.
//!
//! Starting from a disjoint family of dyadic squares, every dyadic square `Q`
//! is visited from the deepest level up to the root. When the cover mass
//! strictly inside `Q` exceeds `tau * diam(Q)^s`, the squares inside `Q` are
//! replaced by `Q` itself. Ancestors are evaluated after their children have
//! been merged, so merges cascade upward within the single pass.
//!
//! With [`MergeScope::Fine`] only squares at least as deep as the coarsest
//! input square are candidates, so the cover never gets coarser than the
//! family it started from.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::dyadic::{diam_pow, validate_disjoint, DyadicSquare};
use crate::error::{Error, Result};
use crate::fractal::{hausdorff_sum, DiscretizedSet};

#[derive(Debug, Clone, PartialEq)]
pub struct DyadicCover {
    /// Pairwise disjoint, sorted by `(level, ix, iy)`.
    pub squares: Vec<DyadicSquare>,
    pub s: f64,
    pub tau: f64,
}

/// One replacement performed by [`build_good_cover_traced`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MergeStep {
    pub square: DyadicSquare,
    /// Cover mass inside `square` before the merge.
    pub mass_before: f64,
    /// `diam(square)^s`, the mass after the merge.
    pub mass_after: f64,
}

impl DyadicCover {
    /// Wraps an already disjoint family without merging anything.
    pub fn from_squares(mut squares: Vec<DyadicSquare>, s: f64, tau: f64) -> Result<Self> {
        if let Some((a, b)) = validate_disjoint(&squares) {
            return Err(Error::InvalidParameter(format!(
                "squares {a} and {b} overlap"
            )));
        }
        squares.sort_unstable();
        Ok(DyadicCover { squares, s, tau })
    }

    pub fn len(&self) -> usize {
        self.squares.len()
    }

    pub fn is_empty(&self) -> bool {
        self.squares.is_empty()
    }

    pub fn hausdorff_sum(&self) -> f64 {
        hausdorff_sum(&self.squares, self.s)
    }

    /// `||C||`, the largest diameter in the cover (0 for an empty cover).
    pub fn diameter(&self) -> f64 {
        self.squares.iter().map(|q| q.level).min().map_or(0.0, |l| {
            DyadicSquare {
                level: l,
                ix: 0,
                iy: 0,
            }
            .diam()
        })
    }

    /// True when every square of `family` lies inside some cover square.
    pub fn covers(&self, family: &[DyadicSquare]) -> bool {
        let set: HashSet<_> = self.squares.iter().copied().collect();
        family
            .iter()
            .all(|q| (0..=q.level).any(|l| set.contains(&q.ancestor_at(l))))
    }

    /// The largest value of `sum_{Q' in C, Q' ⊆ Q} diam(Q')^s / diam(Q)^s`
    /// over all dyadic squares `Q`. Squares strictly inside a cover element
    /// contain no cover mass, so only cover elements and their ancestors
    /// matter.
    pub fn goodness_constant(&self) -> f64 {
        let Some(deepest) = self.squares.iter().map(|q| q.level).max() else {
            return 0.0;
        };
        let mut best: f64 = 1.0;
        let mut by_level: BTreeMap<u32, Vec<DyadicSquare>> = BTreeMap::new();
        for q in &self.squares {
            by_level.entry(q.level).or_default().push(*q);
        }
        let mut current: BTreeMap<DyadicSquare, f64> = BTreeMap::new();
        for level in (0..=deepest).rev() {
            let mut next: BTreeMap<DyadicSquare, f64> = BTreeMap::new();
            for (q, mass) in &current {
                *next.entry(q.ancestor_at(level)).or_insert(0.0) += mass;
            }
            for mass in next.values() {
                best = best.max(mass / diam_pow(level, self.s));
            }
            for q in by_level.get(&level).into_iter().flatten() {
                next.insert(*q, q.diam_pow(self.s));
            }
            current = next;
        }
        best
    }
}

/// Upper bound on [`DyadicCover::goodness_constant`] guaranteed by
/// [`build_good_cover`]: `max(1, tau * 2^(2-s))`.
pub fn goodness_bound(s: f64, tau: f64) -> f64 {
    1f64.max(tau * 2f64.powf(2.0 - s))
}

/// Which dyadic squares may absorb the cover squares inside them.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MergeScope {
    /// Every level down from the root.
    #[default]
    All,
    /// Levels at or below the coarsest input square. The bound of
    /// [`goodness_bound`] then holds only for squares at those levels.
    Fine,
}

impl std::str::FromStr for MergeScope {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        match text {
            "all" => Ok(MergeScope::All),
            "fine" => Ok(MergeScope::Fine),
            other => Err(Error::InvalidParameter(format!(
                "merge scope must be `all` or `fine`, got `{other}`"
            ))),
        }
    }
}

pub fn build_good_cover(ds: &DiscretizedSet, s: f64, tau: f64) -> Result<DyadicCover> {
    build_good_cover_from(&ds.squares, s, tau).map(|(cover, _)| cover)
}

pub fn build_good_cover_scoped(
    ds: &DiscretizedSet,
    s: f64,
    tau: f64,
    scope: MergeScope,
) -> Result<(DyadicCover, Vec<MergeStep>)> {
    merge_bottom_up(&ds.squares, s, tau, scope)
}

pub fn build_good_cover_traced(
    ds: &DiscretizedSet,
    s: f64,
    tau: f64,
) -> Result<(DyadicCover, Vec<MergeStep>)> {
    build_good_cover_from(&ds.squares, s, tau)
}

struct Node {
    mass: f64,
    members: Vec<DyadicSquare>,
}

/// Bottom-up merge over an arbitrary disjoint family of squares.
pub fn build_good_cover_from(
    squares: &[DyadicSquare],
    s: f64,
    tau: f64,
) -> Result<(DyadicCover, Vec<MergeStep>)> {
    merge_bottom_up(squares, s, tau, MergeScope::All)
}

fn merge_bottom_up(
    squares: &[DyadicSquare],
    s: f64,
    tau: f64,
    scope: MergeScope,
) -> Result<(DyadicCover, Vec<MergeStep>)> {
    if !(tau > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tau must be positive, got {tau}"
        )));
    }
    if squares.is_empty() {
        return Err(Error::InvalidParameter("cannot cover an empty set".into()));
    }
    if let Some((a, b)) = validate_disjoint(squares) {
        return Err(Error::InvalidParameter(format!(
            "squares {a} and {b} overlap"
        )));
    }

    let mut by_level: BTreeMap<u32, Vec<DyadicSquare>> = BTreeMap::new();
    for q in squares {
        by_level.entry(q.level).or_default().push(*q);
    }
    let deepest = *by_level.keys().next_back().expect("non-empty");
    let floor = match scope {
        MergeScope::All => 0,
        MergeScope::Fine => *by_level.keys().next().expect("non-empty"),
    };

    let mut merges = Vec::new();
    let mut current: BTreeMap<DyadicSquare, Node> = BTreeMap::new();
    for level in (0..=deepest).rev() {
        let mut next: BTreeMap<DyadicSquare, Node> = BTreeMap::new();
        for (q, mut node) in std::mem::take(&mut current) {
            let entry = next.entry(q.ancestor_at(level)).or_insert_with(|| Node {
                mass: 0.0,
                members: Vec::new(),
            });
            entry.mass += node.mass;
            entry.members.append(&mut node.members);
        }

        let weight = |q: &DyadicSquare| diam_pow(q.level, s);
        for (q, node) in next.iter_mut().filter(|_| level >= floor) {
            let own = weight(q);
            if node.mass > tau * own {
                merges.push(MergeStep {
                    square: *q,
                    mass_before: node.mass,
                    mass_after: own,
                });
                node.mass = own;
                node.members.clear();
                node.members.push(*q);
            }
        }

        // Cover squares sitting at this level join after the merge test: only
        // strict ancestors of cover elements are candidates.
        for q in by_level.remove(&level).unwrap_or_default() {
            next.insert(
                q,
                Node {
                    mass: weight(&q),
                    members: vec![q],
                },
            );
        }
        current = next;
    }

    let mut out: Vec<DyadicSquare> = current.into_values().flat_map(|n| n.members).collect();
    out.sort_unstable();
    Ok((
        DyadicCover {
            squares: out,
            s,
            tau,
        },
        merges,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fractal::FractalSpec;

    #[test]
    fn full_grid_tie_is_left_alone() {
        for n in 1..=4 {
            let ds = FractalSpec::full(2).unwrap().squares_at_depth(n).unwrap();
            let cover = build_good_cover(&ds, 2.0, 1.0).unwrap();
            assert_eq!(cover.squares.len(), 4usize.pow(n));
            assert_eq!(cover.goodness_constant(), 1.0);
        }
    }

    #[test]
    fn full_grid_collapses_below_one() {
        let ds = FractalSpec::full(2).unwrap().squares_at_depth(3).unwrap();
        let (cover, merges) = build_good_cover_traced(&ds, 2.0, 0.9).unwrap();
        assert_eq!(cover.squares, vec![DyadicSquare::ROOT]);
        // every internal node merges: 16 + 4 + 1
        assert_eq!(merges.len(), 21);
    }

    #[test]
    fn carpet_merges_the_full_binary_quadrants() {
        // Digits {0,2,3} in base 4 are binary 00, 10, 11, so every base-4 cell
        // has one odd-level child holding all four of its grandchildren. With
        // r the mass ratio of a base-4 cell, that child has ratio 4r/3 and
        // merges when 4r/3 > 1; the cell then gets ratio 5r/9 + 1/3. From
        // r = 1 this decreases to 3/4 from above, so the merge fires at every
        // scale. Counts obey c_n = 5 c_(n-1) + 1, merges (9^n - 1)/8, and the
        // total mass is sqrt(3) r_n.
        let spec = FractalSpec::carpet();
        let s = spec.similarity_dimension();
        let (mut count, mut ratio) = (1usize, 1.0f64);
        for n in 1..=4u32 {
            count = 5 * count + 1;
            ratio = 5.0 * ratio / 9.0 + 1.0 / 3.0;
            let ds = spec.squares_at_depth(n).unwrap();
            let (cover, merges) = build_good_cover_traced(&ds, s, 1.0).unwrap();
            assert_eq!(cover.len(), count);
            assert_eq!(merges.len(), (9usize.pow(n) - 1) / 8);
            assert!((cover.hausdorff_sum() - 3f64.sqrt() * ratio).abs() < 1e-12);
            assert!(cover.covers(&ds.squares));
            assert!(cover.squares.contains(&DyadicSquare::new(1, 1, 1).unwrap()));
        }
    }

    #[test]
    fn fine_scope_keeps_uniform_families() {
        let spec = FractalSpec::carpet();
        let ds = spec.squares_at_depth(2).unwrap();
        let (cover, merges) = build_good_cover_scoped(&ds, ds.s, 1.0, MergeScope::Fine).unwrap();
        assert!(merges.is_empty());
        let mut raw = ds.squares.clone();
        raw.sort_unstable();
        assert_eq!(cover.squares, raw);
        // A mixed family merges only down at the finer levels.
        let fine = DyadicSquare::new(2, 3, 3).unwrap().children().unwrap();
        let mut family = vec![DyadicSquare::new(2, 0, 0).unwrap()];
        family.extend(fine);
        let (cover, merges) = merge_bottom_up(&family, 1.5, 0.5, MergeScope::Fine).unwrap();
        assert_eq!(merges.len(), 1);
        assert_eq!(cover.len(), 2);
        let ds = spec.squares_at_depth(1).unwrap();
        let (all, _) = build_good_cover_scoped(&ds, ds.s, 1.0, MergeScope::All).unwrap();
        let (fine, _) = build_good_cover_scoped(&ds, ds.s, 1.0, MergeScope::Fine).unwrap();
        assert_eq!((all.len(), fine.len()), (6, 9));
    }

    #[test]
    fn merge_scope_parses() {
        assert_eq!("fine".parse::<MergeScope>().unwrap(), MergeScope::Fine);
        assert!("coarse".parse::<MergeScope>().is_err());
    }

    #[test]
    fn carpet_is_untouched_above_four_thirds() {
        let spec = FractalSpec::carpet();
        let ds = spec.squares_at_depth(3).unwrap();
        let cover = build_good_cover(&ds, ds.s, 2.0).unwrap();
        assert_eq!(cover.len(), 729);
        assert!((cover.goodness_constant() - 4.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn goodness_of_root_and_grid() {
        let root = DyadicCover::from_squares(vec![DyadicSquare::ROOT], 1.3, 1.0).unwrap();
        assert_eq!(root.goodness_constant(), 1.0);
        let ds = FractalSpec::full(2).unwrap().squares_at_depth(3).unwrap();
        let grid = DyadicCover::from_squares(ds.squares.clone(), 2.0, 1.0).unwrap();
        assert_eq!(grid.goodness_constant(), 1.0);
    }

    #[test]
    fn goodness_counts_ancestor_mass() {
        // Two level-1 squares, s = 1: root holds 2 * (sqrt2/2) = sqrt2 = diam(root).
        let cover = DyadicCover::from_squares(
            vec![
                DyadicSquare::new(1, 0, 0).unwrap(),
                DyadicSquare::new(1, 1, 1).unwrap(),
            ],
            1.0,
            1.0,
        )
        .unwrap();
        assert!((cover.goodness_constant() - 1.0).abs() < 1e-15);
        let three = DyadicCover::from_squares(
            vec![
                DyadicSquare::new(1, 0, 0).unwrap(),
                DyadicSquare::new(1, 1, 1).unwrap(),
                DyadicSquare::new(1, 0, 1).unwrap(),
            ],
            1.0,
            1.0,
        )
        .unwrap();
        assert!((three.goodness_constant() - 1.5).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_input() {
        let ds = FractalSpec::carpet().squares_at_depth(1).unwrap();
        assert!(build_good_cover(&ds, 1.5, 0.0).is_err());
        assert!(build_good_cover_from(&[], 1.5, 1.0).is_err());
        let overlapping = [DyadicSquare::ROOT, DyadicSquare::new(1, 0, 0).unwrap()];
        assert!(build_good_cover_from(&overlapping, 1.5, 1.0).is_err());
    }

    #[test]
    fn merge_steps_shrink_mass() {
        let ds = FractalSpec::carpet().squares_at_depth(3).unwrap();
        for tau in [0.5, 1.0, 2.0] {
            let (_, merges) = build_good_cover_traced(&ds, ds.s, tau).unwrap();
            for m in merges {
                assert!(m.mass_before > tau * m.mass_after);
                assert!(m.mass_after < m.mass_before / tau);
            }
        }
    }

    #[test]
    fn diameter_is_coarsest_square() {
        let cover = DyadicCover::from_squares(
            vec![
                DyadicSquare::new(2, 0, 0).unwrap(),
                DyadicSquare::new(3, 7, 7).unwrap(),
            ],
            1.0,
            1.0,
        )
        .unwrap();
        assert_eq!(cover.diameter(), DyadicSquare::new(2, 0, 0).unwrap().diam());
    }
}
