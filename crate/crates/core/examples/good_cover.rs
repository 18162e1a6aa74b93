//! Merging a discretized set into a good dyadic cover, at every level or only
//! at the fine ones.

use marstrand::cover::build_good_cover_traced;
use marstrand::{build_good_cover_scoped, goodness_bound, FractalSpec, MergeScope};

fn main() -> marstrand::Result<()> {
    let spec = FractalSpec::carpet();
    let s = spec.similarity_dimension();
    for tau in [0.5, 1.0, 2.0] {
        println!(
            "tau = {tau}, guaranteed goodness <= {:.4}",
            goodness_bound(s, tau)
        );
        for depth in 1..=4 {
            let ds = spec.squares_at_depth(depth)?;
            let (cover, merges) = build_good_cover_traced(&ds, s, tau)?;
            println!(
                "  depth {depth}: {:>5} -> {:>5} squares after {:>4} merges, goodness {:.4}, diameter {:.4}",
                ds.squares.len(),
                cover.len(),
                merges.len(),
                cover.goodness_constant(),
                cover.diameter()
            );
        }
    }

    let ds = spec.squares_at_depth(3)?;
    let (fine, _) = build_good_cover_scoped(&ds, s, 1.0, MergeScope::Fine)?;
    println!(
        "fine scope at depth 3: {} squares, diameter {:.4}, goodness {:.4}",
        fine.len(),
        fine.diameter(),
        fine.goodness_constant()
    );
    Ok(())
}
