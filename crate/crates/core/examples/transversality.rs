//! The set of directions where two squares' projections meet, against the
//! transversality bound 2 pi max(|Q|, |Q'|) / |x - x'|.

use marstrand::projection::{center_distance, effective_transversality_bound};
use marstrand::{theta_overlap_measure, DyadicSquare};

fn main() -> marstrand::Result<()> {
    let a = DyadicSquare::new(4, 0, 0)?;
    println!(
        "{:>22} {:>10} {:>12} {:>12}",
        "partner", "distance", "overlap", "bound"
    );
    for k in [1u64, 2, 3, 5, 8, 15] {
        let b = DyadicSquare::new(4, k, k / 2)?;
        println!(
            "{:>22} {:>10.5} {:>12.6} {:>12.6}",
            b.to_string(),
            center_distance(&a, &b),
            theta_overlap_measure(&a, &b),
            effective_transversality_bound(&a, &b)
        );
    }
    Ok(())
}
