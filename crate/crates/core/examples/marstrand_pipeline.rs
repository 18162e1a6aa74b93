//! The L2 estimates across depths: quadrature, pair bound, transversality
//! bound, distance shells and the good-angle sets.

use marstrand::estimates::{
    good_angle_sets, pair_sums, shell_summary, sweep, GoodAngleSets, ThetaGrid,
};
use marstrand::{build_good_cover_scoped, FractalSpec, MergeScope};

fn main() -> marstrand::Result<()> {
    let spec = FractalSpec::carpet();
    let grid = ThetaGrid::new(64)?;
    let mut reports = Vec::new();
    for depth in 1..=3 {
        let ds = spec.squares_at_depth(depth)?;
        let (cover, _) = build_good_cover_scoped(&ds, ds.s, 1.0, MergeScope::Fine)?;
        let report = sweep(&cover, &grid);
        let sums = pair_sums(&cover, 10_000)?;
        let shells = shell_summary(&cover, 10_000)?;
        println!(
            "depth {depth}: I_numeric {:.4} <= I_pair {:.4} <= I_trans {:.4} (literal {:.4}), shell constant {:.4}",
            report.i_numeric(),
            sums.pair_bound,
            sums.transversal_capped,
            sums.transversal_literal,
            shells.max_normalized
        );
        reports.push(report);
    }
    for eps in [0.36, 0.4, 0.44] {
        let sets = good_angle_sets(&reports, eps)?;
        let fractions: Vec<String> = sets
            .masks
            .iter()
            .map(|m| format!("{:.3}", GoodAngleSets::fraction(m)))
            .collect();
        println!(
            "eps {eps}: good fractions per depth [{}], limit {:.3}",
            fractions.join(", "),
            GoodAngleSets::fraction(&sets.limit)
        );
    }
    Ok(())
}
