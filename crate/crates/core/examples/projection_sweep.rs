//! f_theta of a cover across directions: projected measure, integrals and the
//! Cauchy-Schwarz lower bound (int f)^2 / int f^2.

use marstrand::estimates::{sweep, ThetaGrid};
use marstrand::{build_good_cover_scoped, FractalSpec, MergeScope};

fn main() -> marstrand::Result<()> {
    let ds = FractalSpec::carpet().squares_at_depth(3)?;
    let (cover, _) = build_good_cover_scoped(&ds, ds.s, 1.0, MergeScope::Fine)?;
    let report = sweep(&cover, &ThetaGrid::new(16)?);
    println!(
        "{:>9} {:>10} {:>10} {:>10} {:>10}",
        "theta", "m_proj", "int f", "int f^2", "cs_lower"
    );
    for row in &report.rows {
        println!(
            "{:>9.4} {:>10.5} {:>10.5} {:>10.5} {:>10.5}",
            row.theta, row.m_proj, row.int_f, row.int_f2, row.cs_lower
        );
    }
    println!("I_numeric = {:.6}", report.i_numeric());
    Ok(())
}
