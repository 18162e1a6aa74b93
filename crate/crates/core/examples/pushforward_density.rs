//! Push-forward of the cover mass onto a line, its window averages, and the
//! ratio ||f_(theta,eps)||^2 / ||f_theta||^2.

use marstrand::density::{domination_check, mollified_density, pushforward_density, Quadrature};
use marstrand::{build_good_cover_scoped, Angle, FractalSpec, MergeScope};

fn main() -> marstrand::Result<()> {
    let ds = FractalSpec::carpet().squares_at_depth(2)?;
    let (cover, _) = build_good_cover_scoped(&ds, ds.s, 1.0, MergeScope::Fine)?;
    let theta = Angle::new(0.3)?;
    let d = pushforward_density(&cover, theta);
    println!(
        "mass {:.6} (sum |Q|^s = {:.6})",
        d.mass,
        cover.hausdorff_sum()
    );

    let eps = 2.0 * cover.diameter();
    for x in [0.0, 0.25, 0.5, 0.75, 1.0] {
        println!(
            "  density at {x:.2}: {:.4}, window average: {:.4}",
            d.density.eval(x),
            mollified_density(&d, eps, x)?
        );
    }
    for k in [1.0, 2.0, 4.0] {
        let dom = domination_check(&cover, theta, k * cover.diameter(), Quadrature::Exact)?;
        println!("eps = {k} x diameter: ratio {:.4}", dom.ratio);
    }
    Ok(())
}
