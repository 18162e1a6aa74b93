//! Digit-defined fractals: discretization, sum of |Q|^s and a regularity scan.

use marstrand::{regularity_scan, FractalSpec};

fn main() -> marstrand::Result<()> {
    let custom = FractalSpec::new("corners", 2, vec![(0, 0), (1, 1), (0, 1)])?;
    for spec in [FractalSpec::carpet(), FractalSpec::diagonal(), custom] {
        let s = spec.similarity_dimension();
        println!(
            "{} (base {}, {} digits): s = {s:.6}",
            spec.name(),
            spec.base(),
            spec.digits().len()
        );
        for depth in 1..=4 {
            let ds = spec.squares_at_depth(depth)?;
            let reg = regularity_scan(&ds, s, &[0.5, 0.25, 0.125], 64, 7)?;
            println!(
                "  depth {depth}: {:>6} squares at level {:>2}, sum |Q|^s = {:.6}, mass ratio <= {:.4}",
                ds.squares.len(),
                ds.level(),
                ds.hausdorff_sum(s),
                reg.constant
            );
        }
    }
    let spec_json = serde_json::to_string(&FractalSpec::carpet()).unwrap();
    println!("spec file format: {spec_json}");
    Ok(())
}
