//! Locating points, walking the dyadic tree and covering a box by four squares.

use marstrand::{cover_four, BoundingBox, DyadicSquare, MAX_LEVEL};

fn main() -> marstrand::Result<()> {
    let (x, y) = (0.3, 0.71);
    let q = DyadicSquare::locate(x, y, 5)?;
    println!(
        "({x}, {y}) at level 5 lies in {q}, side {}, diameter {:.6}",
        q.side(),
        q.diam()
    );

    let mut chain = vec![q];
    while let Ok(p) = chain.last().unwrap().parent() {
        chain.push(p);
    }
    let path: Vec<String> = chain.iter().map(|q| q.to_string()).collect();
    println!("ancestors: {}", path.join(" <- "));

    for c in q.children()? {
        println!("  child {c} holds the point: {}", c.contains_point(x, y));
    }

    let u = BoundingBox::new(0.2, 0.2, 0.26, 0.31)?;
    let fc = cover_four(&u, MAX_LEVEL)?;
    println!("box with diameter {:.4} is covered by:", u.diam());
    for q in &fc.squares {
        println!("  {q} (side {} <= 2|U| = {:.4})", q.side(), 2.0 * u.diam());
    }
    Ok(())
}
