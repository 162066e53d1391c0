//! Difference measures and their generating functions.
//!
//! Every measure is homogeneous, so `M(a, b) = a f(b/a)`; the second
//! column recomputes it that way.

use meanforge::generating::{difference, generating_function, phi, DifferenceKind};
use meanforge::means::PositivePair;

fn main() -> meanforge::Result<()> {
    let p = PositivePair::new(2.0, 5.0)?;
    println!(
        "{:<6} {:>20} {:>20} {:>14}",
        "kind", "M(2,5)", "2 f(5/2)", "f''(5/2)"
    );
    for kind in DifferenceKind::ALL {
        let gf = generating_function(kind);
        let f2 = gf
            .f2(p.ratio())
            .map_or_else(|| "-".to_string(), |v| format!("{v:.6e}"));
        println!(
            "{:<6} {:>20.15} {:>20.15} {:>14}",
            kind.to_string(),
            difference(kind, p),
            phi(&gf, p),
            f2
        );
    }
    Ok(())
}
