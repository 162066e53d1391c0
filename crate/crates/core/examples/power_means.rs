//! The seven named means and the power-mean family for one pair.
//!
//! cargo run --example power_means -- 1 9

use meanforge::means::{mean, power_mean, MeanKind, MeanOrder, PositivePair};

fn main() -> meanforge::Result<()> {
    let args: Vec<f64> = std::env::args()
        .skip(1)
        .filter_map(|s| s.parse().ok())
        .collect();
    let (a, b) = match args[..] {
        [a, b, ..] => (a, b),
        _ => (1.0, 9.0),
    };
    let p = PositivePair::new(a, b)?;

    println!("pair ({a}, {b})");
    for kind in MeanKind::ALL {
        println!(
            "  {:<3} {:<22} {:.15}",
            kind.symbol(),
            kind.name(),
            mean(kind, p)
        );
    }

    println!("power means");
    for t in [
        f64::NEG_INFINITY,
        -4.0,
        -1.0,
        0.0,
        1e-9,
        0.5,
        1.0,
        2.0,
        4.0,
        f64::INFINITY,
    ] {
        println!(
            "  t = {t:>6}  B = {:.15}",
            power_mean(MeanOrder::new(t)?, p)
        );
    }
    Ok(())
}
