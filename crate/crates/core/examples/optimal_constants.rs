//! Best constants between pairs of difference measures, from the extrema
//! of the ratio of their second derivatives.

use meanforge::grid::GridSpec;
use meanforge::ratio::{from_profile, profile, REFERENCE_CONSTANTS};

fn main() -> meanforge::Result<()> {
    let grid = GridSpec::default();
    for reference in REFERENCE_CONSTANTS.iter() {
        let prof = profile(reference.pair, &grid)?;
        let ineq = from_profile(&prof);
        let mut line = format!(
            "{:<9} g(1) = {:<12.10} {:<12} {}",
            reference.pair.to_string(),
            prof.value_at_1,
            prof.pattern.to_string(),
            ineq.sharp_statement()
        );
        if (prof.value_at_1 - reference.published.value()).abs() > 1e-9 {
            line += &format!("   (published {})", reference.published);
        }
        println!("{line}");
    }
    Ok(())
}
