//! Builds the combined machine-readable report and writes it to stdout.
//!
//! cargo run --example json_report > report.json

use meanforge::chains::{builtin_chains, verify_chain};
use meanforge::convexity::certify_convexity;
use meanforge::generating::DifferenceKind;
use meanforge::grid::GridSpec;
use meanforge::ratio::{profile, REFERENCE_CONSTANTS};
use meanforge::report::Report;
use meanforge::sampling::SamplingSpec;
use meanforge::ToleranceConfig;

fn main() -> meanforge::Result<()> {
    let spec = SamplingSpec::new(20_000, 7, 1e-8, 1e8)?;
    let tol = ToleranceConfig::default();
    let grid = GridSpec::default();

    let chains = builtin_chains()
        .iter()
        .map(|c| verify_chain(c, &spec, &tol))
        .collect::<meanforge::Result<Vec<_>>>()?;
    let ratios = REFERENCE_CONSTANTS
        .iter()
        .map(|r| profile(r.pair, &grid))
        .collect::<meanforge::Result<Vec<_>>>()?;
    let certificates = DifferenceKind::CLOSED_FORM
        .into_iter()
        .map(|k| certify_convexity(k, &grid))
        .collect::<meanforge::Result<Vec<_>>>()?;

    let report = Report::new(&spec, &tol)
        .with_chains(&chains)
        .with_ratios(&ratios)
        .with_convexity(&certificates);
    print!("{}", report.to_json());
    eprintln!("all expectations met: {}", report.expectations_met());
    Ok(())
}
