//! Sampled verification of every registered inequality chain.
//!
//! cargo run --release --example verify_chains -- 200000

use meanforge::chains::{builtin_chains, verify_chain};
use meanforge::sampling::SamplingSpec;
use meanforge::ToleranceConfig;

fn main() -> meanforge::Result<()> {
    let count = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(100_000);
    let spec = SamplingSpec::new(count, 1, 1e-8, 1e8)?;
    let tol = ToleranceConfig::default();
    for chain in builtin_chains() {
        let report = verify_chain(&chain, &spec, &tol)?;
        println!(
            "{:<16} {:<5} worst margin {:+.3e}  {}",
            chain.id,
            if report.holds { "holds" } else { "fails" },
            report.worst_margin,
            chain.statement()
        );
    }
    Ok(())
}
