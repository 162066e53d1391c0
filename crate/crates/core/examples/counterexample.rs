//! A chain whose second member is printed with the wrong divisor is
//! refuted, and the search reports the simplest rational witness.

use meanforge::chains::{evaluate_chain, find_chain, verify_chain};
use meanforge::sampling::SamplingSpec;
use meanforge::ToleranceConfig;

fn main() -> meanforge::Result<()> {
    let spec = SamplingSpec::new(100_000, 1, 1e-8, 1e8)?;
    let tol = ToleranceConfig::default();
    for id in ["eq96-as-printed", "eq96-corrected"] {
        let chain = find_chain(id)?;
        let report = verify_chain(&chain, &spec, &tol)?;
        println!("{id}: {}", chain.statement());
        println!(
            "  holds: {}  violating samples: {}",
            report.holds, report.violations
        );
        if let Some(w) = report.witness {
            let names: Vec<String> = chain.members.iter().map(|m| m.to_string()).collect();
            let values = evaluate_chain(&chain, w);
            println!("  witness a = {}, b = {}", w.a(), w.b());
            for (name, v) in names.iter().zip(values) {
                println!("    {name:<12} {v:.15}");
            }
        }
    }
    Ok(())
}
