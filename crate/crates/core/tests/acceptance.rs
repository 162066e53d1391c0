//! Acceptance run. Prints one PASS/FAIL line per criterion and exits nonzero
//! if any criterion fails.

use std::process::Command;
use std::time::{Duration, Instant};

use meanforge::chains::{find_chain, verify_chain};
use meanforge::convexity::{certify_convexity, check_phi_bound, joint_convexity_probe};
use meanforge::generating::{identity_residuals, DifferenceKind};
use meanforge::grid::GridSpec;
use meanforge::means::{mean, power_mean, MeanKind, MeanOrder, PositivePair};
use meanforge::ratio::{profile, reference_for, RatioPair, REFERENCE_CONSTANTS};
use meanforge::sampling::{log_uniform, unit_uniform, SamplingSpec};
use meanforge::ToleranceConfig;

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Self {
            passed,
            detail: detail.into(),
        }
    }
}

type Criterion = (&'static str, fn() -> Outcome);

fn within(elapsed: Duration, limit_secs: f64) -> bool {
    elapsed.as_secs_f64() < limit_secs
}

fn random_pair(seed: u64, index: u64, lane: u64) -> PositivePair {
    let a = log_uniform(seed, index, lane, 1e-6, 1e6);
    let x = log_uniform(seed, index, lane + 1, 1e-8, 1e8);
    PositivePair::new(a, a * x).unwrap()
}

const CONSTANTS: [(&str, f64); 14] = [
    ("SA/SH", 1.0 / 3.0),
    ("SH/AH", 3.0 / 2.0),
    ("SG/AH", 1.0),
    ("SG/AG", 2.0),
    ("AH/N2N1", 8.0),
    ("N2N1/N2G", 1.0 / 3.0),
    ("N2G/AG", 3.0 / 4.0),
    ("AG/AN2", 4.0),
    ("SA/SN2", 4.0 / 5.0),
    ("SN2/AN2", 4.0 / 5.0),
    ("SH/SN1", 2.0),
    ("SN1/SG", 3.0 / 4.0),
    ("SA/SN3", 3.0 / 4.0),
    ("SN3/SN1", 8.0 / 9.0),
];

fn parse_pair(name: &str) -> RatioPair {
    let (num, den) = name.split_once('/').unwrap();
    RatioPair::new(num.parse().unwrap(), den.parse().unwrap()).unwrap()
}

fn constants_table() -> Outcome {
    let start = Instant::now();
    let grid = GridSpec::default();
    let mut failures = Vec::new();
    for (name, expected) in CONSTANTS {
        let pair = parse_pair(name);
        let prof = profile(pair, &grid).unwrap();
        let pattern = reference_for(pair).unwrap().pattern;
        let extremum = match pattern {
            meanforge::ratio::Pattern::ValleyAtOne => prof.inf,
            _ => prof.sup,
        };
        if (prof.value_at_1 - expected).abs() > 1e-9 {
            failures.push(format!(
                "{name}: g(1) = {:.12} vs {expected:.12}",
                prof.value_at_1
            ));
        }
        if (extremum - prof.value_at_1).abs() > 1e-9 {
            failures.push(format!(
                "{name}: extremum {extremum:.12} vs g(1) {:.12}",
                prof.value_at_1
            ));
        }
        if prof.pattern != pattern {
            failures.push(format!("{name}: pattern {} vs {pattern}", prof.pattern));
        }
    }
    let elapsed = start.elapsed();
    if !within(elapsed, 5.0) {
        failures.push(format!("runtime {elapsed:.2?}"));
    }
    assert_eq!(REFERENCE_CONSTANTS.len(), CONSTANTS.len());
    if failures.is_empty() {
        Outcome::new(true, format!("14 pairs in {elapsed:.2?}"))
    } else {
        Outcome::new(false, failures.join("; "))
    }
}

fn convexity() -> Outcome {
    let start = Instant::now();
    let grid = GridSpec::default();
    let mut failures = Vec::new();
    let mut worst = 0.0f64;
    for kind in DifferenceKind::CLOSED_FORM {
        let cert = certify_convexity(kind, &grid).unwrap();
        worst = worst.max(cert.max_fd_mismatch);
        if !(cert.min_f2 > 0.0 && cert.max_fd_mismatch <= 1e-6) {
            failures.push(format!(
                "{kind}: min f'' {:e}, mismatch {:e}",
                cert.min_f2, cert.max_fd_mismatch
            ));
        }
    }
    let elapsed = start.elapsed();
    if !within(elapsed, 5.0) {
        failures.push(format!("runtime {elapsed:.2?}"));
    }
    if failures.is_empty() {
        Outcome::new(
            true,
            format!(
                "{} kinds, worst mismatch {worst:.1e}, {elapsed:.2?}",
                DifferenceKind::CLOSED_FORM.len()
            ),
        )
    } else {
        Outcome::new(false, failures.join("; "))
    }
}

const CHAIN_SUITE: [&str; 25] = [
    "eq2",
    "eq5",
    "eq6",
    "eq7",
    "eq26",
    "eq27",
    "eq28",
    "eq29",
    "eq30",
    "eq31",
    "eq38",
    "eq51",
    "eq52",
    "eq53",
    "eq54",
    "eq58",
    "eq59",
    "eq72",
    "eq73",
    "eq74",
    "eq75",
    "eq76",
    "eq95",
    "eq95-alt",
    "eq96-corrected",
];

fn chain_suite() -> Outcome {
    let start = Instant::now();
    let spec = SamplingSpec::new(1_000_000, 1, 1e-8, 1e8).unwrap();
    let tol = ToleranceConfig::default();
    let mut failures = Vec::new();
    for id in CHAIN_SUITE {
        let report = verify_chain(&find_chain(id).unwrap(), &spec, &tol).unwrap();
        if report.violations > 0 || !report.holds {
            failures.push(format!("{id}: {} violations", report.violations));
        }
    }
    let elapsed = start.elapsed();
    if !within(elapsed, 60.0) {
        failures.push(format!("runtime {elapsed:.2?}"));
    }
    if failures.is_empty() {
        Outcome::new(
            true,
            format!("{} chains x 1e6 samples, {elapsed:.2?}", CHAIN_SUITE.len()),
        )
    } else {
        Outcome::new(false, failures.join("; "))
    }
}

fn refutation() -> Outcome {
    let spec = SamplingSpec::new(1_000_000, 1, 1e-8, 1e8).unwrap();
    let chain = find_chain("eq96-as-printed").unwrap();
    let report = verify_chain(&chain, &spec, &ToleranceConfig::default()).unwrap();
    let Some(w) = report.witness else {
        return Outcome::new(false, "no witness reported");
    };
    let x = w.ratio();
    let at_one = PositivePair::unit(x).unwrap();
    let lhs = chain.members[1].at(at_one);
    let n1 = mean(MeanKind::N1, at_one);
    let gap = lhs - n1;
    let passed = !report.holds && (1.5..=3.0).contains(&x) && gap > 0.5;
    Outcome::new(
        passed,
        format!("witness ({}, {}), b/a = {x}, gap {gap:.6}", w.a(), w.b()),
    )
}

fn perspective_checks() -> Outcome {
    const TRIALS: u64 = 100_000;
    let tol = ToleranceConfig::default();
    let mut failures = Vec::new();
    for (k, kind) in DifferenceKind::CLOSED_FORM.into_iter().enumerate() {
        let seed = 500 + k as u64;
        let (mut bound_bad, mut convex_bad) = (0, 0);
        for i in 0..TRIALS {
            let p = random_pair(seed, i, 0);
            if !check_phi_bound(kind, p, &tol).unwrap().holds {
                bound_bad += 1;
            }
            let p1 = random_pair(seed, i, 2);
            let p2 = random_pair(seed, i, 4);
            let lambda = unit_uniform(seed, i, 6).clamp(1e-9, 1.0 - 1e-9);
            if !joint_convexity_probe(kind, p1, p2, lambda, &tol)
                .unwrap()
                .holds
            {
                convex_bad += 1;
            }
        }
        if bound_bad + convex_bad > 0 {
            failures.push(format!("{kind}: {bound_bad} bound, {convex_bad} convexity"));
        }
    }
    if failures.is_empty() {
        Outcome::new(true, "1e5 trials per kind, no violations")
    } else {
        Outcome::new(false, failures.join("; "))
    }
}

fn identity_family() -> Outcome {
    let mut worst = 0.0f64;
    for i in 0..100_000 {
        let p = random_pair(900, i, 0);
        let ag = mean(MeanKind::A, p) - mean(MeanKind::G, p);
        for r in identity_residuals(p) {
            worst = worst.max(r / (p.max() * (1.0 + ag / p.max())));
        }
    }
    Outcome::new(
        worst <= 1e-12,
        format!("worst relative residual {worst:.2e}"),
    )
}

fn power_mean_order() -> Outcome {
    let mut violations = 0;
    for i in 0..100_000u64 {
        let u = 100.0 * unit_uniform(77, i, 0) - 50.0;
        let v = 100.0 * unit_uniform(77, i, 1) - 50.0;
        let (t1, t2) = (u.min(v), u.max(v));
        let p = random_pair(77, i, 2);
        let lo = power_mean(MeanOrder::new(t1).unwrap(), p);
        let hi = power_mean(MeanOrder::new(t2).unwrap(), p);
        if lo > hi + 1e-12 * hi {
            violations += 1;
        }
    }
    let mut worst = 0.0f64;
    for i in 0..100_000u64 {
        let p = random_pair(78, i, 0);
        for k in MeanKind::ALL {
            if let Some(t) = k.order() {
                let (x, y) = (power_mean(t, p), mean(k, p));
                worst = worst.max((x - y).abs() / y);
            }
        }
    }
    Outcome::new(
        violations == 0 && worst <= 1e-13,
        format!("{violations} order violations, named-order mismatch {worst:.1e}"),
    )
}

fn determinism() -> Outcome {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_meanforge"))
            .args([
                "verify", "--chain", "all", "--seed", "1", "--format", "json",
            ])
            .env("MEANFORGE_THREADS", threads)
            .output()
            .expect("binary runs")
    };
    let first = run("1");
    let second = run("1");
    let third = run("4");
    let ok = [&first, &second, &third].iter().all(|o| o.status.success());
    let same = first.stdout == second.stdout && first.stdout == third.stdout;
    Outcome::new(
        ok && same && !first.stdout.is_empty(),
        format!(
            "{} bytes, identical across 1/1/4 threads: {same}",
            first.stdout.len()
        ),
    )
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("constants table", constants_table),
        ("convexity certificates", convexity),
        ("chain suite", chain_suite),
        ("refutation", refutation),
        ("perspective bound and convexity", perspective_checks),
        ("identity family", identity_family),
        ("power-mean monotonicity", power_mean_order),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (n, (name, check)) in criteria.iter().enumerate() {
        let outcome = check();
        let verdict = if outcome.passed { "PASS" } else { "FAIL" };
        println!("criterion {} {name}: {verdict} ({})", n + 1, outcome.detail);
        failed += usize::from(!outcome.passed);
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
