//! Inequality chains among means and mean differences, and a sampling engine
//! that checks every adjacent pair of members.
//!
//! A chain `m0 <= m1 <= ... <= mk` is checked as `m(i) <= m(i+1)` for each `i`;
//! transitivity covers the rest and a failure points at a single member.
//! Every member is homogeneous of degree one, so samples are pairs `(1, x)`.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::generating::{difference_of, DifferenceKind};
use crate::grid::GridSpec;
use crate::means::{mean, MeanKind, MeanValues, PositivePair};
use crate::sampling::SamplingSpec;
use crate::tolerance::ToleranceConfig;

/// A mean-valued expression evaluated at one pair.
#[derive(Debug, Clone, PartialEq)]
pub enum MeanExpr {
    Min,
    Max,
    Mean(MeanKind),
    Difference(DifferenceKind),
    /// `(c1 e1 + c2 e2 + ...) / divisor` with integer coefficients.
    Combination {
        terms: Vec<(i64, MeanExpr)>,
        divisor: i64,
    },
    /// A mean applied to the values of two expressions, e.g. `S(A, H)`.
    Apply(MeanKind, Box<MeanExpr>, Box<MeanExpr>),
}

impl MeanExpr {
    pub fn evaluate(&self, values: &MeanValues, p: PositivePair) -> f64 {
        match self {
            MeanExpr::Min => p.min(),
            MeanExpr::Max => p.max(),
            MeanExpr::Mean(k) => values.get(*k),
            MeanExpr::Difference(k) => difference_of(*k, values),
            MeanExpr::Combination { terms, divisor } => {
                let sum: f64 = terms
                    .iter()
                    .map(|(c, e)| *c as f64 * e.evaluate(values, p))
                    .sum();
                sum / *divisor as f64
            }
            MeanExpr::Apply(k, x, y) => {
                let (x, y) = (x.evaluate(values, p), y.evaluate(values, p));
                match PositivePair::new(x, y) {
                    Ok(inner) => mean(*k, inner),
                    Err(_) => f64::NAN,
                }
            }
        }
    }

    pub fn at(&self, p: PositivePair) -> f64 {
        self.evaluate(&MeanValues::new(p), p)
    }

    /// Prefix form, e.g. `(/ (+ (* 2 H) S) 3)` or `(S A H)`.
    pub fn prefix(&self) -> String {
        match self {
            MeanExpr::Min => "min".into(),
            MeanExpr::Max => "max".into(),
            MeanExpr::Mean(k) => k.to_string(),
            MeanExpr::Difference(k) => k.to_string(),
            MeanExpr::Combination { terms, divisor } => {
                let rendered: Vec<String> = terms
                    .iter()
                    .map(|(c, e)| match c {
                        1 => e.prefix(),
                        c => format!("(* {c} {})", e.prefix()),
                    })
                    .collect();
                let sum = match rendered.as_slice() {
                    [one] => one.clone(),
                    many => format!("(+ {})", many.join(" ")),
                };
                match divisor {
                    1 => sum,
                    d => format!("(/ {sum} {d})"),
                }
            }
            MeanExpr::Apply(k, x, y) => format!("({k} {} {})", x.prefix(), y.prefix()),
        }
    }
}

impl fmt::Display for MeanExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeanExpr::Min => f.write_str("min"),
            MeanExpr::Max => f.write_str("max"),
            MeanExpr::Mean(k) => write!(f, "{k}"),
            MeanExpr::Difference(k) => write!(f, "{k}"),
            MeanExpr::Combination { terms, divisor } => {
                let mut sum = String::new();
                for (i, (c, e)) in terms.iter().enumerate() {
                    let (sign, c) = if *c < 0 { ("-", -c) } else { ("+", *c) };
                    match (i, sign) {
                        (0, "-") => sum.push('-'),
                        (0, _) => {}
                        _ => sum.push_str(&format!(" {sign} ")),
                    }
                    if c != 1 {
                        sum.push_str(&c.to_string());
                        if matches!(e, MeanExpr::Difference(_)) {
                            sum.push(' ');
                        }
                    }
                    sum.push_str(&e.to_string());
                }
                match (*divisor, terms.len()) {
                    (1, _) => f.write_str(&sum),
                    (d, 1) => write!(f, "{sum}/{d}"),
                    (d, _) => write!(f, "({sum})/{d}"),
                }
            }
            MeanExpr::Apply(k, x, y) => write!(f, "{k}({x}, {y})"),
        }
    }
}

fn m(k: MeanKind) -> MeanExpr {
    MeanExpr::Mean(k)
}

fn lin(terms: &[(i64, MeanKind)], divisor: i64) -> MeanExpr {
    MeanExpr::Combination {
        terms: terms.iter().map(|&(c, k)| (c, m(k))).collect(),
        divisor,
    }
}

fn scaled(num: i64, den: i64, k: DifferenceKind) -> MeanExpr {
    if num == den {
        return MeanExpr::Difference(k);
    }
    MeanExpr::Combination {
        terms: vec![(num, MeanExpr::Difference(k))],
        divisor: den,
    }
}

fn apply(k: MeanKind, x: MeanKind, y: MeanKind) -> MeanExpr {
    MeanExpr::Apply(k, Box::new(m(x)), Box::new(m(y)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Expectation {
    ExpectedHolds,
    ExpectedFails,
}

impl fmt::Display for Expectation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Expectation::ExpectedHolds => "expected_holds",
            Expectation::ExpectedFails => "expected_fails",
        })
    }
}

/// An extra pointwise check attached to a chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AuxiliaryCheck {
    /// `((S + G)/2)^2 - (A^2 + H^2)/2` at `(1, x)` is nonnegative, vanishing only at `x = 1`.
    SquaredGap,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InequalityChain {
    pub id: &'static str,
    pub source: &'static str,
    pub members: Vec<MeanExpr>,
    pub expectation: Expectation,
    pub auxiliary: Option<AuxiliaryCheck>,
}

impl InequalityChain {
    fn new(
        id: &'static str,
        source: &'static str,
        members: Vec<MeanExpr>,
        expectation: Expectation,
    ) -> Self {
        assert!(members.len() >= 2, "chain {id} needs two members");
        Self {
            id,
            source,
            members,
            expectation,
            auxiliary: None,
        }
    }

    fn holds(id: &'static str, source: &'static str, members: Vec<MeanExpr>) -> Self {
        Self::new(id, source, members, Expectation::ExpectedHolds)
    }

    /// `m0 <= m1 <= ...` written out.
    pub fn statement(&self) -> String {
        self.members
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(" ≤ ")
    }

    /// One record of the registry export.
    pub fn record(&self) -> String {
        let members: Vec<String> = self.members.iter().map(MeanExpr::prefix).collect();
        let mut out = format!(
            "[chain]\nid = {}\nsource = {}\nexpectation = {}\nmembers = {}\n",
            self.id,
            self.source,
            self.expectation,
            members.join(" <= ")
        );
        if let Some(aux) = self.auxiliary {
            out.push_str(&format!("auxiliary = {}\n", auxiliary_name(aux)));
        }
        out
    }
}

fn auxiliary_name(aux: AuxiliaryCheck) -> &'static str {
    match aux {
        AuxiliaryCheck::SquaredGap => "squared_gap",
    }
}

/// Every registered chain, in registry order.
pub fn builtin_chains() -> Vec<InequalityChain> {
    use DifferenceKind as D;
    use MeanKind::*;
    let ms = |ks: &[MeanKind]| ks.iter().copied().map(m).collect::<Vec<_>>();
    let ds = |ks: &[DifferenceKind]| ks.iter().copied().map(MeanExpr::Difference).collect();
    let expected_holds = InequalityChain::holds;

    let mut chains = vec![
        expected_holds(
            "eq2",
            "power-mean ordering of the classical means",
            ms(&[H, G, N1, A, S]),
        ),
        expected_holds("eq5", "square-root, Heron and N2 means", ms(&[N1, N3, N2])),
        expected_holds("eq6", "N2 below the arithmetic mean", ms(&[N2, A])),
        expected_holds("eq7", "all seven means", ms(&[H, G, N1, N3, N2, A, S])),
        expected_holds(
            "eq26",
            "differences from the root-square mean",
            ds(&[D::SA, D::SN2, D::SN3, D::SN1, D::SG, D::SH]),
        ),
        expected_holds(
            "eq27",
            "differences from the arithmetic mean",
            ds(&[D::AN2, D::AN3, D::AN1, D::AG, D::AH]),
        ),
        expected_holds(
            "eq28",
            "differences from the N2 mean",
            ds(&[D::N2N3, D::N2N1, D::N2G, D::N2H]),
        ),
        expected_holds(
            "eq29",
            "differences from Heron's mean",
            ds(&[D::N3N1, D::N3G, D::N3H]),
        ),
        expected_holds(
            "eq30",
            "differences from the square-root mean",
            ds(&[D::N1G, D::N1H]),
        ),
        expected_holds(
            "eq31",
            "sums of pairs of means",
            vec![
                lin(&[(1, A), (1, H)], 1),
                lin(&[(1, N1), (1, N3)], 1),
                lin(&[(1, N1), (1, N2)], 1),
            ],
        ),
        expected_holds(
            "eq38",
            "scaled differences from S and A with optimal constants",
            vec![
                scaled(1, 1, D::SA),
                scaled(1, 3, D::SH),
                scaled(1, 2, D::AH),
                scaled(1, 2, D::SG),
                scaled(1, 1, D::AG),
            ],
        ),
        expected_holds(
            "eq51",
            "refinement of H <= G <= A <= S by combinations of H, G, A, S",
            vec![
                m(H),
                m(G),
                lin(&[(2, H), (1, S)], 3),
                lin(&[(1, A), (1, H)], 2),
                lin(&[(1, S), (1, G)], 2),
                lin(&[(1, H), (2, S)], 3),
                m(A),
                lin(&[(1, S), (1, H), (-1, G)], 1),
                m(S),
                lin(&[(3, A), (-3, G), (1, H)], 1),
            ],
        ),
        expected_holds("eq52", "classical baseline between min and max", {
            let mut v = vec![MeanExpr::Min];
            v.extend(ms(&[H, G, A, S]));
            v.push(MeanExpr::Max);
            v
        }),
        expected_holds(
            "eq53",
            "refinement with means of A and H",
            vec![
                m(H),
                apply(H, A, H),
                m(G),
                lin(&[(2, H), (1, S)], 3),
                lin(&[(1, A), (1, H)], 2),
                apply(S, A, H),
                lin(&[(1, S), (1, G)], 2),
                lin(&[(1, H), (2, S)], 3),
                m(A),
                lin(&[(1, S), (1, H), (-1, G)], 1),
                m(S),
                lin(&[(3, A), (-3, G), (1, H)], 1),
            ],
        ),
        expected_holds(
            "eq54",
            "the four classical means applied to A and H",
            vec![
                m(H),
                apply(H, A, H),
                m(G),
                lin(&[(1, A), (1, H)], 2),
                apply(S, A, H),
                m(A),
                m(S),
            ],
        ),
        {
            let mut c = expected_holds(
                "eq58",
                "root-square mean of A and H below the average of S and G",
                vec![apply(S, A, H), lin(&[(1, S), (1, G)], 2)],
            );
            c.auxiliary = Some(AuxiliaryCheck::SquaredGap);
            c
        },
        expected_holds(
            "eq59",
            "scaled differences from N2 and A with optimal constants",
            vec![
                scaled(1, 8, D::AH),
                scaled(1, 1, D::N2N1),
                scaled(1, 3, D::N2G),
                scaled(1, 4, D::AG),
                scaled(1, 1, D::AN2),
            ],
        ),
        expected_holds(
            "eq72",
            "refinement of H <= G <= N1 <= N2 <= A",
            vec![
                m(H),
                m(G),
                lin(&[(1, G), (1, H), (3, N2)], 5),
                lin(&[(1, G), (2, N2)], 3),
                m(N1),
                lin(&[(2, A), (7, N1)], 9),
                m(N2),
                lin(&[(1, A), (1, N1)], 2),
                lin(&[(7, A), (1, H)], 8),
                m(A),
            ],
        ),
        expected_holds(
            "eq73",
            "baseline for the N2 refinement",
            ms(&[H, G, N1, N2, A]),
        ),
        expected_holds(
            "eq74",
            "S-differences against N2",
            vec![
                scaled(1, 1, D::SA),
                scaled(4, 5, D::SN2),
                scaled(4, 1, D::AN2),
            ],
        ),
        expected_holds(
            "eq75",
            "S-differences against N1 and G",
            vec![
                scaled(1, 1, D::SH),
                scaled(2, 1, D::SN1),
                scaled(3, 2, D::SG),
            ],
        ),
        expected_holds(
            "eq76",
            "S-differences against N3 and N1",
            vec![
                scaled(1, 1, D::SA),
                scaled(3, 4, D::SN3),
                scaled(2, 3, D::SN1),
            ],
        ),
    ];

    let eq95_prefix = vec![
        m(G),
        lin(&[(1, S), (3, G)], 4),
        m(N1),
        lin(&[(1, S), (8, N1)], 9),
        m(N3),
        m(N2),
        lin(&[(1, A), (1, N1)], 2),
        lin(&[(1, S), (2, N1)], 3),
    ];
    let with_tail = |tail: MeanExpr| {
        let mut v = eq95_prefix.clone();
        v.push(tail);
        v.push(m(A));
        v
    };
    chains.push(expected_holds(
        "eq95",
        "refinement of G <= N1 <= N3 <= N2 <= A, branch through (S + 4N2)/5",
        with_tail(lin(&[(1, S), (4, N2)], 5)),
    ));
    chains.push(expected_holds(
        "eq95-alt",
        "refinement of G <= N1 <= N3 <= N2 <= A, branch through (S + 3N3)/4",
        with_tail(lin(&[(1, S), (3, N3)], 4)),
    ));
    chains.push(InequalityChain::new(
        "eq96-as-printed",
        "G, N1, N2 refinement with the printed divisor (S + 2H)/2",
        vec![
            m(G),
            lin(&[(1, S), (2, H)], 2),
            m(N1),
            lin(&[(1, S), (1, H)], 2),
            m(N2),
        ],
        Expectation::ExpectedFails,
    ));
    chains.push(expected_holds(
        "eq96-corrected",
        "G, N1, N2 refinement with (S + 2H)/3, derived from the S-difference constants, not printed",
        vec![
            m(G),
            lin(&[(1, S), (2, H)], 3),
            m(N1),
            lin(&[(1, S), (1, H)], 2),
            m(N2),
        ],
    ));
    chains
}

pub fn find_chain(id: &str) -> Result<InequalityChain> {
    builtin_chains()
        .into_iter()
        .find(|c| c.id == id)
        .ok_or_else(|| Error::UnknownChain(id.to_string()))
}

/// The registry as a structured text document, one record per chain.
pub fn registry_document() -> String {
    builtin_chains()
        .iter()
        .map(InequalityChain::record)
        .collect::<Vec<_>>()
        .join("\n")
}

pub fn evaluate_chain(chain: &InequalityChain, p: PositivePair) -> Vec<f64> {
    let values = MeanValues::new(p);
    chain
        .members
        .iter()
        .map(|e| e.evaluate(&values, p))
        .collect()
}

/// `((S + G)/2)^2 - (A^2 + H^2)/2` at `(1, x)`.
pub fn squared_gap(x: f64) -> f64 {
    let upper = (2.0 * (x * x + 1.0)).sqrt() / 4.0 + x.sqrt() / 2.0;
    let a = (x + 1.0) / 2.0;
    let h = 2.0 * x / (x + 1.0);
    upper * upper - (a * a + h * h) / 2.0
}

/// Half-width, in `ln x`, of the band around one where the squared gap is
/// only required to be nonnegative.
pub const STRICT_BAND: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AuxiliaryReport {
    pub check: AuxiliaryCheck,
    pub grid: GridSpec,
    /// Smallest value divided by `max(1, x)^2`.
    pub min_scaled: f64,
    pub min_at: f64,
    /// Smallest value with `|ln x| > STRICT_BAND`.
    pub min_outside_band: f64,
    pub holds: bool,
}

pub fn run_auxiliary(
    check: AuxiliaryCheck,
    grid: &GridSpec,
    tol: &ToleranceConfig,
) -> Result<AuxiliaryReport> {
    grid.validate()?;
    let f = match check {
        AuxiliaryCheck::SquaredGap => squared_gap,
    };
    let mut min_scaled = f64::INFINITY;
    let mut min_at = f64::NAN;
    let mut min_outside_band = f64::INFINITY;
    for x in grid.iter() {
        let v = f(x);
        let s = v / x.max(1.0).powi(2);
        if s < min_scaled || s.is_nan() {
            min_scaled = s;
            min_at = x;
        }
        if x.ln().abs() > STRICT_BAND {
            min_outside_band = min_outside_band.min(v);
        }
    }
    Ok(AuxiliaryReport {
        check,
        grid: *grid,
        min_scaled,
        min_at,
        min_outside_band,
        holds: min_scaled >= -tol.relative && min_outside_band > 0.0,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairReport {
    pub lower: String,
    pub upper: String,
    pub violations: usize,
    /// Smallest signed relative margin of `lower <= upper`.
    pub worst_margin: f64,
    pub witness: Option<PositivePair>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainReport {
    pub id: &'static str,
    pub source: &'static str,
    pub expectation: Expectation,
    pub samples: usize,
    pub holds: bool,
    /// Samples violating at least one adjacent pair.
    pub violations: usize,
    pub worst_margin: f64,
    /// For a refuted chain, the simplest rational pair violating the first
    /// failing member pair (falling back to the worst sample).
    pub witness: Option<PositivePair>,
    pub per_pair: Vec<PairReport>,
    pub auxiliary: Option<AuxiliaryReport>,
}

impl ChainReport {
    pub fn meets_expectation(&self) -> bool {
        match self.expectation {
            Expectation::ExpectedHolds => self.holds,
            Expectation::ExpectedFails => !self.holds,
        }
    }
}

#[derive(Clone)]
struct Acc {
    violating_samples: usize,
    violations: Vec<usize>,
    worst: Vec<(f64, usize)>,
}

impl Acc {
    fn new(pairs: usize) -> Self {
        Self {
            violating_samples: 0,
            violations: vec![0; pairs],
            worst: vec![(f64::INFINITY, usize::MAX); pairs],
        }
    }

    // Ties go to the smaller sample index so the result is schedule independent.
    fn merge(mut self, other: Acc) -> Acc {
        self.violating_samples += other.violating_samples;
        for (j, (w, o)) in self.worst.iter_mut().zip(other.worst).enumerate() {
            self.violations[j] += other.violations[j];
            if o.0 < w.0 || (o.0 == w.0 && o.1 < w.1) || (w.0.is_nan() && !o.0.is_nan()) {
                *w = o;
            }
        }
        self
    }
}

fn margins_at(
    chain: &InequalityChain,
    p: PositivePair,
    tol: &ToleranceConfig,
    buf: &mut Vec<f64>,
    out: &mut Vec<f64>,
) {
    let values = MeanValues::new(p);
    buf.clear();
    buf.extend(chain.members.iter().map(|e| e.evaluate(&values, p)));
    out.clear();
    let scale = p.max();
    out.extend(buf.windows(2).map(|w| {
        let m = tol.margin(w[0], w[1], scale);
        if m.is_nan() {
            f64::NEG_INFINITY
        } else {
            m
        }
    }));
}

fn verify_with<F>(
    chain: &InequalityChain,
    n: usize,
    pair_at: F,
    tol: &ToleranceConfig,
) -> ChainReport
where
    F: Fn(usize) -> PositivePair + Sync,
{
    let pairs = chain.members.len() - 1;
    let acc = (0..n)
        .into_par_iter()
        .fold(
            || (Acc::new(pairs), Vec::new(), Vec::new()),
            |(mut acc, mut buf, mut margins), i| {
                margins_at(chain, pair_at(i), tol, &mut buf, &mut margins);
                let mut violated = false;
                for (j, &mg) in margins.iter().enumerate() {
                    if mg < -tol.relative {
                        acc.violations[j] += 1;
                        violated = true;
                    }
                    let w = &mut acc.worst[j];
                    if mg < w.0 || (mg == w.0 && i < w.1) {
                        *w = (mg, i);
                    }
                }
                acc.violating_samples += usize::from(violated);
                (acc, buf, margins)
            },
        )
        .map(|(acc, _, _)| acc)
        .reduce(|| Acc::new(pairs), Acc::merge);

    let per_pair: Vec<PairReport> = (0..pairs)
        .map(|j| {
            let (worst, index) = acc.worst[j];
            PairReport {
                lower: chain.members[j].to_string(),
                upper: chain.members[j + 1].to_string(),
                violations: acc.violations[j],
                worst_margin: if index == usize::MAX { 0.0 } else { worst },
                witness: (index < n).then(|| pair_at(index)),
            }
        })
        .collect();
    let worst_margin = per_pair
        .iter()
        .map(|r| r.worst_margin)
        .fold(f64::INFINITY, f64::min);
    let holds = acc.violating_samples == 0;
    let witness = if holds {
        None
    } else {
        let first = per_pair
            .iter()
            .position(|r| r.violations > 0)
            .expect("a refuted chain has a failing pair");
        simplest_witness(chain, first, tol).or(per_pair[first].witness)
    };
    ChainReport {
        id: chain.id,
        source: chain.source,
        expectation: chain.expectation,
        samples: n,
        holds,
        violations: acc.violating_samples,
        worst_margin,
        witness,
        per_pair,
        auxiliary: None,
    }
}

/// Largest numerator or denominator tried by [`simplest_witness`].
pub const WITNESS_SEARCH_LIMIT: u32 = 16;

/// The off-diagonal pair `(p, q)` of small coprime integers, ordered by
/// `p + q` then `p`, that violates member pair `index` of `chain`.
pub fn simplest_witness(
    chain: &InequalityChain,
    index: usize,
    tol: &ToleranceConfig,
) -> Option<PositivePair> {
    let limit = WITNESS_SEARCH_LIMIT;
    (3..=2 * limit)
        .flat_map(|sum| (1..sum).map(move |p| (p, sum - p)))
        .filter(|&(p, q)| p <= limit && q <= limit && gcd(p, q) == 1)
        .map(|(p, q)| PositivePair::new(p as f64, q as f64).expect("positive integers"))
        .find(|&pair| {
            let values = evaluate_chain(chain, pair);
            !tol.le(values[index], values[index + 1], pair.max())
        })
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Checks every adjacent member pair at every sample of `spec`.
///
/// The auxiliary check, if any, runs on the default grid.
pub fn verify_chain(
    chain: &InequalityChain,
    spec: &SamplingSpec,
    tol: &ToleranceConfig,
) -> Result<ChainReport> {
    spec.validate()?;
    let edges = spec.edge_ratios();
    let pair_at = |i: usize| {
        PositivePair::unit(spec.ratio_at(&edges, i)).expect("sample ratios are positive")
    };
    let mut report = verify_with(chain, spec.len(), pair_at, tol);
    attach_auxiliary(chain, &mut report, tol)?;
    Ok(report)
}

/// As [`verify_chain`], over an explicit list of pairs.
pub fn verify_chain_on(
    chain: &InequalityChain,
    pairs: &[PositivePair],
    tol: &ToleranceConfig,
) -> Result<ChainReport> {
    let mut report = verify_with(chain, pairs.len(), |i| pairs[i], tol);
    attach_auxiliary(chain, &mut report, tol)?;
    Ok(report)
}

fn attach_auxiliary(
    chain: &InequalityChain,
    report: &mut ChainReport,
    tol: &ToleranceConfig,
) -> Result<()> {
    if let Some(check) = chain.auxiliary {
        let aux = run_auxiliary(check, &GridSpec::default(), tol)?;
        report.holds &= aux.holds;
        report.auxiliary = Some(aux);
    }
    Ok(())
}

/// Verifies the chains whose ids are listed, or all of them for `"all"`.
pub fn select_chains(selector: &str) -> Result<Vec<InequalityChain>> {
    if selector == "all" {
        return Ok(builtin_chains());
    }
    selector
        .split(',')
        .map(|id| find_chain(id.trim()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(a: f64, b: f64) -> PositivePair {
        PositivePair::new(a, b).unwrap()
    }

    #[test]
    fn registry_shape() {
        let chains = builtin_chains();
        let mut ids: Vec<&str> = chains.iter().map(|c| c.id).collect();
        assert_eq!(find_chain("eq7").unwrap().members.len(), 7);
        assert_eq!(
            find_chain("eq96-as-printed").unwrap().expectation,
            Expectation::ExpectedFails
        );
        let n = ids.len();
        ids.sort_unstable();
        ids.dedup();
        assert_eq!(ids.len(), n);
        assert_eq!(n, 26);
        assert_eq!(
            find_chain("nosuch"),
            Err(Error::UnknownChain("nosuch".into()))
        );
    }

    #[test]
    fn eq7_values() {
        let v = evaluate_chain(&find_chain("eq7").unwrap(), pair(1.0, 2.0));
        let expected = [
            4.0 / 3.0,
            std::f64::consts::SQRT_2,
            1.457_106_781_186_547_5,
            1.471_404_520_791_031_7,
            1.478_397_839_480_233_2,
            1.5,
            1.581_138_830_084_189_8,
        ];
        for (got, want) in v.iter().zip(expected) {
            assert!((got - want).abs() < 1e-15, "{got} vs {want}");
        }
        let flat = evaluate_chain(&find_chain("eq7").unwrap(), pair(3.5, 3.5));
        assert!(flat.iter().all(|&x| (x - 3.5).abs() <= 4.0 * f64::EPSILON));
    }

    #[test]
    fn eq51_nondecreasing_at_one_two() {
        let v = evaluate_chain(&find_chain("eq51").unwrap(), pair(1.0, 2.0));
        assert!(v.windows(2).all(|w| w[0] <= w[1]), "{v:?}");
    }

    #[test]
    fn rendering() {
        let c = find_chain("eq51").unwrap();
        assert_eq!(c.members[2].to_string(), "(2H + S)/3");
        assert_eq!(c.members[9].to_string(), "3A - 3G + H");
        assert_eq!(c.members[2].prefix(), "(/ (+ (* 2 H) S) 3)");
        let c = find_chain("eq54").unwrap();
        assert_eq!(c.members[4].to_string(), "S(A, H)");
        assert_eq!(c.members[4].prefix(), "(S A H)");
        let c = find_chain("eq38").unwrap();
        assert_eq!(c.members[1].to_string(), "M_SH/3");
        assert_eq!(c.members[1].prefix(), "(/ M_SH 3)");
        let c = find_chain("eq74").unwrap();
        assert_eq!(c.members[1].to_string(), "4 M_SN2/5");
        assert!(registry_document().contains("id = eq96-corrected"));
    }

    #[test]
    fn applied_means() {
        let p = pair(1.0, 3.0);
        let (a, h) = (2.0, 1.5);
        let c = find_chain("eq53").unwrap();
        assert!((c.members[1].at(p) - 2.0 * a * h / (a + h)).abs() < 1e-15);
        assert!((c.members[5].at(p) - ((a * a + h * h) / 2.0f64).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn eq96_as_printed_is_refuted_at_one_two() {
        let tol = ToleranceConfig::default();
        let chain = find_chain("eq96-as-printed").unwrap();
        let spec = SamplingSpec::new(1000, 42, 1e-8, 1e8).unwrap();
        let report = verify_chain(&chain, &spec, &tol).unwrap();
        assert!(!report.holds && report.meets_expectation());
        assert_eq!(report.witness, Some(pair(1.0, 2.0)));
        let v = evaluate_chain(&chain, pair(1.0, 2.0));
        assert!((v[1] - 2.123_902_748_375_428).abs() < 1e-12);
        assert!(v[1] - v[2] > 0.5);
    }

    #[test]
    fn small_runs_hold() {
        let tol = ToleranceConfig::default();
        let spec = SamplingSpec::new(5_000, 42, 1e-8, 1e8).unwrap();
        for chain in builtin_chains() {
            let report = verify_chain(&chain, &spec, &tol).unwrap();
            assert!(report.meets_expectation(), "{}: {report:?}", chain.id);
            if report.holds {
                assert!(report.witness.is_none());
                assert!(report.worst_margin >= -tol.relative);
            }
        }
    }

    #[test]
    fn diagonal_only_gives_zero_margins() {
        let tol = ToleranceConfig::default();
        let pairs = vec![pair(1.0, 1.0), pair(7.0, 7.0)];
        let report = verify_chain_on(&find_chain("eq51").unwrap(), &pairs, &tol).unwrap();
        assert!(report.holds);
        assert!(report.per_pair.iter().all(|r| r.worst_margin.abs() < 1e-15));
    }

    #[test]
    fn squared_gap_is_nonnegative() {
        assert!(squared_gap(1.0).abs() < 1e-16);
        assert!(squared_gap(1e-6) > 3e-4);
        let aux = run_auxiliary(
            AuxiliaryCheck::SquaredGap,
            &GridSpec::default(),
            &ToleranceConfig::default(),
        )
        .unwrap();
        assert!(aux.holds, "{aux:?}");
    }

    #[test]
    fn schedule_independent() {
        let tol = ToleranceConfig::default();
        let chain = find_chain("eq95").unwrap();
        let spec = SamplingSpec::new(20_000, 9, 1e-8, 1e8).unwrap();
        let a = verify_chain(&chain, &spec, &tol).unwrap();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let b = pool.install(|| verify_chain(&chain, &spec, &tol).unwrap());
        assert_eq!(format!("{a:?}"), format!("{b:?}"));
    }
}
