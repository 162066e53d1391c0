//! Optimal comparison constants between two difference measures.
//!
//! If `alpha <= f1''(x) / f2''(x) <= beta` on `(0, inf)` with `f2'' > 0`, then
//! `alpha * M2 <= M1 <= beta * M2`. For every pair catalogued here the ratio
//! `g = f1'' / f2''` is monotone on each side of `x = 1`, so one of the two
//! constants is `g(1)` and it cannot be improved.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fraction::Fraction;
use crate::generating::{generating_function, phi, DifferenceKind, GeneratingFunction};
use crate::grid::GridSpec;
use crate::means::PositivePair;
use crate::sampling::{sample_pairs, SamplingSpec};
use crate::search::{golden_section_max, golden_section_min};
use crate::tolerance::ToleranceConfig;

/// Samples per side of `x = 1` used to classify monotonicity.
pub const PATTERN_SAMPLES: usize = 512;
/// Slack on successive differences when classifying monotonicity.
pub const PATTERN_TOLERANCE: f64 = 1e-10;
/// Final bracket width, in `ln x`, of the extremum refinement.
pub const REFINE_WIDTH: f64 = 1e-12;

/// `numerator'' / denominator''`; both kinds carry closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct RatioPair {
    pub numerator: DifferenceKind,
    pub denominator: DifferenceKind,
}

impl RatioPair {
    pub fn new(numerator: DifferenceKind, denominator: DifferenceKind) -> Result<Self> {
        for kind in [numerator, denominator] {
            if !kind.has_closed_forms() {
                return Err(Error::NoClosedForm(kind));
            }
        }
        Ok(Self {
            numerator,
            denominator,
        })
    }

    fn functions(&self) -> (GeneratingFunction, GeneratingFunction) {
        (
            generating_function(self.numerator),
            generating_function(self.denominator),
        )
    }
}

impl fmt::Display for RatioPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}/{}",
            self.numerator.symbol(),
            self.denominator.symbol()
        )
    }
}

/// `g(x) = f1''(x) / f2''(x)`.
pub fn ratio_value(pair: RatioPair, x: f64) -> f64 {
    let (num, den) = pair.functions();
    // RatioPair::new guarantees both closed forms exist
    num.f2(x).unwrap_or(f64::NAN) / den.f2(x).unwrap_or(f64::NAN)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Pattern {
    /// Increasing on `(0, 1)`, decreasing on `(1, inf)`.
    PeakAtOne,
    /// Decreasing on `(0, 1)`, increasing on `(1, inf)`.
    ValleyAtOne,
    Other,
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Pattern::PeakAtOne => "peak_at_1",
            Pattern::ValleyAtOne => "valley_at_1",
            Pattern::Other => "other",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioProfile {
    pub pair: RatioPair,
    pub value_at_1: f64,
    pub sup: f64,
    pub sup_location: f64,
    pub inf: f64,
    pub inf_location: f64,
    pub pattern: Pattern,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Trend {
    Increasing,
    Decreasing,
    Mixed,
}

fn trend(g: impl Fn(f64) -> f64, lo: f64, hi: f64) -> Trend {
    let side = GridSpec {
        x_min: lo,
        x_max: hi,
        points: PATTERN_SAMPLES + 1,
    };
    let values: Vec<f64> = side.iter().map(g).collect();
    let (mut up, mut down) = (true, true);
    for w in values.windows(2) {
        let slack = PATTERN_TOLERANCE * w[0].abs().max(w[1].abs()).max(1.0);
        let d = w[1] - w[0];
        up &= d >= -slack;
        down &= d <= slack;
    }
    match (up, down) {
        (true, false) => Trend::Increasing,
        (false, true) => Trend::Decreasing,
        _ => Trend::Mixed,
    }
}

/// Scans `g` over `grid` and `x = 1`, refines the extrema by golden-section
/// search in `ln x` and classifies the monotonicity on each side of one.
pub fn profile(pair: RatioPair, grid: &GridSpec) -> Result<RatioProfile> {
    grid.validate()?;
    if !grid.straddles_one() {
        return Err(Error::GridMissesOne {
            x_min: grid.x_min,
            x_max: grid.x_max,
        });
    }
    let g = |x: f64| ratio_value(pair, x);
    let values: Vec<(f64, f64)> = (0..grid.points)
        .into_par_iter()
        .map(|i| {
            let x = grid.point(i);
            (x, g(x))
        })
        .collect();

    let value_at_1 = g(1.0);
    let argmax = arg_best(&values, |a, b| a > b);
    let argmin = arg_best(&values, |a, b| a < b);
    let bracket = |i: usize| {
        let lo = values[i.saturating_sub(1)].0.ln();
        let hi = values[(i + 1).min(values.len() - 1)].0.ln();
        (lo, hi)
    };
    let in_log = |t: f64| g(t.exp());
    // refinement can beat g(1) by a rounding error; such ties go to x = 1
    let slack = |v: f64| 4.0 * f64::EPSILON * v.abs();

    let (lo, hi) = bracket(argmax);
    let (t, v) = golden_section_max(in_log, lo, hi, REFINE_WIDTH);
    let (mut sup, mut sup_location) = (v, t.exp());
    if value_at_1 >= sup - slack(sup) {
        (sup, sup_location) = (value_at_1, 1.0);
    }

    let (lo, hi) = bracket(argmin);
    let (t, v) = golden_section_min(in_log, lo, hi, REFINE_WIDTH);
    let (mut inf, mut inf_location) = (v, t.exp());
    if value_at_1 <= inf + slack(inf) {
        (inf, inf_location) = (value_at_1, 1.0);
    }

    let pattern = match (trend(g, grid.x_min, 1.0), trend(g, 1.0, grid.x_max)) {
        (Trend::Increasing, Trend::Decreasing) => Pattern::PeakAtOne,
        (Trend::Decreasing, Trend::Increasing) => Pattern::ValleyAtOne,
        _ => Pattern::Other,
    };

    Ok(RatioProfile {
        pair,
        value_at_1,
        sup,
        sup_location,
        inf,
        inf_location,
        pattern,
    })
}

fn arg_best(values: &[(f64, f64)], better: impl Fn(f64, f64) -> bool) -> usize {
    let mut best = 0;
    for (i, &(_, v)) in values.iter().enumerate() {
        if better(v, values[best].1) {
            best = i;
        }
    }
    best
}

/// Which constant of a derived inequality is attained at `x = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SharpSide {
    Upper,
    Lower,
    Neither,
}

/// `alpha * M2 <= M1 <= beta * M2` over the profiled range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivedInequality {
    pub pair: RatioPair,
    pub alpha: f64,
    pub beta: f64,
    pub sharp: SharpSide,
}

fn constant_text(v: f64) -> String {
    match Fraction::approximate(v, 64, 1e-9) {
        Some(c) if c.is_one() => String::new(),
        Some(c) if c.den() == 1 => format!("{c} "),
        Some(c) => format!("({c}) "),
        None => format!("{v:.9} "),
    }
}

impl DerivedInequality {
    /// The sharp half, e.g. `M_SA ≤ (1/3) M_SH`.
    pub fn sharp_statement(&self) -> String {
        let (m1, m2) = (self.pair.numerator, self.pair.denominator);
        match self.sharp {
            SharpSide::Upper => format!("{m1} ≤ {}{m2}", constant_text(self.beta)),
            SharpSide::Lower => format!("{}{m2} ≤ {m1}", constant_text(self.alpha)),
            SharpSide::Neither => self.to_string(),
        }
    }
}

impl fmt::Display for DerivedInequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (m1, m2) = (self.pair.numerator, self.pair.denominator);
        write!(f, "{:.9} {m2} ≤ {m1} ≤ {:.9} {m2}", self.alpha, self.beta)
    }
}

pub fn derive_inequality(pair: RatioPair, grid: &GridSpec) -> Result<DerivedInequality> {
    let prof = profile(pair, grid)?;
    Ok(from_profile(&prof))
}

pub fn from_profile(prof: &RatioProfile) -> DerivedInequality {
    let sharp = match prof.pattern {
        Pattern::PeakAtOne => SharpSide::Upper,
        Pattern::ValleyAtOne => SharpSide::Lower,
        Pattern::Other => SharpSide::Neither,
    };
    DerivedInequality {
        pair: prof.pair,
        alpha: prof.inf.max(0.0),
        beta: prof.sup,
        sharp,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SideReport {
    pub violations: usize,
    /// Smallest signed relative margin; negative means violated.
    pub worst_margin: f64,
    pub witness: Option<PositivePair>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivedReport {
    pub inequality: DerivedInequality,
    pub samples: usize,
    pub lower: SideReport,
    pub upper: SideReport,
}

impl DerivedReport {
    pub fn holds(&self) -> bool {
        self.lower.violations == 0 && self.upper.violations == 0
    }
}

#[derive(Clone, Copy)]
struct SideFold {
    violations: usize,
    worst: f64,
    index: usize,
}

impl SideFold {
    const EMPTY: SideFold = SideFold {
        violations: 0,
        worst: f64::INFINITY,
        index: usize::MAX,
    };

    fn at(margin: f64, index: usize, tol: f64) -> SideFold {
        SideFold {
            violations: usize::from(margin < -tol),
            worst: margin,
            index,
        }
    }

    fn merge(self, other: SideFold) -> SideFold {
        let (worst, index) = if other.worst < self.worst
            || (other.worst == self.worst && other.index < self.index)
        {
            (other.worst, other.index)
        } else {
            (self.worst, self.index)
        };
        SideFold {
            violations: self.violations + other.violations,
            worst,
            index,
        }
    }
}

/// Checks both halves of the derived inequality on every sample.
pub fn verify_derived(
    ineq: &DerivedInequality,
    samples: &SamplingSpec,
    tol: &ToleranceConfig,
) -> Result<DerivedReport> {
    samples.validate()?;
    let pairs: Vec<PositivePair> = sample_pairs(samples).collect();
    verify_derived_on(ineq, &pairs, tol)
}

/// As [`verify_derived`], over an explicit list of pairs.
pub fn verify_derived_on(
    ineq: &DerivedInequality,
    pairs: &[PositivePair],
    tol: &ToleranceConfig,
) -> Result<DerivedReport> {
    let (num, den) = ineq.pair.functions();
    let (lower, upper) = pairs
        .par_iter()
        .enumerate()
        .map(|(i, &p)| {
            let m1 = phi(&num, p);
            let m2 = phi(&den, p);
            let scale = p.max();
            (
                SideFold::at(tol.margin(ineq.alpha * m2, m1, scale), i, tol.relative),
                SideFold::at(tol.margin(m1, ineq.beta * m2, scale), i, tol.relative),
            )
        })
        .reduce(
            || (SideFold::EMPTY, SideFold::EMPTY),
            |a, b| (a.0.merge(b.0), a.1.merge(b.1)),
        );
    let side = |fold: SideFold| SideReport {
        violations: fold.violations,
        worst_margin: if pairs.is_empty() { 0.0 } else { fold.worst },
        witness: pairs.get(fold.index).copied(),
    };
    Ok(DerivedReport {
        inequality: *ineq,
        samples: pairs.len(),
        lower: side(lower),
        upper: side(upper),
    })
}

/// A published constant for one ratio pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReferenceConstant {
    pub pair: RatioPair,
    pub pattern: Pattern,
    /// The value printed for `g(1)`.
    pub published: Fraction,
    /// The constant used in the printed inequality between the two measures.
    pub inequality_constant: Fraction,
}

impl ReferenceConstant {
    pub fn is_self_consistent(&self) -> bool {
        self.published == self.inequality_constant
    }
}

const fn reference(
    numerator: DifferenceKind,
    denominator: DifferenceKind,
    pattern: Pattern,
    published: Fraction,
    inequality_constant: Fraction,
) -> ReferenceConstant {
    ReferenceConstant {
        pair: RatioPair {
            numerator,
            denominator,
        },
        pattern,
        published,
        inequality_constant,
    }
}

/// The fourteen catalogued pairs with their published constants.
///
/// Two entries disagree with themselves: for SN2/AN2 the printed `g(1)` is
/// 4/5 while the printed inequality `M_SN2 <= 5 M_AN2` uses 5, and for
/// SN3/SN1 the printed supremum is 3/4 while the inequality uses 8/9. The
/// closed forms give 5 and 8/9.
pub const REFERENCE_CONSTANTS: [ReferenceConstant; 14] = {
    use DifferenceKind::*;
    use Pattern::{PeakAtOne as Peak, ValleyAtOne as Valley};
    const fn q(n: i64, d: i64) -> Fraction {
        Fraction::new(n, d)
    }
    [
        reference(SA, SH, Peak, q(1, 3), q(1, 3)),
        reference(SH, AH, Peak, q(3, 2), q(3, 2)),
        reference(SG, AH, Valley, q(1, 1), q(1, 1)),
        reference(SG, AG, Peak, q(2, 1), q(2, 1)),
        reference(AH, N2N1, Peak, q(8, 1), q(8, 1)),
        reference(N2N1, N2G, Peak, q(1, 3), q(1, 3)),
        reference(N2G, AG, Peak, q(3, 4), q(3, 4)),
        reference(AG, AN2, Peak, q(4, 1), q(4, 1)),
        reference(SA, SN2, Peak, q(4, 5), q(4, 5)),
        reference(SN2, AN2, Peak, q(4, 5), q(5, 1)),
        reference(SH, SN1, Peak, q(2, 1), q(2, 1)),
        reference(SN1, SG, Peak, q(3, 4), q(3, 4)),
        reference(SA, SN3, Peak, q(3, 4), q(3, 4)),
        reference(SN3, SN1, Peak, q(3, 4), q(8, 9)),
    ]
};

pub fn reference_for(pair: RatioPair) -> Option<&'static ReferenceConstant> {
    REFERENCE_CONSTANTS.iter().find(|r| r.pair == pair)
}
