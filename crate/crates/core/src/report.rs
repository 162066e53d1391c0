//! Verification reports in JSON, plain text and markdown.
//!
//! JSON numbers are written with 17 significant digits so that every `f64`
//! round-trips; non-finite values become `null`. Identical inputs give
//! byte-identical documents regardless of the worker count.

use std::fmt::Write as _;

use serde::{Serialize, Serializer};

use crate::chains::{AuxiliaryReport, ChainReport, PairReport};
use crate::convexity::ConvexityCertificate;
use crate::means::PositivePair;
use crate::ratio::{from_profile, reference_for, Pattern, RatioProfile};
use crate::sampling::SamplingSpec;
use crate::tolerance::ToleranceConfig;

/// Agreement required between a recovered constant and a published one.
pub const CONSTANT_TOLERANCE: f64 = 1e-9;

/// An `f64` serialized with 17 significant digits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Num(pub f64);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return s.serialize_none();
        }
        let text = format!("{:.16e}", self.0);
        let raw =
            serde_json::value::RawValue::from_string(text).map_err(serde::ser::Error::custom)?;
        raw.serialize(s)
    }
}

/// `v` with `digits` significant digits, in the style of C's `%g`.
pub fn format_significant(v: f64, digits: usize) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", digits - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: String| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    };
    if exp < -5 || exp >= digits as i32 {
        format!("{}e{exp}", trim(mantissa.to_string()))
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim(format!("{v:.decimals$}"))
    }
}

pub fn fmt15(v: f64) -> String {
    format_significant(v, 15)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct WitnessJson {
    pub a: Num,
    pub b: Num,
}

impl From<PositivePair> for WitnessJson {
    fn from(p: PositivePair) -> Self {
        Self {
            a: Num(p.a()),
            b: Num(p.b()),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PairJson {
    pub lower: String,
    pub upper: String,
    pub violations: usize,
    pub worst_margin: Num,
    pub witness: Option<WitnessJson>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AuxiliaryJson {
    pub check: crate::chains::AuxiliaryCheck,
    pub points: usize,
    pub min_scaled: Num,
    pub min_at: Num,
    pub min_outside_band: Num,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ChainJson {
    pub id: String,
    pub source: String,
    pub expectation: crate::chains::Expectation,
    pub holds: bool,
    pub meets_expectation: bool,
    pub samples: usize,
    pub violations: usize,
    pub worst_margin: Num,
    pub witness: Option<WitnessJson>,
    pub per_pair: Vec<PairJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub auxiliary: Option<AuxiliaryJson>,
}

impl From<&PairReport> for PairJson {
    fn from(r: &PairReport) -> Self {
        Self {
            lower: r.lower.clone(),
            upper: r.upper.clone(),
            violations: r.violations,
            worst_margin: Num(r.worst_margin),
            witness: r.witness.map(Into::into),
        }
    }
}

impl From<&AuxiliaryReport> for AuxiliaryJson {
    fn from(r: &AuxiliaryReport) -> Self {
        Self {
            check: r.check,
            points: r.grid.points,
            min_scaled: Num(r.min_scaled),
            min_at: Num(r.min_at),
            min_outside_band: Num(r.min_outside_band),
            holds: r.holds,
        }
    }
}

impl From<&ChainReport> for ChainJson {
    fn from(r: &ChainReport) -> Self {
        Self {
            id: r.id.to_string(),
            source: r.source.to_string(),
            expectation: r.expectation,
            holds: r.holds,
            meets_expectation: r.meets_expectation(),
            samples: r.samples,
            violations: r.violations,
            worst_margin: Num(r.worst_margin),
            witness: r.witness.map(Into::into),
            per_pair: r.per_pair.iter().map(Into::into).collect(),
            auxiliary: r.auxiliary.as_ref().map(Into::into),
        }
    }
}

/// One recovered constant next to the published one.
#[derive(Debug, Clone, Serialize)]
pub struct RatioJson {
    pub num: String,
    pub den: String,
    pub value_at_1: Num,
    pub sup: Num,
    pub sup_location: Num,
    pub inf: Num,
    pub inf_location: Num,
    pub pattern: Pattern,
    /// Published value of `g(1)`.
    pub paper_constant: Option<Num>,
    pub paper_constant_text: Option<String>,
    /// Constant used by the published inequality between the two measures.
    pub inequality_constant: Option<Num>,
    pub matches_paper: bool,
    pub statement: String,
    pub note: Option<String>,
}

impl RatioJson {
    pub fn new(profile: &RatioProfile) -> Self {
        let reference = reference_for(profile.pair);
        let statement = from_profile(profile).sharp_statement();
        let matches_paper = reference.is_some_and(|r| {
            (profile.value_at_1 - r.published.value()).abs() <= CONSTANT_TOLERANCE
                && profile.pattern == r.pattern
        });
        let note = reference.and_then(|r| {
            let published_agrees =
                (profile.value_at_1 - r.published.value()).abs() <= CONSTANT_TOLERANCE;
            let inequality_agrees =
                (profile.value_at_1 - r.inequality_constant.value()).abs() <= CONSTANT_TOLERANCE;
            match (published_agrees, inequality_agrees) {
                (true, true) => None,
                (false, true) => Some(format!(
                    "published constant {} disagrees with g(1) = {}; the published inequality uses {}",
                    r.published, r.inequality_constant, r.inequality_constant
                )),
                _ => Some(format!(
                    "published constant {} disagrees with g(1) = {}",
                    r.published,
                    fmt15(profile.value_at_1)
                )),
            }
        });
        Self {
            num: profile.pair.numerator.symbol(),
            den: profile.pair.denominator.symbol(),
            value_at_1: Num(profile.value_at_1),
            sup: Num(profile.sup),
            sup_location: Num(profile.sup_location),
            inf: Num(profile.inf),
            inf_location: Num(profile.inf_location),
            pattern: profile.pattern,
            paper_constant: reference.map(|r| Num(r.published.value())),
            paper_constant_text: reference.map(|r| r.published.to_string()),
            inequality_constant: reference.map(|r| Num(r.inequality_constant.value())),
            matches_paper,
            statement,
            note,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvexityJson {
    pub kind: String,
    pub points: usize,
    pub min_f2: Num,
    pub min_f2_at: Num,
    pub max_fd_mismatch: Num,
    pub max_fd_mismatch_at: Num,
    pub fd_tolerance: Num,
    pub passed: bool,
    pub note: String,
}

impl From<&ConvexityCertificate> for ConvexityJson {
    fn from(c: &ConvexityCertificate) -> Self {
        Self {
            kind: c.kind.symbol(),
            points: c.grid.points,
            min_f2: Num(c.min_f2),
            min_f2_at: Num(c.min_f2_at),
            max_fd_mismatch: Num(c.max_fd_mismatch),
            max_fd_mismatch_at: Num(c.max_fd_mismatch_at),
            fd_tolerance: Num(c.fd_tolerance),
            passed: c.passed,
            note: c.note.to_string(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ToleranceJson {
    pub relative: Num,
    pub absolute_floor: Num,
}

#[derive(Debug, Clone, Serialize)]
pub struct SamplingJson {
    pub count: usize,
    pub ratio_min: Num,
    pub ratio_max: Num,
    pub include_edge_cases: bool,
}

/// The top-level report document.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub tool_version: String,
    pub seed: u64,
    pub sampling: SamplingJson,
    pub tolerance: ToleranceJson,
    pub chains: Vec<ChainJson>,
    pub ratios: Vec<RatioJson>,
    pub convexity: Vec<ConvexityJson>,
}

impl Report {
    pub fn new(spec: &SamplingSpec, tol: &ToleranceConfig) -> Self {
        Self {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            seed: spec.seed,
            sampling: SamplingJson {
                count: spec.count,
                ratio_min: Num(spec.ratio_min),
                ratio_max: Num(spec.ratio_max),
                include_edge_cases: spec.include_edge_cases,
            },
            tolerance: ToleranceJson {
                relative: Num(tol.relative),
                absolute_floor: Num(tol.absolute_floor),
            },
            chains: Vec::new(),
            ratios: Vec::new(),
            convexity: Vec::new(),
        }
    }

    pub fn with_chains(mut self, reports: &[ChainReport]) -> Self {
        self.chains = reports.iter().map(Into::into).collect();
        self
    }

    pub fn with_ratios(mut self, profiles: &[RatioProfile]) -> Self {
        self.ratios = profiles.iter().map(RatioJson::new).collect();
        self
    }

    pub fn with_convexity(mut self, certificates: &[ConvexityCertificate]) -> Self {
        self.convexity = certificates.iter().map(Into::into).collect();
        self
    }

    /// Every chain met its expectation and every certificate passed.
    pub fn expectations_met(&self) -> bool {
        self.chains.iter().all(|c| c.meets_expectation) && self.convexity.iter().all(|c| c.passed)
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("report serializes");
        out.push('\n');
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "meanforge {}  seed {}  samples {}  tolerance {}",
            self.tool_version,
            self.seed,
            self.sampling.count,
            fmt15(self.tolerance.relative.0)
        );
        for c in &self.chains {
            let _ = writeln!(
                out,
                "chain {:<16} {:<7} {:<15} violations {:<8} worst margin {}{}",
                c.id,
                if c.holds { "holds" } else { "fails" },
                c.expectation_text(),
                c.violations,
                fmt15(c.worst_margin.0),
                if c.meets_expectation {
                    ""
                } else {
                    "  UNEXPECTED"
                }
            );
            if let Some(w) = &c.witness {
                let _ = writeln!(
                    out,
                    "  witness (a, b) = ({}, {})",
                    fmt15(w.a.0),
                    fmt15(w.b.0)
                );
            }
            for p in c.per_pair.iter().filter(|p| p.violations > 0) {
                let _ = writeln!(
                    out,
                    "  {} <= {} fails on {} samples, worst margin {}",
                    p.lower,
                    p.upper,
                    p.violations,
                    fmt15(p.worst_margin.0)
                );
            }
            if let Some(a) = &c.auxiliary {
                let _ = writeln!(
                    out,
                    "  auxiliary {:?}: min scaled value {} at x = {}, {}",
                    a.check,
                    fmt15(a.min_scaled.0),
                    fmt15(a.min_at.0),
                    if a.holds { "holds" } else { "fails" }
                );
            }
        }
        for r in &self.ratios {
            let _ = writeln!(
                out,
                "ratio {:>4}/{:<4} g(1) = {}  sup = {}  inf = {}  {}  {}",
                r.num,
                r.den,
                fmt15(r.value_at_1.0),
                fmt15(r.sup.0),
                fmt15(r.inf.0),
                serde_plain(&r.pattern),
                r.statement
            );
            if let Some(note) = &r.note {
                let _ = writeln!(out, "  note: {note}");
            }
        }
        for c in &self.convexity {
            let _ = writeln!(
                out,
                "convexity {:<5} {}  min f'' = {} at x = {}  max fd mismatch = {}",
                c.kind,
                if c.passed { "passed" } else { "FAILED" },
                fmt15(c.min_f2.0),
                fmt15(c.min_f2_at.0),
                fmt15(c.max_fd_mismatch.0)
            );
        }
        out
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# meanforge report\n");
        let _ = writeln!(
            out,
            "Version {}, seed {}, {} samples, relative tolerance {}.\n",
            self.tool_version,
            self.seed,
            self.sampling.count,
            fmt15(self.tolerance.relative.0)
        );
        if !self.ratios.is_empty() {
            let _ = writeln!(out, "## Optimal constants\n");
            let _ = writeln!(
                out,
                "| pair | g(1) | sup | inf | pattern | published | inequality | matches | statement |"
            );
            let _ = writeln!(out, "|---|---|---|---|---|---|---|---|---|");
            for r in &self.ratios {
                let _ = writeln!(
                    out,
                    "| {}/{} | {} | {} | {} | {} | {} | {} | {} | {} |",
                    r.num,
                    r.den,
                    format_significant(r.value_at_1.0, 10),
                    format_significant(r.sup.0, 10),
                    format_significant(r.inf.0, 10),
                    serde_plain(&r.pattern),
                    r.paper_constant_text.as_deref().unwrap_or("-"),
                    r.inequality_constant
                        .map(|c| format_significant(c.0, 10))
                        .unwrap_or_else(|| "-".into()),
                    if r.matches_paper { "yes" } else { "no" },
                    r.statement
                );
            }
            out.push('\n');
        }
        if !self.chains.is_empty() {
            let _ = writeln!(out, "## Chains\n");
            let _ = writeln!(
                out,
                "| id | expectation | holds | violations | worst margin | witness |"
            );
            let _ = writeln!(out, "|---|---|---|---|---|---|");
            for c in &self.chains {
                let witness = c
                    .witness
                    .map(|w| format!("({}, {})", fmt15(w.a.0), fmt15(w.b.0)))
                    .unwrap_or_else(|| "-".into());
                let _ = writeln!(
                    out,
                    "| {} | {} | {} | {} | {} | {} |",
                    c.id,
                    c.expectation_text(),
                    if c.holds { "yes" } else { "no" },
                    c.violations,
                    format_significant(c.worst_margin.0, 6),
                    witness
                );
            }
            out.push('\n');
        }
        if !self.convexity.is_empty() {
            let _ = writeln!(out, "## Convexity certificates\n");
            let _ = writeln!(out, "| kind | min f'' | max fd mismatch | passed |");
            let _ = writeln!(out, "|---|---|---|---|");
            for c in &self.convexity {
                let _ = writeln!(
                    out,
                    "| {} | {} | {} | {} |",
                    c.kind,
                    format_significant(c.min_f2.0, 6),
                    format_significant(c.max_fd_mismatch.0, 3),
                    if c.passed { "yes" } else { "no" }
                );
            }
            let _ = writeln!(
                out,
                "\nCertificates are {}.",
                crate::convexity::CERTIFICATE_NOTE
            );
        }
        out
    }
}

impl ChainJson {
    fn expectation_text(&self) -> String {
        self.expectation.to_string()
    }
}

fn serde_plain<T: Serialize>(v: &T) -> String {
    serde_json::to_value(v)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default()
}
