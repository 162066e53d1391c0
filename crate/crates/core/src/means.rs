//! The power mean of two positive reals and the seven named means built on it.
//!
//! Every mean here is symmetric and homogeneous of degree one, so evaluation
//! first rescales the pair by a power of four (an exact operation) to keep
//! intermediate values near one, and only then applies the formula.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerance::ToleranceConfig;

/// An ordered pair `(a, b)` of strictly positive, finite reals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PositivePair {
    a: f64,
    b: f64,
}

impl PositivePair {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if a.is_finite() && b.is_finite() && a > 0.0 && b > 0.0 {
            Ok(Self { a, b })
        } else {
            Err(Error::InvalidPair { a, b })
        }
    }

    /// The pair `(1, x)`; by homogeneity every measure is determined by it.
    pub fn unit(x: f64) -> Result<Self> {
        Self::new(1.0, x)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// `b / a`, the argument of the generating functions.
    pub fn ratio(&self) -> f64 {
        self.b / self.a
    }

    pub fn min(&self) -> f64 {
        self.a.min(self.b)
    }

    pub fn max(&self) -> f64 {
        self.a.max(self.b)
    }

    pub fn swapped(&self) -> Self {
        Self {
            a: self.b,
            b: self.a,
        }
    }

    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        Self::new(lambda * self.a, lambda * self.b)
    }
}

/// The order `t` of a power mean; finite or infinite, never NaN.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct MeanOrder(f64);

impl MeanOrder {
    pub const MIN: MeanOrder = MeanOrder(f64::NEG_INFINITY);
    pub const HARMONIC: MeanOrder = MeanOrder(-1.0);
    pub const GEOMETRIC: MeanOrder = MeanOrder(0.0);
    pub const SQUARE_ROOT: MeanOrder = MeanOrder(0.5);
    pub const ARITHMETIC: MeanOrder = MeanOrder(1.0);
    pub const ROOT_SQUARE: MeanOrder = MeanOrder(2.0);
    pub const MAX: MeanOrder = MeanOrder(f64::INFINITY);

    pub fn new(t: f64) -> Result<Self> {
        if t.is_nan() {
            Err(Error::InvalidOrder)
        } else {
            Ok(Self(t))
        }
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

impl FromStr for MeanOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "+inf" | "infinity" | "+infinity" => f64::INFINITY,
            "-inf" | "-infinity" => f64::NEG_INFINITY,
            other => parse_real(other).ok_or_else(|| Error::Parse {
                what: "mean order",
                input: s.to_string(),
            })?,
        };
        Self::new(t)
    }
}

/// Parses a decimal or a simple fraction such as `1/2` or `-3/4`.
pub(crate) fn parse_real(s: &str) -> Option<f64> {
    match s.split_once('/') {
        Some((num, den)) => {
            let num: f64 = num.trim().parse().ok()?;
            let den: f64 = den.trim().parse().ok()?;
            (den != 0.0).then(|| num / den)
        }
        None => s.trim().parse().ok(),
    }
}

/// The seven named means, listed in increasing order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MeanKind {
    /// Harmonic, `2ab / (a + b)`.
    H,
    /// Geometric, `sqrt(ab)`.
    G,
    /// Square-root mean, `((sqrt a + sqrt b) / 2)^2`.
    N1,
    /// Heron's mean, `(a + sqrt(ab) + b) / 3`.
    N3,
    /// `((sqrt a + sqrt b) / 2) * sqrt((a + b) / 2)`.
    N2,
    /// Arithmetic, `(a + b) / 2`.
    A,
    /// Root-square, `sqrt((a^2 + b^2) / 2)`.
    S,
}

impl MeanKind {
    /// Increasing order: `H <= G <= N1 <= N3 <= N2 <= A <= S`.
    pub const ALL: [MeanKind; 7] = [
        MeanKind::H,
        MeanKind::G,
        MeanKind::N1,
        MeanKind::N3,
        MeanKind::N2,
        MeanKind::A,
        MeanKind::S,
    ];

    pub fn symbol(&self) -> &'static str {
        match self {
            MeanKind::H => "H",
            MeanKind::G => "G",
            MeanKind::N1 => "N1",
            MeanKind::N3 => "N3",
            MeanKind::N2 => "N2",
            MeanKind::A => "A",
            MeanKind::S => "S",
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            MeanKind::H => "harmonic",
            MeanKind::G => "geometric",
            MeanKind::N1 => "square-root",
            MeanKind::N3 => "Heron",
            MeanKind::N2 => "N2",
            MeanKind::A => "arithmetic",
            MeanKind::S => "root-square",
        }
    }

    /// The power-mean order that reproduces this mean, when there is one.
    pub fn order(&self) -> Option<MeanOrder> {
        match self {
            MeanKind::H => Some(MeanOrder::HARMONIC),
            MeanKind::G => Some(MeanOrder::GEOMETRIC),
            MeanKind::N1 => Some(MeanOrder::SQUARE_ROOT),
            MeanKind::A => Some(MeanOrder::ARITHMETIC),
            MeanKind::S => Some(MeanOrder::ROOT_SQUARE),
            MeanKind::N2 | MeanKind::N3 => None,
        }
    }
}

impl fmt::Display for MeanKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for MeanKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MeanKind::ALL
            .into_iter()
            .find(|k| k.symbol().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Parse {
                what: "mean kind",
                input: s.to_string(),
            })
    }
}

/// Largest power of four not exceeding `x` (one for subnormals). An even
/// exponent keeps `sqrt(scale)` exact, so square roots of the rescaled pair
/// are the rescaled square roots.
fn binade(x: f64) -> f64 {
    let bits = (x.to_bits() >> 52) & 0x7ff;
    if bits == 0 {
        return 1.0;
    }
    let exponent = bits as i32 - 1023;
    f64::from_bits(((exponent - exponent.rem_euclid(2) + 1023) as u64) << 52)
}

/// All seven means of one pair, evaluated together.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanValues {
    pub h: f64,
    pub g: f64,
    pub n1: f64,
    pub n3: f64,
    pub n2: f64,
    pub a: f64,
    pub s: f64,
}

impl MeanValues {
    pub fn new(p: PositivePair) -> Self {
        let scale = binade(p.max());
        let (u, v) = (p.a / scale, p.b / scale);
        let (ru, rv) = (u.sqrt(), v.sqrt());
        let sum = u + v;
        let half_root_sum = (ru + rv) / 2.0;
        Self {
            h: 2.0 * u * v / sum * scale,
            g: ru * rv * scale,
            n1: half_root_sum * half_root_sum * scale,
            n3: (sum + ru * rv) / 3.0 * scale,
            n2: half_root_sum * (sum / 2.0).sqrt() * scale,
            a: sum / 2.0 * scale,
            s: ((u * u + v * v) / 2.0).sqrt() * scale,
        }
    }

    pub fn get(&self, kind: MeanKind) -> f64 {
        match kind {
            MeanKind::H => self.h,
            MeanKind::G => self.g,
            MeanKind::N1 => self.n1,
            MeanKind::N3 => self.n3,
            MeanKind::N2 => self.n2,
            MeanKind::A => self.a,
            MeanKind::S => self.s,
        }
    }
}

pub fn mean(kind: MeanKind, p: PositivePair) -> f64 {
    MeanValues::new(p).get(kind)
}

/// The mean of order `t`: `((a^t + b^t) / 2)^(1/t)`, with the geometric mean at
/// `t = 0` and `min` / `max` at `t = -inf` / `+inf`.
///
/// Near `t = 0` the direct formula loses every significant digit, so while
/// `|t * ln(a/b)| <= 2` the value is computed as
/// `G * exp(ln1p(2 sinh^2(t d / 2)) / t)` with `d = ln(a/b) / 2`, which is exact
/// in real arithmetic and well conditioned. Outside that band the pair is
/// rescaled by `max` (for `t > 0`) or `min` (for `t < 0`) so the powered ratio
/// stays in `(0, 1]`. The orders of the named means (`-1, 0, 1/2, 1, 2`) use
/// their closed forms.
pub fn power_mean(t: MeanOrder, p: PositivePair) -> f64 {
    let t = t.value();
    let (lo, hi) = (p.min(), p.max());
    if t == f64::INFINITY {
        return hi;
    }
    if t == f64::NEG_INFINITY {
        return lo;
    }
    if lo == hi {
        return lo;
    }
    if let Some(kind) = MeanKind::ALL
        .into_iter()
        .find(|k| k.order().map(|o| o.value()) == Some(t))
    {
        return mean(kind, p);
    }
    let half_log_ratio = (hi.ln() - lo.ln()) / 2.0;
    if (t * half_log_ratio).abs() <= 1.0 {
        let sh = (t * half_log_ratio / 2.0).sinh();
        let correction = ((2.0 * sh * sh).ln_1p() / t).exp();
        return mean(MeanKind::G, p) * correction;
    }
    let (pivot, other) = if t > 0.0 { (hi, lo) } else { (lo, hi) };
    let r = (other / pivot).powf(t);
    pivot * ((1.0 + r) / 2.0).powf(1.0 / t)
}

/// The three sides of the Dragomir–Pearce bound
/// `(a^r + b^r)/2 <= (b^(r+1) - a^(r+1)) / ((r+1)(b-a)) <= ((a+b)/2)^r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DragomirPearce {
    pub lhs: f64,
    pub mid: f64,
    pub rhs: f64,
    pub holds: bool,
}

pub fn dragomir_pearce_check(
    r: f64,
    p: PositivePair,
    tol: &ToleranceConfig,
) -> Result<DragomirPearce> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::OutOfUnitInterval {
            name: "r",
            value: r,
        });
    }
    let (a, b) = (p.a(), p.b());
    if a == b {
        return Err(Error::EqualArguments(a));
    }
    let lhs = (a.powf(r) + b.powf(r)) / 2.0;
    let mid = (b.powf(r + 1.0) - a.powf(r + 1.0)) / ((r + 1.0) * (b - a));
    let rhs = ((a + b) / 2.0).powf(r);
    let scale = lhs.max(rhs);
    let holds = tol.le(lhs, mid, scale) && tol.le(mid, rhs, scale);
    Ok(DragomirPearce {
        lhs,
        mid,
        rhs,
        holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(a: f64, b: f64) -> PositivePair {
        PositivePair::new(a, b).unwrap()
    }

    fn rel(x: f64, y: f64) -> f64 {
        (x - y).abs() / y.abs()
    }

    #[test]
    fn rejects_bad_pairs() {
        assert!(PositivePair::new(0.0, 1.0).is_err());
        assert!(PositivePair::new(-1.0, 2.0).is_err());
        assert!(PositivePair::new(1.0, f64::NAN).is_err());
        assert!(PositivePair::new(f64::INFINITY, 1.0).is_err());
        assert!(MeanOrder::new(f64::NAN).is_err());
    }

    #[test]
    fn power_mean_examples() {
        assert_eq!(power_mean(MeanOrder::ARITHMETIC, pair(3.0, 5.0)), 4.0);
        assert!(rel(power_mean(MeanOrder::GEOMETRIC, pair(4.0, 9.0)), 6.0) < 1e-15);
        assert!(rel(power_mean(MeanOrder::HARMONIC, pair(1.0, 2.0)), 4.0 / 3.0) < 1e-15);
        assert_eq!(power_mean(MeanOrder::MAX, pair(2.0, 7.0)), 7.0);
        assert_eq!(power_mean(MeanOrder::MIN, pair(2.0, 7.0)), 2.0);
        // ((1 + sqrt 2) / 2)^2, 30 digits: 1.45710678118654752440084436210
        assert!(
            rel(
                power_mean(MeanOrder::SQUARE_ROOT, pair(1.0, 2.0)),
                1.457_106_781_186_547_5
            ) < 1e-15
        );
    }

    #[test]
    fn power_mean_is_continuous_through_zero() {
        let p = pair(1.0, 1e6);
        let g = mean(MeanKind::G, p);
        for t in [1e-14, -1e-14, 1e-10, -1e-10] {
            let v = power_mean(MeanOrder::new(t).unwrap(), p);
            // d/dt B_t at t = 0 is G * d^2 / 2 with d = ln(b/a) / 2
            let d = (1e6f64).ln() / 2.0;
            assert!(rel(v, g * (1.0 + t * d * d / 2.0)) < 1e-14, "t = {t}");
        }
        // 40-digit evaluations of the defining formula
        let v = power_mean(MeanOrder::new(1e-8).unwrap(), p);
        assert!(rel(v, 1_000.000_238_585_443_4) < 1e-14);
        let v = power_mean(MeanOrder::new(-1e-8).unwrap(), p);
        assert!(rel(v, 999.999_761_414_613_5) < 1e-14);
    }

    #[test]
    fn power_mean_survives_extreme_orders() {
        let p = pair(1e-200, 1e200);
        assert!(rel(power_mean(MeanOrder::new(1e4).unwrap(), p), 1e200) < 1e-3);
        let v = power_mean(MeanOrder::new(-50.0).unwrap(), p);
        assert!(rel(v, 1e-200 * 2f64.powf(1.0 / 50.0)) < 1e-12);
        assert!(power_mean(MeanOrder::new(300.0).unwrap(), pair(1e300, 1e300)).is_finite());
    }

    #[test]
    fn named_mean_examples() {
        assert_eq!(mean(MeanKind::N1, pair(1.0, 9.0)), 4.0);
        assert_eq!(mean(MeanKind::S, pair(1.0, 7.0)), 5.0);
        // ((1 + sqrt 2) / 2) * sqrt(3/2), 30 digits: 1.47839783948023317131304418943
        assert!(rel(mean(MeanKind::N2, pair(1.0, 2.0)), 1.478_397_839_480_233_2) < 1e-15);
        for k in MeanKind::ALL {
            for a in [1e-300, 0.3, 1.0, 7.5, 1e300] {
                let m = mean(k, pair(a, a));
                assert!(rel(m, a) <= f64::EPSILON, "{k} at {a}: {m}");
            }
        }
    }

    #[test]
    fn no_overflow_near_max() {
        let p = pair(f64::MAX, f64::MAX / 3.0);
        for k in MeanKind::ALL {
            assert!(mean(k, p).is_finite(), "{k}");
        }
    }

    #[test]
    fn symmetric_to_the_bit() {
        for (a, b) in [(1.0, 2.0), (0.1, 3e7), (5.5, 1e-9)] {
            let (p, q) = (pair(a, b), pair(b, a));
            for k in MeanKind::ALL {
                assert_eq!(mean(k, p), mean(k, q));
            }
        }
    }

    #[test]
    fn parses_kinds_and_orders() {
        assert_eq!("n2".parse::<MeanKind>().unwrap(), MeanKind::N2);
        assert!("Q".parse::<MeanKind>().is_err());
        assert_eq!("1/2".parse::<MeanOrder>().unwrap(), MeanOrder::SQUARE_ROOT);
        assert_eq!("-inf".parse::<MeanOrder>().unwrap(), MeanOrder::MIN);
        assert!("nan".parse::<MeanOrder>().is_err());
    }

    #[test]
    fn dragomir_pearce_examples() {
        let tol = ToleranceConfig::default();
        let c = dragomir_pearce_check(0.5, pair(1.0, 4.0), &tol).unwrap();
        assert!((c.lhs - 1.5).abs() < 1e-15);
        assert!((c.mid - 14.0 / 9.0).abs() < 1e-15);
        assert!((c.rhs - 2.5f64.sqrt()).abs() < 1e-15);
        assert!(c.holds);

        let c = dragomir_pearce_check(0.5, pair(1.0, 2.0), &tol).unwrap();
        assert!((c.lhs - 1.207_107).abs() < 1e-6);
        // 2 (2^1.5 - 1) / 3 = 1.2189514164974602...
        assert!((c.mid - 1.218_951_416_497_46).abs() < 1e-14);
        assert!((c.rhs - 1.224_745).abs() < 1e-6);
        assert!(c.holds);

        assert_eq!(
            dragomir_pearce_check(0.5, pair(3.0, 3.0), &tol),
            Err(Error::EqualArguments(3.0))
        );
        assert!(dragomir_pearce_check(1.0, pair(1.0, 2.0), &tol).is_err());
        assert!(dragomir_pearce_check(0.0, pair(1.0, 2.0), &tol).is_err());
    }
}
