//! Difference measures `M_XY = X - Y` and their generating functions.
//!
//! Each measure is homogeneous of degree one, so `M_XY(a, b) = a * f(b / a)`
//! for a single-variable `f` on `(0, inf)`. Eleven measures carry closed forms
//! for `f`, `f'` and `f''`; the rest of the enumeration only appears inside
//! ordering chains and is evaluated as a plain difference of means.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use twofloat::TwoFloat;

use crate::error::{Error, Result};
use crate::means::{MeanKind, MeanValues, PositivePair};

/// Scalar arithmetic needed by the closed forms of `f`.
///
/// Implemented for `f64` and for double-double `TwoFloat`, which the
/// finite-difference cross-check uses.
pub trait Real:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
{
    fn from_f64(v: f64) -> Self;
    fn sqrt(self) -> Self;

    /// `self^(3/2)`.
    fn pow_three_halves(self) -> Self {
        self * self.sqrt()
    }

    /// `self / rhs` to the full precision of the type.
    fn quotient(self, rhs: Self) -> Self {
        self / rhs
    }
}

impl Real for f64 {
    fn from_f64(v: f64) -> Self {
        v
    }

    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
}

impl Real for TwoFloat {
    fn from_f64(v: f64) -> Self {
        TwoFloat::from(v)
    }

    fn sqrt(self) -> Self {
        TwoFloat::sqrt(self)
    }

    // twofloat's own division is only accurate to about one double; one
    // Newton step restores the second word.
    fn quotient(self, rhs: Self) -> Self {
        let q = self / rhs;
        q + (self - q * rhs) / rhs
    }
}

/// `M_XY = X - Y` where `X` sits above `Y` in `H <= G <= N1 <= N3 <= N2 <= A <= S`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DifferenceKind {
    SA,
    SN2,
    SN3,
    SN1,
    SG,
    SH,
    AN2,
    AN3,
    AN1,
    AG,
    AH,
    N2N3,
    N2N1,
    N2G,
    N2H,
    N3N1,
    N3G,
    N3H,
    N1G,
    N1H,
}

impl DifferenceKind {
    pub const ALL: [DifferenceKind; 20] = [
        DifferenceKind::SA,
        DifferenceKind::SN2,
        DifferenceKind::SN3,
        DifferenceKind::SN1,
        DifferenceKind::SG,
        DifferenceKind::SH,
        DifferenceKind::AN2,
        DifferenceKind::AN3,
        DifferenceKind::AN1,
        DifferenceKind::AG,
        DifferenceKind::AH,
        DifferenceKind::N2N3,
        DifferenceKind::N2N1,
        DifferenceKind::N2G,
        DifferenceKind::N2H,
        DifferenceKind::N3N1,
        DifferenceKind::N3G,
        DifferenceKind::N3H,
        DifferenceKind::N1G,
        DifferenceKind::N1H,
    ];

    /// The eleven measures with closed-form derivatives, all convex.
    pub const CLOSED_FORM: [DifferenceKind; 11] = [
        DifferenceKind::SA,
        DifferenceKind::SN2,
        DifferenceKind::SN3,
        DifferenceKind::SN1,
        DifferenceKind::SG,
        DifferenceKind::SH,
        DifferenceKind::AN2,
        DifferenceKind::AG,
        DifferenceKind::AH,
        DifferenceKind::N2N1,
        DifferenceKind::N2G,
    ];

    /// `(X, Y)` for `M_XY = X - Y`.
    pub fn means(&self) -> (MeanKind, MeanKind) {
        use DifferenceKind::*;
        use MeanKind as M;
        match self {
            SA => (M::S, M::A),
            SN2 => (M::S, M::N2),
            SN3 => (M::S, M::N3),
            SN1 => (M::S, M::N1),
            SG => (M::S, M::G),
            SH => (M::S, M::H),
            AN2 => (M::A, M::N2),
            AN3 => (M::A, M::N3),
            AN1 => (M::A, M::N1),
            AG => (M::A, M::G),
            AH => (M::A, M::H),
            N2N3 => (M::N2, M::N3),
            N2N1 => (M::N2, M::N1),
            N2G => (M::N2, M::G),
            N2H => (M::N2, M::H),
            N3N1 => (M::N3, M::N1),
            N3G => (M::N3, M::G),
            N3H => (M::N3, M::H),
            N1G => (M::N1, M::G),
            N1H => (M::N1, M::H),
        }
    }

    pub fn from_means(major: MeanKind, minor: MeanKind) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.means() == (major, minor))
    }

    pub fn has_closed_forms(&self) -> bool {
        Self::CLOSED_FORM.contains(self)
    }

    pub fn symbol(&self) -> String {
        let (x, y) = self.means();
        format!("{x}{y}")
    }
}

impl fmt::Display for DifferenceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "M_{}", self.symbol())
    }
}

impl FromStr for DifferenceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let wanted = s.trim().trim_start_matches("M_").to_ascii_uppercase();
        Self::ALL
            .into_iter()
            .find(|k| k.symbol() == wanted)
            .ok_or_else(|| Error::Parse {
                what: "difference kind",
                input: s.to_string(),
            })
    }
}

/// Closed-form derivatives of a generating function.
#[derive(Clone, Copy)]
pub struct Derivatives {
    pub f1: fn(f64) -> f64,
    pub f2: fn(f64) -> f64,
    /// `f` in double-double precision, for finite-difference checks.
    pub f_extended: fn(TwoFloat) -> TwoFloat,
}

/// The generating function `f` of one difference measure, plus `f'` and `f''`
/// when they are known in closed form.
#[derive(Clone, Copy)]
pub struct GeneratingFunction {
    kind: DifferenceKind,
    f: fn(f64) -> f64,
    derivatives: Option<Derivatives>,
}

impl fmt::Debug for GeneratingFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GeneratingFunction")
            .field("kind", &self.kind)
            .field("has_closed_forms", &self.has_closed_forms())
            .finish()
    }
}

impl GeneratingFunction {
    pub fn kind(&self) -> DifferenceKind {
        self.kind
    }

    pub fn has_closed_forms(&self) -> bool {
        self.derivatives.is_some()
    }

    pub fn f(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    pub fn f1(&self, x: f64) -> Option<f64> {
        self.derivatives.map(|d| (d.f1)(x))
    }

    pub fn f2(&self, x: f64) -> Option<f64> {
        self.derivatives.map(|d| (d.f2)(x))
    }

    pub fn derivatives(&self) -> Option<&Derivatives> {
        self.derivatives.as_ref()
    }

    /// The closed-form derivatives, or an error naming a chain-only kind.
    pub fn require_closed_forms(&self) -> Result<&Derivatives> {
        self.derivatives
            .as_ref()
            .ok_or(Error::NoClosedForm(self.kind))
    }
}

pub fn generating_function(kind: DifferenceKind) -> GeneratingFunction {
    use DifferenceKind::*;
    macro_rules! closed {
        ($f:ident, $f1:ident, $f2:ident) => {
            GeneratingFunction {
                kind,
                f: $f::<f64>,
                derivatives: Some(Derivatives {
                    f1: $f1,
                    f2: $f2,
                    f_extended: $f::<TwoFloat>,
                }),
            }
        };
    }
    match kind {
        SA => closed!(f_sa, f1_sa, f2_sa),
        SN3 => closed!(f_sn3, f1_sn3, f2_sn3),
        SN2 => closed!(f_sn2, f1_sn2, f2_sn2),
        SN1 => closed!(f_sn1, f1_sn1, f2_sn1),
        SG => closed!(f_sg, f1_sg, f2_sg),
        SH => closed!(f_sh, f1_sh, f2_sh),
        AN2 => closed!(f_an2, f1_an2, f2_an2),
        AG => closed!(f_ag, f1_ag, f2_ag),
        AH => closed!(f_ah, f1_ah, f2_ah),
        N2N1 => closed!(f_n2n1, f1_n2n1, f2_n2n1),
        N2G => closed!(f_n2g, f1_n2g, f2_n2g),
        AN3 | AN1 | N2N3 | N2H | N3N1 | N3G | N3H | N1G | N1H => GeneratingFunction {
            kind,
            f: chain_only_f(kind),
            derivatives: None,
        },
    }
}

fn chain_only_f(kind: DifferenceKind) -> fn(f64) -> f64 {
    use DifferenceKind::*;
    fn at(kind: DifferenceKind, x: f64) -> f64 {
        match PositivePair::unit(x) {
            Ok(p) => difference(kind, p),
            Err(_) => f64::NAN,
        }
    }
    match kind {
        AN3 => |x| at(AN3, x),
        AN1 => |x| at(AN1, x),
        N2N3 => |x| at(N2N3, x),
        N2H => |x| at(N2H, x),
        N3N1 => |x| at(N3N1, x),
        N3G => |x| at(N3G, x),
        N3H => |x| at(N3H, x),
        N1G => |x| at(N1G, x),
        N1H => |x| at(N1H, x),
        _ => unreachable!("{kind} has closed forms"),
    }
}

/// `phi_f(a, b) = a * f(b / a)`.
pub fn phi(gf: &GeneratingFunction, p: PositivePair) -> f64 {
    p.a() * gf.f(p.ratio())
}

/// `X(a, b) - Y(a, b)` evaluated directly from the means.
pub fn difference(kind: DifferenceKind, p: PositivePair) -> f64 {
    difference_of(kind, &MeanValues::new(p))
}

pub fn difference_of(kind: DifferenceKind, values: &MeanValues) -> f64 {
    let (x, y) = kind.means();
    values.get(x) - values.get(y)
}

/// Absolute residuals of the five identities tying `M_AG` to
/// `2 M_N1G`, `2 M_AN1`, `3 M_AN3`, `(3/2) M_N3G` and `6 M_N3N1`.
pub fn identity_residuals(p: PositivePair) -> [f64; 5] {
    use DifferenceKind::*;
    let v = MeanValues::new(p);
    let ag = difference_of(AG, &v);
    [
        (ag - 2.0 * difference_of(N1G, &v)).abs(),
        (ag - 2.0 * difference_of(AN1, &v)).abs(),
        (ag - 3.0 * difference_of(AN3, &v)).abs(),
        (ag - 1.5 * difference_of(N3G, &v)).abs(),
        (ag - 6.0 * difference_of(N3N1, &v)).abs(),
    ]
}

// Closed forms. `f''` is kept in the published arrangement; `f` and `f'` are
// the algebraically correct versions (see `f_n2g` and `f1_an2`).

fn half<T: Real>(x: T) -> T {
    x / 2.0
}

/// `sqrt((x^2 + 1) / 2)`, the generating function of `S`.
fn root_square<T: Real>(x: T) -> T {
    half(x * x + 1.0).sqrt()
}

fn f_sa<T: Real>(x: T) -> T {
    root_square(x) - half(x + 1.0)
}

fn f1_sa(x: f64) -> f64 {
    x / (2f64.sqrt() * (x * x + 1.0).sqrt()) - 0.5
}

fn f2_sa(x: f64) -> f64 {
    2.0 / (2.0 * x * x + 2.0).powf(1.5)
}

fn f_sn3<T: Real>(x: T) -> T {
    root_square(x) - (x + x.sqrt() + 1.0) / 3.0
}

fn f1_sn3(x: f64) -> f64 {
    (6.0 * x.powf(1.5) - (2.0 * x.sqrt() + 1.0) * (2.0 * (x * x + 1.0)).sqrt())
        / (6.0 * (2.0 * x * (x * x + 1.0)).sqrt())
}

fn f2_sn3(x: f64) -> f64 {
    let q = (2.0 * x * x + 2.0).powf(1.5);
    (24.0 * x.powf(1.5) + q) / (12.0 * x.powf(1.5) * q)
}

fn f_sn2<T: Real>(x: T) -> T {
    ((x * x + 1.0).sqrt() * 2.0 - (x.sqrt() + 1.0) * (x + 1.0).sqrt()) / (2.0 * 2f64.sqrt())
}

fn f1_sn2(x: f64) -> f64 {
    (4.0 * x.powf(1.5) * (x + 1.0).sqrt() - (2.0 * x + x.sqrt() + 1.0) * (x * x + 1.0).sqrt())
        / (4.0 * (2.0 * x * (x + 1.0) * (x * x + 1.0)).sqrt())
}

fn f2_sn2(x: f64) -> f64 {
    ((x.powf(1.5) + 1.0) * (x * x + 1.0).powf(1.5) + 8.0 * x.powf(1.5) * (x + 1.0).powf(1.5))
        / (8.0 * 2f64.sqrt() * (x * (x + 1.0) * (x * x + 1.0)).powf(1.5))
}

fn f_sn1<T: Real>(x: T) -> T {
    let r = x.sqrt() + 1.0;
    ((x * x + 1.0) * 2.0).sqrt() * 2.0 / 4.0 - r * r / 4.0
}

fn f1_sn1(x: f64) -> f64 {
    (4.0 * x.powf(1.5) - (x.sqrt() + 1.0) * (2.0 * (x * x + 1.0)).sqrt())
        / (4.0 * (2.0 * x * (x * x + 1.0)).sqrt())
}

fn f2_sn1(x: f64) -> f64 {
    let q = (2.0 * x * x + 2.0).powf(1.5);
    (16.0 * x.powf(2.5) + x * q) / (8.0 * x.powf(2.5) * q)
}

fn f_sg<T: Real>(x: T) -> T {
    root_square(x) - x.sqrt()
}

fn f1_sg(x: f64) -> f64 {
    (2f64.sqrt() * x.powf(1.5) - (x * x + 1.0).sqrt()) / (2.0 * (x * (x * x + 1.0)).sqrt())
}

fn f2_sg(x: f64) -> f64 {
    1.0 / (2f64.sqrt() * (x * x + 1.0).powf(1.5)) + 1.0 / (4.0 * x.powf(1.5))
}

fn f_sh<T: Real>(x: T) -> T {
    root_square(x) - (x * 2.0).quotient(x + 1.0)
}

fn f1_sh(x: f64) -> f64 {
    let r = (2.0 * (x * x + 1.0)).sqrt();
    let s = (x + 1.0) * (x + 1.0);
    (x * s - 2.0 * r) / (s * r)
}

fn f2_sh(x: f64) -> f64 {
    let c = (x + 1.0).powi(3);
    let q = (2.0 * x * x + 2.0).powf(1.5);
    2.0 * (c + 2.0 * q) / (c * q)
}

fn f_an2<T: Real>(x: T) -> T {
    ((x + 1.0) * 2.0 - (x.sqrt() + 1.0) * ((x + 1.0) * 2.0).sqrt()) / 4.0
}

// The published f' has sqrt(2(x + 1)) in the denominator; differentiating f
// gives sqrt(2x(x + 1)).
fn f1_an2(x: f64) -> f64 {
    (2.0 * (2.0 * x * (x + 1.0)).sqrt() - (2.0 * x + x.sqrt() + 1.0))
        / (4.0 * (2.0 * x * (x + 1.0)).sqrt())
}

fn f2_an2(x: f64) -> f64 {
    (x.powf(1.5) + 1.0) / (4.0 * x.powf(1.5) * (2.0 * x + 2.0).powf(1.5))
}

fn f_ag<T: Real>(x: T) -> T {
    let r = x.sqrt() - 1.0;
    r * r / 2.0
}

fn f1_ag(x: f64) -> f64 {
    (x.sqrt() - 1.0) / (2.0 * x.sqrt())
}

fn f2_ag(x: f64) -> f64 {
    1.0 / (4.0 * x.powf(1.5))
}

fn f_ah<T: Real>(x: T) -> T {
    let d = x - 1.0;
    (d * d).quotient((x + 1.0) * 2.0)
}

fn f1_ah(x: f64) -> f64 {
    (x - 1.0) * (x + 3.0) / (2.0 * (x + 1.0) * (x + 1.0))
}

fn f2_ah(x: f64) -> f64 {
    4.0 / (x + 1.0).powi(3)
}

fn f_n2n1<T: Real>(x: T) -> T {
    let r = x.sqrt() + 1.0;
    (r * ((x + 1.0) * 2.0).sqrt() - r * r) / 4.0
}

fn f1_n2n1(x: f64) -> f64 {
    (2.0 * x + x.sqrt() + 1.0 - (x.sqrt() + 1.0) * (2.0 * (x + 1.0)).sqrt())
        / (4.0 * (2.0 * x * (x + 1.0)).sqrt())
}

fn f2_n2n1(x: f64) -> f64 {
    let q = (2.0 * x + 2.0).powf(1.5);
    (q - 2.0 * (x.powf(1.5) + 1.0)) / (8.0 * x.powf(1.5) * q)
}

// The published f subtracts 4x; N2 - G needs 4 sqrt(x), which is also what
// the published f' and f'' differentiate.
fn f_n2g<T: Real>(x: T) -> T {
    ((x.sqrt() + 1.0) * ((x + 1.0) * 2.0).sqrt() - x.sqrt() * 4.0) / 4.0
}

fn f1_n2g(x: f64) -> f64 {
    (2.0 * x + 1.0 + x.sqrt() - 2.0 * (2.0 * (x + 1.0)).sqrt())
        / (4.0 * (2.0 * x * (x + 1.0)).sqrt())
}

fn f2_n2g(x: f64) -> f64 {
    let q = (2.0 * x + 2.0).powf(1.5);
    (q - (x.powf(1.5) + 1.0)) / (4.0 * x.powf(1.5) * q)
}
