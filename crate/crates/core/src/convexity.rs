//! Numerical certificates for the convexity of the difference measures and
//! for the two consequences of convexity used downstream: the tangent bound
//! `0 <= phi_f(a, b) <= (b - a) f'(b/a)` and joint convexity of `phi_f`.
//!
//! A certificate is numerical evidence gathered on a finite grid, not a proof.

use rayon::prelude::*;
use serde::Serialize;
use twofloat::TwoFloat;

use crate::error::{Error, Result};
use crate::generating::{generating_function, phi, DifferenceKind, GeneratingFunction};
use crate::grid::GridSpec;
use crate::means::PositivePair;
use crate::tolerance::ToleranceConfig;

pub const CERTIFICATE_NOTE: &str = "numerical evidence on a finite grid, not a proof";

/// Relative step of the finite-difference stencil, `h = x * FD_STEP`.
pub const FD_STEP: f64 = 1e-5;

/// Bound on `|fd - f''| / (1 + |f''|)`.
pub const FD_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Serialize)]
pub struct ConvexityCertificate {
    pub kind: DifferenceKind,
    pub grid: GridSpec,
    pub min_f2: f64,
    pub min_f2_at: f64,
    pub max_fd_mismatch: f64,
    pub max_fd_mismatch_at: f64,
    pub fd_tolerance: f64,
    pub passed: bool,
    pub note: &'static str,
}

/// Five-point central second difference of `f` at `x`, evaluated in
/// double-double so rounding stays far below the truncation error.
pub fn second_difference(f: fn(TwoFloat) -> TwoFloat, x: f64, h: f64) -> f64 {
    let x = TwoFloat::from(x);
    let h = TwoFloat::from(h);
    let num = -f(x + h * 2.0) + f(x + h) * 16.0 - f(x) * 30.0 + f(x - h) * 16.0 - f(x - h * 2.0);
    f64::from(num / (h * h * 12.0))
}

#[derive(Clone, Copy)]
struct GridFold {
    min_f2: f64,
    min_f2_at: f64,
    max_mismatch: f64,
    max_mismatch_at: f64,
}

impl GridFold {
    const EMPTY: GridFold = GridFold {
        min_f2: f64::INFINITY,
        min_f2_at: f64::NAN,
        max_mismatch: f64::NEG_INFINITY,
        max_mismatch_at: f64::NAN,
    };

    // Ties resolve to the smaller x so the fold does not depend on partitioning.
    fn merge(self, other: GridFold) -> GridFold {
        let (min_f2, min_f2_at) = pick(
            (self.min_f2, self.min_f2_at),
            (other.min_f2, other.min_f2_at),
            |a, b| a < b,
        );
        let (max_mismatch, max_mismatch_at) = pick(
            (self.max_mismatch, self.max_mismatch_at),
            (other.max_mismatch, other.max_mismatch_at),
            |a, b| a > b,
        );
        GridFold {
            min_f2,
            min_f2_at,
            max_mismatch,
            max_mismatch_at,
        }
    }
}

fn pick(a: (f64, f64), b: (f64, f64), better: impl Fn(f64, f64) -> bool) -> (f64, f64) {
    if better(b.0, a.0) || (b.0 == a.0 && b.1 < a.1) || a.1.is_nan() {
        b
    } else {
        a
    }
}

pub fn certify_convexity(kind: DifferenceKind, grid: &GridSpec) -> Result<ConvexityCertificate> {
    grid.validate()?;
    let gf = generating_function(kind);
    let d = *gf.require_closed_forms()?;
    let fold = (0..grid.points)
        .into_par_iter()
        .map(|i| {
            let x = grid.point(i);
            let f2 = (d.f2)(x);
            let fd = second_difference(d.f_extended, x, x * FD_STEP);
            let mismatch = if f2.is_finite() && fd.is_finite() {
                (fd - f2).abs() / (1.0 + f2.abs())
            } else {
                f64::INFINITY
            };
            GridFold {
                min_f2: if f2.is_nan() { f64::NEG_INFINITY } else { f2 },
                min_f2_at: x,
                max_mismatch: mismatch,
                max_mismatch_at: x,
            }
        })
        .reduce(|| GridFold::EMPTY, GridFold::merge);
    Ok(ConvexityCertificate {
        kind,
        grid: *grid,
        min_f2: fold.min_f2,
        min_f2_at: fold.min_f2_at,
        max_fd_mismatch: fold.max_mismatch,
        max_fd_mismatch_at: fold.max_mismatch_at,
        fd_tolerance: FD_TOLERANCE,
        passed: fold.min_f2 > 0.0 && fold.max_mismatch <= FD_TOLERANCE,
        note: CERTIFICATE_NOTE,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhiBound {
    pub phi_value: f64,
    pub upper_bound: f64,
    pub holds: bool,
}

/// `0 <= a f(b/a) <= (b - a) f'(b/a)`.
pub fn check_phi_bound(
    kind: DifferenceKind,
    p: PositivePair,
    tol: &ToleranceConfig,
) -> Result<PhiBound> {
    let gf = generating_function(kind);
    let d = gf.require_closed_forms()?;
    let x = p.ratio();
    let phi_value = phi(&gf, p);
    let upper_bound = (p.b() - p.a()) * (d.f1)(x);
    let scale = p.max();
    let holds = tol.le(0.0, phi_value, scale) && tol.le(phi_value, upper_bound, scale);
    Ok(PhiBound {
        phi_value,
        upper_bound,
        holds,
    })
}

/// Which variable carries the multiplier in the perspective map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PhiArguments {
    /// `phi_f(a, b) = a f(b / a)`.
    Standard,
    /// `b f(a / b)`.
    Swapped,
}

pub fn phi_with(gf: &GeneratingFunction, p: PositivePair, order: PhiArguments) -> f64 {
    match order {
        PhiArguments::Standard => phi(gf, p),
        PhiArguments::Swapped => phi(gf, p.swapped()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JointConvexityProbe {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// `phi(l p1 + (1-l) p2) <= l phi(p1) + (1-l) phi(p2)` with `phi` in [`PhiArguments::Standard`] form.
pub fn joint_convexity_probe(
    kind: DifferenceKind,
    p1: PositivePair,
    p2: PositivePair,
    lambda: f64,
    tol: &ToleranceConfig,
) -> Result<JointConvexityProbe> {
    joint_convexity_probe_with(kind, p1, p2, lambda, PhiArguments::Standard, tol)
}

pub fn joint_convexity_probe_with(
    kind: DifferenceKind,
    p1: PositivePair,
    p2: PositivePair,
    lambda: f64,
    order: PhiArguments,
    tol: &ToleranceConfig,
) -> Result<JointConvexityProbe> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::OutOfUnitInterval {
            name: "lambda",
            value: lambda,
        });
    }
    let gf = generating_function(kind);
    let mu = 1.0 - lambda;
    let mixed = PositivePair::new(lambda * p1.a() + mu * p2.a(), lambda * p1.b() + mu * p2.b())?;
    let lhs = phi_with(&gf, mixed, order);
    let rhs = lambda * phi_with(&gf, p1, order) + mu * phi_with(&gf, p2, order);
    let scale = p1.max().max(p2.max());
    Ok(JointConvexityProbe {
        lhs,
        rhs,
        holds: tol.le(lhs, rhs, scale),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(a: f64, b: f64) -> PositivePair {
        PositivePair::new(a, b).unwrap()
    }

    #[test]
    fn certifies_ag_and_sh() {
        for kind in [DifferenceKind::AG, DifferenceKind::SH] {
            let cert = certify_convexity(kind, &GridSpec::default()).unwrap();
            assert!(cert.passed, "{cert:?}");
            assert!(cert.min_f2 > 0.0);
        }
    }

    #[test]
    fn rejects_bad_input() {
        let bad = GridSpec {
            x_min: 1e-6,
            x_max: 1e6,
            points: 1,
        };
        assert!(matches!(
            certify_convexity(DifferenceKind::AG, &bad),
            Err(Error::InvalidGrid(_))
        ));
        assert!(matches!(
            certify_convexity(DifferenceKind::N1H, &GridSpec::default()),
            Err(Error::NoClosedForm(DifferenceKind::N1H))
        ));
    }

    #[test]
    fn fd_is_partition_independent() {
        let grid = GridSpec::new(1e-3, 1e3, 257).unwrap();
        let a = certify_convexity(DifferenceKind::SN2, &grid).unwrap();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let b = pool.install(|| certify_convexity(DifferenceKind::SN2, &grid).unwrap());
        assert_eq!(a.min_f2.to_bits(), b.min_f2.to_bits());
        assert_eq!(a.max_fd_mismatch.to_bits(), b.max_fd_mismatch.to_bits());
        assert_eq!(
            a.max_fd_mismatch_at.to_bits(),
            b.max_fd_mismatch_at.to_bits()
        );
    }

    #[test]
    fn phi_bound_examples() {
        let tol = ToleranceConfig::default();
        let b = check_phi_bound(DifferenceKind::AG, pair(1.0, 2.0), &tol).unwrap();
        // (sqrt 2 - 1)^2 / 2 and (sqrt 2 - 1) / (2 sqrt 2)
        assert!((b.phi_value - 0.085_786_437_626_904_95).abs() < 1e-15);
        assert!((b.upper_bound - 0.146_446_609_406_726_24).abs() < 1e-15);
        assert!(b.holds);

        for kind in DifferenceKind::CLOSED_FORM {
            let b = check_phi_bound(kind, pair(1.7, 1.7), &tol).unwrap();
            assert_eq!((b.phi_value, b.upper_bound), (0.0, 0.0), "{kind}");
            assert!(b.holds);
        }

        let b = check_phi_bound(DifferenceKind::SA, pair(2.0, 1.0), &tol).unwrap();
        let f1 = generating_function(DifferenceKind::SA).f1(0.5).unwrap();
        assert!(f1 < 0.0);
        assert_eq!(b.upper_bound, -f1);
        assert!(b.holds);
    }

    #[test]
    fn joint_convexity_examples() {
        let tol = ToleranceConfig::default();
        let r = joint_convexity_probe(
            DifferenceKind::AG,
            pair(1.0, 2.0),
            pair(3.0, 1.0),
            0.5,
            &tol,
        )
        .unwrap();
        assert!(r.holds && r.lhs < r.rhs);

        let p = pair(1.3, 4.1);
        let r = joint_convexity_probe(DifferenceKind::SA, p, p, 0.3, &tol).unwrap();
        assert!((r.lhs - r.rhs).abs() <= 1e-16 * r.rhs.abs().max(1.0));
        assert!(r.holds);

        let r = joint_convexity_probe(
            DifferenceKind::AH,
            pair(1.0, 1.0),
            pair(2.0, 2.0),
            0.8,
            &tol,
        )
        .unwrap();
        assert_eq!((r.lhs, r.rhs), (0.0, 0.0));

        assert!(joint_convexity_probe(DifferenceKind::AH, p, p, 1.0, &tol).is_err());
        assert!(joint_convexity_probe(DifferenceKind::AH, p, p, 0.0, &tol).is_err());
    }

    #[test]
    fn swapped_argument_order_is_also_convex() {
        let tol = ToleranceConfig::default();
        for kind in DifferenceKind::CLOSED_FORM {
            let r = joint_convexity_probe_with(
                kind,
                pair(1.0, 9.0),
                pair(5.0, 0.2),
                0.35,
                PhiArguments::Swapped,
                &tol,
            )
            .unwrap();
            assert!(r.holds, "{kind}: {r:?}");
        }
    }
}
