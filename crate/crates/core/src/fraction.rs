use std::fmt;

use serde::{Serialize, Serializer};

/// A small exact rational, used for chain coefficients and for printing
/// recovered constants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fraction {
    num: i64,
    den: i64,
}

const fn gcd(mut a: i64, mut b: i64) -> i64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a.abs()
}

impl Fraction {
    pub const ONE: Fraction = Fraction::new(1, 1);

    /// Panics on a zero denominator.
    pub const fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        let g = gcd(num, den);
        let sign = if den < 0 { -1 } else { 1 };
        Self {
            num: sign * num / g,
            den: sign * den / g,
        }
    }

    pub const fn integer(n: i64) -> Self {
        Self::new(n, 1)
    }

    pub fn num(&self) -> i64 {
        self.num
    }

    pub fn den(&self) -> i64 {
        self.den
    }

    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn is_one(&self) -> bool {
        self.num == 1 && self.den == 1
    }

    /// The fraction with the smallest denominator `<= max_den` within `tol` of `v`.
    pub fn approximate(v: f64, max_den: i64, tol: f64) -> Option<Self> {
        if !v.is_finite() {
            return None;
        }
        (1..=max_den).find_map(|den| {
            let num = (v * den as f64).round();
            ((num / den as f64 - v).abs() <= tol && num.abs() < i64::MAX as f64)
                .then(|| Fraction::new(num as i64, den))
        })
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl Serialize for Fraction {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalizes() {
        assert_eq!(Fraction::new(2, -4), Fraction::new(-1, 2));
        assert_eq!(Fraction::new(6, 3).to_string(), "2");
        assert_eq!(Fraction::new(-3, 4).to_string(), "-3/4");
    }

    #[test]
    fn approximates() {
        assert_eq!(
            Fraction::approximate(1.0 / 3.0 + 1e-12, 64, 1e-9),
            Some(Fraction::new(1, 3))
        );
        assert_eq!(
            Fraction::approximate(8.0 / 9.0, 64, 1e-9),
            Some(Fraction::new(8, 9))
        );
        assert_eq!(Fraction::approximate(std::f64::consts::PI, 64, 1e-9), None);
    }
}
