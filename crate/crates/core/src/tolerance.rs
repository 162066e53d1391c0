//! Comparison tolerances shared by every `holds` flag in the crate.
//!
//! Differences of means are formed from operands whose magnitude is of the
//! order of the pair components, so a comparison is judged relative to an
//! operand scale rather than to the (possibly tiny) compared values alone.

use serde::{Deserialize, Serialize};

pub const DEFAULT_RELATIVE: f64 = 1e-12;
pub const DEFAULT_ABSOLUTE_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    pub relative: f64,
    pub absolute_floor: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            relative: DEFAULT_RELATIVE,
            absolute_floor: DEFAULT_ABSOLUTE_FLOOR,
        }
    }
}

impl ToleranceConfig {
    pub fn with_relative(relative: f64) -> Self {
        Self {
            relative,
            ..Self::default()
        }
    }

    /// Reference magnitude for comparing `lhs` and `rhs` computed from operands of size `scale`.
    pub fn scale(&self, lhs: f64, rhs: f64, scale: f64) -> f64 {
        lhs.abs()
            .max(rhs.abs())
            .max(scale.abs())
            .max(self.absolute_floor)
    }

    /// Signed relative margin of `lhs <= rhs`; negative means `lhs` exceeds `rhs`.
    pub fn margin(&self, lhs: f64, rhs: f64, scale: f64) -> f64 {
        if lhs == rhs {
            return 0.0;
        }
        (rhs - lhs) / self.scale(lhs, rhs, scale)
    }

    pub fn le(&self, lhs: f64, rhs: f64, scale: f64) -> bool {
        self.margin(lhs, rhs, scale) >= -self.relative
    }

    /// Relative closeness, `|x - y| <= relative * max(|x|, |y|, floor)`.
    pub fn close(&self, x: f64, y: f64) -> bool {
        x == y || (x - y).abs() <= self.relative * self.scale(x, y, 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ties_hold() {
        let tol = ToleranceConfig::default();
        assert_eq!(tol.margin(1.5, 1.5, 0.0), 0.0);
        assert!(tol.le(0.0, 0.0, 0.0));
    }

    #[test]
    fn margin_is_scaled_by_operands() {
        let tol = ToleranceConfig::default();
        // rounding noise on a difference of O(1) operands
        assert!(tol.le(2e-16, 1e-16, 1.0));
        assert!(!tol.le(2e-16, 1e-16, 0.0));
        assert!(!tol.le(1.0 + 1e-9, 1.0, 1.0));
    }

    #[test]
    fn close_is_relative() {
        let tol = ToleranceConfig::with_relative(1e-6);
        assert!(tol.close(1e10, 1e10 + 1.0));
        assert!(!tol.close(1.0, 1.0 + 1e-5));
    }
}
