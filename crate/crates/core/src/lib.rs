//! Two-variable means, the differences between them, and numerical tools for
//! the inequalities they satisfy.
//!
//! - [`means`]: the power mean and the seven named means
//!   `H <= G <= N1 <= N3 <= N2 <= A <= S`.
//! - [`generating`]: difference measures `M_XY = X - Y`, their generating
//!   functions and the perspective form `a f(b/a)`.
//! - [`convexity`]: grid certificates for `f'' > 0`, checked against finite
//!   differences, and probes of the bounds that follow from convexity.
//! - [`ratio`]: optimal constants `alpha M2 <= M1 <= beta M2` from the extrema
//!   of `f1'' / f2''`.
//! - [`chains`]: the inequality chain registry and a deterministic sampling
//!   verifier.
//! - [`report`] and [`cli`]: JSON, text and markdown reports and the
//!   `meanforge` command line.
//!
//! ```
//! use meanforge::means::{mean, MeanKind, PositivePair};
//!
//! let p = PositivePair::new(1.0, 7.0).unwrap();
//! assert_eq!(mean(MeanKind::S, p), 5.0);
//! ```

pub mod chains;
pub mod cli;
pub mod convexity;
pub mod error;
pub mod fraction;
pub mod generating;
pub mod grid;
pub mod means;
pub mod ratio;
pub mod report;
pub mod sampling;
pub mod search;
pub mod tolerance;

pub use error::{Error, Result};
pub use generating::DifferenceKind;
pub use means::{MeanKind, MeanOrder, PositivePair};
pub use tolerance::ToleranceConfig;
