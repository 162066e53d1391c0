//! Reproducible sample streams. Sample `i` is a pure function of `(seed, i)`,
//! so a stream can be split across workers in any order.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::means::PositivePair;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingSpec {
    pub count: usize,
    pub seed: u64,
    pub ratio_min: f64,
    pub ratio_max: f64,
    /// Prepend `b/a` in `{1, 1 + 1e-9, 1 - 1e-9, 2, 1/2, ratio_min, ratio_max}`
    /// (those inside the bounds).
    pub include_edge_cases: bool,
}

impl Default for SamplingSpec {
    fn default() -> Self {
        Self {
            count: 1_000_000,
            seed: 1,
            ratio_min: 1e-8,
            ratio_max: 1e8,
            include_edge_cases: true,
        }
    }
}

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Uniform in `[0, 1)` determined by `(seed, index, lane)`.
pub fn unit_uniform(seed: u64, index: u64, lane: u64) -> f64 {
    let z = mix64(mix64(seed ^ lane.wrapping_mul(0xd1b5_4a32_d192_ed03)) ^ index);
    (z >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Log-uniform in `[lo, hi]` determined by `(seed, index, lane)`.
pub fn log_uniform(seed: u64, index: u64, lane: u64, lo: f64, hi: f64) -> f64 {
    let u = unit_uniform(seed, index, lane);
    let (l, h) = (lo.ln(), hi.ln());
    (l + (h - l) * u).exp().clamp(lo, hi)
}

impl SamplingSpec {
    pub fn new(count: usize, seed: u64, ratio_min: f64, ratio_max: f64) -> Result<Self> {
        let spec = Self {
            count,
            seed,
            ratio_min,
            ratio_max,
            include_edge_cases: true,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_edge_cases(mut self, on: bool) -> Self {
        self.include_edge_cases = on;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.count == 0 {
            return Err(Error::InvalidSampling("count must be at least 1".into()));
        }
        if !(self.ratio_min > 0.0 && self.ratio_max.is_finite() && self.ratio_min < self.ratio_max)
        {
            return Err(Error::InvalidSampling(format!(
                "need 0 < ratio_min < ratio_max < inf, got [{}, {}]",
                self.ratio_min, self.ratio_max
            )));
        }
        Ok(())
    }

    pub fn edge_ratios(&self) -> Vec<f64> {
        if !self.include_edge_cases {
            return Vec::new();
        }
        [
            1.0,
            1.0 + 1e-9,
            1.0 - 1e-9,
            2.0,
            0.5,
            self.ratio_min,
            self.ratio_max,
        ]
        .into_iter()
        .filter(|x| (self.ratio_min..=self.ratio_max).contains(x))
        .collect()
    }

    /// Total stream length, edge cases included.
    pub fn len(&self) -> usize {
        self.edge_ratios().len() + self.count
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Ratio `b/a` of sample `i`, given the precomputed edge ratios.
    pub fn ratio_at(&self, edges: &[f64], i: usize) -> f64 {
        match edges.get(i) {
            Some(&x) => x,
            None => log_uniform(
                self.seed,
                (i - edges.len()) as u64,
                0,
                self.ratio_min,
                self.ratio_max,
            ),
        }
    }
}

/// The stream of pairs `(1, x)` described by `spec`.
pub fn sample_pairs(spec: &SamplingSpec) -> impl Iterator<Item = PositivePair> + '_ {
    let edges = spec.edge_ratios();
    (0..spec.len()).map(move |i| {
        PositivePair::unit(spec.ratio_at(&edges, i)).expect("sample ratios are positive")
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic() {
        let spec = SamplingSpec::new(3, 7, 1e-8, 1e8).unwrap();
        let first: Vec<_> = sample_pairs(&spec).collect();
        let second: Vec<_> = sample_pairs(&spec).collect();
        assert_eq!(first, second);
        let other = SamplingSpec { seed: 8, ..spec };
        assert_ne!(first, sample_pairs(&other).collect::<Vec<_>>());
    }

    #[test]
    fn edge_cases_present() {
        let spec = SamplingSpec::new(10, 7, 1e-3, 1e3).unwrap();
        let pairs: Vec<_> = sample_pairs(&spec).collect();
        assert!(pairs.contains(&PositivePair::new(1.0, 1.0).unwrap()));
        assert!(pairs.contains(&PositivePair::new(1.0, 2.0).unwrap()));
        assert_eq!(pairs.len(), 17);
        let plain = spec.with_edge_cases(false);
        assert_eq!(sample_pairs(&plain).count(), 10);
    }

    #[test]
    fn bounds_respected() {
        let spec = SamplingSpec::new(20_000, 3, 0.25, 4.0).unwrap();
        for p in sample_pairs(&spec) {
            assert!((0.25..=4.0).contains(&p.ratio()));
        }
        // edge ratios outside the bounds are dropped
        let narrow = SamplingSpec::new(5, 3, 1.5, 1.75).unwrap();
        assert!(narrow
            .edge_ratios()
            .iter()
            .all(|x| (1.5..=1.75).contains(x)));
    }

    #[test]
    fn invalid_specs() {
        assert!(SamplingSpec::new(0, 1, 1e-8, 1e8).is_err());
        assert!(SamplingSpec::new(5, 1, 1e8, 1e-8).is_err());
        assert!(SamplingSpec::new(5, 1, 0.0, 1.0).is_err());
    }

    #[test]
    fn uniform_spread() {
        let n = 100_000;
        let mean: f64 = (0..n).map(|i| unit_uniform(42, i, 0)).sum::<f64>() / n as f64;
        assert!((mean - 0.5).abs() < 5e-3);
    }
}
