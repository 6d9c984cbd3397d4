//! Deterministic generators for gap-constrained sequences.
//!
//! The bound being exercised: if `|x_n| ≤ 1` and, beyond some transient,
//! any two indices carrying *different* nonzero activity are at least `k`
//! apart (at most one nonzero entry per window of length `k`), then the
//! Cesàro mean satisfies `limsup |1/N Σ x_n| ≤ 1/k`. The mean here carries
//! no μ weight.

use crate::rng::SplitMix64;
use crate::{Error, Result};

/// Declarative description of a bounded sequence with a known gap
/// structure. Each spec generates its sequence deterministically.
#[derive(Debug, Clone)]
pub enum GapSequenceSpec {
    /// `x_n = value` for all `n`. The gap is vacuous (no two entries
    /// differ); the mean is the value itself.
    Constant { value: f64 },

    /// Blocks of `k` consecutive `+1`s alternating with `k` consecutive
    /// `-1`s, starting with `+1` at `n = 1`. Over any `N` divisible by
    /// `2k` the mean cancels exactly.
    AlternatingBlocks { k: u64 },

    /// An arbitrary bounded transient prefix, then nonzero values only on
    /// a set of indices with consecutive gaps `≥ k`; everything between
    /// support points is zero. This is the shape the `1/k` bound applies
    /// to. Support positions and values are drawn from the seed: each gap
    /// is `k + (pseudorandom extra in 0..k)` and each value is a
    /// pseudorandom sign times a magnitude in `(1/2, 1]`.
    SparseSupport {
        k: u64,
        transient: Vec<f64>,
        seed: u64,
    },
}

impl GapSequenceSpec {
    /// Declared gap of the generator (`None` for the constant sequence, whose
    /// gap is effectively infinite).
    pub fn gap(&self) -> Option<u64> {
        match self {
            GapSequenceSpec::Constant { .. } => None,
            GapSequenceSpec::AlternatingBlocks { k } => Some(*k),
            GapSequenceSpec::SparseSupport { k, .. } => Some(*k),
        }
    }

    /// Length of the transient prefix before the gap structure kicks in.
    pub fn transient_len(&self) -> u64 {
        match self {
            GapSequenceSpec::SparseSupport { transient, .. } => transient.len() as u64,
            _ => 0,
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            GapSequenceSpec::Constant { value } => {
                if !value.is_finite() {
                    return Err(Error::invalid("constant gap sequence value must be finite"));
                }
            }
            GapSequenceSpec::AlternatingBlocks { k } | GapSequenceSpec::SparseSupport { k, .. } => {
                if *k == 0 {
                    return Err(Error::invalid("gap k must be positive"));
                }
            }
        }
        Ok(())
    }

    /// Plain Cesàro mean `(1/N) Σ_{n≤N} x_n` of the generated sequence.
    pub fn cesaro_mean(&self, n: u64) -> Result<f64> {
        self.validate()?;
        if n == 0 {
            return Err(Error::invalid("mean over an empty range"));
        }
        let sum = match self {
            GapSequenceSpec::Constant { value } => value * n as f64,
            GapSequenceSpec::AlternatingBlocks { k } => {
                // Full pairs of blocks cancel; only the tail contributes.
                let period = 2 * k;
                let tail = n % period;
                let plus = tail.min(*k);
                let minus = tail.saturating_sub(*k);
                plus as f64 - minus as f64
            }
            GapSequenceSpec::SparseSupport { k, transient, seed } => {
                let mut sum = 0.0;
                for (i, v) in transient.iter().enumerate() {
                    if (i as u64) < n {
                        sum += v;
                    }
                }
                let mut rng = SplitMix64::new(*seed);
                let mut pos = transient.len() as u64;
                loop {
                    pos += k + rng.next_below(*k + 1);
                    if pos > n {
                        break;
                    }
                    let magnitude = 0.5 + 0.5 * rng.next_f64();
                    let sign = if rng.next_u64() & 1 == 0 { 1.0 } else { -1.0 };
                    sum += sign * magnitude;
                }
                sum
            }
        };
        Ok(sum / n as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_mean_is_value() {
        let spec = GapSequenceSpec::Constant { value: 1.0 };
        assert_eq!(spec.cesaro_mean(1).unwrap(), 1.0);
        assert_eq!(spec.cesaro_mean(123_456).unwrap(), 1.0);
    }

    #[test]
    fn alternating_blocks_cancel_on_full_periods() {
        let spec = GapSequenceSpec::AlternatingBlocks { k: 7 };
        for mult in [1u64, 3, 10, 100] {
            assert_eq!(spec.cesaro_mean(14 * mult).unwrap(), 0.0);
        }
        // A half period leaves one block of +1s.
        assert_eq!(spec.cesaro_mean(7).unwrap(), 1.0);
    }

    #[test]
    fn alternating_blocks_match_direct_summation() {
        let spec = GapSequenceSpec::AlternatingBlocks { k: 5 };
        for n in 1..=200u64 {
            let direct: f64 = (1..=n)
                .map(|i| if ((i - 1) / 5) % 2 == 0 { 1.0 } else { -1.0 })
                .sum::<f64>()
                / n as f64;
            assert!((spec.cesaro_mean(n).unwrap() - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_gap_rejected() {
        let spec = GapSequenceSpec::SparseSupport {
            k: 0,
            transient: vec![],
            seed: 1,
        };
        assert!(spec.cesaro_mean(10).is_err());
    }

    #[test]
    fn sparse_support_respects_gap_bound() {
        for seed in 0..20 {
            let spec = GapSequenceSpec::SparseSupport {
                k: 50,
                transient: vec![1.0; 9],
                seed,
            };
            for n in [5_000u64, 20_000, 100_000] {
                let mean = spec.cesaro_mean(n).unwrap().abs();
                let bound = 1.0 / 50.0 + 2.0 * 9.0 / n as f64;
                assert!(mean <= bound, "seed {seed} n {n}: {mean} > {bound}");
            }
        }
    }
}
