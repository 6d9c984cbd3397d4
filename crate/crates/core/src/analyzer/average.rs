//! One-pass Möbius-weighted orbit averages.
//!
//! `S_N(x, φ) = (1/N) Σ_{n=1..N} μ(n) φ(fⁿ(x))` is accumulated exactly
//! where possible: while φ takes few distinct values along the orbit
//! (indicators, tabulated functions, periodic orbits) the sum is kept as
//! per-value integer μ-weights, so the result matches the corresponding
//! combination of progression means to machine precision. Once the value
//! set grows past a cap the accumulator degrades to compensated (Neumaier)
//! summation.

use std::time::{Duration, Instant};

use serde::Serialize;

use crate::arithmetic::MobiusTable;
use crate::systems::DynSystem;
use crate::topology::Point;
use crate::{Error, Result};

use super::TestFunction;

/// Distinct-value cap before switching to compensated summation.
const EXACT_VALUE_CAP: usize = 64;

/// Sum of `weight · value` terms with integer weights.
#[derive(Debug, Clone)]
pub(crate) struct WeightedAccumulator {
    /// Per-value integer weight sums, keyed by exact bit pattern.
    exact: Vec<(u64, f64, i64)>,
    /// Compensated tail once the value set overflows the cap.
    tail: f64,
    compensation: f64,
}

impl WeightedAccumulator {
    pub(crate) fn new() -> Self {
        WeightedAccumulator {
            exact: Vec::new(),
            tail: 0.0,
            compensation: 0.0,
        }
    }

    pub(crate) fn add(&mut self, value: f64, weight: i64) {
        if weight == 0 {
            return;
        }
        let bits = value.to_bits();
        for entry in self.exact.iter_mut() {
            if entry.0 == bits {
                entry.2 += weight;
                return;
            }
        }
        if self.exact.len() < EXACT_VALUE_CAP {
            self.exact.push((bits, value, weight));
        } else {
            self.add_compensated(value * weight as f64);
        }
    }

    fn add_compensated(&mut self, term: f64) {
        let t = self.tail + term;
        if self.tail.abs() >= term.abs() {
            self.compensation += (self.tail - t) + term;
        } else {
            self.compensation += (term - t) + self.tail;
        }
        self.tail = t;
    }

    /// Current total `Σ weight · value`.
    pub(crate) fn total(&self) -> f64 {
        let mut sum = self.tail + self.compensation;
        for &(_, value, weight) in &self.exact {
            sum += value * weight as f64;
        }
        sum
    }
}

/// Checkpointed values of a Möbius-weighted orbit average.
#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceReport {
    pub checkpoints: Vec<u64>,
    pub values: Vec<f64>,
    pub system: String,
    pub point: String,
    pub function: String,
    #[serde(skip)]
    pub wall_time: Duration,
}

impl ConvergenceReport {
    pub fn final_value(&self) -> f64 {
        *self.values.last().expect("nonempty checkpoints")
    }

    /// Max of `|value|` over the last decade of checkpoints
    /// (`N ≥ N_max / 10`).
    pub fn last_decade_max(&self) -> f64 {
        let max_n = *self.checkpoints.last().expect("nonempty checkpoints");
        let floor = max_n / 10;
        self.checkpoints
            .iter()
            .zip(&self.values)
            .filter(|(n, _)| **n >= floor)
            .map(|(_, v)| v.abs())
            .fold(0.0, f64::max)
    }

    /// CSV rows in the fixed column layout
    /// `N,value,system,point,function,job_id`.
    pub fn to_csv(&self, job_id: &str) -> String {
        let mut out = String::from("N,value,system,point,function,job_id\n");
        for (n, v) in self.checkpoints.iter().zip(&self.values) {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                n, v, self.system, self.point, self.function, job_id
            ));
        }
        out
    }
}

pub(crate) fn validate_checkpoints(checkpoints: &[u64], limit: u64) -> Result<()> {
    if checkpoints.is_empty() {
        return Err(Error::invalid("need at least one checkpoint"));
    }
    if checkpoints[0] == 0 {
        return Err(Error::invalid("checkpoints must be positive"));
    }
    if !checkpoints.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::invalid("checkpoints must be strictly increasing"));
    }
    let max = *checkpoints.last().expect("nonempty");
    if max > limit {
        return Err(Error::invalid(format!(
            "checkpoint {max} exceeds the sieved limit {limit}"
        )));
    }
    Ok(())
}

/// Compute `S_N(x, φ)` at each checkpoint in one orbit pass.
pub fn mobius_average(
    table: &MobiusTable,
    sys: &DynSystem,
    x: &Point,
    phi: &TestFunction,
    checkpoints: &[u64],
) -> Result<ConvergenceReport> {
    validate_checkpoints(checkpoints, table.limit())?;
    let started = Instant::now();
    let space = sys.space();
    let sup = phi.sup_norm(space);

    let mut cursor = sys.orbit(x)?;
    let mut acc = WeightedAccumulator::new();
    let mut values = Vec::with_capacity(checkpoints.len());
    let mut next_checkpoint = 0usize;
    let max_n = *checkpoints.last().expect("nonempty");

    for n in 1..=max_n {
        cursor.advance();
        let mu = table.mu(n);
        if mu != 0 {
            let value = phi.evaluate(space, &cursor.current());
            acc.add(value, mu as i64);
        }
        if checkpoints[next_checkpoint] == n {
            let s = acc.total() / n as f64;
            assert!(
                s.abs() <= sup + 1e-9,
                "|S_N| = {} exceeds sup|phi| = {}",
                s.abs(),
                sup
            );
            values.push(s);
            next_checkpoint += 1;
            if next_checkpoint == checkpoints.len() {
                break;
            }
        }
    }

    Ok(ConvergenceReport {
        checkpoints: checkpoints.to_vec(),
        values,
        system: sys.descriptor(),
        point: x.describe(),
        function: phi.describe(),
        wall_time: started.elapsed(),
    })
}

/// Per-checkpoint sup of `|S_N(x, φ)|` over a finite point sample.
#[derive(Debug, Clone, Serialize)]
pub struct UniformReport {
    pub checkpoints: Vec<u64>,
    pub sup_values: Vec<f64>,
    pub sample_size: usize,
}

pub fn uniform_sup(
    table: &MobiusTable,
    sys: &DynSystem,
    phi: &TestFunction,
    checkpoints: &[u64],
    sample: &[Point],
) -> Result<UniformReport> {
    if sample.is_empty() {
        return Err(Error::invalid("uniform diagnostic needs a nonempty sample"));
    }
    validate_checkpoints(checkpoints, table.limit())?;
    let mut sup_values = vec![0f64; checkpoints.len()];
    for x in sample {
        let report = mobius_average(table, sys, x, phi, checkpoints)?;
        for (slot, v) in sup_values.iter_mut().zip(&report.values) {
            *slot = slot.max(v.abs());
        }
    }
    Ok(UniformReport {
        checkpoints: checkpoints.to_vec(),
        sup_values,
        sample_size: sample.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accumulator_exact_grouping() {
        let mut acc = WeightedAccumulator::new();
        for _ in 0..1000 {
            acc.add(0.25, 1);
            acc.add(0.5, -1);
        }
        assert_eq!(acc.total(), 1000.0 * 0.25 - 1000.0 * 0.5);
    }

    #[test]
    fn accumulator_spills_to_compensated() {
        let mut acc = WeightedAccumulator::new();
        let mut expected = 0.0;
        for i in 0..10_000 {
            let v = (i as f64).sin();
            acc.add(v, if i % 2 == 0 { 1 } else { -1 });
            expected += if i % 2 == 0 { v } else { -v };
        }
        assert!((acc.total() - expected).abs() < 1e-9);
    }
}
