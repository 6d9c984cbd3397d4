//! Add-one-with-carry over a finite sequence of prime radices, embedded
//! into the universal dendrite truncation.
//!
//! A state is a digit word `(d_1, …, d_K)` with `d_i < s_i`; the step adds
//! one to `d_1` and propagates carries. Depth-`k` digit prefixes correspond
//! to the depth-`k` arcs of the dendrite (digit `d` picks the `d`-th letter
//! of the dyadic alphabet), and each full state is realized at the tip of
//! its depth-`K` arc. States that share a prefix of length `k` therefore
//! sit inside the same depth-`k` subtree, giving the nested Cantor-like
//! carrier geometry.
//!
//! The dendrite hosts the dynamics but is not itself permuted: points off
//! the carrier snap to the nearest state tip (lowest state index on ties)
//! before stepping, which keeps the map total and deterministic.

use crate::rng::SplitMix64;
use crate::topology::{DyadicAddress, Point, SpaceRef, UniversalDendriteModel};
use crate::{Error, Result};

/// Budget on the full period `s_1⋯s_K`.
const MAX_STATES: u64 = 1_000_000;

/// A digit word of the odometer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OdometerState {
    digits: Vec<u64>,
}

impl OdometerState {
    pub fn digits(&self) -> &[u64] {
        &self.digits
    }
}

#[derive(Debug, Clone)]
pub struct OdometerSystem {
    space: SpaceRef,
    radices: Vec<u64>,
    period: u64,
    /// Tip point of every state, indexed by the mixed-radix value of the
    /// digit word (least significant digit first).
    state_points: Vec<Point>,
}

impl OdometerSystem {
    pub fn new(primes: &[u64]) -> Result<Self> {
        if primes.is_empty() {
            return Err(Error::invalid("radix sequence must be nonempty"));
        }
        for &p in primes {
            if !is_prime(p) {
                return Err(Error::invalid(format!("radix {p} is not prime")));
            }
        }
        let mut period: u64 = 1;
        for &p in primes {
            period = period
                .checked_mul(p)
                .ok_or_else(|| Error::capacity("state count overflow"))?;
            if period > MAX_STATES {
                return Err(Error::capacity(format!(
                    "odometer with period {period} exceeds {MAX_STATES} states"
                )));
            }
        }

        // Smallest power-of-two denominator bound whose alphabet covers the
        // largest radix (the alphabet with bound 2^q has 2^q - 1 letters).
        let max_radix = *primes.iter().max().expect("nonempty");
        let mut denom_bound: u32 = 2;
        while u64::from(denom_bound) - 1 < max_radix {
            denom_bound = denom_bound
                .checked_mul(2)
                .ok_or_else(|| Error::capacity("alphabet bound overflow"))?;
        }

        let model = UniversalDendriteModel::build(primes.len(), denom_bound, 0.5)?;
        let letters = model.letters().to_vec();

        let mut state_points = Vec::with_capacity(period as usize);
        for index in 0..period {
            let digits = digits_of(index, primes);
            let mut address = DyadicAddress::root();
            for (level, &d) in digits.iter().enumerate() {
                let _ = level;
                address = address.child(letters[d as usize]);
            }
            state_points.push(model.tip(&address)?);
        }

        Ok(OdometerSystem {
            space: SpaceRef::from_dendrite(model),
            radices: primes.to_vec(),
            period,
            state_points,
        })
    }

    pub fn space(&self) -> &SpaceRef {
        &self.space
    }

    pub fn radices(&self) -> &[u64] {
        &self.radices
    }

    /// Full period `s_1⋯s_K`.
    pub fn period(&self) -> u64 {
        self.period
    }

    pub fn descriptor(&self) -> String {
        let radices: Vec<String> = self.radices.iter().map(|p| p.to_string()).collect();
        format!("odometer({})", radices.join(","))
    }

    pub(crate) fn state_points(&self) -> &[Point] {
        &self.state_points
    }

    /// The state with the given digit word.
    pub fn state(&self, digits: &[u64]) -> Result<OdometerState> {
        if digits.len() != self.radices.len() {
            return Err(Error::invalid(format!(
                "expected {} digits, got {}",
                self.radices.len(),
                digits.len()
            )));
        }
        for (i, (&d, &s)) in digits.iter().zip(&self.radices).enumerate() {
            if d >= s {
                return Err(Error::invalid(format!(
                    "digit {d} at position {i} exceeds radix {s}"
                )));
            }
        }
        Ok(OdometerState {
            digits: digits.to_vec(),
        })
    }

    /// Add one with carry.
    pub fn successor(&self, state: &OdometerState) -> Result<OdometerState> {
        let index = self.index_of(state)?;
        Ok(OdometerState {
            digits: digits_of((index + 1) % self.period, &self.radices),
        })
    }

    /// Mixed-radix value of a state (least significant digit first).
    pub fn index_of(&self, state: &OdometerState) -> Result<u64> {
        if state.digits.len() != self.radices.len() {
            return Err(Error::invalid("digit word has the wrong depth"));
        }
        let mut index = 0u64;
        for (&d, &s) in state.digits.iter().zip(&self.radices).rev() {
            if d >= s {
                return Err(Error::invalid("digit out of range"));
            }
            index = index * s + d;
        }
        Ok(index)
    }

    pub fn state_at(&self, index: u64) -> OdometerState {
        OdometerState {
            digits: digits_of(index % self.period, &self.radices),
        }
    }

    /// The carrier point realizing a state.
    pub fn point_of(&self, state: &OdometerState) -> Result<Point> {
        Ok(self.state_points[self.index_of(state)? as usize])
    }

    /// Cylinder index of a state truncated to its first `depth` digits.
    pub fn cylinder_index(&self, index: u64, depth: usize) -> u64 {
        let mut modulus = 1u64;
        for &s in self.radices.iter().take(depth) {
            modulus *= s;
        }
        index % modulus
    }

    pub(crate) fn is_state_point(&self, p: &Point) -> bool {
        self.state_points.iter().any(|q| q.loc == p.loc)
    }

    /// Nearest carrier state (lowest index on ties).
    pub(crate) fn snap_index(&self, p: &Point) -> Result<usize> {
        let mut best = (0usize, f64::INFINITY);
        for (i, q) in self.state_points.iter().enumerate() {
            if q.loc == p.loc {
                return Ok(i);
            }
            let d = self.space.distance(p, q)?;
            if d < best.1 {
                best = (i, d);
            }
        }
        Ok(best.0)
    }

    pub(crate) fn sample_state(&self, rng: &mut SplitMix64) -> Point {
        self.state_points[rng.next_below(self.period) as usize]
    }
}

fn digits_of(mut index: u64, radices: &[u64]) -> Vec<u64> {
    let mut digits = Vec::with_capacity(radices.len());
    for &s in radices {
        digits.push(index % s);
        index /= s;
    }
    digits
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(OdometerSystem::new(&[]).is_err());
        assert!(OdometerSystem::new(&[4]).is_err());
        assert!(OdometerSystem::new(&[2, 3, 5]).is_ok());
    }

    #[test]
    fn carry_rolls_over() {
        let odo = OdometerSystem::new(&[2, 3]).unwrap();
        let max = odo.state(&[1, 2]).unwrap();
        let next = odo.successor(&max).unwrap();
        assert_eq!(next.digits(), &[0, 0]);
    }

    #[test]
    fn binary_orbit_alternates() {
        let odo = OdometerSystem::new(&[2]).unwrap();
        let zero = odo.state(&[0]).unwrap();
        let one = odo.successor(&zero).unwrap();
        assert_eq!(one.digits(), &[1]);
        assert_eq!(odo.successor(&one).unwrap().digits(), &[0]);
    }

    #[test]
    fn six_states_before_return() {
        let odo = OdometerSystem::new(&[2, 3]).unwrap();
        let mut state = odo.state(&[0, 0]).unwrap();
        let mut seen = vec![state.clone()];
        for _ in 0..5 {
            state = odo.successor(&state).unwrap();
            assert!(!seen.contains(&state));
            seen.push(state.clone());
        }
        assert_eq!(odo.successor(&state).unwrap().digits(), &[0, 0]);
    }

    #[test]
    fn state_points_are_distinct() {
        let odo = OdometerSystem::new(&[2, 3, 5]).unwrap();
        assert_eq!(odo.period(), 30);
        for i in 0..30usize {
            for j in i + 1..30usize {
                let d = odo
                    .space()
                    .distance(&odo.state_points()[i], &odo.state_points()[j])
                    .unwrap();
                assert!(d > 1e-9, "states {i} and {j} too close: {d}");
            }
        }
    }

    #[test]
    fn shared_prefix_states_are_closer() {
        let odo = OdometerSystem::new(&[2, 3]).unwrap();
        // States (0,0) and (0,1) share the depth-1 cylinder; (0,0) and
        // (1,0) do not.
        let p00 = odo.point_of(&odo.state(&[0, 0]).unwrap()).unwrap();
        let p01 = odo.point_of(&odo.state(&[0, 1]).unwrap()).unwrap();
        let p10 = odo.point_of(&odo.state(&[1, 0]).unwrap()).unwrap();
        let same_cylinder = odo.space().distance(&p00, &p01).unwrap();
        let cross_cylinder = odo.space().distance(&p00, &p10).unwrap();
        assert!(same_cylinder < cross_cylinder);
    }
}
