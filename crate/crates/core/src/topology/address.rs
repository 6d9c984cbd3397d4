//! Address algebra for the universal dendrite of order 3.
//!
//! Branch points are coordinatized by finite words of dyadic rationals in
//! (0, 1). Every such rational has a unique reduced form `p / 2^q` with `p`
//! odd, which keeps word equality purely combinatorial.

use std::fmt;

use crate::{Error, Result};

/// A dyadic rational `p / 2^q` in (0, 1) with `p` odd and `q ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dyadic {
    p: u64,
    q: u32,
}

impl Dyadic {
    pub fn new(p: u64, q: u32) -> Result<Self> {
        if q == 0 || q >= 63 {
            return Err(Error::invalid(format!("dyadic exponent {q} out of range")));
        }
        if p.is_multiple_of(2) || p == 0 || p >= (1u64 << q) {
            return Err(Error::invalid(format!(
                "dyadic numerator {p} invalid for exponent {q}: need odd p in [1, 2^{q})"
            )));
        }
        Ok(Dyadic { p, q })
    }

    pub fn numerator(&self) -> u64 {
        self.p
    }

    pub fn exponent(&self) -> u32 {
        self.q
    }

    /// Exact floating-point value (small denominators make this lossless).
    pub fn value(&self) -> f64 {
        self.p as f64 / (1u64 << self.q) as f64
    }

    /// All dyadics with denominator `2^q ≤ denom_bound`, sorted by value.
    pub fn alphabet(denom_bound: u32) -> Vec<Dyadic> {
        let mut letters = Vec::new();
        let mut q = 1u32;
        while (1u64 << q) <= denom_bound as u64 {
            let mut p = 1u64;
            while p < (1u64 << q) {
                letters.push(Dyadic { p, q });
                p += 2;
            }
            q += 1;
        }
        letters.sort();
        letters
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // Compare p1/2^q1 with p2/2^q2 by cross multiplication. Reduced
        // forms are unique, so value order is total and consistent with Eq.
        let lhs = (self.p as u128) << other.q;
        let rhs = (other.p as u128) << self.q;
        lhs.cmp(&rhs)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, 1u64 << self.q)
    }
}

/// A finite word of dyadic letters; the empty word is the root address.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct DyadicAddress {
    word: Vec<Dyadic>,
}

impl DyadicAddress {
    /// The empty (root) address.
    pub fn root() -> Self {
        DyadicAddress { word: Vec::new() }
    }

    pub fn new(word: Vec<Dyadic>) -> Self {
        DyadicAddress { word }
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    pub fn is_root(&self) -> bool {
        self.word.is_empty()
    }

    pub fn letters(&self) -> &[Dyadic] {
        &self.word
    }

    pub fn last(&self) -> Option<Dyadic> {
        self.word.last().copied()
    }

    /// Word concatenation; lengths add.
    pub fn concat(&self, other: &DyadicAddress) -> DyadicAddress {
        let mut word = self.word.clone();
        word.extend_from_slice(&other.word);
        DyadicAddress { word }
    }

    /// Extend by one letter.
    pub fn child(&self, letter: Dyadic) -> DyadicAddress {
        let mut word = self.word.clone();
        word.push(letter);
        DyadicAddress { word }
    }

    /// Drop the final letter. The root address has no parent.
    pub fn parent(&self) -> Result<DyadicAddress> {
        if self.word.is_empty() {
            return Err(Error::invalid("the root address has no parent"));
        }
        let mut word = self.word.clone();
        word.pop();
        Ok(DyadicAddress { word })
    }
}

impl fmt::Display for DyadicAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_empty() {
            return write!(f, "ε");
        }
        let parts: Vec<String> = self.word.iter().map(|r| r.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}
