//! μ and λ on large ranges, and the number-theoretic averages the
//! disjointness arguments reduce to.
//!
//! Everything is built around [`MobiusTable`], an immutable pair of `i8`
//! arrays produced by a segmented sieve. All sums of ±1/0 terms accumulate
//! in 64-bit integers and divide once at the end, so the means are exact up
//! to a single rounding.

mod gap;
pub mod reference;
mod sieve;

pub use gap::GapSequenceSpec;

use std::io::{Read, Write};

use crate::{Error, Result};

/// Default sieving granularity. Segments are filled independently, so this
/// only controls memory locality and parallel grain.
pub const DEFAULT_SEGMENT_SIZE: usize = 1 << 18;

/// Largest limit accepted by [`MobiusTable::sieve`]. Two `i8` arrays of
/// this size occupy ~4 GiB; the practical target of 10^8 sits comfortably
/// below it.
pub const MAX_SIEVE_LIMIT: u64 = 2_000_000_000;

const DUMP_MAGIC: &[u8; 4] = b"MBTB";
const DUMP_VERSION: u32 = 1;

/// Sieved values of the Möbius function μ and the Liouville function λ on
/// `[1, limit]`.
///
/// * `μ(1) = 1`, `μ(n) = 0` exactly when a squared prime divides `n`, and
///   `μ(n) = λ(n)` whenever `μ(n) ≠ 0`.
/// * `λ(n) = (-1)^Ω(n)` with Ω counting prime factors with multiplicity.
///
/// The table is immutable after construction and safe to share across
/// threads; every operation below is a pure function of it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MobiusTable {
    limit: u64,
    /// μ values, indexed by `n` directly; entry 0 is an unused sentinel.
    mu: Vec<i8>,
    /// λ values, same indexing.
    lambda: Vec<i8>,
    segment_size: usize,
}

impl MobiusTable {
    /// Sieve `[1, limit]` with the default segment size.
    pub fn sieve(limit: u64) -> Result<Self> {
        Self::sieve_with_segment(limit, DEFAULT_SEGMENT_SIZE)
    }

    /// Sieve with an explicit segment size. The output is bit-identical for
    /// every segment size and worker count.
    pub fn sieve_with_segment(limit: u64, segment_size: usize) -> Result<Self> {
        if limit == 0 {
            return Err(Error::invalid("sieve limit must be at least 1"));
        }
        if limit > MAX_SIEVE_LIMIT {
            return Err(Error::capacity(format!(
                "sieve limit {limit} exceeds the configured budget of {MAX_SIEVE_LIMIT}"
            )));
        }
        if segment_size == 0 {
            return Err(Error::invalid("segment size must be positive"));
        }
        let (mu, lambda) = sieve::sieve_segmented(limit, segment_size);
        Ok(MobiusTable {
            limit,
            mu,
            lambda,
            segment_size,
        })
    }

    pub(crate) fn from_parts(
        limit: u64,
        mu: Vec<i8>,
        lambda: Vec<i8>,
        segment_size: usize,
    ) -> Self {
        debug_assert_eq!(mu.len(), limit as usize + 1);
        debug_assert_eq!(lambda.len(), limit as usize + 1);
        MobiusTable {
            limit,
            mu,
            lambda,
            segment_size,
        }
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn segment_size(&self) -> usize {
        self.segment_size
    }

    /// μ(n). Panics if `n` is 0 or beyond the limit.
    #[inline]
    pub fn mu(&self, n: u64) -> i8 {
        self.mu[n as usize]
    }

    /// λ(n). Panics if `n` is 0 or beyond the limit.
    #[inline]
    pub fn lambda(&self, n: u64) -> i8 {
        self.lambda[n as usize]
    }

    fn check_range(&self, n: u64) -> Result<()> {
        if n == 0 {
            return Err(Error::invalid("N must be at least 1"));
        }
        if n > self.limit {
            return Err(Error::invalid(format!(
                "N = {n} exceeds the sieved limit {}",
                self.limit
            )));
        }
        Ok(())
    }

    /// Mertens mean `(1/N) Σ_{n≤N} μ(n)`.
    pub fn mean_mobius(&self, n: u64) -> Result<f64> {
        self.check_range(n)?;
        Ok(self.mu_sum(1, n, 1, 0) as f64 / n as f64)
    }

    /// Exact integer Mertens sum `Σ_{n≤N} μ(n)`.
    pub fn mertens(&self, n: u64) -> Result<i64> {
        self.check_range(n)?;
        Ok(self.mu_sum(1, n, 1, 0))
    }

    /// Mean of μ restricted to an arithmetic progression:
    /// `(1/N) Σ_{n≤N, n ≡ a (mod m)} μ(n)`.
    pub fn progression_mean(&self, n: u64, residue: u64, modulus: u64) -> Result<f64> {
        self.check_range(n)?;
        if modulus == 0 {
            return Err(Error::invalid("modulus must be positive"));
        }
        if residue >= modulus {
            return Err(Error::invalid(format!(
                "residue {residue} not reduced mod {modulus}"
            )));
        }
        Ok(self.mu_sum(1, n, modulus, residue) as f64 / n as f64)
    }

    /// Integer sum of μ over `lo..=hi` intersected with `n ≡ residue (mod
    /// modulus)`.
    fn mu_sum(&self, lo: u64, hi: u64, modulus: u64, residue: u64) -> i64 {
        let mut start = lo + (modulus + residue - lo % modulus) % modulus;
        let mut sum = 0i64;
        while start <= hi {
            sum += self.mu[start as usize] as i64;
            start += modulus;
        }
        sum
    }

    /// Weighted mean `(1/N) Σ_{n≤N} μ(n) x_n` for an eventually periodic
    /// sequence: `x_n = prefix[n-1]` for `n ≤ P`, then the cycle repeats
    /// with entry `j` applying at `n ≡ P + j (mod m)`.
    ///
    /// Computed as the matching linear combination of per-residue integer μ
    /// sums (plus the finite prefix correction), so it agrees with
    /// [`Self::progression_mean`] combinations to machine precision.
    pub fn eventually_periodic_mean(&self, n: u64, prefix: &[f64], cycle: &[f64]) -> Result<f64> {
        self.check_range(n)?;
        if cycle.is_empty() {
            return Err(Error::invalid("cycle must be nonempty"));
        }
        let p = prefix.len() as u64;
        let m = cycle.len() as u64;

        let mut total = 0.0;
        for (i, v) in prefix.iter().enumerate() {
            let idx = i as u64 + 1;
            if idx <= n {
                total += *v * self.mu[idx as usize] as f64;
            }
        }
        if n > p {
            for (j, v) in cycle.iter().enumerate() {
                // Entries at n > P with (n - P) ≡ j (mod m).
                let residue = (p + j as u64) % m;
                let sum = self.mu_sum(p + 1, n, m, residue);
                total += *v * sum as f64;
            }
        }
        Ok(total / n as f64)
    }

    /// Normalized multiple autocorrelation
    /// `(1/N) Σ_{n≤N} μ^{i_0}(n) μ^{i_1}(n+a_1) ⋯ μ^{i_r}(n+a_r)`.
    ///
    /// Exponent semantics: `μ^2(n)` is `μ(n)²`, i.e. the squarefree
    /// indicator — not λ² (which is identically 1). Every term is in
    /// {-1, 0, 1}, so the sum accumulates exactly in an `i64`.
    pub fn chowla_sum(&self, query: &CorrelationQuery) -> Result<f64> {
        let n = query.n;
        self.check_range(n)?;
        let max_shift = query.shifts.last().copied().unwrap_or(0);
        if n + max_shift > self.limit {
            return Err(Error::invalid(format!(
                "N + max shift = {} exceeds the sieved limit {}",
                n + max_shift,
                self.limit
            )));
        }
        let mut sum = 0i64;
        for i in 1..=n {
            let mut term = term_value(self.mu[i as usize], query.exponents[0]);
            if term != 0 {
                for (s, &shift) in query.shifts.iter().enumerate() {
                    let v = term_value(self.mu[(i + shift) as usize], query.exponents[s + 1]);
                    term *= v;
                    if term == 0 {
                        break;
                    }
                }
            }
            sum += term as i64;
        }
        Ok(sum as f64 / n as f64)
    }

    /// Serialize to the binary dump format: magic `MBTB`, version u32, N
    /// u64 (little endian), then the raw `i8` μ array and the raw `i8` λ
    /// array for `n = 1..=N`.
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(DUMP_MAGIC)?;
        w.write_all(&DUMP_VERSION.to_le_bytes())?;
        w.write_all(&self.limit.to_le_bytes())?;
        w.write_all(as_bytes(&self.mu[1..]))?;
        w.write_all(as_bytes(&self.lambda[1..]))?;
        Ok(())
    }

    /// Load a table previously produced by [`Self::write_to`].
    pub fn read_from<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != DUMP_MAGIC {
            return Err(Error::Malformed("bad magic in table dump".into()));
        }
        let mut version = [0u8; 4];
        r.read_exact(&mut version)?;
        if u32::from_le_bytes(version) != DUMP_VERSION {
            return Err(Error::Malformed(format!(
                "unsupported dump version {}",
                u32::from_le_bytes(version)
            )));
        }
        let mut limit_bytes = [0u8; 8];
        r.read_exact(&mut limit_bytes)?;
        let limit = u64::from_le_bytes(limit_bytes);
        if limit == 0 || limit > MAX_SIEVE_LIMIT {
            return Err(Error::Malformed(format!("implausible limit {limit}")));
        }
        let n = limit as usize;
        let mut mu = vec![0i8; n + 1];
        let mut lambda = vec![0i8; n + 1];
        r.read_exact(bytes_mut(&mut mu[1..]))?;
        r.read_exact(bytes_mut(&mut lambda[1..]))?;
        for i in 1..=n {
            if !(-1..=1).contains(&mu[i]) || (lambda[i] != 1 && lambda[i] != -1) {
                return Err(Error::Malformed(format!("corrupt value at n = {i}")));
            }
        }
        Ok(MobiusTable::from_parts(
            limit,
            mu,
            lambda,
            DEFAULT_SEGMENT_SIZE,
        ))
    }

    /// FNV-1a checksum over the dump byte stream; used to verify that a
    /// dump + reload round trip is lossless.
    pub fn checksum(&self) -> u64 {
        let mut hash = 0xcbf2_9ce4_8422_2325u64;
        let mut eat = |bytes: &[u8]| {
            for &b in bytes {
                hash ^= b as u64;
                hash = hash.wrapping_mul(0x1000_0000_01b3);
            }
        };
        eat(DUMP_MAGIC);
        eat(&DUMP_VERSION.to_le_bytes());
        eat(&self.limit.to_le_bytes());
        eat(as_bytes(&self.mu[1..]));
        eat(as_bytes(&self.lambda[1..]));
        hash
    }
}

#[inline]
fn term_value(mu: i8, exponent: u8) -> i8 {
    match exponent {
        1 => mu,
        _ => mu * mu,
    }
}

fn as_bytes(values: &[i8]) -> &[u8] {
    // i8 and u8 have identical layout.
    unsafe { std::slice::from_raw_parts(values.as_ptr() as *const u8, values.len()) }
}

fn bytes_mut(values: &mut [i8]) -> &mut [u8] {
    unsafe { std::slice::from_raw_parts_mut(values.as_mut_ptr() as *mut u8, values.len()) }
}

/// A multiple-autocorrelation query: shifts `a_1 < … < a_r`, exponents
/// `i_0..i_r` each in {1, 2} and not all equal to 2, and the range `N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorrelationQuery {
    shifts: Vec<u64>,
    exponents: Vec<u8>,
    n: u64,
}

impl CorrelationQuery {
    pub fn new(shifts: Vec<u64>, exponents: Vec<u8>, n: u64) -> Result<Self> {
        if exponents.len() != shifts.len() + 1 {
            return Err(Error::invalid(format!(
                "need {} exponents for {} shifts, got {}",
                shifts.len() + 1,
                shifts.len(),
                exponents.len()
            )));
        }
        if !shifts.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::invalid("shifts must be strictly increasing"));
        }
        if shifts.first().is_some_and(|&a| a == 0) {
            return Err(Error::invalid("shifts must be positive"));
        }
        if exponents.iter().any(|&e| e != 1 && e != 2) {
            return Err(Error::invalid("exponents must be 1 or 2"));
        }
        if exponents.iter().all(|&e| e == 2) {
            return Err(Error::invalid("exponents must not all equal 2"));
        }
        if n == 0 {
            return Err(Error::invalid("N must be at least 1"));
        }
        Ok(CorrelationQuery {
            shifts,
            exponents,
            n,
        })
    }

    pub fn shifts(&self) -> &[u64] {
        &self.shifts
    }

    pub fn exponents(&self) -> &[u8] {
        &self.exponents
    }

    pub fn n(&self) -> u64 {
        self.n
    }
}
