//! Independent second sieve implementation.
//!
//! A classic in-memory linear (Euler) sieve driven by smallest prime
//! factors. It shares no code path with the segmented sieve in
//! [`super::sieve`] and exists so that large-range results (Mertens values,
//! correlation sums) can always be recomputed through a structurally
//! different algorithm.

use crate::{Error, Result};

use super::MobiusTable;

/// Sieve μ and λ on `[1, limit]` with a linear Euler sieve.
///
/// Each composite is crossed out exactly once, by its smallest prime factor,
/// and μ, λ are propagated through the recurrences
/// `μ(p·m) = -μ(m)` (p ∤ m), `μ(p·m) = 0` (p | m) and `λ(p·m) = -λ(m)`.
pub fn linear_sieve(limit: u64) -> Result<MobiusTable> {
    if limit == 0 {
        return Err(Error::invalid("sieve limit must be at least 1"));
    }
    let n = limit as usize;
    let mut spf = vec![0u32; n + 1];
    let mut primes: Vec<usize> = Vec::new();
    let mut mu = vec![0i8; n + 1];
    let mut lambda = vec![0i8; n + 1];
    mu[1] = 1;
    lambda[1] = 1;

    for i in 2..=n {
        if spf[i] == 0 {
            spf[i] = i as u32;
            primes.push(i);
            mu[i] = -1;
            lambda[i] = -1;
        }
        for &p in &primes {
            let m = i * p;
            if m > n {
                break;
            }
            spf[m] = p as u32;
            lambda[m] = -lambda[i];
            mu[m] = if i % p == 0 { 0 } else { -mu[i] };
            if i % p == 0 {
                break;
            }
        }
    }

    Ok(MobiusTable::from_parts(limit, mu, lambda, n.max(1)))
}
