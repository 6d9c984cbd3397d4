//! Segmented multiplicative sieve for μ and λ.
//!
//! The range `[1, N]` is cut into fixed-size segments that are filled
//! independently (and in parallel). Within a segment every prime
//! `p ≤ √N` divides out its full power from each multiple, tallying the
//! number of prime factors with multiplicity and a squarefree flag; a
//! leftover cofactor `> 1` is a single prime above `√N`. This gives both
//! μ(n) and λ(n) exactly, with O(segment) transient memory per worker, and
//! the output is bit-identical for every segmentation because each value is
//! computed from the factorization of its own index alone.

use rayon::prelude::*;

/// Simple prime sieve up to `limit` (inclusive). Only used for the prime
/// table below √N, so `limit` stays tiny compared to the sieved range.
pub(crate) fn small_primes(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            primes.push(i as u64);
            let mut m = i * i;
            while m <= n {
                composite[m] = true;
                m += i;
            }
        }
    }
    primes
}

/// Fill one segment covering the values `lo..lo + mu_out.len()` (1-based,
/// inclusive of `lo`).
fn fill_segment(primes: &[u64], lo: u64, mu_out: &mut [i8], lambda_out: &mut [i8]) {
    let len = mu_out.len();
    let hi = lo + len as u64 - 1;

    // Cofactor left after dividing out the primes processed so far, total
    // prime-factor count with multiplicity, and a squarefree flag.
    let mut rem: Vec<u64> = (lo..=hi).collect();
    let mut omega: Vec<u8> = vec![0; len];
    let mut squarefree: Vec<bool> = vec![true; len];

    for &p in primes {
        if p * p > hi {
            break;
        }
        let mut m = lo.div_ceil(p) * p;
        while m <= hi {
            let i = (m - lo) as usize;
            let mut e = 0u8;
            while rem[i].is_multiple_of(p) {
                rem[i] /= p;
                e += 1;
            }
            omega[i] += e;
            if e >= 2 {
                squarefree[i] = false;
            }
            m += p;
        }
    }

    for i in 0..len {
        let n = lo + i as u64;
        let mut total = omega[i];
        if rem[i] > 1 {
            // A single prime factor above √N; exponent is necessarily 1.
            total += 1;
        }
        let sign: i8 = if total.is_multiple_of(2) { 1 } else { -1 };
        lambda_out[i] = sign;
        mu_out[i] = if n == 1 {
            1
        } else if squarefree[i] {
            sign
        } else {
            0
        };
    }
}

/// Sieve μ and λ on `[1, limit]`. Returns arrays indexed by `n` directly
/// (entry 0 is an unused sentinel).
pub(crate) fn sieve_segmented(limit: u64, segment_size: usize) -> (Vec<i8>, Vec<i8>) {
    let root = (limit as f64).sqrt() as u64 + 2;
    let primes = small_primes(root);

    let n = limit as usize;
    let mut mu = vec![0i8; n + 1];
    let mut lambda = vec![0i8; n + 1];

    mu[1..]
        .par_chunks_mut(segment_size)
        .zip(lambda[1..].par_chunks_mut(segment_size))
        .enumerate()
        .for_each(|(chunk, (mu_chunk, lambda_chunk))| {
            let lo = 1 + (chunk * segment_size) as u64;
            fill_segment(&primes, lo, mu_chunk, lambda_chunk);
        });

    (mu, lambda)
}
