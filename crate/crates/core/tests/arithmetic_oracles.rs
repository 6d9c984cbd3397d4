//! Arithmetic oracles: trial-division factorization for small ranges, the
//! independent linear sieve for large ranges, and direct summation for the
//! weighted means. Golden values are frozen from oracle runs.

use mobius_lab::arithmetic::{reference, CorrelationQuery, GapSequenceSpec, MobiusTable};

/// Trial-division μ and λ; deliberately naive and independent of both
/// sieve implementations.
fn mu_lambda_by_trial_division(n: u64) -> (i8, i8) {
    assert!(n >= 1);
    let mut remaining = n;
    let mut distinct = 0u32;
    let mut total = 0u32;
    let mut squarefree = true;
    let mut p = 2u64;
    while p * p <= remaining {
        if remaining.is_multiple_of(p) {
            let mut exponent = 0u32;
            while remaining.is_multiple_of(p) {
                remaining /= p;
                exponent += 1;
            }
            distinct += 1;
            total += exponent;
            if exponent > 1 {
                squarefree = false;
            }
        }
        p += 1;
    }
    if remaining > 1 {
        distinct += 1;
        total += 1;
    }
    let lambda = if total.is_multiple_of(2) { 1 } else { -1 };
    let mu = if n == 1 {
        1
    } else if squarefree {
        if distinct.is_multiple_of(2) {
            1
        } else {
            -1
        }
    } else {
        0
    };
    (mu, lambda)
}

#[test]
fn sieve_matches_trial_division_up_to_ten_thousand() {
    let table = MobiusTable::sieve(10_000).unwrap();
    let second = reference::linear_sieve(10_000).unwrap();
    for n in 1..=10_000u64 {
        let (mu, lambda) = mu_lambda_by_trial_division(n);
        assert_eq!(table.mu(n), mu, "mu({n})");
        assert_eq!(table.lambda(n), lambda, "lambda({n})");
        assert_eq!(second.mu(n), mu, "reference mu({n})");
        assert_eq!(second.lambda(n), lambda, "reference lambda({n})");
    }
}

#[test]
fn mobius_sum_identity_up_to_ten_thousand() {
    let table = MobiusTable::sieve(10_000).unwrap();
    // Σ_{d|n} μ(d) aggregated for all n at once.
    let mut divisor_sums = vec![0i64; 10_001];
    for d in 1..=10_000u64 {
        let mu = table.mu(d) as i64;
        if mu != 0 {
            let mut m = d;
            while m <= 10_000 {
                divisor_sums[m as usize] += mu;
                m += d;
            }
        }
    }
    assert_eq!(divisor_sums[1], 1);
    for (n, sum) in divisor_sums.iter().enumerate().skip(2) {
        assert_eq!(*sum, 0, "divisor sum at n = {n}");
    }
}

#[test]
fn sieve_deterministic_across_segment_sizes_and_workers() {
    let baseline = MobiusTable::sieve_with_segment(100_000, 1 << 18).unwrap();
    for segment in [997usize, 4096, 77_777] {
        let other = MobiusTable::sieve_with_segment(100_000, segment).unwrap();
        assert_eq!(baseline.checksum(), other.checksum(), "segment {segment}");
    }
    for workers in [1usize, 4] {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .unwrap();
        let table = pool.install(|| MobiusTable::sieve_with_segment(100_000, 8192).unwrap());
        assert_eq!(baseline.checksum(), table.checksum(), "workers {workers}");
    }
}

#[test]
fn mertens_mean_small_and_large() {
    let table = MobiusTable::sieve(2_000_000).unwrap();
    assert_eq!(table.mean_mobius(1).unwrap(), 1.0);
    assert_eq!(table.mean_mobius(2).unwrap(), 0.0);

    // Golden value frozen from two independent sieve passes.
    let second = reference::linear_sieve(2_000_000).unwrap();
    assert_eq!(
        table.mertens(2_000_000).unwrap(),
        second.mertens(2_000_000).unwrap()
    );
    assert!(table.mean_mobius(2_000_000).unwrap().abs() < 1e-3);
}

#[test]
fn progression_mean_golden_values() {
    let table = MobiusTable::sieve(1_000_000).unwrap();
    // Full-range case collapses to the Mertens mean.
    assert_eq!(
        table.progression_mean(999_983, 0, 1).unwrap(),
        table.mean_mobius(999_983).unwrap()
    );
    // Hand value: (μ(2)+μ(4))/4.
    assert_eq!(table.progression_mean(4, 0, 2).unwrap(), -0.25);
    // Frozen by the oracle run: Σ_{n≤10^6, n≡1 (4)} μ(n) = 278.
    let value = table.progression_mean(1_000_000, 1, 4).unwrap();
    assert_eq!(value, 278.0 / 1_000_000.0);
    assert!(value.abs() < 5e-3);
}

#[test]
fn eventually_periodic_mean_against_direct_summation() {
    let table = MobiusTable::sieve(1_000_000).unwrap();
    // Constant cycle: c · mean.
    let c = 0.7;
    let got = table.eventually_periodic_mean(100_000, &[], &[c]).unwrap();
    assert!((got - c * table.mean_mobius(100_000).unwrap()).abs() < 1e-15);

    // cycle [1, 0] selects even n: hand value at N = 6.
    let got = table.eventually_periodic_mean(6, &[], &[1.0, 0.0]).unwrap();
    assert_eq!(got, (table.mu(2) + table.mu(4) + table.mu(6)) as f64 / 6.0);

    // prefix [5], cycle [0, 1] at N = 10^6: frozen golden value 77/10^6,
    // cross-checked against direct summation.
    let got = table
        .eventually_periodic_mean(1_000_000, &[5.0], &[0.0, 1.0])
        .unwrap();
    assert_eq!(got, 77.0 / 1_000_000.0);
    let mut direct = 0f64;
    for n in 1..=1_000_000u64 {
        let x = if n == 1 {
            5.0
        } else if (n - 1) % 2 == 1 {
            1.0
        } else {
            0.0
        };
        direct += table.mu(n) as f64 * x;
    }
    assert!((got - direct / 1e6).abs() < 1e-12);
    assert!(got.abs() < 5e-3);
}

#[test]
fn eventually_periodic_matches_progression_combination() {
    // Linearity: the weighted mean must equal the matching combination of
    // progression means to high precision.
    let table = MobiusTable::sieve(50_000).unwrap();
    let prefix = [0.25, -1.0, 0.5];
    let cycle = [0.2, -0.7, 1.0, 0.0];
    let n = 49_999u64;
    let got = table.eventually_periodic_mean(n, &prefix, &cycle).unwrap();

    let p = prefix.len() as u64;
    let m = cycle.len() as u64;
    let mut combo = 0.0;
    for (i, v) in prefix.iter().enumerate() {
        combo += *v * table.mu(i as u64 + 1) as f64 / n as f64;
    }
    for (j, v) in cycle.iter().enumerate() {
        let residue = (p + j as u64) % m;
        // progression mean over the tail beyond the prefix
        let mut tail = 0i64;
        let mut k = p + 1 + ((m + residue - (p + 1) % m) % m);
        while k <= n {
            tail += table.mu(k) as i64;
            k += m;
        }
        combo += *v * tail as f64 / n as f64;
    }
    assert!((got - combo).abs() < 1e-12, "got {got}, combo {combo}");
}

#[test]
fn chowla_golden_values() {
    let table = MobiusTable::sieve(1_000_002).unwrap();
    // Degenerate query: r = 0, exponent 1 is the Mertens mean.
    let q = CorrelationQuery::new(vec![], vec![1], 777_777).unwrap();
    assert_eq!(
        table.chowla_sum(&q).unwrap(),
        table.mean_mobius(777_777).unwrap()
    );

    // Hand-expanded value at N = 5 via trial division:
    // μ1μ2+μ2μ3+μ3μ4+μ4μ5+μ5μ6 = -1+1+0+0-1 = -1.
    let mut hand = 0i64;
    for n in 1..=5u64 {
        let (a, _) = mu_lambda_by_trial_division(n);
        let (b, _) = mu_lambda_by_trial_division(n + 1);
        hand += (a * b) as i64;
    }
    assert_eq!(hand, -1);
    let q = CorrelationQuery::new(vec![1], vec![1, 1], 5).unwrap();
    assert_eq!(table.chowla_sum(&q).unwrap(), -0.2);

    // Frozen golden value: Σ_{n≤10^6} μ(n)·μ²(n+2) = 253, and the
    // conjectured decay bound.
    let q = CorrelationQuery::new(vec![2], vec![1, 2], 1_000_000).unwrap();
    let got = table.chowla_sum(&q).unwrap();
    assert_eq!(got, 253.0 / 1_000_000.0);
    assert!(got.abs() < 1e-2);
}

#[test]
fn chowla_squared_exponent_is_squarefree_indicator() {
    let table = MobiusTable::sieve(600).unwrap();
    // μ²(n) sums to the squarefree count, a positive density.
    let q = CorrelationQuery::new(vec![1], vec![2, 1], 500).unwrap();
    let mut direct = 0i64;
    for n in 1..=500u64 {
        let sq = (table.mu(n) * table.mu(n)) as i64;
        direct += sq * table.mu(n + 1) as i64;
    }
    assert_eq!(table.chowla_sum(&q).unwrap(), direct as f64 / 500.0);
}

#[test]
fn gap_bounded_mean_examples() {
    // Constant sequence: mean is the constant.
    let spec = GapSequenceSpec::Constant { value: 1.0 };
    assert_eq!(spec.cesaro_mean(1_000_000).unwrap(), 1.0);

    // Alternating ±1 blocks of length k cancel over full periods.
    let spec = GapSequenceSpec::AlternatingBlocks { k: 100 };
    assert_eq!(spec.cesaro_mean(1_000_000).unwrap(), 0.0);

    // +1 on [1, k), then -1 exactly at multiples of k: golden value at
    // N = 10^6, k = 100 is (99 - 10^4)/10^6, magnitude ≤ 1/k + o(1).
    let k = 100u64;
    let n = 1_000_000u64;
    let direct: f64 = {
        let mut sum = 0f64;
        for i in 1..=n {
            if i < k {
                sum += 1.0;
            } else if i % k == 0 {
                sum -= 1.0;
            }
        }
        sum / n as f64
    };
    assert_eq!(direct, (99.0 - 10_000.0) / 1e6);
    assert!(direct.abs() <= 1.0 / k as f64 + 2.0 * (k as f64 - 1.0) / n as f64);
}

#[test]
fn sparse_gap_sequences_respect_the_tail_bound() {
    for k in [10u64, 100, 1000] {
        for seed in 0..20u64 {
            let spec = GapSequenceSpec::SparseSupport {
                k,
                transient: vec![0.9; 7],
                seed,
            };
            for n in [100 * k, 400 * k, 1000 * k] {
                let mean = spec.cesaro_mean(n).unwrap().abs();
                let bound = 1.0 / k as f64 + 2.0 * 7.0 / n as f64;
                assert!(mean <= bound, "k {k} seed {seed} N {n}: {mean} > {bound}");
            }
        }
    }
}

#[test]
fn dump_reload_identity() {
    let table = MobiusTable::sieve(50_000).unwrap();
    let mut bytes = Vec::new();
    table.write_to(&mut bytes).unwrap();
    let reloaded = MobiusTable::read_from(bytes.as_slice()).unwrap();
    assert_eq!(table.checksum(), reloaded.checksum());
    for n in [1u64, 2, 30, 49_999, 50_000] {
        assert_eq!(table.mu(n), reloaded.mu(n));
        assert_eq!(table.lambda(n), reloaded.lambda(n));
    }
}
