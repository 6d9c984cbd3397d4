//! Orbit-level checks for the system catalog: semigroup law, in-space
//! closure, the combinatorial itineraries of odometer/solenoid/nested
//! systems, geometric decay of the contracting map, monotone preimage
//! structure, rotation equidistribution and tent symbolic coding.

use std::sync::Arc;

use mobius_lab::rng::SplitMix64;
use mobius_lab::systems::{BranchMotion, DynSystem};
use mobius_lab::topology::{EdgeId, Locator, MetricTree, VertexId};

fn catalog(seed: u64) -> Vec<DynSystem> {
    let tree = Arc::new(MetricTree::star(&[1.0, 1.0, 1.0]).unwrap());
    let origin = tree.vertex_point(VertexId(0)).unwrap();
    let _ = seed;
    vec![
        DynSystem::periodic_interval(6).unwrap(),
        DynSystem::rotation(0.6180339887498949).unwrap(),
        DynSystem::tent(2.0).unwrap(),
        DynSystem::odometer(&[2, 3, 5]).unwrap(),
        DynSystem::solenoid(&[2, 4, 8]).unwrap(),
        DynSystem::nested_decomposition(&[2, 3, 2]).unwrap(),
        DynSystem::monotone_dendrite(
            Arc::clone(&tree),
            VertexId(0),
            vec![1, 2, 0],
            BranchMotion::RadialContraction(0.5),
        )
        .unwrap(),
        DynSystem::contracting(tree, origin, 0.5).unwrap(),
    ]
}

#[test]
fn semigroup_law_on_random_points() {
    // 10^3 random (x, n, m) triples across the catalog.
    for sys in catalog(0) {
        let points = sys.sample_points(128, 1234);
        let mut rng = SplitMix64::new(77);
        for x in points {
            let n = rng.next_below(40);
            let m = rng.next_below(40);
            let combined = sys.iterate(&x, n + m).unwrap();
            let staged = sys.iterate(&sys.iterate(&x, n).unwrap(), m).unwrap();
            let d = sys.distance(&combined, &staged).unwrap();
            assert!(
                d <= 1e-9,
                "{}: iterate({}+{}) differs by {d}",
                sys.descriptor(),
                n,
                m
            );
        }
    }
}

#[test]
fn iterate_zero_is_identity() {
    for sys in catalog(1) {
        for x in sys.sample_points(10, 4321) {
            let y = sys.iterate(&x, 0).unwrap();
            assert_eq!(x.loc, y.loc, "{}", sys.descriptor());
        }
    }
}

#[test]
fn orbits_stay_in_space() {
    // Sampled closure check: 10^4 orbits of length 10^3 per system.
    for sys in catalog(2) {
        let space = sys.space();
        for (i, x) in sys.sample_points(10_000, 777).into_iter().enumerate() {
            let mut cursor = sys.orbit(&x).unwrap();
            for step in 0..1000 {
                cursor.advance();
                let p = cursor.current();
                assert!(
                    space.contains(&p),
                    "{} sample {i} step {step} left the space",
                    sys.descriptor()
                );
                if let Locator::OnEdge(_, t) = p.loc {
                    assert!(t > 0.0 && t < 1.0 && t.is_finite());
                }
            }
        }
    }
}

#[test]
fn rotation_closed_form() {
    let theta = 0.6180339887498949;
    let sys = DynSystem::rotation(theta).unwrap();
    let rot = match &sys {
        DynSystem::Rotation(r) => r,
        _ => unreachable!(),
    };
    let x = rot.point_at(0.2);
    for n in [0u64, 1, 7, 100] {
        let got = rot.position(&sys.iterate(&x, n).unwrap()).unwrap();
        let want = (0.2 + n as f64 * theta).rem_euclid(1.0);
        let d = (got - want).abs();
        assert!(d.min(1.0 - d) < 1e-9, "n = {n}: {got} vs {want}");
    }

    // Identity and period-2 cases.
    let id = DynSystem::rotation(0.0).unwrap();
    let p = match &id {
        DynSystem::Rotation(r) => r.point_at(0.3),
        _ => unreachable!(),
    };
    assert_eq!(id.step(&p).unwrap().loc, p.loc);
    let half = DynSystem::rotation(0.5).unwrap();
    let p = match &half {
        DynSystem::Rotation(r) => r.point_at(0.3),
        _ => unreachable!(),
    };
    let back = half.iterate(&p, 2).unwrap();
    assert!(half.distance(&back, &p).unwrap() < 1e-12);
    assert!(half.distance(&half.step(&p).unwrap(), &p).unwrap() > 0.4);
}

#[test]
fn rotation_orbit_equidistributes() {
    // Star discrepancy of {nθ} for the golden ratio at N = 10^5.
    let theta = 0.6180339887498949;
    let sys = DynSystem::rotation(theta).unwrap();
    let rot = match &sys {
        DynSystem::Rotation(r) => r,
        _ => unreachable!(),
    };
    let n = 100_000usize;
    let mut positions = Vec::with_capacity(n);
    let mut cursor = sys.orbit(&rot.point_at(0.0)).unwrap();
    for _ in 0..n {
        cursor.advance();
        positions.push(rot.position(&cursor.current()).unwrap());
    }
    positions.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut discrepancy = 0f64;
    for (i, u) in positions.iter().enumerate() {
        let up = (i + 1) as f64 / n as f64 - u;
        let down = u - i as f64 / n as f64;
        discrepancy = discrepancy.max(up.abs()).max(down.abs());
    }
    assert!(discrepancy < 1e-2, "star discrepancy {discrepancy}");
}

#[test]
fn tent_exact_small_orbit() {
    let sys = DynSystem::tent(2.0).unwrap();
    let tent = match &sys {
        DynSystem::Tent(t) => t,
        _ => unreachable!(),
    };
    // Step-by-step oracle from x = 0.3.
    let x = tent.point_at(0.3).unwrap();
    let mut expected = 0.3f64;
    for n in 1..=3u64 {
        expected = 2.0 * expected.min(1.0 - expected);
        let got = tent.coordinate(&sys.iterate(&x, n).unwrap()).unwrap();
        assert_eq!(got, expected, "n = {n}");
    }
    // 1/3 maps to the fixed point 2/3 in one step.
    let third = tent.point_at(1.0 / 3.0).unwrap();
    let once = tent.coordinate(&sys.step(&third).unwrap()).unwrap();
    let twice = tent.coordinate(&sys.iterate(&third, 2).unwrap()).unwrap();
    assert!((once - 2.0 / 3.0).abs() < 1e-15);
    assert!((twice - 2.0 / 3.0).abs() < 1e-12);
}

#[test]
fn tent_symbolic_coding_matches_binary_shift() {
    // Oracle: the slope-2 tent on 40-bit dyadics k/2^40 is exactly the
    // binary shift with reflection, k ↦ 2k below the midpoint and
    // k ↦ 2^41 - 2k above it. Both float ops involved (doubling, 1 - x)
    // are lossless on these values, so orbits and itinerary symbols must
    // agree bit for bit over 30 steps.
    const W: u32 = 40;
    let scale = (1u64 << W) as f64;
    let sys = DynSystem::tent(2.0).unwrap();
    let tent = match &sys {
        DynSystem::Tent(t) => t,
        _ => unreachable!(),
    };
    let mut rng = SplitMix64::new(2024);
    for _ in 0..20 {
        let mut k: u64 = rng.next_u64() >> (64 - W);
        if k == 0 {
            continue;
        }
        let mut cursor = sys
            .orbit(&tent.point_at(k as f64 / scale).unwrap())
            .unwrap();
        for step in 0..30usize {
            let coordinate = tent.coordinate(&cursor.current()).unwrap();
            assert_eq!(coordinate, k as f64 / scale, "step {step}");
            let symbol = coordinate >= 0.5;
            assert_eq!(symbol, k >= 1u64 << (W - 1), "symbol at step {step}");
            k = if k < 1u64 << (W - 1) {
                2 * k
            } else {
                (1u64 << (W + 1)) - 2 * k
            };
            cursor.advance();
        }
    }
}

#[test]
fn tent_low_slope_collapses() {
    let sys = DynSystem::tent(0.9).unwrap();
    let tent = match &sys {
        DynSystem::Tent(t) => t,
        _ => unreachable!(),
    };
    let x = tent.point_at(0.47).unwrap();
    let far = sys.iterate(&x, 200).unwrap();
    assert!(tent.coordinate(&far).unwrap() < 1e-6);
}

#[test]
fn periodic_membership_and_rejection() {
    let sys = DynSystem::periodic_interval(2).unwrap();
    let points = match &sys {
        DynSystem::Periodic(p) => p.orbit_points().to_vec(),
        _ => unreachable!(),
    };
    assert_eq!(sys.step(&points[0]).unwrap().loc, points[1].loc);
    assert_eq!(sys.step(&points[1]).unwrap().loc, points[0].loc);

    // Fixed point case.
    let fixed = DynSystem::periodic_interval(1).unwrap();
    let p = match &fixed {
        DynSystem::Periodic(p) => p.orbit_points()[0],
        _ => unreachable!(),
    };
    assert_eq!(fixed.step(&p).unwrap().loc, p.loc);

    // Duplicate orbit points are rejected.
    let tree = MetricTree::unit_interval();
    let space = mobius_lab::topology::SpaceRef::from_tree(tree);
    let a = space.edge_point(EdgeId(0), 0.5).unwrap();
    assert!(DynSystem::periodic(space, vec![a, a]).is_err());
}

#[test]
fn odometer_visits_cylinders_uniformly() {
    let sys = DynSystem::odometer(&[2, 3, 5]).unwrap();
    let odo = match &sys {
        DynSystem::Odometer(o) => o,
        _ => unreachable!(),
    };
    let period = odo.period();
    assert_eq!(period, 30);
    // Walk exactly one period and count cylinder visits at each depth.
    for depth in 1..=3usize {
        let cylinders: u64 = odo.radices().iter().take(depth).product();
        let mut counts = vec![0u64; cylinders as usize];
        for start in 0..period {
            counts[odo.cylinder_index(start, depth) as usize] += 1;
        }
        let expected = period / cylinders;
        assert!(counts.iter().all(|c| *c == expected), "depth {depth}");
    }
    // The orbit cursor follows the successor order.
    let zero = odo.point_of(&odo.state(&[0, 0, 0]).unwrap()).unwrap();
    let mut cursor = sys.orbit(&zero).unwrap();
    for want in 1..=60u64 {
        cursor.advance();
        let reached = cursor.current();
        let idx = (0..period)
            .find(|i| odo.point_of(&odo.state_at(*i)).unwrap().loc == reached.loc)
            .unwrap();
        assert_eq!(idx, want % period);
    }
}

#[test]
fn solenoid_gap_property() {
    // Successive visits of a generic orbit to a fixed level-j component
    // are exactly k_j apart.
    let sys = DynSystem::solenoid(&[2, 4, 8]).unwrap();
    let h = sys.hierarchy().unwrap();
    let x = h.petal_point(3, 0.41).unwrap();
    for level in 1..=3usize {
        let k = h.periods()[level - 1];
        let mut previous: Option<u64> = None;
        let mut cursor = sys.orbit(&x).unwrap();
        for n in 1..=200u64 {
            cursor.advance();
            let class = h.component_of(&cursor.current(), level).unwrap().unwrap();
            if class == 0 {
                if let Some(prev) = previous {
                    assert_eq!(n - prev, k, "level {level}");
                }
                previous = Some(n);
            }
        }
    }
}

#[test]
fn solenoid_level_three_is_dyadic_cycle() {
    let sys = DynSystem::solenoid(&[2, 4, 8]).unwrap();
    let h = sys.hierarchy().unwrap();
    let x = h.petal_point(0, 0.5).unwrap();
    let mut itinerary = Vec::new();
    let mut cursor = sys.orbit(&x).unwrap();
    for _ in 0..16 {
        itinerary.push(h.component_of(&cursor.current(), 3).unwrap().unwrap());
        cursor.advance();
    }
    assert_eq!(
        itinerary,
        vec![0, 1, 2, 3, 4, 5, 6, 7, 0, 1, 2, 3, 4, 5, 6, 7]
    );
}

#[test]
fn solenoid_depth_one_is_plain_cycle() {
    let sys = DynSystem::solenoid(&[5]).unwrap();
    let h = sys.hierarchy().unwrap();
    let x = h.petal_point(2, 0.3).unwrap();
    let back = sys.iterate(&x, 5).unwrap();
    assert_eq!(back.loc, x.loc);
}

#[test]
fn nested_decomposition_itinerary_progression() {
    // Membership in the level-k pieces follows the arithmetic progression
    // n ≡ n_0 + s (mod α_k), checked exactly.
    let sys = DynSystem::nested_decomposition(&[2, 2]).unwrap();
    let h = sys.hierarchy().unwrap();
    assert_eq!(h.periods(), &[2, 4]);
    let start_class = 1u64;
    let x = h.petal_point(start_class, 0.25).unwrap();
    let mut cursor = sys.orbit(&x).unwrap();
    for n in 0..64u64 {
        let class = h.component_of(&cursor.current(), 2).unwrap().unwrap();
        assert_eq!(class, (start_class + n) % 4);
        cursor.advance();
    }
}

#[test]
fn nested_pieces_swap_and_nest() {
    // factors (2): two pieces swapped by the map.
    let sys = DynSystem::nested_decomposition(&[2]).unwrap();
    let h = sys.hierarchy().unwrap();
    let inside = h.petal_point(0, 0.7).unwrap();
    let swapped = sys.step(&inside).unwrap();
    assert_eq!(h.component_of(&swapped, 1).unwrap(), Some(1));

    // factors (2,2): 4 level-2 pieces with return time 4 inside 2 pieces.
    let sys = DynSystem::nested_decomposition(&[2, 2]).unwrap();
    let h = sys.hierarchy().unwrap();
    let x = h.petal_point(2, 0.5).unwrap();
    assert_eq!(h.component_of(&x, 1).unwrap(), Some(0));
    assert_eq!(h.component_of(&x, 2).unwrap(), Some(2));
    let returned = sys.iterate(&x, 4).unwrap();
    assert_eq!(returned.loc, x.loc);
    let not_yet = sys.iterate(&x, 2).unwrap();
    assert_ne!(not_yet.loc, x.loc);
}

#[test]
fn contracting_decay_is_geometric() {
    let tree = Arc::new(MetricTree::star(&[1.0, 1.0, 1.0]).unwrap());
    let origin = tree.vertex_point(VertexId(0)).unwrap();
    let sys = DynSystem::contracting(Arc::clone(&tree), origin, 0.5).unwrap();

    // Fixed point.
    assert_eq!(sys.step(&origin).unwrap().loc, origin.loc);

    // d(o, fⁿx) = λⁿ d(o, x) to 1e-9 relative accuracy.
    let x = tree.vertex_point(VertexId(2)).unwrap();
    let mut cursor = sys.orbit(&x).unwrap();
    for n in 1..=40u64 {
        cursor.advance();
        let d = sys.space().distance(&origin, &cursor.current()).unwrap();
        let want = 0.5f64.powi(n as i32);
        assert!(
            (d - want).abs() <= 1e-9 * want.max(1e-300),
            "n = {n}: {d} vs {want}"
        );
    }

    // Spec example: d = 1, three steps → 1/8.
    let three = sys.iterate(&x, 3).unwrap();
    let d = sys.space().distance(&origin, &three).unwrap();
    assert!((d - 0.125).abs() < 1e-12);
}

#[test]
fn monotone_star_cases() {
    let tree = Arc::new(MetricTree::star(&[1.0, 1.0, 1.0]).unwrap());

    // Identity permutation + identity motion = identity map.
    let id = DynSystem::monotone_dendrite(
        Arc::clone(&tree),
        VertexId(0),
        vec![0, 1, 2],
        BranchMotion::Identity,
    )
    .unwrap();
    let x = tree.edge_point(EdgeId(2), 0.77).unwrap();
    assert_eq!(id.step(&x).unwrap().loc, x.loc);

    // Cyclic permutation: period-3 branch itinerary, center fixed.
    let cyc = DynSystem::monotone_dendrite(
        Arc::clone(&tree),
        VertexId(0),
        vec![1, 2, 0],
        BranchMotion::Identity,
    )
    .unwrap();
    let back = cyc.iterate(&x, 3).unwrap();
    assert_eq!(back.loc, x.loc);
    let center = cyc.fixed_point().unwrap();
    assert_eq!(cyc.step(&center).unwrap().loc, center.loc);

    // Adding contraction sends every orbit to the center.
    let pull = DynSystem::monotone_dendrite(
        Arc::clone(&tree),
        VertexId(0),
        vec![1, 2, 0],
        BranchMotion::RadialContraction(0.5),
    )
    .unwrap();
    let far = pull.iterate(&x, 60).unwrap();
    let d = pull.space().distance(&center, &far).unwrap();
    assert!(d < 1e-12, "orbit should accumulate at the center, d = {d}");
}

#[test]
fn monotone_preimages_of_subarcs_are_connected() {
    // Interval test on each edge: the preimage of a subarc under one step
    // restricted to an edge must be a contiguous parameter run.
    let tree = Arc::new(MetricTree::star(&[1.0, 1.0, 1.0]).unwrap());
    let sys = DynSystem::monotone_dendrite(
        Arc::clone(&tree),
        VertexId(0),
        vec![1, 2, 0],
        BranchMotion::RadialContraction(0.6),
    )
    .unwrap();
    let mut rng = SplitMix64::new(5150);
    for _ in 0..30 {
        let target_edge = EdgeId(rng.next_below(3) as usize);
        let a = rng.next_f64() * 0.8;
        let b = a + 0.05 + 0.15 * rng.next_f64();
        for source in 0..3usize {
            let mut pattern = Vec::new();
            for i in 0..=100 {
                let t = (i as f64 / 100.0).clamp(1e-9, 1.0 - 1e-9);
                let p = tree.edge_point(EdgeId(source), t).unwrap();
                let image = sys.step(&p).unwrap();
                let hit = match image.loc {
                    Locator::OnEdge(e, s) => e == target_edge && s >= a && s <= b,
                    Locator::Vertex(_) => false,
                };
                pattern.push(hit);
            }
            let runs = pattern.windows(2).filter(|w| w[0] != w[1]).count();
            assert!(runs <= 2, "preimage on edge {source} is not an interval");
        }
    }
}

#[test]
fn incompatible_structures_rejected() {
    let lopsided = Arc::new(MetricTree::star(&[1.0, 2.0, 1.0]).unwrap());
    assert!(DynSystem::monotone_dendrite(
        lopsided,
        VertexId(0),
        vec![1, 2, 0],
        BranchMotion::Identity
    )
    .is_err());
    assert!(DynSystem::solenoid(&[3, 5]).is_err());
    assert!(DynSystem::odometer(&[6]).is_err());
}

#[test]
fn descriptors_are_stable() {
    for sys in catalog(3) {
        let d = sys.descriptor();
        assert!(!d.is_empty());
        assert_eq!(d, sys.descriptor());
    }
}
