//! Topology oracles: breadth-first path search on the raw edge list
//! (independent of the arc/LCA machinery), arc-intersection checks for the
//! retraction, and the structural identities of the universal dendrite.

use mobius_lab::rng::SplitMix64;
use mobius_lab::topology::{
    DyadicAddress, EdgeId, Locator, MetricGraph, MetricTree, Point, SpaceRef, SubTree,
    UniversalDendriteModel, VertexId,
};
use mobius_lab::Error;

/// Oracle: vertex-to-vertex shortest path length by exhaustive BFS over
/// the edge list with a priority queue; no shared code with MetricTree.
fn dijkstra_oracle(edges: &[(usize, usize, f64)], vertex_count: usize, from: usize) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; vertex_count];
    dist[from] = 0.0;
    let mut visited = vec![false; vertex_count];
    loop {
        let mut best = usize::MAX;
        for v in 0..vertex_count {
            if !visited[v] && dist[v].is_finite() && (best == usize::MAX || dist[v] < dist[best]) {
                best = v;
            }
        }
        if best == usize::MAX {
            break;
        }
        visited[best] = true;
        for &(a, b, len) in edges {
            if a == best && dist[a] + len < dist[b] {
                dist[b] = dist[a] + len;
            }
            if b == best && dist[b] + len < dist[a] {
                dist[a] = dist[b] + len;
            }
        }
    }
    dist
}

/// Deterministic random tree on `n` vertices with dyadic edge lengths.
fn random_tree(n: usize, seed: u64) -> (MetricTree, Vec<(usize, usize, f64)>) {
    let mut rng = SplitMix64::new(seed);
    let mut edges = Vec::with_capacity(n - 1);
    for v in 1..n {
        let parent = (rng.next_below(v as u64)) as usize;
        let length = (1 + rng.next_below(16)) as f64 / 8.0;
        edges.push((parent, v, length));
    }
    (MetricTree::new(n, edges.clone()).unwrap(), edges)
}

#[test]
fn tree_invariants_enforced() {
    // Wrong edge count.
    assert!(matches!(
        MetricTree::new(3, vec![(0, 1, 1.0)]),
        Err(Error::InvalidArgument(_))
    ));
    // Cycle (right count, not a tree).
    assert!(MetricTree::new(3, vec![(0, 1, 1.0), (1, 2, 1.0), (2, 0, 1.0)]).is_err());
    // Nonpositive length.
    assert!(MetricTree::new(2, vec![(0, 1, 0.0)]).is_err());
    // Disconnected.
    assert!(MetricTree::new(4, vec![(0, 1, 1.0), (2, 3, 1.0), (2, 3, 1.0)]).is_err());
}

#[test]
fn star_arc_through_center() {
    let tree = MetricTree::star(&[1.0, 1.0, 1.0]).unwrap();
    let x = tree.edge_point(EdgeId(0), 0.5).unwrap();
    let y = tree.edge_point(EdgeId(1), 0.5).unwrap();
    let path = tree.arc(&x, &y).unwrap();
    assert!((path.length - 1.0).abs() < 1e-15);
    assert_eq!(path.segments.len(), 2);

    // Degenerate arc.
    let degenerate = tree.arc(&x, &x).unwrap();
    assert_eq!(degenerate.length, 0.0);
    assert!(degenerate.segments.is_empty());

    // Reversal.
    let back = tree.arc(&y, &x).unwrap();
    assert_eq!(back.segments, path.reversed().segments);
}

#[test]
fn distance_matches_dijkstra_oracle_on_random_trees() {
    for seed in 0..5u64 {
        let (tree, edges) = random_tree(40, seed);
        let mut rng = SplitMix64::new(seed ^ 0xabcdef);
        for _ in 0..50 {
            let u = rng.next_below(40) as usize;
            let v = rng.next_below(40) as usize;
            let oracle = dijkstra_oracle(&edges, 40, u)[v];
            let pu = tree.vertex_point(VertexId(u)).unwrap();
            let pv = tree.vertex_point(VertexId(v)).unwrap();
            let got = tree.distance(&pu, &pv).unwrap();
            assert!((got - oracle).abs() < 1e-9, "seed {seed} {u}->{v}");
        }
    }
}

#[test]
fn arc_is_the_unique_simple_path() {
    // On the dendrite tree, the arc between random pairs must visit no
    // edge twice and its length must match the metric.
    let model = UniversalDendriteModel::build(3, 4, 0.5).unwrap();
    let tree = model.tree();
    let mut rng = SplitMix64::new(99);
    for _ in 0..1000 {
        let x = tree.sample_point(&mut rng);
        let y = tree.sample_point(&mut rng);
        let path = tree.arc(&x, &y).unwrap();
        let mut seen = std::collections::BTreeSet::new();
        for seg in &path.segments {
            assert!(seen.insert(seg.edge.0), "edge repeated on the arc");
        }
        let d = tree.distance(&x, &y).unwrap();
        assert!((path.length - d).abs() < 1e-9);
        // Segment lengths add up to the total.
        let sum: f64 = path
            .segments
            .iter()
            .map(|s| (s.from - s.to).abs() * tree.edge(s.edge).length)
            .sum();
        assert!((sum - path.length).abs() < 1e-9);
    }
}

#[test]
fn order_distinguishes_endpoint_regular_branch() {
    let tree = MetricTree::star(&[1.0, 1.0, 1.0]).unwrap();
    let interior = tree.edge_point(EdgeId(0), 0.3).unwrap();
    assert_eq!(tree.order(&interior).unwrap(), 2);
    let center = tree.vertex_point(VertexId(0)).unwrap();
    assert_eq!(tree.order(&center).unwrap(), 3);
    let leaf = tree.vertex_point(VertexId(1)).unwrap();
    assert_eq!(tree.order(&leaf).unwrap(), 1);
}

#[test]
fn dendrite_interior_attachment_has_order_three() {
    let model = UniversalDendriteModel::build(1, 2, 0.5).unwrap();
    // Single letter 1/2: the attachment point splits the base arc and
    // carries one child arc.
    let addr = DyadicAddress::root().child(model.letters()[0]);
    let base = model.base(&addr).unwrap();
    assert_eq!(model.tree().order(&base).unwrap(), 3);
    let tip = model.tip(&addr).unwrap();
    assert_eq!(model.tree().order(&tip).unwrap(), 1);
}

#[test]
fn first_point_identity_and_forced_cases() {
    let tree = MetricTree::star(&[1.0, 1.0, 1.0]).unwrap();
    let arm0 = SubTree::from_edges(&tree, &[EdgeId(0)]).unwrap();

    // Identity on the subtree.
    let inside = tree.edge_point(EdgeId(0), 0.4).unwrap();
    let r = tree.first_point(&arm0, &inside).unwrap();
    assert_eq!(r.loc, inside.loc);

    // Forced through the center from another arm.
    let outside = tree.edge_point(EdgeId(1), 0.6).unwrap();
    let r = tree.first_point(&arm0, &outside).unwrap();
    assert_eq!(r.loc, Locator::Vertex(VertexId(0)));
}

#[test]
fn first_point_agrees_with_arc_intersection_oracle() {
    let model = UniversalDendriteModel::build(2, 4, 0.5).unwrap();
    let tree = model.tree();
    let mut rng = SplitMix64::new(4242);

    // Subtree: everything below the first depth-1 arc.
    let addr = DyadicAddress::root().child(model.letters()[1]);
    let info = model.arc_info(&addr).unwrap();
    let mut edges: Vec<EdgeId> = info.pieces.clone();
    for deeper in model.arcs() {
        if deeper.address.len() == 2 && deeper.address.letters()[0] == model.letters()[1] {
            edges.extend(deeper.pieces.iter().copied());
        }
    }
    let subtree = SubTree::from_edges(tree, &edges).unwrap();

    for _ in 0..300 {
        let x = tree.sample_point(&mut rng);
        let r = tree.first_point(&subtree, &x).unwrap();

        // Oracle: the retraction point lies on every arc from x into the
        // subtree, and is the entry point (distance d(x, A)).
        if subtree.contains_point(&x) {
            assert_eq!(r.loc, x.loc);
            continue;
        }
        for probe_t in [0.1, 0.6, 1.0] {
            let a = model.point_at(&addr, probe_t).unwrap();
            let d_xa = tree.distance(&x, &a).unwrap();
            let d_xr = tree.distance(&x, &r).unwrap();
            let d_ra = tree.distance(&r, &a).unwrap();
            assert!(
                (d_xa - (d_xr + d_ra)).abs() < 1e-9,
                "retraction point not on the arc"
            );
        }
    }
}

#[test]
fn first_point_idempotent_and_constant_on_components() {
    let (tree, _) = random_tree(30, 7);
    let subtree = SubTree::from_edges(&tree, &[EdgeId(0), EdgeId(1)])
        .or_else(|_| SubTree::from_edges(&tree, &[EdgeId(0)]))
        .unwrap();
    let mut rng = SplitMix64::new(17);
    // Group sample points by their retraction; points with the same
    // retraction that are in the complement must have their connecting arc
    // outside the subtree, and retracting twice changes nothing.
    let mut by_target: std::collections::BTreeMap<String, Vec<Point>> = Default::default();
    for _ in 0..200 {
        let x = tree.sample_point(&mut rng);
        let r = tree.first_point(&subtree, &x).unwrap();
        let rr = tree.first_point(&subtree, &r).unwrap();
        assert_eq!(r.loc, rr.loc, "retraction must be idempotent");
        if !subtree.contains_point(&x) {
            by_target.entry(r.describe()).or_default().push(x);
        }
    }
    // Constancy per complement component: two complement points whose
    // connecting arc avoids the subtree must share a retraction point.
    let outside: Vec<Point> = by_target.values().flatten().copied().collect();
    for i in 0..outside.len().min(40) {
        for j in (i + 1)..outside.len().min(40) {
            let path = tree.arc(&outside[i], &outside[j]).unwrap();
            let crosses = path.segments.iter().any(|seg| {
                let mid = (seg.from + seg.to) / 2.0;
                tree.edge_point(seg.edge, mid)
                    .map(|p| subtree.contains_point(&p))
                    .unwrap_or(false)
            });
            let ri = tree.first_point(&subtree, &outside[i]).unwrap();
            let rj = tree.first_point(&subtree, &outside[j]).unwrap();
            if !crosses {
                assert_eq!(
                    ri.loc, rj.loc,
                    "same complement component, different retraction"
                );
            }
        }
    }
}

#[test]
fn subtree_validation() {
    let tree = MetricTree::star(&[1.0, 1.0, 1.0]).unwrap();
    assert!(SubTree::from_edges(&tree, &[]).is_err());
    assert!(SubTree::from_edges(&tree, &[EdgeId(5)]).is_err());
    // Two arms of a star share only the center, so they are connected.
    assert!(SubTree::from_edges(&tree, &[EdgeId(0), EdgeId(2)]).is_ok());
    // A 4-vertex path: the two end edges are disconnected without the
    // middle one.
    let path = MetricTree::new(4, vec![(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)]).unwrap();
    assert!(SubTree::from_edges(&path, &[EdgeId(0), EdgeId(2)]).is_err());
}

#[test]
fn address_algebra_identities() {
    let letters = mobius_lab::topology::Dyadic::alphabet(8);
    let mut rng = SplitMix64::new(88);
    for _ in 0..200 {
        let pick = |rng: &mut SplitMix64| {
            let len = rng.next_below(4) as usize;
            let mut word = Vec::new();
            for _ in 0..len {
                word.push(letters[rng.next_below(letters.len() as u64) as usize]);
            }
            DyadicAddress::new(word)
        };
        let a = pick(&mut rng);
        let b = pick(&mut rng);
        let c = pick(&mut rng);
        // Associativity and identity.
        assert_eq!(a.concat(&b).concat(&c), a.concat(&b.concat(&c)));
        assert_eq!(DyadicAddress::root().concat(&a), a);
        assert_eq!(a.concat(&DyadicAddress::root()), a);
        assert_eq!(a.concat(&b).len(), a.len() + b.len());
        // parent ∘ push = identity.
        let letter = letters[rng.next_below(letters.len() as u64) as usize];
        assert_eq!(a.child(letter).parent().unwrap(), a);
    }
}

#[test]
fn dendrite_depth_one_attachment_positions() {
    // Denominators ≤ 4: children at 1/4, 1/2, 3/4 of the base arc.
    let model = UniversalDendriteModel::build(1, 4, 0.5).unwrap();
    let tree = model.tree();
    let root = model.base(&DyadicAddress::root()).unwrap();
    for (letter, expected) in model.letters().iter().zip([0.25, 0.5, 0.75]) {
        let addr = DyadicAddress::root().child(*letter);
        let base = model.base(&addr).unwrap();
        let d = tree.distance(&root, &base).unwrap();
        assert_eq!(d, expected, "attachment for letter {letter}");
    }
}

#[test]
fn dendrite_total_length_formula() {
    for (depth, denom) in [(2usize, 8u32), (3, 4), (4, 8)] {
        let model = UniversalDendriteModel::build(depth, denom, 0.5).unwrap();
        let letters = model.letters().len() as f64;
        let expected: f64 = (0..=depth)
            .map(|k| letters.powi(k as i32) * 0.5f64.powi(k as i32))
            .sum();
        assert!(
            (model.total_length() - expected).abs() < 1e-9,
            "depth {depth} denom {denom}"
        );
    }
}

#[test]
fn sibling_arc_tips_connect_through_attachments() {
    let model = UniversalDendriteModel::build(2, 4, 0.5).unwrap();
    let tree = model.tree();
    let first = DyadicAddress::root().child(model.letters()[0]);
    let alpha = first.child(model.letters()[0]);
    let beta = first.child(model.letters()[2]);
    let path = tree
        .arc(&model.tip(&alpha).unwrap(), &model.tip(&beta).unwrap())
        .unwrap();
    // The arc passes through both attachment points.
    let a_alpha = model.base(&alpha).unwrap();
    let a_beta = model.base(&beta).unwrap();
    for attach in [a_alpha, a_beta] {
        let d_total = path.length;
        let d1 = tree.distance(&model.tip(&alpha).unwrap(), &attach).unwrap();
        let d2 = tree.distance(&attach, &model.tip(&beta).unwrap()).unwrap();
        assert!((d1 + d2 - d_total).abs() < 1e-12);
    }
    // Oracle: length via the independent vertex-level search.
    let edges: Vec<(usize, usize, f64)> = tree
        .edges()
        .iter()
        .map(|e| (e.a.0, e.b.0, e.length))
        .collect();
    let alpha_tip_vertex = model.arc_info(&alpha).unwrap().tip;
    let beta_tip_vertex = model.arc_info(&beta).unwrap().tip;
    let oracle = dijkstra_oracle(&edges, tree.vertex_count(), alpha_tip_vertex.0);
    assert!((oracle[beta_tip_vertex.0] - path.length).abs() < 1e-12);
}

#[test]
fn pairwise_disjoint_arcs_with_shrinking_diameter() {
    // Arcs of a common depth are pairwise disjoint connected subsets and
    // their diameter decays geometrically.
    let model = UniversalDendriteModel::standard().unwrap();
    for depth in 0..=model.depth() {
        let arcs: Vec<_> = model
            .arcs()
            .iter()
            .filter(|a| a.address.len() == depth)
            .collect();
        let expected = 0.5f64.powi(depth as i32);
        for a in &arcs {
            assert_eq!(a.length, expected);
        }
        // Disjointness of the edge sets (the point sets share at most
        // attachment vertices of other levels, never edge pieces).
        let mut seen = std::collections::BTreeSet::new();
        for a in &arcs {
            for e in &a.pieces {
                assert!(seen.insert(e.0), "piece shared between depth-{depth} arcs");
            }
        }
    }
}

#[test]
fn small_distance_implies_small_arc_diameter() {
    // On a tree the diameter of [x, y] equals d(x, y), so any δ < ε works;
    // the test exhibits the concrete δ = ε · min_edge / diameter and
    // checks it on sampled nearby pairs.
    let model = UniversalDendriteModel::standard().unwrap();
    let tree = model.tree();
    let min_edge = tree
        .edges()
        .iter()
        .map(|e| e.length)
        .fold(f64::INFINITY, f64::min);
    let diameter = tree.diameter();
    let mut rng = SplitMix64::new(321);
    for epsilon in [0.1, 0.01] {
        let delta = epsilon * min_edge / diameter;
        assert!(delta < epsilon);
        let mut tested = 0;
        while tested < 100 {
            // Construct nearby pairs directly: x sampled, y on the same
            // edge within δ.
            let x = tree.sample_point(&mut rng);
            let (edge, t) = match x.loc {
                Locator::OnEdge(e, t) => (e, t),
                Locator::Vertex(_) => continue,
            };
            let len = tree.edge(edge).length;
            let dt = (delta / len) * (0.2 + 0.8 * rng.next_f64());
            let t2 = (t + dt).min(1.0 - 1e-12);
            let y = tree.edge_point(edge, t2).unwrap();
            let d = tree.distance(&x, &y).unwrap();
            if d >= delta {
                continue;
            }
            let path = tree.arc(&x, &y).unwrap();
            assert!(path.length < epsilon, "diam {} ≥ ε {epsilon}", path.length);
            tested += 1;
        }
    }
}

#[test]
fn circle_distances_and_arc_multiplicity() {
    let circle = MetricGraph::unit_circle();
    let x = circle.edge_point(EdgeId(0), 0.5).unwrap(); // position 1/4
    let antipode = circle.edge_point(EdgeId(1), 0.5).unwrap(); // position 3/4
    let d = circle.distance(&x, &antipode).unwrap();
    assert!((d - 0.5).abs() < 1e-15, "antipodal distance {d}");

    // Two simple arcs exist between generic circle points.
    match circle.arc(&x, &antipode) {
        Err(Error::ArcNotUnique { candidates }) => assert_eq!(candidates, 2),
        other => panic!("expected multiplicity rejection, got {other:?}"),
    }

    // Orders on the circle are all 2.
    assert_eq!(circle.order(&x).unwrap(), 2);
    let v = circle.vertex_point(VertexId(0)).unwrap();
    assert_eq!(circle.order(&v).unwrap(), 2);
}

#[test]
fn cross_space_queries_rejected() {
    let t1 = MetricTree::star(&[1.0, 1.0]).unwrap();
    let t2 = MetricTree::star(&[1.0, 1.0]).unwrap();
    let x = t1.edge_point(EdgeId(0), 0.5).unwrap();
    let y = t2.edge_point(EdgeId(0), 0.5).unwrap();
    assert!(matches!(t1.distance(&x, &y), Err(Error::SpaceMismatch)));
    assert!(matches!(t1.arc(&x, &y), Err(Error::SpaceMismatch)));
}

#[test]
fn points_normalize_to_vertex_form() {
    let tree = MetricTree::star(&[1.0, 1.0]).unwrap();
    let p = tree.edge_point(EdgeId(0), 0.0).unwrap();
    assert_eq!(p.loc, Locator::Vertex(VertexId(0)));
    let q = tree.edge_point(EdgeId(0), 1.0).unwrap();
    assert_eq!(q.loc, Locator::Vertex(VertexId(1)));
    assert!(tree.edge_point(EdgeId(0), 1.5).is_err());
    assert!(tree.edge_point(EdgeId(0), f64::NAN).is_err());
}

#[test]
fn space_ref_dispatch() {
    let space = SpaceRef::from_dendrite(UniversalDendriteModel::build(1, 4, 0.5).unwrap());
    assert!(space.as_tree().is_some());
    let x = space.edge_point(EdgeId(0), 0.3).unwrap();
    assert!(space.contains(&x));
    assert_eq!(space.order(&x).unwrap(), 2);
    assert!(space.diameter() > 0.0);
}
