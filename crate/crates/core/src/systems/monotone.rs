//! Monotone tree maps: a permutation of the branches hanging at a center
//! vertex, optionally composed with a radial slide toward the center.
//!
//! The permutation must pair structurally identical branches (same shape,
//! same edge lengths), so each branch maps isometrically onto its image.
//! The radial part moves a point at distance `r` from the center to the
//! point at distance `g(r)` on the same center-bound geodesic, with
//! `g(r) ≤ r`; both pieces are injective with subtree image, hence the
//! composite map is monotone (preimages of connected sets stay connected).

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::topology::{EdgeId, Locator, MetricTree, Point, SpaceRef, VertexId};
use crate::{Error, Result};

/// Radial reparametrization applied after the branch permutation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BranchMotion {
    /// Leave radii unchanged.
    Identity,
    /// Slide toward the center: radius `r ↦ rate · r` with `rate ∈ (0, 1)`.
    RadialContraction(f64),
}

#[derive(Debug, Clone)]
pub struct MonotoneSystem {
    space: SpaceRef,
    center: VertexId,
    perm: Vec<usize>,
    motion: BranchMotion,
    vertex_image: Vec<u32>,
    edge_image: Vec<u32>,
    edge_flip: Vec<bool>,
    /// Distance from the center, per vertex.
    radius: Vec<f64>,
    /// Edge and parent vertex toward the center (center itself has none).
    parent: Vec<Option<(EdgeId, VertexId)>>,
}

impl MonotoneSystem {
    pub fn new(
        tree: Arc<MetricTree>,
        center: VertexId,
        perm: Vec<usize>,
        motion: BranchMotion,
    ) -> Result<Self> {
        if center.0 >= tree.vertex_count() {
            return Err(Error::invalid(format!(
                "center vertex {} out of range",
                center.0
            )));
        }
        if let BranchMotion::RadialContraction(rate) = motion {
            if !(rate.is_finite() && rate > 0.0 && rate < 1.0) {
                return Err(Error::invalid(format!(
                    "contraction rate must lie in (0, 1), got {rate}"
                )));
            }
        }

        // Root the tree at the center.
        let n = tree.vertex_count();
        let mut parent: Vec<Option<(EdgeId, VertexId)>> = vec![None; n];
        let mut radius = vec![0f64; n];
        let mut children: Vec<Vec<(EdgeId, usize)>> = vec![Vec::new(); n];
        {
            let mut seen = vec![false; n];
            seen[center.0] = true;
            let mut queue = std::collections::VecDeque::from([center.0]);
            while let Some(v) = queue.pop_front() {
                let mut incident: Vec<(EdgeId, usize)> = Vec::new();
                for i in 0..tree.edge_count() {
                    let e = tree.edge(EdgeId(i));
                    if e.a.0 == v {
                        incident.push((EdgeId(i), e.b.0));
                    } else if e.b.0 == v {
                        incident.push((EdgeId(i), e.a.0));
                    }
                }
                incident.sort_by_key(|(e, _)| e.0);
                for (e, w) in incident {
                    if !seen[w] {
                        seen[w] = true;
                        parent[w] = Some((e, VertexId(v)));
                        radius[w] = radius[v] + tree.edge(e).length;
                        children[v].push((e, w));
                        queue.push_back(w);
                    }
                }
            }
        }

        // Principal branches, in ascending root-edge order.
        let branch_roots: Vec<(EdgeId, usize)> = children[center.0].clone();
        let branch_count = branch_roots.len();
        if perm.len() != branch_count {
            return Err(Error::invalid(format!(
                "permutation over {} entries does not match {} branches",
                perm.len(),
                branch_count
            )));
        }
        let mut seen_targets = vec![false; branch_count];
        for &t in &perm {
            if t >= branch_count || seen_targets[t] {
                return Err(Error::invalid("branch_perm is not a permutation"));
            }
            seen_targets[t] = true;
        }

        // Structural signatures; permuted branches must match exactly.
        let signature_of = |root: (EdgeId, usize)| -> Vec<u8> {
            fn sig(
                tree: &MetricTree,
                children: &[Vec<(EdgeId, usize)>],
                edge: EdgeId,
                vertex: usize,
                out: &mut Vec<u8>,
            ) {
                out.extend_from_slice(&tree.edge(edge).length.to_bits().to_le_bytes());
                out.push(b'(');
                let mut kids: Vec<(Vec<u8>, EdgeId, usize)> = children[vertex]
                    .iter()
                    .map(|&(e, w)| {
                        let mut buf = Vec::new();
                        sig(tree, children, e, w, &mut buf);
                        (buf, e, w)
                    })
                    .collect();
                kids.sort();
                for (buf, _, _) in kids {
                    out.extend_from_slice(&buf);
                }
                out.push(b')');
            }
            let mut out = Vec::new();
            sig(&tree, &children, root.0, root.1, &mut out);
            out
        };
        let signatures: Vec<Vec<u8>> = branch_roots.iter().map(|&r| signature_of(r)).collect();
        for (i, &target) in perm.iter().enumerate() {
            if signatures[i] != signatures[target] {
                return Err(Error::invalid(format!(
                    "branches {i} and {target} are structurally incompatible"
                )));
            }
        }

        // Build the edge/vertex correspondence branch by branch.
        let mut vertex_image: Vec<u32> = (0..n as u32).collect();
        let mut edge_image: Vec<u32> = (0..tree.edge_count() as u32).collect();
        let mut edge_flip = vec![false; tree.edge_count()];

        struct Pairing<'a> {
            tree: &'a MetricTree,
            children: &'a [Vec<(EdgeId, usize)>],
            vertex_image: &'a mut Vec<u32>,
            edge_image: &'a mut Vec<u32>,
            edge_flip: &'a mut Vec<bool>,
        }
        impl Pairing<'_> {
            /// Pair the subtree entered by `src` (from its parent side)
            /// with the one entered by `dst`.
            fn pair(
                &mut self,
                src: (EdgeId, usize),
                dst: (EdgeId, usize),
                sigs: &BTreeMap<(usize, EdgeId), Vec<u8>>,
            ) {
                let (se, sv) = src;
                let (de, dv) = dst;
                self.edge_image[se.0] = de.0 as u32;
                // Parent side of the source edge maps to the parent side of
                // the target edge; flip when their stored orientations
                // disagree.
                let src_parent_is_a = self.tree.edge(se).b.0 == sv;
                let dst_parent_is_a = self.tree.edge(de).b.0 == dv;
                self.edge_flip[se.0] = src_parent_is_a != dst_parent_is_a;
                self.vertex_image[sv] = dv as u32;

                let mut src_kids: Vec<(&Vec<u8>, EdgeId, usize)> = self.children[sv]
                    .iter()
                    .map(|&(e, w)| (&sigs[&(w, e)], e, w))
                    .collect();
                let mut dst_kids: Vec<(&Vec<u8>, EdgeId, usize)> = self.children[dv]
                    .iter()
                    .map(|&(e, w)| (&sigs[&(w, e)], e, w))
                    .collect();
                src_kids.sort();
                dst_kids.sort();
                for (s, d) in src_kids.into_iter().zip(dst_kids) {
                    self.pair((s.1, s.2), (d.1, d.2), sigs);
                }
            }
        }

        // Precompute per-subtree signatures for the pairing order.
        let mut subtree_sigs: BTreeMap<(usize, EdgeId), Vec<u8>> = BTreeMap::new();
        {
            fn fill(
                tree: &MetricTree,
                children: &[Vec<(EdgeId, usize)>],
                edge: EdgeId,
                vertex: usize,
                out: &mut BTreeMap<(usize, EdgeId), Vec<u8>>,
            ) -> Vec<u8> {
                let mut buf = Vec::new();
                buf.extend_from_slice(&tree.edge(edge).length.to_bits().to_le_bytes());
                buf.push(b'(');
                let mut kids: Vec<Vec<u8>> = children[vertex]
                    .iter()
                    .map(|&(e, w)| fill(tree, children, e, w, out))
                    .collect();
                kids.sort();
                for k in kids {
                    buf.extend_from_slice(&k);
                }
                buf.push(b')');
                out.insert((vertex, edge), buf.clone());
                buf
            }
            for &(e, w) in &branch_roots {
                fill(&tree, &children, e, w, &mut subtree_sigs);
            }
        }

        let mut pairing = Pairing {
            tree: &tree,
            children: &children,
            vertex_image: &mut vertex_image,
            edge_image: &mut edge_image,
            edge_flip: &mut edge_flip,
        };
        for (i, &target) in perm.iter().enumerate() {
            if i != target {
                pairing.pair(branch_roots[i], branch_roots[target], &subtree_sigs);
            }
        }

        Ok(MonotoneSystem {
            space: SpaceRef::Tree(tree),
            center,
            perm,
            motion,
            vertex_image,
            edge_image,
            edge_flip,
            radius,
            parent,
        })
    }

    pub fn space(&self) -> &SpaceRef {
        &self.space
    }

    fn tree(&self) -> &MetricTree {
        match &self.space {
            SpaceRef::Tree(t) => t,
            _ => unreachable!("monotone systems live on trees"),
        }
    }

    pub fn center(&self) -> VertexId {
        self.center
    }

    pub fn center_point(&self) -> Point {
        self.tree()
            .vertex_point(self.center)
            .expect("center is a tree vertex")
    }

    pub fn motion(&self) -> BranchMotion {
        self.motion
    }

    pub fn descriptor(&self) -> String {
        let perm: Vec<String> = self.perm.iter().map(|p| p.to_string()).collect();
        let motion = match self.motion {
            BranchMotion::Identity => "identity".to_string(),
            BranchMotion::RadialContraction(rate) => format!("contract={rate}"),
        };
        format!(
            "monotone(center=v{},perm=[{}],{})",
            self.center.0,
            perm.join(","),
            motion
        )
    }

    /// Distance of a point from the center.
    pub fn radius_of(&self, p: &Point) -> f64 {
        match p.loc {
            Locator::Vertex(v) => self.radius[v.0],
            Locator::OnEdge(e, t) => {
                let edge = self.tree().edge(e);
                // The parent side is the endpoint closer to the center.
                let (pv, t_from_parent) = if self.radius[edge.a.0] <= self.radius[edge.b.0] {
                    (edge.a.0, t)
                } else {
                    (edge.b.0, 1.0 - t)
                };
                self.radius[pv] + t_from_parent * edge.length
            }
        }
    }

    /// One application of the map for a point known to be on the space.
    pub(crate) fn step_in_space(&self, p: &Point) -> Point {
        let mapped = self.apply_permutation(p);
        match self.motion {
            BranchMotion::Identity => mapped,
            BranchMotion::RadialContraction(rate) => {
                let target = rate * self.radius_of(&mapped);
                self.point_at_radius(&mapped, target)
            }
        }
    }

    pub fn step(&self, p: &Point) -> Result<Point> {
        if !self.space.contains(p) {
            return Err(Error::InvalidPoint("point not on the tree".into()));
        }
        Ok(self.step_in_space(p))
    }

    fn apply_permutation(&self, p: &Point) -> Point {
        let loc = match p.loc {
            Locator::Vertex(v) => Locator::Vertex(VertexId(self.vertex_image[v.0] as usize)),
            Locator::OnEdge(e, t) => {
                let image = EdgeId(self.edge_image[e.0] as usize);
                let t = if self.edge_flip[e.0] { 1.0 - t } else { t };
                Locator::OnEdge(image, t)
            }
        };
        Point {
            space: p.space,
            loc,
        }
    }

    /// The point at the given center distance on the geodesic from the
    /// center through `p` (requires `target ≤ radius_of(p)`).
    fn point_at_radius(&self, p: &Point, target: f64) -> Point {
        let tree = self.tree();
        // Find the edge of the center-bound path whose radius range covers
        // the target.
        let (mut edge, mut parent_v) = match p.loc {
            Locator::Vertex(v) => match self.parent[v.0] {
                None => return self.center_point(),
                Some((e, pv)) => (e, pv),
            },
            Locator::OnEdge(e, _) => {
                let stored = tree.edge(e);
                let pv = if self.radius[stored.a.0] <= self.radius[stored.b.0] {
                    stored.a
                } else {
                    stored.b
                };
                (e, pv)
            }
        };
        while self.radius[parent_v.0] > target {
            let (e, pv) = self.parent[parent_v.0].expect("walking toward the center");
            edge = e;
            parent_v = pv;
        }
        let stored = tree.edge(edge);
        let t_from_parent = (target - self.radius[parent_v.0]) / stored.length;
        let t = if stored.a == parent_v {
            t_from_parent
        } else {
            1.0 - t_from_parent
        };
        tree.edge_point(edge, t.clamp(0.0, 1.0))
            .expect("radius walk stays on the tree")
    }
}
