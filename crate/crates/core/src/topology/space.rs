//! Finite metric trees and graphs: arcs, distances, point orders and the
//! first-point retraction.
//!
//! Points live either at a vertex or strictly inside an edge at a parameter
//! `t ∈ (0, 1)`; parameters exactly 0 or 1 normalize to vertex form so that
//! equality stays decidable. Trees answer distance queries through a binary
//! lifting LCA index; graphs (which are kept small: circles and glued
//! models) use an all-pairs table.

use std::sync::atomic::{AtomicU64, Ordering};

use crate::rng::SplitMix64;
use crate::{Error, Result, POINT_TOLERANCE};

static NEXT_SPACE_ID: AtomicU64 = AtomicU64::new(1);

/// Identity of a constructed space; used to reject cross-space queries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpaceId(u64);

impl SpaceId {
    fn fresh() -> Self {
        SpaceId(NEXT_SPACE_ID.fetch_add(1, Ordering::Relaxed))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeId(pub usize);

/// An undirected edge with a strictly positive length. The stored order of
/// the endpoints fixes the parameter direction: `t = 0` at `a`, `t = 1` at
/// `b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub a: VertexId,
    pub b: VertexId,
    pub length: f64,
}

/// Where a point sits on a space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Locator {
    Vertex(VertexId),
    /// Strictly interior position on an edge, `0 < t < 1`.
    OnEdge(EdgeId, f64),
}

/// A point of a metric model, tagged with the identity of its space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub space: SpaceId,
    pub loc: Locator,
}

impl Point {
    pub fn describe(&self) -> String {
        match self.loc {
            Locator::Vertex(v) => format!("v{}", v.0),
            Locator::OnEdge(e, t) => format!("e{}@{}", e.0, t),
        }
    }
}

/// Shared combinatorial structure of trees and graphs.
#[derive(Debug, Clone)]
pub(crate) struct Skeleton {
    vertex_count: usize,
    edges: Vec<Edge>,
    /// Per vertex: incident `(edge, other endpoint)`, sorted by edge id.
    adj: Vec<Vec<(EdgeId, VertexId)>>,
}

impl Skeleton {
    fn new(vertex_count: usize, edges: Vec<Edge>) -> Result<Self> {
        if vertex_count == 0 {
            return Err(Error::invalid("a space needs at least one vertex"));
        }
        let mut adj = vec![Vec::new(); vertex_count];
        for (i, e) in edges.iter().enumerate() {
            if e.a.0 >= vertex_count || e.b.0 >= vertex_count {
                return Err(Error::invalid(format!(
                    "edge {i} references a vertex outside 0..{vertex_count}"
                )));
            }
            if e.a == e.b {
                return Err(Error::invalid(format!("edge {i} is a self-loop")));
            }
            if !(e.length.is_finite() && e.length > 0.0) {
                return Err(Error::invalid(format!(
                    "edge {i} has non-positive length {}",
                    e.length
                )));
            }
            adj[e.a.0].push((EdgeId(i), e.b));
            adj[e.b.0].push((EdgeId(i), e.a));
        }
        let skel = Skeleton {
            vertex_count,
            edges,
            adj,
        };
        if !skel.is_connected() {
            return Err(Error::invalid("space is not connected"));
        }
        Ok(skel)
    }

    fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.vertex_count];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut visited = 1;
        while let Some(v) = stack.pop() {
            for &(_, w) in &self.adj[v] {
                if !seen[w.0] {
                    seen[w.0] = true;
                    visited += 1;
                    stack.push(w.0);
                }
            }
        }
        visited == self.vertex_count
    }

    pub(crate) fn edges(&self) -> &[Edge] {
        &self.edges
    }

    fn degree(&self, v: VertexId) -> usize {
        self.adj[v.0].len()
    }

    fn total_length(&self) -> f64 {
        self.edges.iter().map(|e| e.length).sum()
    }
}

/// Index for O(log V) tree distances: parents, root distances and a binary
/// lifting table for lowest common ancestors.
#[derive(Debug, Clone)]
struct TreeIndex {
    parent: Vec<Option<(EdgeId, VertexId)>>,
    depth_hops: Vec<u32>,
    depth_len: Vec<f64>,
    up: Vec<Vec<u32>>,
}

impl TreeIndex {
    fn build(skel: &Skeleton) -> Self {
        let n = skel.vertex_count;
        let mut parent: Vec<Option<(EdgeId, VertexId)>> = vec![None; n];
        let mut depth_hops = vec![0u32; n];
        let mut depth_len = vec![0f64; n];
        let mut order = Vec::with_capacity(n);
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            order.push(v);
            for &(e, w) in &skel.adj[v] {
                if !seen[w.0] {
                    seen[w.0] = true;
                    parent[w.0] = Some((e, VertexId(v)));
                    depth_hops[w.0] = depth_hops[v] + 1;
                    depth_len[w.0] = depth_len[v] + skel.edges[e.0].length;
                    stack.push(w.0);
                }
            }
        }

        let levels = (usize::BITS - n.leading_zeros()).max(1) as usize;
        let mut up = vec![vec![u32::MAX; n]; levels];
        for v in 0..n {
            up[0][v] = parent[v].map_or(u32::MAX, |(_, p)| p.0 as u32);
        }
        for k in 1..levels {
            for v in 0..n {
                let half = up[k - 1][v];
                up[k][v] = if half == u32::MAX {
                    u32::MAX
                } else {
                    up[k - 1][half as usize]
                };
            }
        }
        TreeIndex {
            parent,
            depth_hops,
            depth_len,
            up,
        }
    }

    fn lca(&self, mut u: usize, mut v: usize) -> usize {
        if self.depth_hops[u] < self.depth_hops[v] {
            std::mem::swap(&mut u, &mut v);
        }
        let mut diff = self.depth_hops[u] - self.depth_hops[v];
        let mut k = 0;
        while diff > 0 {
            if diff & 1 == 1 {
                u = self.up[k][u] as usize;
            }
            diff >>= 1;
            k += 1;
        }
        if u == v {
            return u;
        }
        for k in (0..self.up.len()).rev() {
            if self.up[k][u] != self.up[k][v] && self.up[k][u] != u32::MAX {
                u = self.up[k][u] as usize;
                v = self.up[k][v] as usize;
            }
        }
        self.up[0][u] as usize
    }

    fn vertex_distance(&self, u: usize, v: usize) -> f64 {
        if u == v {
            return 0.0;
        }
        let a = self.lca(u, v);
        self.depth_len[u] + self.depth_len[v] - 2.0 * self.depth_len[a]
    }
}

/// A finite metric tree: connected, acyclic, every edge of positive length.
#[derive(Debug, Clone)]
pub struct MetricTree {
    id: SpaceId,
    skel: Skeleton,
    index: TreeIndex,
}

impl MetricTree {
    pub fn new(vertex_count: usize, edges: Vec<(usize, usize, f64)>) -> Result<Self> {
        let edges: Vec<Edge> = edges
            .into_iter()
            .map(|(a, b, length)| Edge {
                a: VertexId(a),
                b: VertexId(b),
                length,
            })
            .collect();
        if edges.len() + 1 != vertex_count {
            return Err(Error::invalid(format!(
                "a tree on {vertex_count} vertices needs exactly {} edges, got {}",
                vertex_count - 1,
                edges.len()
            )));
        }
        let skel = Skeleton::new(vertex_count, edges)?;
        let index = TreeIndex::build(&skel);
        Ok(MetricTree {
            id: SpaceId::fresh(),
            skel,
            index,
        })
    }

    /// Star with `arms` edges of the given lengths glued at vertex 0; arm
    /// `i` ends at vertex `i + 1` via edge `i`.
    pub fn star(arm_lengths: &[f64]) -> Result<Self> {
        if arm_lengths.is_empty() {
            return Err(Error::invalid("a star needs at least one arm"));
        }
        let edges = arm_lengths
            .iter()
            .enumerate()
            .map(|(i, &len)| (0, i + 1, len))
            .collect();
        MetricTree::new(arm_lengths.len() + 1, edges)
    }

    /// The unit interval as a two-vertex tree (vertex 0 at coordinate 0).
    pub fn unit_interval() -> Self {
        MetricTree::new(2, vec![(0, 1, 1.0)]).expect("static model")
    }

    pub fn id(&self) -> SpaceId {
        self.id
    }

    pub fn vertex_count(&self) -> usize {
        self.skel.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.skel.edges.len()
    }

    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.skel.edges[e.0]
    }

    pub fn edges(&self) -> &[Edge] {
        self.skel.edges()
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.skel.degree(v)
    }

    pub fn total_length(&self) -> f64 {
        self.skel.total_length()
    }

    /// Farthest-point diameter of the tree (realized at leaf vertices).
    pub fn diameter(&self) -> f64 {
        let far = |start: usize| -> (usize, f64) {
            let mut best = (start, 0.0);
            for v in 0..self.skel.vertex_count {
                let d = self.index.vertex_distance(start, v);
                if d > best.1 {
                    best = (v, d);
                }
            }
            best
        };
        let (a, _) = far(0);
        far(a).1
    }

    pub fn vertex_point(&self, v: VertexId) -> Result<Point> {
        if v.0 >= self.skel.vertex_count {
            return Err(Error::InvalidPoint(format!("vertex {} out of range", v.0)));
        }
        Ok(Point {
            space: self.id,
            loc: Locator::Vertex(v),
        })
    }

    /// Point at parameter `t ∈ [0, 1]` along an edge; 0 and 1 normalize to
    /// the endpoint vertices.
    pub fn edge_point(&self, e: EdgeId, t: f64) -> Result<Point> {
        normalize_point(self.id, &self.skel, e, t)
    }

    fn check_point(&self, p: &Point) -> Result<()> {
        check_point(self.id, &self.skel, p)
    }

    /// Distance from the point to both endpoint vertices of its location:
    /// `(vertex, offset)` anchors used by the distance/arc routines.
    fn anchors(&self, p: &Point) -> Vec<(usize, f64)> {
        anchors(&self.skel, p)
    }

    /// Length of the unique arc between two points.
    pub fn distance(&self, x: &Point, y: &Point) -> Result<f64> {
        self.check_point(x)?;
        self.check_point(y)?;
        if let Some(d) = same_edge_distance(&self.skel, x, y) {
            return Ok(d);
        }
        let mut best = f64::INFINITY;
        for &(u, du) in &self.anchors(x) {
            for &(v, dv) in &self.anchors(y) {
                let d = du + self.index.vertex_distance(u, v) + dv;
                if d < best {
                    best = d;
                }
            }
        }
        Ok(best)
    }

    /// Unique arc between two points as an ordered segment list.
    pub fn arc(&self, x: &Point, y: &Point) -> Result<ArcPath> {
        self.check_point(x)?;
        self.check_point(y)?;
        if x.loc == y.loc {
            return Ok(ArcPath::degenerate());
        }
        if let (Locator::OnEdge(e1, t1), Locator::OnEdge(e2, t2)) = (x.loc, y.loc) {
            if e1 == e2 {
                let length = (t1 - t2).abs() * self.skel.edges[e1.0].length;
                return Ok(ArcPath {
                    segments: vec![ArcSegment {
                        edge: e1,
                        from: t1,
                        to: t2,
                    }],
                    length,
                });
            }
        }

        // Choose the exit vertices minimizing the total length, then build
        // the explicit segment list from the vertex path between them.
        let mut best: Option<(usize, f64, usize, f64, f64)> = None;
        for &(u, du) in &self.anchors(x) {
            for &(v, dv) in &self.anchors(y) {
                let d = du + self.index.vertex_distance(u, v) + dv;
                if best.is_none() || d < best.unwrap().4 {
                    best = Some((u, du, v, dv, d));
                }
            }
        }
        let (u, _, v, _, total) = best.unwrap();

        let mut segments = Vec::new();
        if let Locator::OnEdge(e, t) = x.loc {
            let to = if self.skel.edges[e.0].a.0 == u {
                0.0
            } else {
                1.0
            };
            segments.push(ArcSegment {
                edge: e,
                from: t,
                to,
            });
        }
        for (e, from_vertex) in self.vertex_path(u, v) {
            let from = if self.skel.edges[e.0].a.0 == from_vertex {
                0.0
            } else {
                1.0
            };
            segments.push(ArcSegment {
                edge: e,
                from,
                to: 1.0 - from,
            });
        }
        if let Locator::OnEdge(e, t) = y.loc {
            let from = if self.skel.edges[e.0].a.0 == v {
                0.0
            } else {
                1.0
            };
            segments.push(ArcSegment {
                edge: e,
                from,
                to: t,
            });
        }
        Ok(ArcPath {
            segments,
            length: total,
        })
    }

    /// Edges along the vertex path `u → v`, each tagged with the vertex it
    /// is entered from.
    fn vertex_path(&self, u: usize, v: usize) -> Vec<(EdgeId, usize)> {
        let a = self.index.lca(u, v);
        let mut up_part = Vec::new();
        let mut cur = u;
        while cur != a {
            let (e, p) = self.index.parent[cur].expect("below lca");
            up_part.push((e, cur));
            cur = p.0;
        }
        let mut down_part = Vec::new();
        let mut cur = v;
        while cur != a {
            let (e, p) = self.index.parent[cur].expect("below lca");
            down_part.push((e, p.0));
            cur = p.0;
        }
        down_part.reverse();
        up_part.extend(down_part);
        up_part
    }

    /// Local arm count: 1 at endpoints, 2 at regular points, ≥ 3 at branch
    /// points.
    pub fn order(&self, p: &Point) -> Result<u32> {
        self.check_point(p)?;
        Ok(match p.loc {
            Locator::Vertex(v) => self.skel.degree(v) as u32,
            Locator::OnEdge(..) => 2,
        })
    }

    /// First-point retraction onto a subtree: the identity on `A`, and the
    /// entry vertex of the arc into `A` everywhere else. Constant on each
    /// connected component of the complement.
    pub fn first_point(&self, a: &SubTree, x: &Point) -> Result<Point> {
        a.check_space(self)?;
        self.check_point(x)?;
        if a.contains_point(x) {
            return Ok(*x);
        }
        let target = self.vertex_point(VertexId(a.any_vertex()))?;
        let path = self.arc(x, &target)?;
        // x is outside A and A is edge-closed, so the arc enters A at a
        // vertex; scan the vertex sequence of the walk in order.
        for seg in &path.segments {
            let e = &self.skel.edges[seg.edge.0];
            for param in [seg.from, seg.to] {
                let vertex = if param == 0.0 {
                    Some(e.a)
                } else if param == 1.0 {
                    Some(e.b)
                } else {
                    None
                };
                if let Some(v) = vertex {
                    if a.vertices.contains(&v.0) {
                        return self.vertex_point(v);
                    }
                }
            }
        }
        Err(Error::InvalidPoint(
            "retraction walk never entered the subtree".into(),
        ))
    }

    pub fn sample_point(&self, rng: &mut SplitMix64) -> Point {
        sample_point(self.id, &self.skel, rng)
    }
}

/// A connected subtree given by whole edges (plus their endpoints) or a
/// single vertex.
#[derive(Debug, Clone)]
pub struct SubTree {
    space: SpaceId,
    vertices: std::collections::BTreeSet<usize>,
    edges: std::collections::BTreeSet<usize>,
}

impl SubTree {
    /// Subtree spanned by a set of whole edges.
    pub fn from_edges(tree: &MetricTree, edges: &[EdgeId]) -> Result<Self> {
        if edges.is_empty() {
            return Err(Error::invalid("subtree needs at least one edge or vertex"));
        }
        let mut vertices = std::collections::BTreeSet::new();
        let mut edge_set = std::collections::BTreeSet::new();
        for e in edges {
            if e.0 >= tree.edge_count() {
                return Err(Error::invalid(format!("edge {} out of range", e.0)));
            }
            edge_set.insert(e.0);
            let edge = tree.edge(*e);
            vertices.insert(edge.a.0);
            vertices.insert(edge.b.0);
        }
        let sub = SubTree {
            space: tree.id(),
            vertices,
            edges: edge_set,
        };
        if !sub.is_connected(tree) {
            return Err(Error::invalid("subtree is not connected"));
        }
        Ok(sub)
    }

    pub fn single_vertex(tree: &MetricTree, v: VertexId) -> Result<Self> {
        if v.0 >= tree.vertex_count() {
            return Err(Error::invalid(format!("vertex {} out of range", v.0)));
        }
        let mut vertices = std::collections::BTreeSet::new();
        vertices.insert(v.0);
        Ok(SubTree {
            space: tree.id(),
            vertices,
            edges: std::collections::BTreeSet::new(),
        })
    }

    fn is_connected(&self, tree: &MetricTree) -> bool {
        let start = *self.vertices.iter().next().expect("nonempty");
        let mut seen = std::collections::BTreeSet::new();
        seen.insert(start);
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for &(e, w) in &tree.skel.adj[v] {
                if self.edges.contains(&e.0) && !seen.contains(&w.0) {
                    seen.insert(w.0);
                    stack.push(w.0);
                }
            }
        }
        seen.len() == self.vertices.len()
    }

    fn check_space(&self, tree: &MetricTree) -> Result<()> {
        if self.space != tree.id() {
            return Err(Error::SpaceMismatch);
        }
        Ok(())
    }

    fn any_vertex(&self) -> usize {
        *self.vertices.iter().next().expect("nonempty")
    }

    pub fn contains_point(&self, p: &Point) -> bool {
        match p.loc {
            Locator::Vertex(v) => self.vertices.contains(&v.0),
            Locator::OnEdge(e, _) => self.edges.contains(&e.0),
        }
    }
}

/// An ordered run of edge segments with its total length.
#[derive(Debug, Clone, PartialEq)]
pub struct ArcPath {
    pub segments: Vec<ArcSegment>,
    pub length: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArcSegment {
    pub edge: EdgeId,
    pub from: f64,
    pub to: f64,
}

impl ArcPath {
    pub fn degenerate() -> Self {
        ArcPath {
            segments: Vec::new(),
            length: 0.0,
        }
    }

    /// The same arc walked in the opposite direction.
    pub fn reversed(&self) -> ArcPath {
        ArcPath {
            segments: self
                .segments
                .iter()
                .rev()
                .map(|s| ArcSegment {
                    edge: s.edge,
                    from: s.to,
                    to: s.from,
                })
                .collect(),
            length: self.length,
        }
    }
}

/// A finite metric graph: connected, cycles permitted, multi-edges allowed
/// with distinct edge ids. Each edge carries an orientation flag so circle
/// models can define a winding direction.
#[derive(Debug, Clone)]
pub struct MetricGraph {
    id: SpaceId,
    skel: Skeleton,
    orientation: Vec<bool>,
    /// Dense all-pairs vertex distances (graphs here are small models).
    apsp: Vec<f64>,
}

/// Vertex budget for the dense all-pairs table.
const MAX_GRAPH_VERTICES: usize = 4096;

impl MetricGraph {
    pub fn new(vertex_count: usize, edges: Vec<(usize, usize, f64)>) -> Result<Self> {
        let n = edges.len();
        Self::with_orientation(vertex_count, edges, vec![true; n])
    }

    pub fn with_orientation(
        vertex_count: usize,
        edges: Vec<(usize, usize, f64)>,
        orientation: Vec<bool>,
    ) -> Result<Self> {
        if orientation.len() != edges.len() {
            return Err(Error::invalid("one orientation flag per edge"));
        }
        if vertex_count > MAX_GRAPH_VERTICES {
            return Err(Error::capacity(format!(
                "graph models are capped at {MAX_GRAPH_VERTICES} vertices"
            )));
        }
        let edges: Vec<Edge> = edges
            .into_iter()
            .map(|(a, b, length)| Edge {
                a: VertexId(a),
                b: VertexId(b),
                length,
            })
            .collect();
        let skel = Skeleton::new(vertex_count, edges)?;
        let apsp = all_pairs(&skel);
        Ok(MetricGraph {
            id: SpaceId::fresh(),
            skel,
            orientation,
            apsp,
        })
    }

    /// The unit circle as two arcs of length 1/2: positions `[0, 1/2]` run
    /// along edge 0 from vertex 0, positions `[1/2, 1)` along edge 1 back.
    pub fn unit_circle() -> Self {
        MetricGraph::new(2, vec![(0, 1, 0.5), (1, 0, 0.5)]).expect("static model")
    }

    pub fn id(&self) -> SpaceId {
        self.id
    }

    pub fn vertex_count(&self) -> usize {
        self.skel.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.skel.edges.len()
    }

    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.skel.edges[e.0]
    }

    pub fn orientation(&self, e: EdgeId) -> bool {
        self.orientation[e.0]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.skel.degree(v)
    }

    pub fn total_length(&self) -> f64 {
        self.skel.total_length()
    }

    pub fn vertex_point(&self, v: VertexId) -> Result<Point> {
        if v.0 >= self.skel.vertex_count {
            return Err(Error::InvalidPoint(format!("vertex {} out of range", v.0)));
        }
        Ok(Point {
            space: self.id,
            loc: Locator::Vertex(v),
        })
    }

    pub fn edge_point(&self, e: EdgeId, t: f64) -> Result<Point> {
        normalize_point(self.id, &self.skel, e, t)
    }

    fn check_point(&self, p: &Point) -> Result<()> {
        check_point(self.id, &self.skel, p)
    }

    fn vertex_distance(&self, u: usize, v: usize) -> f64 {
        self.apsp[u * self.skel.vertex_count + v]
    }

    /// Shortest-path distance between two points.
    pub fn distance(&self, x: &Point, y: &Point) -> Result<f64> {
        self.check_point(x)?;
        self.check_point(y)?;
        let mut best = f64::INFINITY;
        if let Some(d) = same_edge_distance(&self.skel, x, y) {
            best = d; // direct route inside the edge; cycles may still beat it
        }
        for &(u, du) in &anchors(&self.skel, x) {
            for &(v, dv) in &anchors(&self.skel, y) {
                let d = du + self.vertex_distance(u, v) + dv;
                if d < best {
                    best = d;
                }
            }
        }
        Ok(best)
    }

    /// The arc between two points if it is unique; on a graph with cycles
    /// two simple paths may exist, in which case the query is rejected
    /// rather than an arbitrary geodesic being chosen.
    pub fn arc(&self, x: &Point, y: &Point) -> Result<ArcPath> {
        self.check_point(x)?;
        self.check_point(y)?;
        if x.loc == y.loc {
            return Ok(ArcPath::degenerate());
        }
        let paths = self.simple_paths(x, y, 2);
        match paths.len() {
            1 => Ok(paths.into_iter().next().unwrap()),
            n => Err(Error::ArcNotUnique { candidates: n }),
        }
    }

    /// Enumerate simple paths between two points, stopping after `cap`.
    ///
    /// A simple path may use two disjoint portions of one edge when both
    /// endpoints sit inside it (the two arcs of a circle between two
    /// interior points), which is exactly the situation that makes `arc`
    /// ambiguous on cyclic models.
    fn simple_paths(&self, x: &Point, y: &Point, cap: usize) -> Vec<ArcPath> {
        struct Dfs<'a> {
            graph: &'a MetricGraph,
            target: Point,
            cap: usize,
            found: Vec<ArcPath>,
            used_edges: Vec<bool>,
            used_vertices: Vec<bool>,
            segments: Vec<ArcSegment>,
            /// Set when x is interior to an edge: (edge, x param, exit param).
            start_portion: Option<(EdgeId, f64, f64)>,
        }

        impl Dfs<'_> {
            fn record(&mut self, extra: Option<ArcSegment>) {
                let mut segments = self.segments.clone();
                if let Some(seg) = extra {
                    segments.push(seg);
                }
                let length = segments
                    .iter()
                    .map(|s| (s.from - s.to).abs() * self.graph.skel.edges[s.edge.0].length)
                    .sum();
                self.found.push(ArcPath { segments, length });
            }

            fn run(&mut self, v: usize) {
                if self.found.len() >= self.cap {
                    return;
                }
                match self.target.loc {
                    Locator::Vertex(tv) if tv.0 == v => {
                        self.record(None);
                        return;
                    }
                    Locator::OnEdge(te, tt) => {
                        let e = self.graph.skel.edges[te.0];
                        for (end, from) in [(e.a.0, 0.0), (e.b.0, 1.0)] {
                            if end != v {
                                continue;
                            }
                            // Entering the target edge; if x left through the
                            // same edge the two portions must not overlap.
                            let disjoint = match self.start_portion {
                                Some((se, sx, _)) if se == te => {
                                    let exit = self.start_portion.unwrap().2;
                                    if exit == 0.0 {
                                        from == 1.0 && sx < tt
                                    } else {
                                        from == 0.0 && tt < sx
                                    }
                                }
                                Some(_) | None => !self.used_edges[te.0],
                            };
                            if disjoint {
                                self.record(Some(ArcSegment {
                                    edge: te,
                                    from,
                                    to: tt,
                                }));
                                if self.found.len() >= self.cap {
                                    return;
                                }
                            }
                        }
                    }
                    _ => {}
                }
                for &(e, w) in &self.graph.skel.adj[v] {
                    if self.used_edges[e.0] || self.used_vertices[w.0] {
                        continue;
                    }
                    self.used_edges[e.0] = true;
                    self.used_vertices[w.0] = true;
                    let from = if self.graph.skel.edges[e.0].a.0 == v {
                        0.0
                    } else {
                        1.0
                    };
                    self.segments.push(ArcSegment {
                        edge: e,
                        from,
                        to: 1.0 - from,
                    });
                    self.run(w.0);
                    self.segments.pop();
                    self.used_vertices[w.0] = false;
                    self.used_edges[e.0] = false;
                }
            }
        }

        // Start states for routes leaving x through a vertex:
        // (vertex, used portion of x's edge, leading partial segment).
        type StartState = (usize, Option<(EdgeId, f64, f64)>, Option<ArcSegment>);

        let mut found = Vec::new();

        // Direct in-edge route when both points share an edge.
        if let (Locator::OnEdge(e1, t1), Locator::OnEdge(e2, t2)) = (x.loc, y.loc) {
            if e1 == e2 {
                found.push(ArcPath {
                    segments: vec![ArcSegment {
                        edge: e1,
                        from: t1,
                        to: t2,
                    }],
                    length: (t1 - t2).abs() * self.skel.edges[e1.0].length,
                });
            }
        }

        // Routes that leave x through a vertex.
        let starts: Vec<StartState> = match x.loc {
            Locator::Vertex(v) => vec![(v.0, None, None)],
            Locator::OnEdge(e, t) => {
                let edge = self.skel.edges[e.0];
                vec![
                    (
                        edge.a.0,
                        Some((e, t, 0.0)),
                        Some(ArcSegment {
                            edge: e,
                            from: t,
                            to: 0.0,
                        }),
                    ),
                    (
                        edge.b.0,
                        Some((e, t, 1.0)),
                        Some(ArcSegment {
                            edge: e,
                            from: t,
                            to: 1.0,
                        }),
                    ),
                ]
            }
        };

        for (start, portion, first_seg) in starts {
            if found.len() >= cap {
                break;
            }
            let mut dfs = Dfs {
                graph: self,
                target: *y,
                cap: cap - found.len(),
                found: Vec::new(),
                used_edges: vec![false; self.skel.edges.len()],
                used_vertices: vec![false; self.skel.vertex_count],
                segments: Vec::new(),
                start_portion: portion,
            };
            if let Some((e, _, _)) = portion {
                dfs.used_edges[e.0] = true;
            }
            if let Some(seg) = first_seg {
                dfs.segments.push(seg);
            }
            dfs.used_vertices[start] = true;
            dfs.run(start);
            found.extend(dfs.found);
        }
        found.truncate(cap);
        found
    }

    /// Local arm count of a point.
    pub fn order(&self, p: &Point) -> Result<u32> {
        self.check_point(p)?;
        Ok(match p.loc {
            Locator::Vertex(v) => self.skel.degree(v) as u32,
            Locator::OnEdge(..) => 2,
        })
    }

    pub fn sample_point(&self, rng: &mut SplitMix64) -> Point {
        sample_point(self.id, &self.skel, rng)
    }
}

fn all_pairs(skel: &Skeleton) -> Vec<f64> {
    let n = skel.vertex_count;
    let mut d = vec![f64::INFINITY; n * n];
    for v in 0..n {
        d[v * n + v] = 0.0;
    }
    for e in &skel.edges {
        let (a, b) = (e.a.0, e.b.0);
        if e.length < d[a * n + b] {
            d[a * n + b] = e.length;
            d[b * n + a] = e.length;
        }
    }
    for k in 0..n {
        for i in 0..n {
            let dik = d[i * n + k];
            if !dik.is_finite() {
                continue;
            }
            for j in 0..n {
                let cand = dik + d[k * n + j];
                if cand < d[i * n + j] {
                    d[i * n + j] = cand;
                }
            }
        }
    }
    d
}

fn normalize_point(id: SpaceId, skel: &Skeleton, e: EdgeId, t: f64) -> Result<Point> {
    if e.0 >= skel.edges.len() {
        return Err(Error::InvalidPoint(format!("edge {} out of range", e.0)));
    }
    if !t.is_finite() || !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidPoint(format!("parameter {t} outside [0, 1]")));
    }
    let loc = if t == 0.0 {
        Locator::Vertex(skel.edges[e.0].a)
    } else if t == 1.0 {
        Locator::Vertex(skel.edges[e.0].b)
    } else {
        Locator::OnEdge(e, t)
    };
    Ok(Point { space: id, loc })
}

fn check_point(id: SpaceId, skel: &Skeleton, p: &Point) -> Result<()> {
    if p.space != id {
        return Err(Error::SpaceMismatch);
    }
    match p.loc {
        Locator::Vertex(v) if v.0 < skel.vertex_count => Ok(()),
        Locator::OnEdge(e, t) if e.0 < skel.edges.len() && t > 0.0 && t < 1.0 => Ok(()),
        _ => Err(Error::InvalidPoint(format!("{:?}", p.loc))),
    }
}

fn anchors(skel: &Skeleton, p: &Point) -> Vec<(usize, f64)> {
    match p.loc {
        Locator::Vertex(v) => vec![(v.0, 0.0)],
        Locator::OnEdge(e, t) => {
            let edge = &skel.edges[e.0];
            vec![
                (edge.a.0, t * edge.length),
                (edge.b.0, (1.0 - t) * edge.length),
            ]
        }
    }
}

fn same_edge_distance(skel: &Skeleton, x: &Point, y: &Point) -> Option<f64> {
    match (x.loc, y.loc) {
        (Locator::OnEdge(e1, t1), Locator::OnEdge(e2, t2)) if e1 == e2 => {
            Some((t1 - t2).abs() * skel.edges[e1.0].length)
        }
        (Locator::Vertex(v1), Locator::Vertex(v2)) if v1 == v2 => Some(0.0),
        _ => None,
    }
}

fn sample_point(id: SpaceId, skel: &Skeleton, rng: &mut SplitMix64) -> Point {
    let total = skel.total_length();
    if skel.edges.is_empty() || total <= 0.0 {
        return Point {
            space: id,
            loc: Locator::Vertex(VertexId(0)),
        };
    }
    let mut target = rng.next_f64() * total;
    for (i, e) in skel.edges.iter().enumerate() {
        if target <= e.length || i + 1 == skel.edges.len() {
            let mut t = (target / e.length).clamp(0.0, 1.0);
            // Keep samples strictly interior so they stay in edge form.
            if t <= 0.0 {
                t = 0.5 * f64::EPSILON.max(1e-9);
            }
            if t >= 1.0 {
                t = 1.0 - 1e-9;
            }
            return Point {
                space: id,
                loc: Locator::OnEdge(EdgeId(i), t),
            };
        }
        target -= e.length;
    }
    unreachable!("edge scan covers the total length")
}

/// Point-equality at the crate tolerance: same space and distance below
/// [`POINT_TOLERANCE`].
pub fn points_equal(distance: f64) -> bool {
    distance <= POINT_TOLERANCE
}
