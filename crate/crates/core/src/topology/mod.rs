//! Continuum models: finite metric trees, finite graphs (including the
//! circle) and the truncated universal dendrite of order 3, together with
//! arcs, distances, point orders and first-point retractions.

pub mod address;
pub mod dendrite;
pub mod space;
pub mod text;

pub use address::{Dyadic, DyadicAddress};
pub use dendrite::{DendriteArc, UniversalDendriteModel};
pub use space::{
    ArcPath, ArcSegment, Edge, EdgeId, Locator, MetricGraph, MetricTree, Point, SpaceId, SubTree,
    VertexId,
};

use std::sync::Arc;

use crate::rng::SplitMix64;
use crate::{Error, Result};

/// Shared handle to any of the metric models. Spaces are immutable after
/// construction, so handles are freely clonable across threads.
#[derive(Debug, Clone)]
pub enum SpaceRef {
    Tree(Arc<MetricTree>),
    Graph(Arc<MetricGraph>),
    Dendrite(Arc<UniversalDendriteModel>),
}

impl SpaceRef {
    pub fn from_tree(tree: MetricTree) -> Self {
        SpaceRef::Tree(Arc::new(tree))
    }

    pub fn from_graph(graph: MetricGraph) -> Self {
        SpaceRef::Graph(Arc::new(graph))
    }

    pub fn from_dendrite(model: UniversalDendriteModel) -> Self {
        SpaceRef::Dendrite(Arc::new(model))
    }

    pub fn id(&self) -> SpaceId {
        match self {
            SpaceRef::Tree(t) => t.id(),
            SpaceRef::Graph(g) => g.id(),
            SpaceRef::Dendrite(d) => d.tree().id(),
        }
    }

    /// Underlying tree when the model is tree-shaped.
    pub fn as_tree(&self) -> Option<&MetricTree> {
        match self {
            SpaceRef::Tree(t) => Some(t),
            SpaceRef::Dendrite(d) => Some(d.tree()),
            SpaceRef::Graph(_) => None,
        }
    }

    pub fn as_graph(&self) -> Option<&MetricGraph> {
        match self {
            SpaceRef::Graph(g) => Some(g),
            _ => None,
        }
    }

    pub fn distance(&self, x: &Point, y: &Point) -> Result<f64> {
        match self {
            SpaceRef::Tree(t) => t.distance(x, y),
            SpaceRef::Dendrite(d) => d.tree().distance(x, y),
            SpaceRef::Graph(g) => g.distance(x, y),
        }
    }

    pub fn arc(&self, x: &Point, y: &Point) -> Result<ArcPath> {
        match self {
            SpaceRef::Tree(t) => t.arc(x, y),
            SpaceRef::Dendrite(d) => d.tree().arc(x, y),
            SpaceRef::Graph(g) => g.arc(x, y),
        }
    }

    pub fn order(&self, p: &Point) -> Result<u32> {
        match self {
            SpaceRef::Tree(t) => t.order(p),
            SpaceRef::Dendrite(d) => d.tree().order(p),
            SpaceRef::Graph(g) => g.order(p),
        }
    }

    pub fn edge_count(&self) -> usize {
        match self {
            SpaceRef::Tree(t) => t.edge_count(),
            SpaceRef::Dendrite(d) => d.tree().edge_count(),
            SpaceRef::Graph(g) => g.edge_count(),
        }
    }

    pub fn edge_length(&self, e: EdgeId) -> Result<f64> {
        let count = self.edge_count();
        if e.0 >= count {
            return Err(Error::invalid(format!("edge {} out of range", e.0)));
        }
        Ok(match self {
            SpaceRef::Tree(t) => t.edge(e).length,
            SpaceRef::Dendrite(d) => d.tree().edge(e).length,
            SpaceRef::Graph(g) => g.edge(e).length,
        })
    }

    pub fn edge_point(&self, e: EdgeId, t: f64) -> Result<Point> {
        match self {
            SpaceRef::Tree(tr) => tr.edge_point(e, t),
            SpaceRef::Dendrite(d) => d.tree().edge_point(e, t),
            SpaceRef::Graph(g) => g.edge_point(e, t),
        }
    }

    pub fn vertex_point(&self, v: VertexId) -> Result<Point> {
        match self {
            SpaceRef::Tree(t) => t.vertex_point(v),
            SpaceRef::Dendrite(d) => d.tree().vertex_point(v),
            SpaceRef::Graph(g) => g.vertex_point(v),
        }
    }

    pub fn total_length(&self) -> f64 {
        match self {
            SpaceRef::Tree(t) => t.total_length(),
            SpaceRef::Dendrite(d) => d.total_length(),
            SpaceRef::Graph(g) => g.total_length(),
        }
    }

    /// Upper estimate of the diameter, exact on trees. Used to normalize
    /// coordinate test functions.
    pub fn diameter(&self) -> f64 {
        match self {
            SpaceRef::Tree(t) => t.diameter(),
            SpaceRef::Dendrite(d) => d.tree().diameter(),
            // Small graph models: vertex eccentricity plus slack for edge
            // interiors (exact for the two-arc circle).
            SpaceRef::Graph(g) => {
                let mut best: f64 = 0.0;
                for u in 0..g.vertex_count() {
                    for v in 0..g.vertex_count() {
                        let pu = g.vertex_point(VertexId(u)).expect("valid");
                        let pv = g.vertex_point(VertexId(v)).expect("valid");
                        best = best.max(g.distance(&pu, &pv).expect("valid"));
                    }
                }
                let longest = (0..g.edge_count())
                    .map(|i| g.edge(EdgeId(i)).length)
                    .fold(0.0f64, f64::max);
                best.max(longest / 2.0)
            }
        }
    }

    /// Whether the point belongs to this space (id and locator validity).
    pub fn contains(&self, p: &Point) -> bool {
        if p.space != self.id() {
            return false;
        }
        match p.loc {
            Locator::Vertex(v) => {
                v.0 < match self {
                    SpaceRef::Tree(t) => t.vertex_count(),
                    SpaceRef::Dendrite(d) => d.tree().vertex_count(),
                    SpaceRef::Graph(g) => g.vertex_count(),
                }
            }
            Locator::OnEdge(e, t) => e.0 < self.edge_count() && t > 0.0 && t < 1.0,
        }
    }

    /// Uniform sample with respect to arclength.
    pub fn sample_point(&self, rng: &mut SplitMix64) -> Point {
        match self {
            SpaceRef::Tree(t) => t.sample_point(rng),
            SpaceRef::Dendrite(d) => d.tree().sample_point(rng),
            SpaceRef::Graph(g) => g.sample_point(rng),
        }
    }
}
