//! Contraction toward a designated point of a tree.
//!
//! `f(x)` is the point of the arc `[o, x]` at distance `rate · d(o, x)`
//! from `o`. The origin is the unique fixed point, every pair of points is
//! asymptotic, and `d(o, fⁿ(x)) = rateⁿ · d(o, x)`. Orbits never leave the
//! geodesic `[o, x]`, so a cursor precomputes that path once and slides a
//! marker toward the origin.

use std::sync::Arc;

use crate::topology::{ArcPath, MetricTree, Point, SpaceRef};
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct ContractingSystem {
    space: SpaceRef,
    tree: Arc<MetricTree>,
    origin: Point,
    rate: f64,
}

impl ContractingSystem {
    pub fn new(tree: Arc<MetricTree>, origin: Point, rate: f64) -> Result<Self> {
        if !(rate.is_finite() && rate > 0.0 && rate < 1.0) {
            return Err(Error::invalid(format!(
                "contraction rate must lie in (0, 1), got {rate}"
            )));
        }
        let space = SpaceRef::Tree(Arc::clone(&tree));
        if !space.contains(&origin) {
            return Err(Error::InvalidPoint("origin not on the tree".into()));
        }
        Ok(ContractingSystem {
            space,
            tree,
            origin,
            rate,
        })
    }

    pub fn space(&self) -> &SpaceRef {
        &self.space
    }

    pub fn origin(&self) -> Point {
        self.origin
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    /// Cursor state: the geodesic from the origin to `x` plus the current
    /// distance from the origin along it.
    pub(crate) fn slide_from(&self, x: &Point) -> Result<Slide> {
        let path = self.tree.arc(&self.origin, x)?;
        Ok(Slide::new(
            Arc::clone(&self.tree),
            self.origin,
            path,
            self.rate,
        ))
    }
}

/// Marker sliding along a fixed origin-rooted path.
pub struct Slide {
    tree: Arc<MetricTree>,
    origin: Point,
    path: ArcPath,
    /// Cumulative arclength at segment starts; last entry is the total.
    cuts: Vec<f64>,
    dist: f64,
    rate: f64,
    seg: usize,
}

impl Slide {
    fn new(tree: Arc<MetricTree>, origin: Point, path: ArcPath, rate: f64) -> Self {
        let mut cuts = Vec::with_capacity(path.segments.len() + 1);
        let mut acc = 0.0;
        cuts.push(0.0);
        for s in &path.segments {
            acc += (s.from - s.to).abs() * tree.edge(s.edge).length;
            cuts.push(acc);
        }
        let dist = *cuts.last().expect("nonempty cuts");
        let seg = path.segments.len().saturating_sub(1);
        Slide {
            tree,
            origin,
            path,
            cuts,
            dist,
            rate,
            seg,
        }
    }

    pub fn advance(&mut self) {
        self.dist *= self.rate;
    }

    pub fn current(&self) -> Point {
        if self.path.segments.is_empty() || self.dist <= 0.0 {
            return self.origin;
        }
        // Distances only shrink, so scan from the cached segment downward.
        let mut seg = self.seg.min(self.path.segments.len() - 1);
        while seg > 0 && self.cuts[seg] > self.dist {
            seg -= 1;
        }
        let s = &self.path.segments[seg];
        let len = self.cuts[seg + 1] - self.cuts[seg];
        let frac = ((self.dist - self.cuts[seg]) / len).clamp(0.0, 1.0);
        let t = s.from + (s.to - s.from) * frac;
        self.tree
            .edge_point(s.edge, t.clamp(0.0, 1.0))
            .expect("slide stays on the path")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::{EdgeId, MetricTree, VertexId};

    fn setup() -> (Arc<MetricTree>, ContractingSystem) {
        let tree = Arc::new(MetricTree::star(&[1.0, 1.0, 1.0]).unwrap());
        let origin = tree.vertex_point(VertexId(0)).unwrap();
        let sys = ContractingSystem::new(Arc::clone(&tree), origin, 0.5).unwrap();
        (tree, sys)
    }

    #[test]
    fn origin_is_fixed() {
        let (_, sys) = setup();
        let o = sys.origin();
        let mut slide = sys.slide_from(&o).unwrap();
        slide.advance();
        assert_eq!(slide.current().loc, o.loc);
    }

    #[test]
    fn geometric_decay() {
        let (tree, sys) = setup();
        // d(o, x) = 1 at the end of arm 0.
        let x = tree.vertex_point(VertexId(1)).unwrap();
        let mut slide = sys.slide_from(&x).unwrap();
        for _ in 0..3 {
            slide.advance();
        }
        let p = slide.current();
        let d = tree.distance(&sys.origin(), &p).unwrap();
        assert!((d - 0.125).abs() < 1e-12);
    }

    #[test]
    fn slide_crosses_junctions() {
        let (tree, sys) = setup();
        // Start on arm 1; the origin-rooted path is a single edge, but a
        // point on arm 2 contracted from a path through the center must
        // stay on its own geodesic.
        let x = tree.edge_point(EdgeId(2), 0.9).unwrap();
        let mut slide = sys.slide_from(&x).unwrap();
        assert_eq!(slide.current().loc, x.loc);
        slide.advance();
        let p = slide.current();
        let d = tree.distance(&sys.origin(), &p).unwrap();
        assert!((d - 0.45).abs() < 1e-12);
        match p.loc {
            crate::topology::Locator::OnEdge(e, _) => assert_eq!(e, EdgeId(2)),
            other => panic!("expected edge point, got {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_rate() {
        let tree = Arc::new(MetricTree::star(&[1.0]).unwrap());
        let origin = tree.vertex_point(VertexId(0)).unwrap();
        assert!(ContractingSystem::new(Arc::clone(&tree), origin, 1.0).is_err());
        assert!(ContractingSystem::new(tree, origin, 0.0).is_err());
    }
}
