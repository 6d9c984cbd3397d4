//! Möbius-weighted averages over orbits, the test functions they are
//! evaluated against, entropy estimation, pair classification and the
//! bound decompositions used to cross-check the theory numerically.

mod average;
mod decompose;
mod entropy;
mod pairs;

pub use average::{mobius_average, uniform_sup, ConvergenceReport, UniformReport};
pub use decompose::{
    component_case_split, ergodic_bound_decomposition, BoundDecomposition, CaseSplitReport,
    ComponentClass, ComponentRow,
};
pub use entropy::{entropy_estimate, exact_max_separated, EntropyReport, SeparationCell};
pub use pairs::{
    classify_pair, transfer_deviation, PairClassification, PairVerdict, TransferReport,
};

use crate::topology::{Locator, Point, SpaceRef};
use crate::{Error, Result, POINT_TOLERANCE};

/// An open connected region of a space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Region {
    /// Open sub-arc of a single edge: parameters strictly between `lo` and
    /// `hi`. Edge interiors contain no branch points, so these arcs are
    /// free by construction.
    FreeArc {
        edge: crate::topology::EdgeId,
        lo: f64,
        hi: f64,
    },
    /// The connected component of `space ∖ {cut}` containing `side`
    /// (tree-shaped spaces only).
    ComplementComponent { cut: Point, side: Point },
}

/// A bounded observable evaluated along orbits.
#[derive(Debug, Clone)]
pub enum TestFunction {
    /// Indicator of an open region, smoothed on the boundary: 1 inside,
    /// `1/order(x)` on the boundary of the closure, 0 outside the closure.
    RegionIndicator { region: Region },
    /// Normalized distance from a base point: `d(base, x) / scale`.
    DistanceFrom { base: Point, scale: f64 },
    /// Constant function.
    Constant { value: f64 },
    /// Values pinned at specific points (matched at the point tolerance),
    /// with a default elsewhere. Meant for finite-orbit systems.
    Tabulated {
        anchors: Vec<(Point, f64)>,
        default: f64,
    },
}

impl TestFunction {
    /// Region indicator, validating the region against the space.
    pub fn region_indicator(space: &SpaceRef, region: Region) -> Result<Self> {
        match region {
            Region::FreeArc { edge, lo, hi } => {
                if edge.0 >= space.edge_count() {
                    return Err(Error::invalid(format!("edge {} out of range", edge.0)));
                }
                if !(lo.is_finite()
                    && hi.is_finite()
                    && (0.0..=1.0).contains(&lo)
                    && (0.0..=1.0).contains(&hi)
                    && lo < hi)
                {
                    return Err(Error::invalid(format!(
                        "free arc needs 0 ≤ lo < hi ≤ 1, got [{lo}, {hi}]"
                    )));
                }
            }
            Region::ComplementComponent { cut, side } => {
                if space.as_tree().is_none() {
                    return Err(Error::invalid(
                        "complement-component regions require a tree-shaped space",
                    ));
                }
                if !space.contains(&cut) || !space.contains(&side) {
                    return Err(Error::InvalidPoint("region points not on the space".into()));
                }
                if space.distance(&cut, &side)? <= POINT_TOLERANCE {
                    return Err(Error::invalid("cut point and side marker must be distinct"));
                }
            }
        }
        Ok(TestFunction::RegionIndicator { region })
    }

    /// Normalized distance from a base point; `scale` defaults to the
    /// space diameter when not finite/positive.
    pub fn distance_from(space: &SpaceRef, base: Point, scale: Option<f64>) -> Result<Self> {
        if !space.contains(&base) {
            return Err(Error::InvalidPoint("base point not on the space".into()));
        }
        let scale = match scale {
            Some(s) if s.is_finite() && s > 0.0 => s,
            Some(s) => return Err(Error::invalid(format!("scale must be positive, got {s}"))),
            None => {
                let d = space.diameter();
                if d > 0.0 {
                    d
                } else {
                    1.0
                }
            }
        };
        Ok(TestFunction::DistanceFrom { base, scale })
    }

    pub fn constant(value: f64) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::invalid("constant must be finite"));
        }
        Ok(TestFunction::Constant { value })
    }

    pub fn tabulated(anchors: Vec<(Point, f64)>, default: f64) -> Result<Self> {
        if anchors.iter().any(|(_, v)| !v.is_finite()) || !default.is_finite() {
            return Err(Error::invalid("tabulated values must be finite"));
        }
        Ok(TestFunction::Tabulated { anchors, default })
    }

    /// Evaluate at a point of the given space.
    pub fn evaluate(&self, space: &SpaceRef, p: &Point) -> f64 {
        match self {
            TestFunction::Constant { value } => *value,
            TestFunction::DistanceFrom { base, scale } => {
                space.distance(base, p).map(|d| d / scale).unwrap_or(0.0)
            }
            TestFunction::Tabulated { anchors, default } => {
                for (q, v) in anchors {
                    if let Ok(d) = space.distance(q, p) {
                        if d <= POINT_TOLERANCE {
                            return *v;
                        }
                    }
                }
                *default
            }
            TestFunction::RegionIndicator { region } => match region {
                Region::FreeArc { edge, lo, hi } => evaluate_free_arc(space, *edge, *lo, *hi, p),
                Region::ComplementComponent { cut, side } => {
                    evaluate_complement(space, cut, side, p)
                }
            },
        }
    }

    /// Upper bound on `|φ|` over the space.
    pub fn sup_norm(&self, space: &SpaceRef) -> f64 {
        match self {
            TestFunction::Constant { value } => value.abs(),
            TestFunction::RegionIndicator { .. } => 1.0,
            TestFunction::DistanceFrom { scale, .. } => space.diameter() / scale,
            TestFunction::Tabulated { anchors, default } => anchors
                .iter()
                .map(|(_, v)| v.abs())
                .fold(default.abs(), f64::max),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            TestFunction::Constant { value } => format!("const({value})"),
            TestFunction::DistanceFrom { base, scale } => {
                format!("dist-from({},scale={})", base.describe(), scale)
            }
            TestFunction::Tabulated { anchors, .. } => format!("tabulated({})", anchors.len()),
            TestFunction::RegionIndicator { region } => match region {
                Region::FreeArc { edge, lo, hi } => {
                    format!("indicator(e{}:{lo}..{hi})", edge.0)
                }
                Region::ComplementComponent { cut, side } => format!(
                    "indicator(split@{},side={})",
                    cut.describe(),
                    side.describe()
                ),
            },
        }
    }
}

/// Three-case rule for an open free arc `(lo, hi)` on one edge:
/// 1 strictly inside, `1/order` at the two closure endpoints, 0 elsewhere.
fn evaluate_free_arc(
    space: &SpaceRef,
    edge: crate::topology::EdgeId,
    lo: f64,
    hi: f64,
    p: &Point,
) -> f64 {
    let edge_len = space.edge_length(edge).unwrap_or(1.0);
    let tol = POINT_TOLERANCE / edge_len.max(POINT_TOLERANCE);
    let boundary = |t: f64| -> bool { (t - lo).abs() <= tol || (t - hi).abs() <= tol };
    match p.loc {
        Locator::OnEdge(e, t) if e == edge => {
            if boundary(t) {
                1.0 / space.order(p).unwrap_or(2) as f64
            } else if t > lo && t < hi {
                1.0
            } else {
                0.0
            }
        }
        Locator::OnEdge(..) => 0.0,
        Locator::Vertex(v) => {
            // A vertex belongs to the closure only when the arc runs into
            // one of its edge's endpoints.
            let edge_obj_a_is_v = space
                .edge_point(edge, 0.0)
                .map(|q| q.loc == Locator::Vertex(v))
                .unwrap_or(false);
            let edge_obj_b_is_v = space
                .edge_point(edge, 1.0)
                .map(|q| q.loc == Locator::Vertex(v))
                .unwrap_or(false);
            if (edge_obj_a_is_v && lo <= tol) || (edge_obj_b_is_v && hi >= 1.0 - tol) {
                1.0 / space.order(p).unwrap_or(2) as f64
            } else {
                0.0
            }
        }
    }
}

/// Three-case rule for a complement component: 1 in the component of
/// `side`, `1/order(cut)` at the cut point, 0 in the other components.
fn evaluate_complement(space: &SpaceRef, cut: &Point, side: &Point, p: &Point) -> f64 {
    let d_pc = match space.distance(p, cut) {
        Ok(d) => d,
        Err(_) => return 0.0,
    };
    if d_pc <= POINT_TOLERANCE {
        return 1.0 / space.order(p).unwrap_or(2) as f64;
    }
    let d_ps = space.distance(p, side).unwrap_or(f64::INFINITY);
    let d_cs = space.distance(cut, side).unwrap_or(f64::INFINITY);
    // On a tree, p lies on the far side of the cut exactly when the cut is
    // on the geodesic from p to the side marker.
    if (d_ps - (d_pc + d_cs)).abs() <= POINT_TOLERANCE {
        0.0
    } else {
        1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::{EdgeId, MetricTree, VertexId};

    fn star_space() -> SpaceRef {
        SpaceRef::from_tree(MetricTree::star(&[1.0, 1.0, 1.0]).unwrap())
    }

    #[test]
    fn free_arc_three_cases() {
        let space = star_space();
        let phi = TestFunction::region_indicator(
            &space,
            Region::FreeArc {
                edge: EdgeId(0),
                lo: 0.2,
                hi: 0.6,
            },
        )
        .unwrap();
        let inside = space.edge_point(EdgeId(0), 0.4).unwrap();
        assert_eq!(phi.evaluate(&space, &inside), 1.0);
        let boundary = space.edge_point(EdgeId(0), 0.2).unwrap();
        assert_eq!(phi.evaluate(&space, &boundary), 0.5);
        let outside = space.edge_point(EdgeId(0), 0.7).unwrap();
        assert_eq!(phi.evaluate(&space, &outside), 0.0);
        let other_edge = space.edge_point(EdgeId(1), 0.4).unwrap();
        assert_eq!(phi.evaluate(&space, &other_edge), 0.0);
    }

    #[test]
    fn free_arc_touching_branch_point() {
        let space = star_space();
        // Arc (0, 0.5) on edge 0: its closure contains the center, a
        // 3-branch point.
        let phi = TestFunction::region_indicator(
            &space,
            Region::FreeArc {
                edge: EdgeId(0),
                lo: 0.0,
                hi: 0.5,
            },
        )
        .unwrap();
        let center = space.vertex_point(VertexId(0)).unwrap();
        assert!((phi.evaluate(&space, &center) - 1.0 / 3.0).abs() < 1e-15);
        let leaf = space.vertex_point(VertexId(1)).unwrap();
        assert_eq!(phi.evaluate(&space, &leaf), 0.0);
    }

    #[test]
    fn complement_component_three_cases() {
        let space = star_space();
        let cut = space.vertex_point(VertexId(0)).unwrap();
        let side = space.edge_point(EdgeId(0), 0.5).unwrap();
        let phi = TestFunction::region_indicator(&space, Region::ComplementComponent { cut, side })
            .unwrap();
        assert_eq!(phi.evaluate(&space, &side), 1.0);
        let same_component = space.edge_point(EdgeId(0), 0.9).unwrap();
        assert_eq!(phi.evaluate(&space, &same_component), 1.0);
        let other = space.edge_point(EdgeId(1), 0.5).unwrap();
        assert_eq!(phi.evaluate(&space, &other), 0.0);
        assert!((phi.evaluate(&space, &cut) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn region_validation() {
        let space = star_space();
        assert!(TestFunction::region_indicator(
            &space,
            Region::FreeArc {
                edge: EdgeId(0),
                lo: 0.6,
                hi: 0.2
            }
        )
        .is_err());
        assert!(TestFunction::region_indicator(
            &space,
            Region::FreeArc {
                edge: EdgeId(9),
                lo: 0.1,
                hi: 0.2
            }
        )
        .is_err());
        let cut = space.vertex_point(VertexId(0)).unwrap();
        assert!(TestFunction::region_indicator(
            &space,
            Region::ComplementComponent { cut, side: cut }
        )
        .is_err());
    }

    #[test]
    fn indicator_three_case_rule_on_sampled_points() {
        // The rule checked against an independent membership predicate on
        // a 10^3-point sample, boundary points included.
        let space = star_space();
        let (lo, hi) = (0.25, 0.75);
        let phi = TestFunction::region_indicator(
            &space,
            Region::FreeArc {
                edge: EdgeId(2),
                lo,
                hi,
            },
        )
        .unwrap();
        let mut rng = crate::rng::SplitMix64::new(5);
        let mut points = Vec::new();
        for _ in 0..996 {
            points.push(space.sample_point(&mut rng));
        }
        points.push(space.edge_point(EdgeId(2), lo).unwrap());
        points.push(space.edge_point(EdgeId(2), hi).unwrap());
        points.push(space.vertex_point(VertexId(0)).unwrap());
        points.push(space.vertex_point(VertexId(3)).unwrap());
        for p in points {
            let v = phi.evaluate(&space, &p);
            let expected = match p.loc {
                crate::topology::Locator::OnEdge(EdgeId(2), t) => {
                    if (t - lo).abs() <= 1e-12 || (t - hi).abs() <= 1e-12 {
                        1.0 / space.order(&p).unwrap() as f64
                    } else if t > lo && t < hi {
                        1.0
                    } else {
                        0.0
                    }
                }
                _ => 0.0,
            };
            assert_eq!(v, expected, "at {}", p.describe());
        }
    }
}
